//! Sampled signals, the analytic test corpus, and CSV I/O.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

const TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidSignal(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("signal sample"));
        }
        Ok(Signal { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Signal { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// ⟨self, other⟩ = Δ^n Σ self · conj(other).
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell())
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal::from_parts(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    /// L² distance to `other` after the best unit-phase alignment.
    pub fn phase_distance(&self, other: &Signal) -> Result<f64> {
        let ip = self.inner(other)?;
        let gamma = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
        let d: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - gamma * b).norm_sqr()).sum();
        Ok((d * self.grid.cell()).sqrt())
    }

    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_modulus_diff(&self, other: &Signal) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max)
    }
}

/// Named analytic test signals. For n = 2 every descriptor is the tensor
/// product of the one-dimensional function along both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalSpec {
    Gaussian,
    Translated(f64),
    Modulated(f64),
    Hermite(usize),
    Chirped(f64),
    Dilated(f64),
}

impl SignalSpec {
    /// The six-signal corpus used by the equivalence checks.
    pub fn corpus() -> Vec<SignalSpec> {
        vec![
            SignalSpec::Gaussian,
            SignalSpec::Translated(1.0),
            SignalSpec::Modulated(1.0),
            SignalSpec::Hermite(1),
            SignalSpec::Hermite(2),
            SignalSpec::Chirped(0.5),
        ]
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSignal(m));
        match *self {
            SignalSpec::Translated(a) | SignalSpec::Modulated(a) | SignalSpec::Chirped(a) if !a.is_finite() => {
                bad(format!("{self}: parameter must be finite"))
            }
            SignalSpec::Dilated(l) if !(l.is_finite() && l > 0.0) => bad(format!("{self}: lambda must be positive")),
            SignalSpec::Hermite(k) if k > 100 => bad(format!("{self}: order too large")),
            _ => Ok(()),
        }
    }

    /// One-axis sample value.
    pub fn eval(&self, t: f64) -> Complex64 {
        let g = |s: f64| 2f64.powf(0.25) * (-std::f64::consts::PI * s * s).exp();
        match *self {
            SignalSpec::Gaussian => Complex64::new(g(t), 0.0),
            SignalSpec::Translated(x0) => Complex64::new(g(t - x0), 0.0),
            SignalSpec::Modulated(xi0) => Complex64::from_polar(g(t), 2.0 * std::f64::consts::PI * xi0 * t),
            SignalSpec::Hermite(k) => Complex64::new(hermite_function(k, t), 0.0),
            SignalSpec::Chirped(c) => Complex64::from_polar(g(t), std::f64::consts::PI * c * t * t),
            SignalSpec::Dilated(l) => Complex64::new(l.sqrt() * g(l * t), 0.0),
        }
    }

    fn time_density(&self, t: f64) -> f64 {
        self.eval(t).norm_sqr()
    }

    /// |f̂(ξ)|² of the one-axis function.
    fn freq_density(&self, xi: f64) -> f64 {
        let pi = std::f64::consts::PI;
        match *self {
            SignalSpec::Gaussian | SignalSpec::Translated(_) => 2f64.sqrt() * (-2.0 * pi * xi * xi).exp(),
            SignalSpec::Modulated(xi0) => 2f64.sqrt() * (-2.0 * pi * (xi - xi0).powi(2)).exp(),
            SignalSpec::Hermite(k) => hermite_function(k, xi).powi(2),
            SignalSpec::Chirped(c) => {
                // φ e^{iπct²} = 2^{1/4} e^{-π(1 - ic)t²}; |FT|² ∝ e^{-2π ξ²/(1 + c²)}
                let s = 1.0 + c * c;
                2f64.sqrt() / s.sqrt() * (-2.0 * pi * xi * xi / s).exp()
            }
            SignalSpec::Dilated(l) => 2f64.sqrt() / l * (-2.0 * pi * xi * xi / (l * l)).exp(),
        }
    }

    /// Energy of the one-axis function outside [lo, hi) of the time and frequency boxes.
    pub fn tail_mass(&self, grid: &Grid) -> (f64, f64) {
        let ht = grid.T() / 2.0;
        let hf = grid.N() as f64 / (2.0 * grid.T());
        let time = tail_integral(|t| self.time_density(t), ht);
        let freq = tail_integral(|x| self.freq_density(x), hf);
        (time, freq)
    }

    pub fn generate(&self, grid: &Grid) -> Result<Signal> {
        self.validate()?;
        let (time, freq) = self.tail_mass(grid);
        if time * grid.n() as f64 > TAIL_TOLERANCE || freq * grid.n() as f64 > TAIL_TOLERANCE {
            return Err(Error::SupportViolation(format!(
                "{self} leaves the grid (time tail {time:.2e}, frequency tail {freq:.2e})"
            )));
        }
        let axis: Vec<Complex64> = grid.axis().iter().map(|&t| self.eval(t)).collect();
        let values = match grid.n() {
            1 => axis,
            _ => {
                let mut v = Vec::with_capacity(grid.len());
                for a in &axis {
                    for b in &axis {
                        v.push(a * b);
                    }
                }
                v
            }
        };
        Signal::new(*grid, values)
    }
}

fn tail_integral(density: impl Fn(f64) -> f64, half: f64) -> f64 {
    let side = |sign: f64| {
        let len = 12.0;
        let steps = 6000;
        let h = len / steps as f64;
        let mut acc = density(sign * half) + density(sign * (half + len));
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * density(sign * (half + i as f64 * h));
        }
        acc * h / 3.0
    };
    side(1.0) + side(-1.0)
}

/// L²(ℝ)-normalized Hermite function adapted to e^{-πt²}: h_0 = φ and
/// ℱ h_k = (-i)^k h_k.
pub fn hermite_function(k: usize, t: f64) -> f64 {
    let u = (2.0 * std::f64::consts::PI).sqrt() * t;
    let mut prev = 0.0;
    let mut cur = 2f64.powf(0.25) * (-std::f64::consts::PI * t * t).exp();
    for j in 0..k {
        let next = (2.0 / (j + 1) as f64).sqrt() * u * cur - (j as f64 / (j + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn gaussian_window(grid: &Grid) -> Signal {
    SignalSpec::Gaussian.generate(grid).expect("gaussian fits every valid grid")
}

pub fn make_test_signal(grid: &Grid, spec: SignalSpec) -> Result<Signal> {
    spec.generate(grid)
}

impl fmt::Display for SignalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSpec::Gaussian => write!(f, "gaussian"),
            SignalSpec::Translated(a) => write!(f, "translated-gaussian({a})"),
            SignalSpec::Modulated(a) => write!(f, "modulated-gaussian({a})"),
            SignalSpec::Hermite(k) => write!(f, "hermite({k})"),
            SignalSpec::Chirped(a) => write!(f, "chirped-gaussian({a})"),
            SignalSpec::Dilated(a) => write!(f, "dilated-gaussian({a})"),
        }
    }
}

impl FromStr for SignalSpec {
    type Err = Error;

    /// Accepts `name`, `name(param)` and `name:param`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = if let Some(open) = s.find('(') {
            let close = s.rfind(')').filter(|&c| c > open).ok_or_else(|| Error::Parse(format!("unbalanced parentheses in '{s}'")))?;
            (&s[..open], Some(s[open + 1..close].trim()))
        } else if let Some((a, b)) = s.split_once(':') {
            (a, Some(b.trim()))
        } else {
            (s, None)
        };
        let num = |default: Option<f64>| -> Result<f64> {
            match arg {
                Some(a) => a.parse::<f64>().map_err(|_| Error::Parse(format!("bad parameter '{a}' in '{s}'"))),
                None => default.ok_or_else(|| Error::Parse(format!("'{s}' needs a parameter"))),
            }
        };
        let spec = match name.trim() {
            "gaussian" => SignalSpec::Gaussian,
            "translated-gaussian" | "translated" => SignalSpec::Translated(num(None)?),
            "modulated-gaussian" | "modulated" => SignalSpec::Modulated(num(None)?),
            "chirped-gaussian" | "chirped" => SignalSpec::Chirped(num(None)?),
            "dilated-gaussian" | "dilated" => SignalSpec::Dilated(num(None)?),
            "hermite" => {
                let a = arg.ok_or_else(|| Error::Parse(format!("'{s}' needs an order")))?;
                SignalSpec::Hermite(a.parse().map_err(|_| Error::Parse(format!("bad Hermite order '{a}'")))?)
            }
            other => return Err(Error::Parse(format!("unknown signal '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn save_signal(signal: &Signal, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    write_signal(signal, &mut out)?;
    fs::write(path, out)?;
    Ok(())
}

pub fn write_signal(signal: &Signal, out: &mut impl Write) -> Result<()> {
    let g = signal.grid();
    writeln!(out, "# {} {} {:?}", g.n(), g.N(), g.T())?;
    for (flat, v) in signal.values().iter().enumerate() {
        let idx = g.unravel(flat);
        for i in &idx[..g.n()] {
            write!(out, "{i} ")?;
        }
        writeln!(out, "{:.17e} {:.17e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn load_signal(path: &Path) -> Result<Signal> {
    parse_signal(&fs::read_to_string(path)?)
}

pub fn load_signal_on(path: &Path, grid: &Grid) -> Result<Signal> {
    let s = load_signal(path)?;
    if !s.grid().same_as(grid) {
        return Err(Error::GridMismatch);
    }
    Ok(s)
}

pub fn parse_signal(text: &str) -> Result<Signal> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty signal file".into()))?;
    let fields: Vec<&str> = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# n N T' header".into()))?
        .split_whitespace()
        .collect();
    if fields.len() != 3 {
        return Err(Error::Parse(format!("header needs 3 fields, got {}", fields.len())));
    }
    let n: usize = fields[0].parse().map_err(|_| Error::Parse(format!("bad n '{}'", fields[0])))?;
    let size: usize = fields[1].parse().map_err(|_| Error::Parse(format!("bad N '{}'", fields[1])))?;
    let side: f64 = fields[2].parse().map_err(|_| Error::Parse(format!("bad T '{}'", fields[2])))?;
    let grid = Grid::new(n, size, side)?;
    let mut values = vec![None; grid.len()];
    for (lineno, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != n + 2 {
            return Err(Error::Parse(format!("row {}: expected {} columns, got {}", lineno + 1, n + 2, cols.len())));
        }
        let mut idx = [0usize; 2];
        for a in 0..n {
            idx[a] = cols[a].parse().map_err(|_| Error::Parse(format!("row {}: bad index '{}'", lineno + 1, cols[a])))?;
            if idx[a] >= size {
                return Err(Error::Parse(format!("row {}: index {} out of range", lineno + 1, idx[a])));
            }
        }
        let re: f64 = cols[n].parse().map_err(|_| Error::Parse(format!("row {}: bad real part", lineno + 1)))?;
        let im: f64 = cols[n + 1].parse().map_err(|_| Error::Parse(format!("row {}: bad imaginary part", lineno + 1)))?;
        let flat = grid.ravel(&idx[..n]);
        if values[flat].replace(Complex64::new(re, im)).is_some() {
            return Err(Error::Parse(format!("row {}: duplicate index", lineno + 1)));
        }
    }
    let values: Option<Vec<Complex64>> = values.into_iter().collect();
    let values = values.ok_or_else(|| Error::Parse("missing rows".into()))?;
    Signal::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> Grid {
        Grid::new(1, 256, 8.0).unwrap()
    }

    #[test]
    fn gaussian_peak_and_norm() {
        let s = gaussian_window(&g1());
        assert!((s.values()[128].re - 1.189_207_115_002_721).abs() < 1e-12);
        assert!((s.l2_norm() - 1.0).abs() < 1e-6);
        let s2 = gaussian_window(&Grid::new(2, 64, 8.0).unwrap());
        assert!((s2.values()[32 * 64 + 32].re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn corpus_is_normalized() {
        for spec in SignalSpec::corpus().into_iter().chain([SignalSpec::Dilated(1.5), SignalSpec::Hermite(5)]) {
            let s = spec.generate(&g1()).unwrap();
            assert!((s.l2_norm() - 1.0).abs() < 1e-6, "{spec}: {}", s.l2_norm());
        }
    }

    #[test]
    fn translation_is_analytic() {
        let grid = g1();
        assert_eq!(SignalSpec::Translated(0.0).generate(&grid).unwrap(), gaussian_window(&grid));
        let s = SignalSpec::Translated(0.3).generate(&grid).unwrap();
        for (k, v) in s.values().iter().enumerate() {
            let t = grid.point(k) - 0.3;
            assert_eq!(v.re, 2f64.powf(0.25) * (-std::f64::consts::PI * t * t).exp());
        }
        let m = SignalSpec::Modulated(1.7).generate(&grid).unwrap();
        assert!(m.max_modulus_diff(&gaussian_window(&grid)) < 1e-15);
    }

    #[test]
    fn hermite_matches_explicit_forms() {
        let pi = std::f64::consts::PI;
        for &t in &[-1.3, -0.2, 0.0, 0.7, 2.1] {
            let phi = 2f64.powf(0.25) * (-pi * t * t).exp();
            let h1 = 2.0 * pi.sqrt() * t * phi;
            let h2 = (4.0 * pi * t * t - 1.0) / 2f64.sqrt() * phi;
            assert!((hermite_function(1, t) - h1).abs() < 1e-13);
            assert!((hermite_function(2, t) - h2).abs() < 1e-13);
        }
    }

    #[test]
    fn tails_are_rejected() {
        let small = Grid::new(1, 64, 4.0).unwrap();
        assert!(matches!(SignalSpec::Translated(1.8).generate(&small), Err(Error::SupportViolation(_))));
        assert!(matches!(SignalSpec::Modulated(7.5).generate(&small), Err(Error::SupportViolation(_))));
        assert!(SignalSpec::Translated(1.0).generate(&g1()).is_ok());
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!("gaussian".parse::<SignalSpec>().unwrap(), SignalSpec::Gaussian);
        assert_eq!("hermite(2)".parse::<SignalSpec>().unwrap(), SignalSpec::Hermite(2));
        assert_eq!("translated-gaussian:1.5".parse::<SignalSpec>().unwrap(), SignalSpec::Translated(1.5));
        assert_eq!("chirped-gaussian(0.5)".parse::<SignalSpec>().unwrap(), SignalSpec::Chirped(0.5));
        assert!("hermite".parse::<SignalSpec>().is_err());
        assert!("wavelet".parse::<SignalSpec>().is_err());
        assert!("dilated-gaussian(-1)".parse::<SignalSpec>().is_err());
        for spec in SignalSpec::corpus() {
            assert_eq!(spec.to_string().parse::<SignalSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_signal(""), Err(Error::Parse(_))));
        assert!(matches!(parse_signal("# 1 8 8\n0 1.0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_signal("# 1 8 8\n0 1.0 0.0\n"), Err(Error::Parse(_))));
    }
}
