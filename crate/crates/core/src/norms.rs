//! Modulation-space norms: the STFT integral and the rotation / torus functionals.
//!
//! All functionals report the p-th power. The group integrals use
//! ⟨f, ŜT_xφ⟩ = V_φ(Ŝ⁻¹f)(x, 0) and ⟨f, ŜM_ξφ⟩ = V_φ(Ŝ⁻¹f)(0, ξ), so each group
//! element costs one operator application and two slice evaluations.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::metaplectic::{apply_unitary_via, UnitaryRoute};
use crate::sampling::{haar_unitary_at, Group, SamplerConfig};
use crate::signal::{gaussian_window, Signal};
use crate::stft::{pairwise_sum, stft_fold, tree_reduce, SliceOperators};
use crate::symplectic::UnitaryMatrix;
use crate::transforms::{frft_kernel, FrftKernel};

/// Angles of the periodic trapezoid over U(1) and over the 1-D torus.
pub const CIRCLE_POINTS: usize = 64;
/// Angles per axis of the tensor trapezoid over the 2-D torus.
pub const TORUS_POINTS_2D: usize = 32;
/// Right-torus translates per axis averaged with each Haar sample (n = 2).
pub const ROTATION_COSET: usize = 8;
/// Points with some |coordinate| beyond this fraction of T/2 count as tail.
const TAIL_START: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Stft,
    Rotation,
    RotationFreq,
    Torus,
    TorusFreq,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Stft => "stft",
            Method::Rotation => "rotation",
            Method::RotationFreq => "rotation-freq",
            Method::Torus => "torus",
            Method::TorusFreq => "torus-freq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub method: Method,
    #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
    pub p: f64,
    pub value: f64,
    pub root_value: f64,
    pub stderr: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(rename = "T")]
    pub side: f64,
    pub seed: Option<u64>,
    pub samples: usize,
    /// Share of the weighted sum coming from the outer band of the box.
    pub tail_fraction: f64,
}

fn ser_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

fn de_exponent<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(t) => t.parse::<f64>().map_err(serde::de::Error::custom),
    }
}

impl NormReport {
    fn new(method: Method, p: f64, value: f64, stderr: f64, grid: &Grid, seed: Option<u64>, samples: usize, tail: f64) -> Self {
        let root_value = if p.is_finite() { value.powf(1.0 / p) } else { value };
        NormReport {
            method,
            p,
            value,
            root_value,
            stderr,
            n: grid.n(),
            size: grid.N(),
            side: grid.T(),
            seed,
            samples,
            tail_fraction: tail,
        }
    }
}

pub fn check_exponent(p: f64, allow_inf: bool) -> Result<()> {
    if p.is_nan() || p < 1.0 || (p.is_infinite() && !allow_inf) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// ‖f‖^p_{M^p} as the Riemann sum (Δ_xΔ_ξ)^n Σ|V_φf|^p, or the max modulus for p = ∞.
pub fn mp_norm_stft(f: &Signal, p: f64) -> Result<NormReport> {
    Ok(mp_norm_stft_many(f, &[p])?.remove(0))
}

/// Several exponents from one pass over the STFT.
pub fn mp_norm_stft_many(f: &Signal, ps: &[f64]) -> Result<Vec<NormReport>> {
    for &p in ps {
        check_exponent(p, true)?;
    }
    let grid = *f.grid();
    let phi = gaussian_window(&grid);
    let finite: Vec<f64> = ps.iter().copied().filter(|p| p.is_finite()).collect();
    let outer = outer_mask(&grid, false);
    let init = || (vec![0.0; finite.len()], vec![0.0; finite.len()], 0.0f64);
    let (sums, tails, max) = stft_fold(
        f,
        &phi,
        init,
        |acc, a, row| {
            for (k, &p) in finite.iter().enumerate() {
                let s = pairwise_sum(&row.iter().map(|v| v.norm().powf(p)).collect::<Vec<_>>());
                acc.0[k] += s;
                if outer[a] {
                    acc.1[k] += s;
                }
            }
            acc.2 = row.iter().map(|v| v.norm()).fold(acc.2, f64::max);
        },
        |mut a, b| {
            for k in 0..a.0.len() {
                a.0[k] += b.0[k];
                a.1[k] += b.1[k];
            }
            a.2 = a.2.max(b.2);
            a
        },
    )?;
    let cell = grid.phase_cell();
    let mut k = 0;
    Ok(ps
        .iter()
        .map(|&p| {
            if p.is_finite() {
                let r = NormReport::new(Method::Stft, p, cell * sums[k], 0.0, &grid, None, 1, ratio(tails[k], sums[k]));
                k += 1;
                r
            } else {
                NormReport::new(Method::Stft, p, max, 0.0, &grid, None, 1, 0.0)
            }
        })
        .collect())
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// Space-side (x) or frequency-side (ξ) slice of V_φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Space,
    Frequency,
}

fn coords(grid: &Grid, flat: usize, side: Side) -> [f64; 2] {
    let idx = grid.unravel(flat);
    let at = |k: usize| match side {
        Side::Space => grid.point(k),
        Side::Frequency => grid.freq_point(k),
    };
    if grid.n() == 1 {
        [at(idx[0]), 0.0]
    } else {
        [at(idx[0]), at(idx[1])]
    }
}

fn outer_mask(grid: &Grid, freq: bool) -> Vec<bool> {
    let side = if freq { Side::Frequency } else { Side::Space };
    let half = if freq { grid.dual().T() } else { grid.T() } / 2.0;
    (0..grid.len())
        .map(|k| coords(grid, k, side)[..grid.n()].iter().any(|c| c.abs() >= TAIL_START * half))
        .collect()
}

/// Lattice weights for ∫w(x)|·|^p dx: w = |x|^n (rotation) or |x₁⋯x_n| (torus), times the
/// cell, plus the tail mask. A factor |x_i| has a kink at 0 where the plain Riemann sum
/// is off by −h²/6·g(0); that Euler–Maclaurin term is added to the weight at x_i = 0.
struct Weights {
    w: Vec<f64>,
    outer: Vec<bool>,
}

impl Weights {
    fn new(grid: &Grid, group: Group, side: Side) -> Self {
        let n = grid.n();
        let h = match side {
            Side::Space => grid.spacing(),
            Side::Frequency => grid.freq_spacing(),
        };
        let kinked = |c: f64| if c == 0.0 { h * h / 6.0 } else { h * c.abs() };
        let w = (0..grid.len())
            .map(|k| {
                let c = &coords(grid, k, side)[..n];
                match (group, n) {
                    (Group::Rotation, 2) => (c[0] * c[0] + c[1] * c[1]) * h * h,
                    _ => c.iter().map(|&v| kinked(v)).product(),
                }
            })
            .collect();
        Weights { w, outer: outer_mask(grid, side == Side::Frequency) }
    }
}

/// Per-exponent weighted sums over one slice, their tail parts, and the slice max.
#[derive(Debug, Clone)]
struct Stats {
    sums: Vec<f64>,
    tails: Vec<f64>,
    max: f64,
}

impl Stats {
    fn zero(len: usize) -> Self {
        Stats { sums: vec![0.0; len], tails: vec![0.0; len], max: 0.0 }
    }

    fn of(slice: &[Complex64], w: &Weights, ps: &[f64]) -> Self {
        let modulus: Vec<f64> = slice.iter().map(|v| v.norm()).collect();
        Stats::of_modulus(&modulus, w, ps)
    }

    fn of_modulus(modulus: &[f64], w: &Weights, ps: &[f64]) -> Self {
        let mut st = Stats::zero(ps.len());
        for (k, &p) in ps.iter().enumerate() {
            let terms: Vec<f64> = modulus.iter().zip(&w.w).map(|(m, w)| w * m.powf(p)).collect();
            let tail: Vec<f64> = terms.iter().zip(&w.outer).map(|(t, &o)| if o { *t } else { 0.0 }).collect();
            st.sums[k] = pairwise_sum(&terms);
            st.tails[k] = pairwise_sum(&tail);
        }
        st.max = modulus.iter().copied().fold(0.0, f64::max);
        st
    }

    fn combine(mut self, other: Stats) -> Stats {
        for k in 0..self.sums.len() {
            self.sums[k] += other.sums[k];
            self.tails[k] += other.tails[k];
        }
        self.max = self.max.max(other.max);
        self
    }

    fn scaled(mut self, c: f64) -> Stats {
        for k in 0..self.sums.len() {
            self.sums[k] *= c;
            self.tails[k] *= c;
        }
        self
    }
}

fn sum_stats(items: Vec<Stats>, len: usize) -> Stats {
    tree_reduce(items, &Stats::combine).unwrap_or_else(|| Stats::zero(len))
}

/// Slices after F_{−γ_j} on each axis, γ_j = 2πj/c. For n = 2 the kernels are folded
/// into the slice matrices; for n = 1 they are applied to the signal.
struct CosetSlices {
    ops: SliceOperators,
    kernels: Vec<Arc<FrftKernel>>,
    space: Vec<Blocks>,
    freq: Vec<Blocks>,
}

/// A complex matrix L kept as Lᵀ (complex) and as the real block [[Re L, −Im L], [Im L, Re L]].
struct Blocks {
    transposed: DMatrix<Complex64>,
    real: DMatrix<f64>,
}

impl Blocks {
    fn new(l: DMatrix<Complex64>) -> Self {
        let (r, c) = l.shape();
        let real = DMatrix::from_fn(2 * r, 2 * c, |i, j| {
            let v = l[(i % r, j % c)];
            match (i < r, j < c) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        });
        Blocks { transposed: l.transpose(), real }
    }
}

/// Modulus of L·P for the block form of L and P stacked as [Re P; Im P], row-major.
fn block_product_modulus(l: &Blocks, stacked: &DMatrix<f64>) -> Vec<f64> {
    let out = &l.real * stacked;
    let r = out.nrows() / 2;
    let mut m = Vec::with_capacity(r * out.ncols());
    for i in 0..r {
        for j in 0..out.ncols() {
            m.push(out[(i, j)].hypot(out[(i + r, j)]));
        }
    }
    m
}

impl CosetSlices {
    fn new(grid: &Grid, count: usize) -> Result<Self> {
        let ops = SliceOperators::new(grid);
        let size = grid.N();
        let kernels = (0..count).map(|j| frft_kernel(grid, -TAU * j as f64 / count as f64)).collect::<Result<Vec<_>>>()?;
        let (mut space, mut freq) = (Vec::new(), Vec::new());
        if grid.n() == 2 {
            for k in &kernels {
                let m = DMatrix::from_row_slice(size, size, &k.matrix());
                space.push(Blocks::new(&ops.x_slice * &m));
                freq.push(Blocks::new(&ops.xi_slice * &m));
            }
        }
        Ok(CosetSlices { ops, kernels, space, freq })
    }

    /// (space, frequency) slices of F_{−γ_j}h for n = 1.
    fn line_slices(&self, h: &Signal, j: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let g = Signal::from_parts(*h.grid(), self.kernels[j].apply_line(h.values()));
        self.ops.slices(&g)
    }

    /// Mean stats over the c^n torus translates t(γ)⁻¹ applied to h.
    fn mean_stats(&self, h: &Signal, ws: &(Weights, Weights), ps: &[f64]) -> (Stats, Stats) {
        let grid = h.grid();
        let size = grid.N();
        let c = self.kernels.len();
        let norm = 1.0 / c.pow(grid.n() as u32) as f64;
        if grid.n() == 1 {
            let items: Vec<(Stats, Stats)> = (0..c)
                .into_par_iter()
                .map(|j| {
                    let (xs, qs) = self.line_slices(h, j);
                    (Stats::of(&xs, &ws.0, ps), Stats::of(&qs, &ws.1, ps))
                })
                .collect();
            let (a, b): (Vec<Stats>, Vec<Stats>) = items.into_iter().unzip();
            return (sum_stats(a, ps.len()).scaled(norm), sum_stats(b, ps.len()).scaled(norm));
        }
        let hm = DMatrix::from_row_slice(size, size, h.values());
        let run = |mats: &[Blocks], w: &Weights| -> Stats {
            let right: Vec<DMatrix<f64>> = mats
                .iter()
                .map(|b| {
                    let p = &hm * &b.transposed;
                    DMatrix::from_fn(2 * size, size, |i, j| if i < size { p[(i, j)].re } else { p[(i - size, j)].im })
                })
                .collect();
            let mut items = Vec::with_capacity(c * c);
            for a in mats {
                for r in &right {
                    items.push(Stats::of_modulus(&block_product_modulus(a, r), w, ps));
                }
            }
            sum_stats(items, ps.len()).scaled(norm)
        };
        (run(&self.space, &ws.0), run(&self.freq, &ws.1))
    }
}

/// All functionals of one group for one signal: space and frequency sides for each
/// finite exponent, plus both sups.
#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub space: Vec<NormReport>,
    pub frequency: Vec<NormReport>,
    pub sup_space: NormReport,
    pub sup_frequency: NormReport,
}

impl Sweep {
    pub fn space_at(&self, p: f64) -> Option<&NormReport> {
        self.space.iter().find(|r| r.p == p)
    }

    pub fn frequency_at(&self, p: f64) -> Option<&NormReport> {
        self.frequency.iter().find(|r| r.p == p)
    }
}

fn check_grid(f: &Signal) -> Result<()> {
    let n = f.grid().n();
    if n != 1 && n != 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be 1 or 2")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    group: Group,
    grid: &Grid,
    ps: &[f64],
    space: &Stats,
    freq: &Stats,
    stderr: (&[f64], &[f64]),
    seed: Option<u64>,
    samples: usize,
) -> Sweep {
    let (ms, mf) = match group {
        Group::Rotation => (Method::Rotation, Method::RotationFreq),
        Group::Torus => (Method::Torus, Method::TorusFreq),
    };
    let build = |m: Method, st: &Stats, se: &[f64]| -> Vec<NormReport> {
        ps.iter()
            .enumerate()
            .map(|(k, &p)| NormReport::new(m, p, st.sums[k], se[k], grid, seed, samples, ratio(st.tails[k], st.sums[k])))
            .collect()
    };
    Sweep {
        space: build(ms, space, stderr.0),
        frequency: build(mf, freq, stderr.1),
        sup_space: NormReport::new(ms, f64::INFINITY, space.max, 0.0, grid, seed, samples, 0.0),
        sup_frequency: NormReport::new(mf, f64::INFINITY, freq.max, 0.0, grid, seed, samples, 0.0),
    }
}

fn weights(grid: &Grid, group: Group) -> (Weights, Weights) {
    (Weights::new(grid, group, Side::Space), Weights::new(grid, group, Side::Frequency))
}

/// Torus functionals: 64-point trapezoid over θ (n = 1), 32×32 tensor trapezoid (n = 2),
/// measure dθ₁⋯dθ_n of total mass (2π)^n.
pub fn torus_sweep(f: &Signal, ps: &[f64]) -> Result<Sweep> {
    check_grid(f)?;
    for &p in ps {
        check_exponent(p, false)?;
    }
    let grid = *f.grid();
    let count = if grid.n() == 1 { CIRCLE_POINTS } else { TORUS_POINTS_2D };
    let coset = CosetSlices::new(&grid, count)?;
    let (s, q) = coset.mean_stats(f, &weights(&grid, Group::Torus), ps);
    let mass = TAU.powi(grid.n() as i32);
    let zeros = vec![0.0; ps.len()];
    let samples = count.pow(grid.n() as u32);
    Ok(assemble(Group::Torus, &grid, ps, &s.scaled(mass), &q.scaled(mass), (&zeros, &zeros), None, samples))
}

/// Rotation functionals over Haar-normalized U(n).
///
/// n = 1: U(1) is a circle; 64-point trapezoid, each element applied with
/// `apply_unitary_via`, stderr 0. n = 2: `cfg.count` Haar samples U_k, each averaged
/// over `coset`² right torus translates U_k·t (still Haar distributed); the
/// operator is applied with the Euler route.
pub fn rotation_sweep(f: &Signal, ps: &[f64], cfg: &SamplerConfig, coset: usize) -> Result<Sweep> {
    check_grid(f)?;
    for &p in ps {
        check_exponent(p, false)?;
    }
    if coset == 0 {
        return Err(Error::InvalidArgument("coset size must be at least 1".into()));
    }
    let grid = *f.grid();
    let ws = weights(&grid, Group::Rotation);
    let zeros = vec![0.0; ps.len()];
    if grid.n() == 1 {
        let ops = SliceOperators::new(&grid);
        let items: Vec<Result<(Stats, Stats)>> = (0..CIRCLE_POINTS)
            .into_par_iter()
            .map(|j| {
                let u = UnitaryMatrix::scalar(1, TAU * j as f64 / CIRCLE_POINTS as f64);
                let g = apply_unitary_via(&u.adjoint(), f, UnitaryRoute::QuadraticFourier)?;
                let (xs, qs) = ops.slices(&g);
                Ok((Stats::of(&xs, &ws.0, ps), Stats::of(&qs, &ws.1, ps)))
            })
            .collect();
        let (s, q) = split(items, ps.len())?;
        let w = 1.0 / CIRCLE_POINTS as f64;
        return Ok(assemble(Group::Rotation, &grid, ps, &s.scaled(w), &q.scaled(w), (&zeros, &zeros), None, CIRCLE_POINTS));
    }
    let slices = CosetSlices::new(&grid, coset)?;
    let per_sample: Vec<Result<(Stats, Stats)>> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|k| {
            let u = haar_unitary_at(2, cfg.seed, k);
            let h = apply_unitary_via(&u.adjoint(), f, UnitaryRoute::Euler)?;
            Ok(slices.mean_stats(&h, &ws, ps))
        })
        .collect();
    let per_sample: Vec<(Stats, Stats)> = per_sample.into_iter().collect::<Result<_>>()?;
    let k = per_sample.len() as f64;
    let errs = |pick: fn(&(Stats, Stats)) -> &Stats| -> Vec<f64> {
        (0..ps.len())
            .map(|i| {
                let vals: Vec<f64> = per_sample.iter().map(|s| pick(s).sums[i]).collect();
                std_error(&vals)
            })
            .collect()
    };
    let (se_s, se_q) = (errs(|s| &s.0), errs(|s| &s.1));
    let (s, q) = split(per_sample.into_iter().map(Ok).collect(), ps.len())?;
    Ok(assemble(Group::Rotation, &grid, ps, &s.scaled(1.0 / k), &q.scaled(1.0 / k), (&se_s, &se_q), Some(cfg.seed), cfg.count))
}

fn split(items: Vec<Result<(Stats, Stats)>>, len: usize) -> Result<(Stats, Stats)> {
    let (mut a, mut b) = (Vec::with_capacity(items.len()), Vec::with_capacity(items.len()));
    for it in items {
        let (x, y) = it?;
        a.push(x);
        b.push(y);
    }
    Ok((sum_stats(a, len), sum_stats(b, len)))
}

/// Standard error of the mean.
pub fn std_error(vals: &[f64]) -> f64 {
    let k = vals.len() as f64;
    if vals.len() < 2 {
        return 0.0;
    }
    let mean = pairwise_sum(vals) / k;
    let var = pairwise_sum(&vals.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>()) / (k - 1.0);
    (var / k).sqrt()
}

pub fn rotation_functional(f: &Signal, p: f64, cfg: &SamplerConfig) -> Result<NormReport> {
    Ok(rotation_sweep(f, &[p], cfg, ROTATION_COSET)?.space.remove(0))
}

pub fn rotation_functional_freq(f: &Signal, p: f64, cfg: &SamplerConfig) -> Result<NormReport> {
    Ok(rotation_sweep(f, &[p], cfg, ROTATION_COSET)?.frequency.remove(0))
}

pub fn torus_functional(f: &Signal, p: f64) -> Result<NormReport> {
    Ok(torus_sweep(f, &[p])?.space.remove(0))
}

pub fn torus_functional_freq(f: &Signal, p: f64) -> Result<NormReport> {
    Ok(torus_sweep(f, &[p])?.frequency.remove(0))
}

/// sup over sampled U and lattice x of |⟨f, ŜT_xφ⟩|; one group element per Haar sample for n = 2.
pub fn sup_rotation(f: &Signal, cfg: &SamplerConfig) -> Result<NormReport> {
    Ok(rotation_sweep(f, &[], cfg, 1)?.sup_space)
}

pub fn sup_rotation_freq(f: &Signal, cfg: &SamplerConfig) -> Result<NormReport> {
    Ok(rotation_sweep(f, &[], cfg, 1)?.sup_frequency)
}

pub fn sup_torus(f: &Signal) -> Result<NormReport> {
    Ok(torus_sweep(f, &[])?.sup_space)
}

pub fn sup_torus_freq(f: &Signal) -> Result<NormReport> {
    Ok(torus_sweep(f, &[])?.sup_frequency)
}

/// Location (x, θ) of the largest |⟨f, F_θT_xφ⟩| over the n = 1 quadrature, with the value.
pub fn torus_argmax(f: &Signal) -> Result<(f64, f64, f64)> {
    let grid = *f.grid();
    if grid.n() != 1 {
        return Err(Error::InvalidArgument("torus_argmax needs n = 1".into()));
    }
    let coset = CosetSlices::new(&grid, CIRCLE_POINTS)?;
    let mut best = (0.0, 0.0, -1.0);
    for j in 0..CIRCLE_POINTS {
        let (s, _) = coset.line_slices(f, j);
        for (k, z) in s.iter().enumerate() {
            if z.norm() > best.2 {
                best = (grid.point(k), TAU * j as f64 / CIRCLE_POINTS as f64, z.norm());
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SignalSpec;
    use std::f64::consts::PI;

    fn g1() -> Grid {
        Grid::default_for(1).unwrap()
    }

    #[test]
    fn gaussian_stft_baselines() {
        let phi = gaussian_window(&g1());
        let r = mp_norm_stft_many(&phi, &[2.0, 1.0, f64::INFINITY]).unwrap();
        assert!((r[0].value - 1.0).abs() < 1e-3, "{}", r[0].value);
        assert!((r[1].value - 2.0).abs() < 1e-2, "{}", r[1].value);
        assert!((r[2].value - 1.0).abs() < 1e-6, "{}", r[2].value);
        assert!(mp_norm_stft(&phi, 0.5).is_err());
        assert!(mp_norm_stft(&phi, f64::NAN).is_err());
    }

    #[test]
    fn gaussian_group_constants_n1() {
        let phi = gaussian_window(&g1());
        let cfg = SamplerConfig::new(1, 1).unwrap();
        let rot = rotation_sweep(&phi, &[2.0], &cfg, 1).unwrap();
        assert!((rot.space[0].value - 1.0 / PI).abs() < 1e-3);
        assert!((rot.frequency[0].value - 1.0 / PI).abs() < 1e-3);
        assert!((rot.sup_space.value - 1.0).abs() < 1e-4);
        let tor = torus_sweep(&phi, &[2.0, 1.0]).unwrap();
        assert!((tor.space[0].value - 2.0).abs() < 1e-3, "{:?}", tor.space);
        assert!((tor.space[1].value - 4.0).abs() < 1e-2);
        assert!(tor.space[0].tail_fraction < 1e-8);
        assert!(torus_functional(&phi, f64::INFINITY).is_err());
    }

    #[test]
    fn report_json_roundtrip() {
        let phi = gaussian_window(&g1());
        let r = mp_norm_stft(&phi, f64::INFINITY).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"p\":\"inf\"") && s.contains("\"N\":256"));
        let back: NormReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn translated_peak_location() {
        let f = SignalSpec::Translated(1.0).generate(&g1()).unwrap();
        let (x, theta, _) = torus_argmax(&f).unwrap();
        // F_π is the reflection, so (−1, π) ties with (1, 0).
        let at_zero = (x - 1.0).abs() < 0.1 && theta < 1e-9;
        let at_pi = (x + 1.0).abs() < 0.1 && (theta - PI).abs() < 1e-9;
        assert!(at_zero || at_pi, "{x} {theta}");
    }
}
