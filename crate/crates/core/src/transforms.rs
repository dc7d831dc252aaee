//! Centered unitary DFT and the partial fractional Fourier transform.
//!
//! The FrFT along one axis is the integral operator
//! c(θ)|sin θ|^{-1/2} ∫ e^{(πi/sin θ)(cos θ x² − 2xx' + cos θ x'²)} ψ(x') dx'
//! discretized by a Riemann sum over an m-times oversampled copy of the input.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{centered_dft_inplace, upsample};
use crate::grid::Grid;
use crate::signal::Signal;

/// Angles within this distance of a multiple of π are snapped to the identity or the reflection.
pub const DELTA_SNAP: f64 = 1e-3;

const EXACT_QUARTER: f64 = 1e-12;

pub(crate) fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis >= grid.n() {
        return Err(Error::InvalidAxis { axis, n: grid.n() });
    }
    Ok(())
}

/// Apply `f` to every one-dimensional line of `values` along `axis`.
pub(crate) fn map_lines(grid: &Grid, values: &[Complex64], axis: usize, f: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Vec<Complex64> {
    let n = grid.N();
    if grid.n() == 1 {
        return f(values);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for outer in 0..n {
        if axis == 1 {
            let row = &values[outer * n..(outer + 1) * n];
            out[outer * n..(outer + 1) * n].copy_from_slice(&f(row));
        } else {
            for i in 0..n {
                line[i] = values[i * n + outer];
            }
            for (i, v) in f(&line).into_iter().enumerate() {
                out[i * n + outer] = v;
            }
        }
    }
    out
}

fn dft_line(line: &[Complex64], spacing: f64, inverse: bool) -> Vec<Complex64> {
    let mut buf = line.to_vec();
    centered_dft_inplace(&mut buf, inverse);
    for v in &mut buf {
        *v *= spacing;
    }
    buf
}

/// Sampled continuous Fourier transform along `axis`: F(ξ_k) = Δ Σ_j f(t_j) e^{−2πi t_j ξ_k}.
/// The output lives on the dual lattice (spacing 1/T). For n = 2 the two axes must share
/// a lattice, so partial transforms require a self-dual grid.
pub fn dft_centered(signal: &Signal, axis: usize) -> Result<Signal> {
    let grid = signal.grid();
    check_axis(grid, axis)?;
    if grid.n() == 2 && !grid.is_self_dual() {
        return Err(Error::InvalidGrid("partial DFT of an n = 2 signal needs a self-dual grid".into()));
    }
    let values = map_lines(grid, signal.values(), axis, |l| dft_line(l, grid.spacing(), false));
    Ok(Signal::from_parts(grid.dual(), values))
}

/// Inverse of [`dft_centered`]; the input is read on the dual lattice.
pub fn idft_centered(signal: &Signal, axis: usize) -> Result<Signal> {
    let grid = signal.grid();
    check_axis(grid, axis)?;
    if grid.n() == 2 && !grid.is_self_dual() {
        return Err(Error::InvalidGrid("partial DFT of an n = 2 signal needs a self-dual grid".into()));
    }
    let values = map_lines(grid, signal.values(), axis, |l| dft_line(l, grid.spacing(), true));
    Ok(Signal::from_parts(grid.dual(), values))
}

pub(crate) fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Phase c(θ) making F_a F_b = F_{a+b} and F_{π/2} = ℱ.
pub(crate) fn frft_phase(theta: f64) -> Complex64 {
    let r = reduce_angle(theta);
    let arg = if r < PI { r / 2.0 - PI / 4.0 } else { r / 2.0 - 3.0 * PI / 4.0 };
    Complex64::from_polar(1.0, arg)
}

/// Smallest power-of-two oversampling that pushes kernel aliases of the output beyond
/// the phase-space box, for an operator whose B block has smallest singular value `sigma`.
pub(crate) fn oversampling(size: usize, side: f64, sigma: f64, dims: usize) -> usize {
    let half_t = side / 2.0;
    let half_f = size as f64 / (2.0 * side);
    let radius = (dims as f64).sqrt() * (half_t * half_t + half_f * half_f).sqrt();
    let need = half_t + radius;
    let mut m = 1;
    while sigma * (m as f64) * (size as f64) / side <= need {
        m *= 2;
    }
    m
}

#[derive(Debug, Clone)]
enum Step {
    Reflect,
    Dft { inverse: bool },
    Dense { m: usize, entries: Vec<Complex64> },
}

/// One-axis FrFT operator for a fixed angle on an (N, T) lattice.
#[derive(Debug, Clone)]
pub struct FrftKernel {
    theta: f64,
    size: usize,
    side: f64,
    steps: Vec<Step>,
}

impl FrftKernel {
    pub fn new(grid: &Grid, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        let size = grid.N();
        let side = grid.T();
        let self_dual = grid.is_self_dual();
        let r = reduce_angle(theta);
        let near = |a: f64| (r - a).abs() < DELTA_SNAP;
        let quarter = |a: f64| (r - a).abs() < EXACT_QUARTER;
        let kernel = |a: f64| dense_step(size, side, a);
        let steps = if near(0.0) || near(TAU) {
            Vec::new()
        } else if near(PI) {
            vec![Step::Reflect]
        } else if self_dual && quarter(PI / 2.0) {
            vec![Step::Dft { inverse: false }]
        } else if self_dual && quarter(3.0 * PI / 2.0) {
            vec![Step::Dft { inverse: true }]
        } else if r.sin().abs() >= FRAC_1_SQRT_2 {
            vec![kernel(r)]
        } else {
            let first = if self_dual { Step::Dft { inverse: false } } else { kernel(PI / 2.0) };
            vec![first, kernel(reduce_angle(r - PI / 2.0))]
        };
        Ok(FrftKernel { theta: r, size, side, steps })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply_line(&self, line: &[Complex64]) -> Vec<Complex64> {
        let spacing = self.side / self.size as f64;
        let mut cur = line.to_vec();
        for step in &self.steps {
            cur = match step {
                Step::Reflect => (0..self.size).map(|k| cur[(self.size - k) % self.size]).collect(),
                Step::Dft { inverse } => dft_line(&cur, spacing, *inverse),
                Step::Dense { m, entries } => {
                    let fine = upsample(&cur, *m);
                    let width = fine.len();
                    entries.chunks_exact(width).map(|row| row.iter().zip(&fine).map(|(k, v)| k * v).sum()).collect()
                }
            };
        }
        cur
    }

    /// Effective N×N matrix, row-major.
    pub fn matrix(&self) -> Vec<Complex64> {
        let n = self.size;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.apply_line(&e);
            e[j] = Complex64::new(0.0, 0.0);
            for (i, v) in col.into_iter().enumerate() {
                m[i * n + j] = v;
            }
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }
}

fn dense_step(size: usize, side: f64, theta: f64) -> Step {
    let (s, c) = theta.sin_cos();
    let m = oversampling(size, side, s.abs(), 1);
    let spacing = side / size as f64;
    let fine = spacing / m as f64;
    let width = m * size;
    let amp = frft_phase(theta) * (s.abs().powf(-0.5) * fine);
    let out_pts: Vec<f64> = (0..size).map(|i| (i as f64 - (size / 2) as f64) * spacing).collect();
    let in_pts: Vec<f64> = (0..width).map(|l| (l as f64 - (width / 2) as f64) * fine).collect();
    let in_chirp: Vec<Complex64> = in_pts.iter().map(|&y| Complex64::from_polar(1.0, PI * c / s * y * y)).collect();
    let mut entries = Vec::with_capacity(size * width);
    for &x in &out_pts {
        let out_chirp = amp * Complex64::from_polar(1.0, PI * c / s * x * x);
        for (l, &y) in in_pts.iter().enumerate() {
            entries.push(out_chirp * in_chirp[l] * Complex64::from_polar(1.0, -TAU * x * y / s));
        }
    }
    Step::Dense { m, entries }
}

type CacheKey = (usize, u64, u64);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<FrftKernel>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<FrftKernel>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

const CACHE_LIMIT: usize = 256;

/// Shared kernel for (grid, θ); concurrent readers, serialized writers.
pub fn frft_kernel(grid: &Grid, theta: f64) -> Result<Arc<FrftKernel>> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let key = (grid.N(), grid.T().to_bits(), reduce_angle(theta).to_bits());
    if let Some(k) = cache().read().expect("kernel cache poisoned").get(&key) {
        return Ok(k.clone());
    }
    let kernel = Arc::new(FrftKernel::new(grid, theta)?);
    let mut w = cache().write().expect("kernel cache poisoned");
    if w.len() >= CACHE_LIMIT {
        w.clear();
    }
    Ok(w.entry(key).or_insert(kernel).clone())
}

/// Partial FrFT of angle θ along `axis`.
pub fn frft(signal: &Signal, axis: usize, theta: f64) -> Result<Signal> {
    let grid = signal.grid();
    check_axis(grid, axis)?;
    let kernel = frft_kernel(grid, theta)?;
    if kernel.is_identity() {
        return Ok(signal.clone());
    }
    let values = map_lines(grid, signal.values(), axis, |l| kernel.apply_line(l));
    Ok(Signal::from_parts(*grid, values))
}

/// min_γ ‖F_{θ₂}F_{θ₁}s − γ F_{θ₁+θ₂}s‖₂ over unit phases γ.
pub fn frft_compose_check(theta1: f64, theta2: f64, signal: &Signal) -> Result<f64> {
    let two = frft(&frft(signal, 0, theta1)?, 0, theta2)?;
    let one = frft(signal, 0, theta1 + theta2)?;
    two.phase_distance(&one)
}

/// max |⟨K h_i, K h_j⟩ − δ_ij| over the first `count` Hermite functions (n = 1 grid).
pub fn hermite_unitarity_defect(grid: &Grid, theta: f64, count: usize) -> Result<f64> {
    let kernel = FrftKernel::new(grid, theta)?;
    let axis = grid.axis();
    let images: Vec<Vec<Complex64>> = (0..count)
        .map(|k| {
            let h: Vec<Complex64> = axis.iter().map(|&t| Complex64::new(crate::signal::hermite_function(k, t), 0.0)).collect();
            kernel.apply_line(&h)
        })
        .collect();
    let mut worst = 0.0f64;
    for i in 0..count {
        for j in 0..count {
            let g: Complex64 = images[i].iter().zip(&images[j]).map(|(a, b)| a.conj() * b).sum::<Complex64>() * grid.spacing();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}
