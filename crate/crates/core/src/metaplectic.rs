//! Metaplectic operators on sampled signals.
//!
//! `apply_unitary(U)` realizes the operator whose phase-space matrix is
//! `operator_matrix(U)` = ι(Ū); with this convention a diagonal U = diag(e^{iθ_j})
//! acts as the partial FrFTs F_{θ_j} and U = iI acts as the Fourier transform.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{centered_dft_inplace, fft_inplace, upsample};
use crate::grid::Grid;
use crate::signal::Signal;
use crate::stft::{stft, stft_row};
use crate::symplectic::{b_sigma_min, generating_function_of, operator_matrix, GeneratingFunction, TorusElement, UnitaryMatrix};
use crate::transforms::{frft, oversampling};

const TAIL_BAND: f64 = 1.0 / 16.0;
const TAIL_TOL: f64 = 1e-8;
const MIN_SIGMA: f64 = 0.3;
const MAX_OVERSAMPLE_1D: usize = 64;
const MAX_OVERSAMPLE_2D: usize = 4;

/// Number of torus shifts θ* = jπ/16 tried by the factorization.
pub const SHIFT_CANDIDATES: usize = 16;

/// Fraction of the energy in the outer 1/16 of the box along any axis.
pub fn edge_energy_fraction(s: &Signal) -> f64 {
    let grid = s.grid();
    let lim = grid.T() / 2.0 * (1.0 - 2.0 * TAIL_BAND);
    let total: f64 = s.values().iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = s
        .values()
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let idx = grid.unravel(*k);
            idx[..grid.n()].iter().any(|&i| grid.point(i).abs() > lim)
        })
        .map(|(_, v)| v.norm_sqr())
        .sum();
    edge / total
}

/// Discrete quadratic Fourier transform Ŝ_{W,m} on a grid, applied matrix-free.
#[derive(Debug, Clone)]
pub struct MetaplecticKernel {
    source: GeneratingFunction,
    grid: Grid,
    oversample: usize,
}

impl MetaplecticKernel {
    pub fn new(w: &GeneratingFunction, grid: &Grid) -> Result<Self> {
        if w.n() != grid.n() {
            return Err(Error::GridMismatch);
        }
        let linv = w.l.clone().try_inverse().ok_or(Error::SingularL(0.0))?;
        let sigma = linv.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        let m = oversampling(grid.N(), grid.T(), sigma, grid.n());
        let cap = if grid.n() == 1 { MAX_OVERSAMPLE_1D } else { MAX_OVERSAMPLE_2D };
        if m > cap {
            return Err(Error::FactorizationFailed(sigma));
        }
        Ok(MetaplecticKernel { source: w.clone(), grid: *grid, oversample: m })
    }

    pub fn source(&self) -> &GeneratingFunction {
        &self.source
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    /// i^{−n/2} i^m √|det L| times the fine-lattice cell.
    fn prefactor(&self) -> Complex64 {
        let n = self.grid.n() as f64;
        let det = self.source.l.determinant().abs();
        let fine = self.grid.spacing() / self.oversample as f64;
        Complex64::from_polar(det.sqrt() * fine.powi(self.grid.n() as i32), PI / 2.0 * (self.source.m as f64 - n / 2.0))
    }

    fn fine_axis(&self) -> Vec<f64> {
        let width = self.oversample * self.grid.N();
        let fine = self.grid.spacing() / self.oversample as f64;
        (0..width).map(|l| (l as f64 - (width / 2) as f64) * fine).collect()
    }

    pub fn apply(&self, s: &Signal) -> Result<Signal> {
        if !s.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let grid = self.grid;
        let size = grid.N();
        let m = self.oversample;
        let y = self.fine_axis();
        let width = y.len();
        let w = &self.source;
        let pref = self.prefactor();
        let x = grid.axis();
        let values = if grid.n() == 1 {
            let fine = upsample(s.values(), m);
            let (p, l, q) = (w.p[(0, 0)], w.l[(0, 0)], w.q[(0, 0)]);
            let g: Vec<Complex64> = fine.iter().zip(&y).map(|(v, &yy)| v * Complex64::from_polar(1.0, PI * q * yy * yy)).collect();
            x.par_iter()
                .map(|&xx| {
                    let acc = geometric_dot(&g, -TAU * l * xx, y[0], y[1] - y[0]);
                    pref * Complex64::from_polar(1.0, PI * p * xx * xx) * acc
                })
                .collect()
        } else {
            let fine = upsample_2d(s.values(), size, m);
            let mut g = fine;
            for (i, row) in g.chunks_exact_mut(width).enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    let (a, b) = (y[i], y[j]);
                    let quad = w.q[(0, 0)] * a * a + 2.0 * w.q[(0, 1)] * a * b + w.q[(1, 1)] * b * b;
                    *v *= Complex64::from_polar(1.0, PI * quad);
                }
            }
            let h = y[1] - y[0];
            (0..size * size)
                .into_par_iter()
                .map(|k| {
                    let (x0, x1) = (x[k / size], x[k % size]);
                    let u0 = w.l[(0, 0)] * x0 + w.l[(0, 1)] * x1;
                    let u1 = w.l[(1, 0)] * x0 + w.l[(1, 1)] * x1;
                    let e1 = geometric(-TAU * u1, y[0], h, width);
                    let e0 = geometric(-TAU * u0, y[0], h, width);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (i, row) in g.chunks_exact(width).enumerate() {
                        let inner: Complex64 = row.iter().zip(&e1).map(|(a, b)| a * b).sum();
                        acc += e0[i] * inner;
                    }
                    let quad = w.p[(0, 0)] * x0 * x0 + 2.0 * w.p[(0, 1)] * x0 * x1 + w.p[(1, 1)] * x1 * x1;
                    pref * Complex64::from_polar(1.0, PI * quad) * acc
                })
                .collect()
        };
        Ok(Signal::from_parts(grid, values))
    }

    /// Effective N^n × N^n matrix (row-major). Intended for n = 1 and small n = 2 grids.
    pub fn entries(&self) -> Result<Vec<Complex64>> {
        let len = self.grid.len();
        let mut out = vec![Complex64::new(0.0, 0.0); len * len];
        let mut e = vec![Complex64::new(0.0, 0.0); len];
        for j in 0..len {
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.apply(&Signal::from_parts(self.grid, e.clone()))?;
            e[j] = Complex64::new(0.0, 0.0);
            for (i, v) in col.values().iter().enumerate() {
                out[i * len + j] = *v;
            }
        }
        Ok(out)
    }
}

/// e^{i ω (y0 + l h)} for l = 0..len by recurrence.
fn geometric(omega: f64, y0: f64, h: f64, len: usize) -> Vec<Complex64> {
    let step = Complex64::from_polar(1.0, omega * h);
    let mut cur = Complex64::from_polar(1.0, omega * y0);
    let mut out = Vec::with_capacity(len);
    for l in 0..len {
        if l % 64 == 0 {
            cur = Complex64::from_polar(1.0, omega * (y0 + l as f64 * h));
        }
        out.push(cur);
        cur *= step;
    }
    out
}

fn geometric_dot(g: &[Complex64], omega: f64, y0: f64, h: f64) -> Complex64 {
    geometric(omega, y0, h, g.len()).iter().zip(g).map(|(a, b)| a * b).sum()
}

fn upsample_2d(values: &[Complex64], size: usize, m: usize) -> Vec<Complex64> {
    if m == 1 {
        return values.to_vec();
    }
    let width = size * m;
    let rows: Vec<Vec<Complex64>> = values.chunks_exact(size).map(|r| upsample(r, m)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); width * width];
    let mut col = vec![Complex64::new(0.0, 0.0); size];
    for j in 0..width {
        for i in 0..size {
            col[i] = rows[i][j];
        }
        for (i, v) in upsample(&col, m).into_iter().enumerate() {
            out[i * width + j] = v;
        }
    }
    out
}

fn check_tails(s: &Signal, what: &str) -> Result<()> {
    let frac = edge_energy_fraction(s);
    if frac > TAIL_TOL {
        return Err(Error::SupportViolation(format!("{what} has {frac:.2e} of its energy at the grid edge")));
    }
    Ok(())
}

/// Ŝ_{W,m}ψ(x) = i^{−n/2} i^m √|det L| ∫ e^{2πiW(x,x')} ψ(x') dx'.
pub fn apply_quadratic_fourier(w: &GeneratingFunction, s: &Signal) -> Result<Signal> {
    check_tails(s, "input")?;
    let out = MetaplecticKernel::new(w, s.grid())?.apply(s)?;
    check_tails(&out, "output")?;
    Ok(out)
}

/// Partial FrFTs F_{θ_i} along each axis, axis 0 first.
pub fn apply_torus(t: &TorusElement, s: &Signal) -> Result<Signal> {
    if t.n() != s.grid().n() {
        return Err(Error::InvalidArgument(format!("torus element has {} angles for n = {}", t.n(), s.grid().n())));
    }
    let mut cur = s.clone();
    for (axis, &th) in t.angles().iter().enumerate() {
        cur = frft(&cur, axis, th)?;
    }
    Ok(cur)
}

/// Route used to realize a U(n) element on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitaryRoute {
    /// Scalar torus shift θ* followed by one quadratic Fourier transform.
    QuadraticFourier,
    /// U = diag(e^{iα})·R(η)·diag(e^{iβ}) with a coordinate rotation in the middle.
    Euler,
}

/// Candidate shifts ordered by decreasing σ_min of the B block of ι(Ū e^{iθ*}).
pub fn shift_candidates(u: &UnitaryMatrix) -> Vec<(f64, f64)> {
    let mut c: Vec<(f64, f64)> = (0..SHIFT_CANDIDATES)
        .map(|j| {
            let th = j as f64 * PI / SHIFT_CANDIDATES as f64;
            let shifted = u.mul(&UnitaryMatrix::scalar(u.n(), -th));
            (th, b_sigma_min(&operator_matrix(&shifted)))
        })
        .collect();
    c.sort_by(|a, b| b.1.total_cmp(&a.1));
    c
}

/// Ŝ(U) = Ŝ_W(ι(U e^{−iθ*})) ∘ F_{θ*}⊗…⊗F_{θ*}.
pub fn apply_unitary_with_shift(u: &UnitaryMatrix, shift: f64, s: &Signal) -> Result<Signal> {
    let n = s.grid().n();
    if u.n() != n {
        return Err(Error::InvalidArgument(format!("U is {}×{} but n = {n}", u.n(), u.n())));
    }
    let shifted = u.mul(&UnitaryMatrix::scalar(n, -shift));
    let sm = operator_matrix(&shifted);
    let sigma = b_sigma_min(&sm);
    if sigma < MIN_SIGMA {
        return Err(Error::FactorizationFailed(sigma));
    }
    let w = generating_function_of(&sm)?;
    let pre = apply_torus(&TorusElement::new(vec![shift; n])?, s)?;
    apply_quadratic_fourier(&w, &pre)
}

pub fn apply_unitary(u: &UnitaryMatrix, s: &Signal) -> Result<Signal> {
    apply_unitary_via(u, s, UnitaryRoute::QuadraticFourier)
}

pub fn apply_unitary_via(u: &UnitaryMatrix, s: &Signal, route: UnitaryRoute) -> Result<Signal> {
    let r = u.residual();
    if !(r <= 1e-10) {
        return Err(Error::NonUnitary(r));
    }
    if let Some(t) = diagonal_angles(u) {
        return apply_torus(&TorusElement::new(t)?, s);
    }
    match route {
        UnitaryRoute::QuadraticFourier => {
            let (shift, sigma) = shift_candidates(u)[0];
            if sigma < MIN_SIGMA {
                return Err(Error::FactorizationFailed(sigma));
            }
            apply_unitary_with_shift(u, shift, s)
        }
        UnitaryRoute::Euler => {
            let e = EulerAngles::of(u)?;
            e.apply(s)
        }
    }
}

fn diagonal_angles(u: &UnitaryMatrix) -> Option<Vec<f64>> {
    let n = u.n();
    let off = (0..n).any(|i| (0..n).any(|j| i != j && u.get(i, j) != Complex64::new(0.0, 0.0)));
    (!off).then(|| (0..n).map(|i| u.get(i, i).arg()).collect())
}

/// U = diag(e^{iα})·R(η)·diag(e^{iβ}), R(η) = [[cos η, −sin η], [sin η, cos η]].
/// For n = 1 only α is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub n: usize,
    pub alpha: [f64; 2],
    pub eta: f64,
    pub beta: [f64; 2],
}

impl EulerAngles {
    pub fn of(u: &UnitaryMatrix) -> Result<Self> {
        match u.n() {
            1 => Ok(EulerAngles { n: 1, alpha: [u.get(0, 0).arg(), 0.0], eta: 0.0, beta: [0.0; 2] }),
            2 => {
                let (u11, u12, u21, u22) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
                let eta = u21.norm().atan2(u11.norm());
                let (alpha, beta) = if u21.norm() < 1e-9 {
                    ([u11.arg(), u22.arg()], [0.0, 0.0])
                } else {
                    let a1 = if u11.norm() < 1e-9 { 0.0 } else { u11.arg() };
                    ([a1, u21.arg()], [0.0, (-u12).arg() - a1])
                };
                let e = EulerAngles { n: 2, alpha, eta, beta };
                let err = (e.to_unitary().matrix() - u.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if err > 1e-9 {
                    return Err(Error::FactorizationFailed(err));
                }
                Ok(e)
            }
            n => Err(Error::InvalidArgument(format!("n = {n} must be 1 or 2"))),
        }
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        if self.n == 1 {
            return UnitaryMatrix::scalar(1, self.alpha[0]);
        }
        let (s, c) = self.eta.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|v| Complex64::new(v, 0.0));
        let r = UnitaryMatrix::from_matrix_unchecked(r);
        UnitaryMatrix::diagonal(&self.alpha).mul(&r).mul(&UnitaryMatrix::diagonal(&self.beta))
    }

    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.eta.sin_cos();
        [[c, -s], [s, c]]
    }

    pub fn apply(&self, s: &Signal) -> Result<Signal> {
        if self.n != s.grid().n() {
            return Err(Error::GridMismatch);
        }
        if self.n == 1 {
            return frft(s, 0, self.alpha[0]);
        }
        let first = apply_torus(&TorusElement::new(self.beta.to_vec())?, s)?;
        let rotated = rotate_coordinates(&first, &self.rotation())?;
        apply_torus(&TorusElement::new(self.alpha.to_vec())?, &rotated)
    }
}

/// ψ ↦ ψ(Rᵀx) for a real orthogonal 2×2 R, by trigonometric interpolation;
/// points whose preimage leaves the box are set to zero.
pub fn rotate_coordinates(s: &Signal, r: &[[f64; 2]; 2]) -> Result<Signal> {
    let grid = *s.grid();
    if grid.n() != 2 {
        return Err(Error::InvalidArgument("coordinate rotation needs n = 2".into()));
    }
    let size = grid.N();
    let mut c = s.values().to_vec();
    fft2(&mut c, size, false);
    let scale = 1.0 / (size * size) as f64;
    let nyq = size / 2;
    let d = grid.spacing();
    let half = grid.T() / 2.0;
    let x = grid.axis();
    // Fractional source indices of every output point; None when outside the box.
    let sources: Vec<Option<(f64, f64)>> = (0..size * size)
        .map(|k| {
            let (x0, x1) = (x[k / size], x[k % size]);
            let y0 = r[0][0] * x0 + r[1][0] * x1;
            let y1 = r[0][1] * x0 + r[1][1] * x1;
            let inside = y0 >= -half && y0 <= half - d && y1 >= -half && y1 <= half - d;
            inside.then(|| (y0 / d + nyq as f64, y1 / d + nyq as f64))
        })
        .collect();
    // Symmetric frequency set k ∈ [−N/2, N/2) with the Nyquist term split in half,
    // so the interpolant is real for real data.
    let basis = |j: f64| -> Vec<Complex64> {
        let w = Complex64::from_polar(1.0, TAU * j / size as f64);
        let mut v = vec![Complex64::new(0.0, 0.0); size];
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 0..nyq {
            v[k] = acc;
            if k > 0 {
                v[size - k] = acc.conj();
            }
            acc *= w;
        }
        v[nyq] = Complex64::new((PI * j).cos(), 0.0);
        v
    };
    // inner[p][k0] = Σ_{k1} e_{k1}(j1(p))·c[k0][k1], as one real product
    // [Re E | Im E] · [[Re Cᵀ, Im Cᵀ], [−Im Cᵀ, Re Cᵀ]].
    let points = size * size;
    let mut e = DMatrix::<f64>::zeros(points, 2 * size);
    for (p, src) in sources.iter().enumerate() {
        if let Some((_, j1)) = src {
            for (k, v) in basis(*j1).into_iter().enumerate() {
                e[(p, k)] = v.re;
                e[(p, size + k)] = v.im;
            }
        }
    }
    let cb = DMatrix::<f64>::from_fn(2 * size, 2 * size, |i, j| {
        let v = c[(j % size) * size + (i % size)];
        match (i < size, j < size) {
            (true, true) | (false, false) => v.re,
            (true, false) => v.im,
            (false, true) => -v.im,
        }
    });
    let inner = e * cb;
    let values: Vec<Complex64> = sources
        .par_iter()
        .enumerate()
        .map(|(p, src)| {
            let Some((j0, _)) = src else { return Complex64::new(0.0, 0.0) };
            let e0 = basis(*j0);
            let acc: Complex64 = (0..size).map(|k| e0[k] * Complex64::new(inner[(p, k)], inner[(p, size + k)])).sum();
            acc * scale
        })
        .collect();
    Ok(Signal::from_parts(grid, values))
}

fn fft2(buf: &mut [Complex64], size: usize, inverse: bool) {
    for row in buf.chunks_exact_mut(size) {
        fft_inplace(row, inverse);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); size];
    for j in 0..size {
        for i in 0..size {
            col[i] = buf[i * size + j];
        }
        fft_inplace(&mut col, inverse);
        for i in 0..size {
            buf[i * size + j] = col[i];
        }
    }
}

/// V_g f(x, ξ) at an arbitrary phase-space point, window shifted by a Fourier phase ramp.
pub fn stft_at(f: &Signal, g: &Signal, x: &[f64], xi: &[f64]) -> Result<Complex64> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let shifted = translate_periodic(g, x);
    let t = grid.axis();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, (a, b)) in f.values().iter().zip(shifted.values()).enumerate() {
        let idx = grid.unravel(k);
        let mut ph = 0.0;
        for ax in 0..grid.n() {
            ph += t[idx[ax]] * xi[ax];
        }
        acc += a * b.conj() * Complex64::from_polar(1.0, -TAU * ph);
    }
    Ok(acc * grid.cell())
}

/// Band-limited translation g(t − x) of a signal treated as periodic on the box.
pub fn translate_periodic(g: &Signal, x: &[f64]) -> Signal {
    let grid = *g.grid();
    let size = grid.N();
    let mut c = g.values().to_vec();
    let freqs: Vec<f64> = (0..size)
        .map(|k| if k < size / 2 { k as f64 } else { k as f64 - size as f64 } / grid.T())
        .collect();
    let nyq = size / 2;
    let ramp = |ax: usize, k: usize| -> Complex64 {
        if k == nyq {
            Complex64::new((PI * x[ax] / grid.spacing()).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, -TAU * freqs[k] * x[ax])
        }
    };
    if grid.n() == 1 {
        fft_inplace(&mut c, false);
        for (k, v) in c.iter_mut().enumerate() {
            *v *= ramp(0, k);
        }
        fft_inplace(&mut c, true);
    } else {
        fft2(&mut c, size, false);
        for (k, v) in c.iter_mut().enumerate() {
            *v *= ramp(0, k / size) * ramp(1, k % size);
        }
        fft2(&mut c, size, true);
    }
    let scale = 1.0 / grid.len() as f64;
    Signal::from_parts(grid, c.into_iter().map(|v| v * scale).collect())
}

/// max over a phase-space check lattice of ||V_{Ŝg}Ŝf(z)| − |V_g f(S⁻¹z)||, S = ι(Ū).
///
/// n = 1: e^{πixξ}V_g f on the full lattice is bilinearly interpolated at S⁻¹z for every
/// lattice point z whose preimage stays inside the lattice, then its modulus is compared. n = 2: V_g f(S⁻¹z) is evaluated directly
/// on a coarse check lattice.
pub fn covariance_residual(u: &UnitaryMatrix, f: &Signal, g: &Signal) -> Result<f64> {
    covariance_residual_via(u, f, g, UnitaryRoute::QuadraticFourier)
}

pub fn covariance_residual_via(u: &UnitaryMatrix, f: &Signal, g: &Signal, route: UnitaryRoute) -> Result<f64> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = *f.grid();
    let sf = apply_unitary_via(u, f, route)?;
    let sg = apply_unitary_via(u, g, route)?;
    let s = operator_matrix(u);
    let sinv = s.transpose();
    if grid.n() == 1 {
        let base = stft(f, g)?;
        let size = grid.N();
        let (dx, dxi) = (grid.spacing(), grid.freq_spacing());
        // e^{πixξ}V_g f is smooth where |V_g f| has cone-shaped zeros, so it is the
        // quantity interpolated; its modulus is |V_g f|.
        let sym: Vec<Complex64> = base
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(1.0, PI * grid.point(i / size) * grid.freq_point(i % size)))
            .collect();
        let lookup = |a: usize, k: usize| sym[a * size + k];
        let offset = (size / 2) as f64;
        let mut worst = 0.0f64;
        for a in 0..size {
            let row = stft_row(&sf, &sg, a);
            let x = grid.point(a);
            for (k, v) in row.iter().enumerate() {
                let xi = grid.freq_point(k);
                let px = sinv[(0, 0)] * x + sinv[(0, 1)] * xi;
                let pxi = sinv[(1, 0)] * x + sinv[(1, 1)] * xi;
                let fa = px / dx + offset;
                let fk = pxi / dxi + offset;
                if fa < 0.0 || fk < 0.0 || fa > (size - 1) as f64 || fk > (size - 1) as f64 {
                    continue;
                }
                let (a0, k0) = ((fa.floor() as usize).min(size - 2), (fk.floor() as usize).min(size - 2));
                let (ta, tk) = (fa - a0 as f64, fk - k0 as f64);
                let interp = (1.0 - ta) * (1.0 - tk) * lookup(a0, k0)
                    + ta * (1.0 - tk) * lookup(a0 + 1, k0)
                    + (1.0 - ta) * tk * lookup(a0, k0 + 1)
                    + ta * tk * lookup(a0 + 1, k0 + 1);
                worst = worst.max((v.norm() - interp.norm()).abs());
            }
        }
        Ok(worst)
    } else {
        let coarse: Vec<f64> = (-3..=3).map(|i| i as f64 * 0.75).collect();
        let mut points = Vec::new();
        for &a in &coarse {
            for &b in &coarse {
                for &c in &[-1.5, 0.0, 1.5] {
                    for &d in &[-1.5, 0.0, 1.5] {
                        points.push([a, b, c, d]);
                    }
                }
            }
        }
        let res: Vec<f64> = points
            .par_iter()
            .map(|z| {
                let lhs = stft_at(&sf, &sg, &z[..2], &z[2..]).map(|v| v.norm()).unwrap_or(f64::NAN);
                let mut p = [0.0; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        p[i] += sinv[(i, j)] * z[j];
                    }
                }
                let rhs = stft_at(f, g, &p[..2], &p[2..]).map(|v| v.norm()).unwrap_or(f64::NAN);
                (lhs - rhs).abs()
            })
            .collect();
        Ok(res.into_iter().fold(0.0, f64::max))
    }
}

/// Gaussian-invariance residual max_t ||Ŝφ(t)| − φ(t)|.
pub fn gaussian_invariance_residual(u: &UnitaryMatrix, grid: &Grid, route: UnitaryRoute) -> Result<f64> {
    let phi = crate::signal::gaussian_window(grid);
    Ok(apply_unitary_via(u, &phi, route)?.max_modulus_diff(&phi))
}

/// Centered n-dimensional DFT scaled as the sampled Fourier transform.
pub fn fourier_nd(s: &Signal) -> Signal {
    let grid = *s.grid();
    let mut v = s.values().to_vec();
    if grid.n() == 1 {
        centered_dft_inplace(&mut v, false);
    } else {
        crate::stft::centered_dft_nd(&grid, &mut v);
    }
    let cell = grid.cell();
    Signal::from_parts(grid.dual(), v.into_iter().map(|z| z * cell).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::haar_unitary_at;
    use crate::signal::{gaussian_window, SignalSpec};
    use crate::symplectic::standard_j;
    use crate::transforms::dft_centered;

    fn g1() -> Grid {
        Grid::default_for(1).unwrap()
    }

    #[test]
    fn j_is_the_fourier_transform() {
        let w = generating_function_of(&standard_j(1)).unwrap();
        let phi = gaussian_window(&g1());
        let out = apply_quadratic_fourier(&w, &phi).unwrap();
        let expected = phi.scale(Complex64::from_polar(1.0, -PI / 4.0));
        assert!(out.max_abs_diff(&expected) < 1e-6);
        let h = SignalSpec::Chirped(0.5).generate(&g1()).unwrap();
        let out = apply_quadratic_fourier(&w, &h).unwrap();
        let dft = dft_centered(&h, 0).unwrap().scale(Complex64::from_polar(1.0, -PI / 4.0));
        assert!(out.max_abs_diff(&Signal::new(g1(), dft.into_values()).unwrap()) < 1e-6);
        assert!((out.l2_norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn torus_kernel_matches_frft() {
        let t = TorusElement::new(vec![PI / 4.0]).unwrap();
        let w = generating_function_of(&crate::symplectic::torus_operator_matrix(&t)).unwrap();
        let h = SignalSpec::Hermite(2).generate(&g1()).unwrap();
        let a = apply_quadratic_fourier(&w, &h).unwrap();
        let b = frft(&h, 0, PI / 4.0).unwrap();
        assert!(a.phase_distance(&b).unwrap() < 1e-6);
    }

    #[test]
    fn unitary_special_cases() {
        let h = SignalSpec::Translated(1.0).generate(&g1()).unwrap();
        let id = apply_unitary(&UnitaryMatrix::identity(1), &h).unwrap();
        assert!(id.phase_distance(&h).unwrap() < 1e-6);
        let f = apply_unitary(&UnitaryMatrix::scalar(1, PI / 2.0), &h).unwrap();
        let dft = Signal::new(g1(), dft_centered(&h, 0).unwrap().into_values()).unwrap();
        assert!(f.phase_distance(&dft).unwrap() < 1e-6);
    }

    #[test]
    fn euler_angles_reconstruct() {
        for k in 0..50 {
            let u = haar_unitary_at(2, 11, k);
            let e = EulerAngles::of(&u).unwrap();
            let err = (e.to_unitary().matrix() - u.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
        let swap = UnitaryMatrix::from_rows(2, &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(EulerAngles::of(&swap).is_ok());
        assert!(EulerAngles::of(&UnitaryMatrix::diagonal(&[0.3, -1.2])).is_ok());
    }

    #[test]
    fn coordinate_rotation_of_gaussian_products() {
        let grid = Grid::default_for(2).unwrap();
        let phi = gaussian_window(&grid);
        let th: f64 = 0.6;
        let r = [[th.cos(), -th.sin()], [th.sin(), th.cos()]];
        assert!(rotate_coordinates(&phi, &r).unwrap().max_abs_diff(&phi) < 1e-10);
        let h = SignalSpec::Translated(1.0).generate(&grid).unwrap();
        let out = rotate_coordinates(&h, &r).unwrap();
        let pi = PI;
        let mut worst = 0.0f64;
        for (k, v) in out.values().iter().enumerate() {
            let (x0, x1) = (grid.point(k / 64), grid.point(k % 64));
            let (y0, y1) = (r[0][0] * x0 + r[1][0] * x1 - 1.0, r[0][1] * x0 + r[1][1] * x1 - 1.0);
            let expected = 2f64.sqrt() * (-pi * (y0 * y0 + y1 * y1)).exp();
            worst = worst.max((v.re - expected).abs());
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn translation_by_phase_ramp() {
        let grid = g1();
        let phi = gaussian_window(&grid);
        let moved = translate_periodic(&phi, &[0.37]);
        let expected = SignalSpec::Translated(0.37).generate(&grid).unwrap();
        assert!(moved.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn covariance_for_quarter_turn_is_exact_on_self_dual_lattice() {
        let grid = g1();
        let h = SignalSpec::Hermite(1).generate(&grid).unwrap();
        let phi = gaussian_window(&grid);
        let u = UnitaryMatrix::scalar(1, PI / 2.0);
        assert!(covariance_residual(&u, &h, &phi).unwrap() < 2e-3);
        assert!(covariance_residual(&UnitaryMatrix::identity(1), &h, &phi).unwrap() < 1e-9);
    }

    #[test]
    fn tail_violation_is_reported() {
        let grid = Grid::new(1, 64, 8.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 64];
        v[1] = Complex64::new(1.0, 0.0);
        let s = Signal::new(grid, v).unwrap();
        let w = generating_function_of(&standard_j(1)).unwrap();
        assert!(matches!(apply_quadratic_fourier(&w, &s), Err(Error::SupportViolation(_))));
    }
}
