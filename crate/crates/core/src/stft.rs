//! Short-time Fourier transform on the lattice and Gaussian-window slices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::centered_dft_inplace;
use crate::grid::Grid;
use crate::signal::{Signal, SignalSpec};

/// V_g f on the (x, ξ) product lattice: x on the signal lattice, ξ on its dual.
/// Indexing is values[x_flat * N^n + ξ_flat].
#[derive(Debug, Clone)]
pub struct StftMap {
    grid: Grid,
    values: Vec<Complex64>,
}

impl StftMap {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x_flat: usize, xi_flat: usize) -> Complex64 {
        self.values[x_flat * self.grid.len() + xi_flat]
    }

    /// (Δ_x Δ_ξ)^n-weighted L² norm; equals ‖f‖₂‖g‖₂ by Moyal's identity.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.phase_cell() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// conj(g(t − x_a)) for a lattice shift, zero where t − x_a leaves the grid.
fn shifted_window(grid: &Grid, g: &[Complex64], x_flat: usize) -> Vec<Complex64> {
    let n = grid.N() as isize;
    let half = n / 2;
    let [a0, a1] = grid.unravel(x_flat);
    let idx = |j: isize, a: usize| -> Option<usize> {
        let k = j - a as isize + half;
        (0..n).contains(&k).then_some(k as usize)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    if grid.n() == 1 {
        for j in 0..n {
            if let Some(k) = idx(j, a0) {
                out[j as usize] = g[k].conj();
            }
        }
    } else {
        for j0 in 0..n {
            let Some(k0) = idx(j0, a0) else { continue };
            for j1 in 0..n {
                if let Some(k1) = idx(j1, a1) {
                    out[(j0 * n + j1) as usize] = g[k0 * n as usize + k1].conj();
                }
            }
        }
    }
    out
}

/// Row of V_g f at the lattice shift `x_flat`, over all ξ.
pub fn stft_row(f: &Signal, g: &Signal, x_flat: usize) -> Vec<Complex64> {
    let grid = f.grid();
    let w = shifted_window(grid, g.values(), x_flat);
    let mut prod: Vec<Complex64> = f.values().iter().zip(&w).map(|(a, b)| a * b).collect();
    centered_dft_nd(grid, &mut prod);
    let cell = grid.cell();
    for v in &mut prod {
        *v *= cell;
    }
    prod
}

pub(crate) fn centered_dft_nd(grid: &Grid, buf: &mut [Complex64]) {
    let n = grid.N();
    if grid.n() == 1 {
        centered_dft_inplace(buf, false);
        return;
    }
    for row in buf.chunks_exact_mut(n) {
        centered_dft_inplace(row, false);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = buf[i * n + j];
        }
        centered_dft_inplace(&mut col, false);
        for i in 0..n {
            buf[i * n + j] = col[i];
        }
    }
}

/// Full STFT. Memory is 16·N^{2n} bytes (268 MB for n = 2, N = 64).
pub fn stft(f: &Signal, g: &Signal) -> Result<StftMap> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = *f.grid();
    let rows: Vec<Vec<Complex64>> = (0..grid.len()).into_par_iter().map(|a| stft_row(f, g, a)).collect();
    Ok(StftMap { grid, values: rows.concat() })
}

/// Fold `visit(x_flat, row)` over all lattice shifts without storing the map.
pub fn stft_fold<A: Send>(
    f: &Signal,
    g: &Signal,
    init: impl Fn() -> A + Sync + Send,
    visit: impl Fn(&mut A, usize, &[Complex64]) + Sync + Send,
    combine: impl Fn(A, A) -> A + Sync + Send,
) -> Result<A> {
    if !f.grid().same_as(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let len = f.grid().len();
    let chunk = 16usize;
    let parts: Vec<A> = (0..len.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for a in c * chunk..((c + 1) * chunk).min(len) {
                let row = stft_row(f, g, a);
                visit(&mut acc, a, &row);
            }
            acc
        })
        .collect();
    Ok(tree_reduce(parts, &combine).unwrap_or_else(init))
}

/// Pairwise reduction in a fixed order.
pub fn tree_reduce<A>(mut items: Vec<A>, combine: &impl Fn(A, A) -> A) -> Option<A> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// One-axis operators for the Gaussian-window slices of the STFT:
/// `x_slice[a][j] = φ₁(t_j − x_a)Δ` gives V_φf(x, 0), and
/// `xi_slice[k][j] = φ₁(t_j) e^{−2πi t_j ξ_k} Δ` gives V_φf(0, ξ).
/// For n = 2 both slices are S·F·Sᵀ with F the sample matrix.
#[derive(Debug, Clone)]
pub struct SliceOperators {
    pub x_slice: DMatrix<Complex64>,
    pub xi_slice: DMatrix<Complex64>,
}

impl SliceOperators {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.N();
        let d = grid.spacing();
        let t = grid.axis();
        let xi = grid.freq_axis();
        let phi = |s: f64| SignalSpec::Gaussian.eval(s).re;
        let x_slice = DMatrix::from_fn(n, n, |a, j| Complex64::new(phi(t[j] - t[a]) * d, 0.0));
        let xi_slice = DMatrix::from_fn(n, n, |k, j| Complex64::from_polar(phi(t[j]) * d, -std::f64::consts::TAU * t[j] * xi[k]));
        SliceOperators { x_slice, xi_slice }
    }

    /// (V_φf(x, 0), V_φf(0, ξ)) flattened row-major.
    pub fn slices(&self, f: &Signal) -> (Vec<Complex64>, Vec<Complex64>) {
        let grid = f.grid();
        let n = grid.N();
        if grid.n() == 1 {
            let v = nalgebra::DVector::from_column_slice(f.values());
            ((&self.x_slice * &v).as_slice().to_vec(), (&self.xi_slice * &v).as_slice().to_vec())
        } else {
            let m = DMatrix::from_row_slice(n, n, f.values());
            let two = |s: &DMatrix<Complex64>| row_major(&(s * &m * s.transpose()));
            (two(&self.x_slice), two(&self.xi_slice))
        }
    }
}

pub(crate) fn row_major(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    m.transpose().as_slice().to_vec()
}
