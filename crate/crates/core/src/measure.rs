//! Group averages of the strip indicator χ_ε and their ε → 0 asymptotics.
//!
//! A phase-space point is z = (x₁, …, x_n, ξ₁, …, ξ_n). The rotation group acts through
//! ι(U) (normalized Haar measure), the torus through per-plane rotations with dθ₁⋯dθ_n.

use std::f64::consts::{FRAC_2_PI, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::std_error;
use crate::sampling::{haar_unitary_at, rng_at, Group, SamplerConfig};
use crate::stft::pairwise_sum;
use crate::symplectic::{iota, UnitaryMatrix};

/// Largest 1-D quadrature size used for the indicator trapezoid.
const MAX_QUADRATURE: usize = 1 << 25;
/// Target relative edge error of the indicator trapezoid.
const QUADRATURE_EDGE_TOL: f64 = 1e-4;
/// Size cap of the second sample set used for Ψ_ε(Sz) in `normalization_check`.
const SECOND_SET: usize = 2000;
/// Deviations below this are treated as exact in `normalization_check`.
const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiMode {
    MonteCarlo,
    TorusClosedForm,
    Quadrature,
}

impl PsiMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PsiMode::MonteCarlo => "monte-carlo",
            PsiMode::TorusClosedForm => "torus-closed-form",
            PsiMode::Quadrature => "quadrature",
        }
    }
}

impl std::str::FromStr for PsiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monte-carlo" | "mc" => Ok(PsiMode::MonteCarlo),
            "torus-closed-form" | "closed-form" => Ok(PsiMode::TorusClosedForm),
            "quadrature" => Ok(PsiMode::Quadrature),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    pub z: Vec<f64>,
    pub eps: f64,
    pub value: f64,
    pub stderr: f64,
    pub mode: PsiMode,
    pub group: Group,
}

fn dim(z: &[f64]) -> Result<usize> {
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("z"));
    }
    match z.len() {
        2 => Ok(1),
        4 => Ok(2),
        k => Err(Error::InvalidArgument(format!("z has {k} coordinates; expected 2 or 4"))),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(())
}

/// χ_ε(x, ξ) = ε^{−n} when every |ξ_i| ≤ ε/2 (closed boundary), else 0.
pub fn chi_eps(z: &[f64], eps: f64) -> Result<f64> {
    let n = dim(z)?;
    check_eps(eps)?;
    Ok(chi(z, n, eps))
}

fn chi(z: &[f64], n: usize, eps: f64) -> f64 {
    if z[n..].iter().all(|xi| xi.abs() <= eps / 2.0) {
        eps.powi(-(n as i32))
    } else {
        0.0
    }
}

/// Modulus of each coordinate plane (x_i, ξ_i).
pub fn plane_moduli(z: &[f64]) -> Vec<f64> {
    let n = z.len() / 2;
    (0..n).map(|i| z[i].hypot(z[n + i])).collect()
}

/// Orbit weight: |z|^n for the rotation group, |z₁⋯z_n| (plane moduli) for the torus.
pub fn orbit_weight(z: &[f64], group: Group) -> f64 {
    let n = z.len() / 2;
    match group {
        Group::Rotation => z.iter().map(|v| v * v).sum::<f64>().sqrt().powi(n as i32),
        Group::Torus => plane_moduli(z).iter().product(),
    }
}

/// Measure of {θ ∈ [0, 2π) : |r sin θ| ≤ ε/2}; 2π when r = 0.
fn strip_measure(r: f64, eps: f64) -> f64 {
    if r == 0.0 {
        TAU
    } else {
        4.0 * (eps / (2.0 * r)).min(1.0).asin()
    }
}

/// ι(U)z = (Re w, Im w) with w = U(x + iξ).
pub fn act(u: &UnitaryMatrix, z: &[f64]) -> Vec<f64> {
    let n = z.len() / 2;
    let w: Vec<Complex64> = (0..n)
        .map(|i| (0..n).map(|j| u.get(i, j) * Complex64::new(z[j], z[n + j])).sum())
        .collect();
    w.iter().map(|c| c.re).chain(w.iter().map(|c| c.im)).collect()
}

/// Real-matrix action of ι(U); agrees with `act`.
pub fn act_real(u: &UnitaryMatrix, z: &[f64]) -> Result<Vec<f64>> {
    let s = iota(u)?.full();
    let v = nalgebra::DVector::from_column_slice(z);
    Ok((s * v).as_slice().to_vec())
}

fn torus_closed(z: &[f64], eps: f64, normalized: bool) -> f64 {
    let scale = if normalized { 1.0 / TAU } else { 1.0 };
    plane_moduli(z).iter().map(|&r| scale * strip_measure(r, eps) / eps).product()
}

/// Trapezoid over θ ∈ [0, 2π) of 1{|r sin(θ + θ₀)| ≤ ε/2}, with enough points that each
/// strip edge is resolved to a relative `QUADRATURE_EDGE_TOL`.
fn strip_trapezoid(r: f64, phase: f64, eps: f64) -> f64 {
    let mu = if r == 0.0 { 1.0 } else { (eps / (2.0 * r)).min(1.0) };
    let wanted = (TAU / (mu.max(1e-300) * QUADRATURE_EDGE_TOL)).ceil();
    let m = (wanted.min(MAX_QUADRATURE as f64) as usize).next_power_of_two().clamp(4096, MAX_QUADRATURE);
    let h = TAU / m as f64;
    let chunk = 1 << 14;
    let counts: Vec<usize> = (0..m.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            (c * chunk..((c + 1) * chunk).min(m))
                .filter(|&k| (r * (k as f64 * h + phase).sin()).abs() <= eps / 2.0)
                .count()
        })
        .collect();
    counts.iter().sum::<usize>() as f64 * h
}

/// Ψ_ε(z) = ∫χ_ε(Sz)dS.
///
/// * `TorusClosedForm`: ε^{−n}∏4·arcsin(min(1, ε/(2|z_i|))) over the torus; for the rotation
///   group with n = 1 (U(1) is a circle) the normalized variant (2/π)·arcsin.
/// * `Quadrature`: trapezoid over the angles of the indicator itself (torus, or U(1)).
/// * `MonteCarlo`: rotation group: Haar samples U, each averaged exactly over the left torus,
///   ε^{−n}∏(2/π)·arcsin(min(1, ε/(2|w_j|))), w = U(x + iξ). Torus: uniform angles, raw indicator.
pub fn psi_eps(z: &[f64], eps: f64, group: Group, mode: PsiMode, cfg: &SamplerConfig) -> Result<PsiEstimate> {
    let n = dim(z)?;
    check_eps(eps)?;
    let est = |value: f64, stderr: f64| PsiEstimate { z: z.to_vec(), eps, value, stderr, mode, group };
    match (group, mode) {
        (Group::Torus, PsiMode::TorusClosedForm) => Ok(est(torus_closed(z, eps, false), 0.0)),
        (Group::Rotation, PsiMode::TorusClosedForm) if n == 1 => Ok(est(torus_closed(z, eps, true), 0.0)),
        (Group::Rotation, PsiMode::TorusClosedForm) => {
            Err(Error::ModeMismatch("no closed form for the rotation group with n = 2".into()))
        }
        (_, PsiMode::Quadrature) => {
            if group == Group::Rotation && n != 1 {
                return Err(Error::ModeMismatch("quadrature covers U(1) only; use monte-carlo for n = 2".into()));
            }
            let scale = if group == Group::Rotation { 1.0 / TAU } else { 1.0 };
            let value = (0..n).map(|i| scale * strip_trapezoid(z[i].hypot(z[n + i]), z[n + i].atan2(z[i]), eps) / eps).product();
            Ok(est(value, 0.0))
        }
        (Group::Rotation, PsiMode::MonteCarlo) => {
            let vals: Vec<f64> = (0..cfg.count as u64)
                .into_par_iter()
                .map(|k| conditional_term(&haar_unitary_at(n, cfg.seed, k), z, eps))
                .collect();
            Ok(est(pairwise_sum(&vals) / vals.len() as f64, std_error(&vals)))
        }
        (Group::Torus, PsiMode::MonteCarlo) => {
            let vals: Vec<f64> = (0..cfg.count as u64)
                .into_par_iter()
                .map(|k| {
                    let mut rng = rng_at(cfg.seed, k);
                    let th: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
                    TAU.powi(n as i32) * chi(&rotate_planes(z, &th), n, eps)
                })
                .collect();
            Ok(est(pairwise_sum(&vals) / vals.len() as f64, std_error(&vals)))
        }
    }
}

/// E over the left torus of χ_ε(ι(tU)z): ε^{−n}∏_j (2/π)·arcsin(min(1, ε/(2|w_j|))).
fn conditional_term(u: &UnitaryMatrix, z: &[f64], eps: f64) -> f64 {
    let moved = act(u, z);
    plane_moduli(&moved).iter().map(|&r| strip_measure(r, eps) / (TAU * eps)).product()
}

/// Plain Monte Carlo of the indicator over Haar samples (rotation group).
pub fn psi_eps_indicator_mc(z: &[f64], eps: f64, cfg: &SamplerConfig) -> Result<PsiEstimate> {
    let n = dim(z)?;
    check_eps(eps)?;
    let vals: Vec<f64> = (0..cfg.count as u64).into_par_iter().map(|k| chi(&act(&haar_unitary_at(n, cfg.seed, k), z), n, eps)).collect();
    Ok(PsiEstimate {
        z: z.to_vec(),
        eps,
        value: pairwise_sum(&vals) / vals.len() as f64,
        stderr: std_error(&vals),
        mode: PsiMode::MonteCarlo,
        group: Group::Rotation,
    })
}

/// Rotate each plane (x_i, ξ_i) by θ_i.
pub fn rotate_planes(z: &[f64], theta: &[f64]) -> Vec<f64> {
    let n = z.len() / 2;
    let mut out = z.to_vec();
    for i in 0..n {
        let (s, c) = theta[i].sin_cos();
        out[i] = c * z[i] - s * z[n + i];
        out[n + i] = s * z[i] + c * z[n + i];
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub value: f64,
    pub stderr: f64,
    pub weighted_value: f64,
    pub weighted_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub z: Vec<f64>,
    pub group: Group,
    pub mode: PsiMode,
    pub weight: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares line through the last three (ε, Ψ_ε·w) points, evaluated at ε = 0.
    pub limit: f64,
    pub limit_stderr: f64,
}

/// Ψ_ε(z)·w(z) along a decreasing ε sequence, with the extrapolated limit C₁.
/// Each ε uses an independent sample stream.
pub fn convergence_study(z: &[f64], eps: &[f64], group: Group, mode: PsiMode, cfg: &SamplerConfig) -> Result<ConvergenceTable> {
    dim(z)?;
    if eps.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon sequence".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon sequence must be strictly decreasing".into()));
    }
    let weight = orbit_weight(z, group);
    if weight == 0.0 {
        return Err(Error::ZeroWeight(format!("{z:?}")));
    }
    let rows = eps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let p = psi_eps(z, e, group, mode, &cfg.fork(k as u64 + 1))?;
            Ok(ConvergenceRow { eps: e, value: p.value, stderr: p.stderr, weighted_value: p.value * weight, weighted_stderr: p.stderr * weight })
        })
        .collect::<Result<Vec<_>>>()?;
    let (limit, limit_stderr) = extrapolate(&rows);
    Ok(ConvergenceTable { z: z.to_vec(), group, mode, weight, rows, limit, limit_stderr })
}

/// Intercept of the least-squares line through the last (up to) three points, with the
/// propagated standard error of independent ordinates.
fn extrapolate(rows: &[ConvergenceRow]) -> (f64, f64) {
    let tail = &rows[rows.len().saturating_sub(3)..];
    if tail.len() == 1 {
        return (tail[0].weighted_value, tail[0].weighted_stderr);
    }
    let k = tail.len() as f64;
    let mx = tail.iter().map(|r| r.eps).sum::<f64>() / k;
    let sxx: f64 = tail.iter().map(|r| (r.eps - mx).powi(2)).sum();
    // intercept = Σ c_i y_i with c_i = 1/k − mx (x_i − mx)/sxx
    let coeff: Vec<f64> = tail.iter().map(|r| 1.0 / k - mx * (r.eps - mx) / sxx).collect();
    let limit = tail.iter().zip(&coeff).map(|(r, c)| c * r.weighted_value).sum();
    let se = tail.iter().zip(&coeff).map(|(r, c)| (c * r.weighted_stderr).powi(2)).sum::<f64>().sqrt();
    (limit, se)
}

/// Expected ε → 0 limit of Ψ_ε·w where it is known in closed form.
pub fn reference_constant(group: Group, n: usize) -> f64 {
    match group {
        Group::Torus => 2f64.powi(n as i32),
        Group::Rotation => 1.0 / PI,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub z: Vec<f64>,
    pub eps: f64,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub group: Group,
    pub rows: Vec<LowerBoundRow>,
    /// Smallest value / bound over the set; the uniform constant c.
    pub worst_ratio: f64,
}

/// Ψ_ε(z) against min{ε^{−n}, w(z)^{−1}} with the torus product form ∏ min{ε^{−1}, |z_i|^{−1}}.
/// Uses the closed form where available, otherwise Monte Carlo.
pub fn lower_bound_check(zs: &[Vec<f64>], eps: &[f64], group: Group, cfg: &SamplerConfig) -> Result<LowerBoundReport> {
    let mut rows = Vec::new();
    for z in zs {
        let n = dim(z)?;
        let mode = match group {
            Group::Torus => PsiMode::TorusClosedForm,
            Group::Rotation if n == 1 => PsiMode::TorusClosedForm,
            Group::Rotation => PsiMode::MonteCarlo,
        };
        for &e in eps {
            let p = psi_eps(z, e, group, mode, cfg)?;
            let bound = match group {
                Group::Torus => plane_moduli(z).iter().map(|&r| (1.0 / e).min(1.0 / r)).product(),
                Group::Rotation => e.powi(-(n as i32)).min(1.0 / orbit_weight(z, group)),
            };
            rows.push(LowerBoundRow { z: z.clone(), eps: e, value: p.value, bound, ratio: p.value / bound });
        }
    }
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(LowerBoundReport { group, rows, worst_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRow {
    pub z: Vec<f64>,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub group: Group,
    pub eps: f64,
    pub rows: Vec<NormalizationRow>,
    pub max_deviation: f64,
    /// Largest |estimate − 1| / stderr over rows that are not exact to rounding.
    pub max_sigma: f64,
}

/// ∫χ̃_ε(Sz)dS with χ̃_ε(w) = χ_ε(w)/Ψ_ε(w), which should be 1.
///
/// Rotation group: raw-indicator Monte Carlo over `cfg` for the numerator, and Ψ_ε(Sz) at
/// each hit from an independent Haar sample set of at most `SECOND_SET` elements. Torus: the numerator is the closed-form
/// measure ∫χ_ε(tz)dt and Ψ_ε(tz) is the closed form at independently drawn angles t.
pub fn normalization_check(zs: &[Vec<f64>], eps: f64, group: Group, cfg: &SamplerConfig) -> Result<NormalizationReport> {
    check_eps(eps)?;
    let mut second = cfg.fork(0x5eed);
    second.count = second.count.min(SECOND_SET);
    let mut rows = Vec::new();
    for z in zs {
        let n = dim(z)?;
        let row = match group {
            Group::Torus => {
                let vals: Vec<f64> = (0..second.count as u64)
                    .map(|k| {
                        let mut rng = rng_at(second.seed, k);
                        let th: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
                        torus_closed(z, eps, false) / torus_closed(&rotate_planes(z, &th), eps, false)
                    })
                    .collect();
                NormalizationRow { z: z.clone(), estimate: pairwise_sum(&vals) / vals.len() as f64, stderr: std_error(&vals) }
            }
            Group::Rotation => {
                let b: Vec<UnitaryMatrix> = (0..second.count as u64).map(|k| haar_unitary_at(n, second.seed, k)).collect();
                let vals: Vec<f64> = (0..cfg.count as u64)
                    .into_par_iter()
                    .map(|k| {
                        let sz = act(&haar_unitary_at(n, cfg.seed, k), z);
                        let c = chi(&sz, n, eps);
                        if c == 0.0 {
                            return 0.0;
                        }
                        let psi = pairwise_sum(&b.iter().map(|u| conditional_term(u, &sz, eps)).collect::<Vec<_>>()) / b.len() as f64;
                        c / psi
                    })
                    .collect();
                NormalizationRow { z: z.clone(), estimate: pairwise_sum(&vals) / vals.len() as f64, stderr: std_error(&vals) }
            }
        };
        rows.push(row);
    }
    let max_deviation = rows.iter().map(|r| (r.estimate - 1.0).abs()).fold(0.0, f64::max);
    let max_sigma = rows
        .iter()
        .filter(|r| (r.estimate - 1.0).abs() > EXACT && r.stderr > 0.0)
        .map(|r| (r.estimate - 1.0).abs() / r.stderr)
        .fold(0.0, f64::max);
    Ok(NormalizationReport { group, eps, rows, max_deviation, max_sigma })
}

/// 2^{−k} for k in `from..=to`.
pub fn dyadic_eps(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

/// Normalized strip fraction (2/π)·arcsin(min(1, μ)).
pub fn strip_fraction(mu: f64) -> f64 {
    FRAC_2_PI * mu.min(1.0).asin()
}
