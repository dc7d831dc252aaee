//! Counter-based sampling of Haar U(n) and the uniform torus.
//!
//! Sample k of a stream is generated from a ChaCha8 generator keyed by the seed with
//! stream id k, so it depends only on (seed, k).

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{TorusElement, UnitaryMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        Ok(SamplerConfig { seed, count })
    }

    /// An independent configuration derived from this one (different key).
    pub fn fork(&self, tag: u64) -> SamplerConfig {
        let mixed = self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
        SamplerConfig { seed: mixed, count: self.count }
    }
}

/// Group averaged over: Haar-normalized U(n) or the torus with dθ₁⋯dθ_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Rotation,
    Torus,
}

impl std::str::FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rotation" => Ok(Group::Rotation),
            "torus" => Ok(Group::Torus),
            other => Err(Error::Parse(format!("unknown group '{other}' (expected rotation or torus)"))),
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Group::Rotation => "rotation",
            Group::Torus => "torus",
        })
    }
}

pub fn rng_at(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-distributed element of U(n): QR of a complex Ginibre matrix with the
/// phases of diag(R) moved into Q.
pub fn haar_unitary_at(n: usize, seed: u64, index: u64) -> UnitaryMatrix {
    let mut rng = rng_at(seed, index);
    let z = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_matrix_unchecked(q)
}

pub fn torus_at(n: usize, seed: u64, index: u64) -> TorusElement {
    let mut rng = rng_at(seed, index);
    let angles = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
    TorusElement::new(angles).expect("finite angles")
}

pub fn sample_haar_unitary(n: usize, cfg: &SamplerConfig) -> Result<Vec<UnitaryMatrix>> {
    if n != 1 && n != 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be 1 or 2")));
    }
    Ok((0..cfg.count as u64).into_par_iter().map(|k| haar_unitary_at(n, cfg.seed, k)).collect())
}

pub fn sample_torus(n: usize, cfg: &SamplerConfig) -> Result<Vec<TorusElement>> {
    if n != 1 && n != 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be 1 or 2")));
    }
    Ok((0..cfg.count as u64).into_par_iter().map(|k| torus_at(n, cfg.seed, k)).collect())
}

/// Kolmogorov–Smirnov statistic of `samples` against the uniform law on [0, 1).
pub fn ks_uniform(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov critical value for effective sample size `n_eff`.
pub fn ks_critical(n_eff: f64, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / n_eff.sqrt()
}
