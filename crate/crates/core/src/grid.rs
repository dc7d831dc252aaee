//! Centered sampling lattices for ℝ^n, n ∈ {1, 2}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    #[serde(rename = "N")]
    size: usize,
    #[serde(rename = "T")]
    side: f64,
}

impl Grid {
    pub fn new(n: usize, size: usize, side: f64) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidGrid(format!("dimension n = {n} must be 1 or 2")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {size} must be a power of two >= 8")));
        }
        if !side.is_finite() || side <= 0.0 {
            return Err(Error::InvalidGrid(format!("T = {side} must be positive")));
        }
        Ok(Grid { n, size, side })
    }

    /// Default lattice: n=1 N=256 T=16, n=2 N=64 T=8. Both are self-dual.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Grid::new(1, 256, 16.0),
            2 => Grid::new(2, 64, 8.0),
            _ => Err(Error::InvalidGrid(format!("dimension n = {n} must be 1 or 2"))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> usize {
        self.size
    }

    #[allow(non_snake_case)]
    pub fn T(&self) -> f64 {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.size as f64
    }

    pub fn freq_spacing(&self) -> f64 {
        1.0 / self.side
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        (k as f64 - (self.size / 2) as f64) * self.spacing()
    }

    pub fn freq_point(&self, k: usize) -> f64 {
        (k as f64 - (self.size / 2) as f64) * self.freq_spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.size).map(|k| self.point(k)).collect()
    }

    pub fn freq_axis(&self) -> Vec<f64> {
        (0..self.size).map(|k| self.freq_point(k)).collect()
    }

    /// Grid with the frequency lattice as its sample lattice: same N, side N/T.
    pub fn dual(&self) -> Grid {
        Grid { n: self.n, size: self.size, side: self.size as f64 / self.side }
    }

    pub fn is_self_dual(&self) -> bool {
        let t2 = self.side * self.side;
        (t2 - self.size as f64).abs() <= 1e-12 * self.size as f64
    }

    /// Row-major multi-index of a flat index, axis 0 slowest.
    pub fn unravel(&self, flat: usize) -> [usize; 2] {
        if self.n == 1 {
            [flat, 0]
        } else {
            [flat / self.size, flat % self.size]
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.size + i)
    }

    /// Riemann weight of one lattice cell, Δ^n.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Weight of one phase-space cell, (Δ_x Δ_ξ)^n = N^{-n}.
    pub fn phase_cell(&self) -> f64 {
        (self.spacing() * self.freq_spacing()).powi(self.n as i32)
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.size == other.size && self.side == other.side
    }
}
