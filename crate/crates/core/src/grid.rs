use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgeError};

/// Periodic grid of `n` nodes `z_j = z_min + j·dz`, `dz = (z_max − z_min)/n`.
/// The node at `z_max` is identified with `z_min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, n: usize) -> Result<Self> {
        let grid = Self { z_min, z_max, n };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid centred on zero.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_max > self.z_min) {
            return Err(SgeError::InvalidParameter(format!(
                "grid needs z_max > z_min, got [{}, {}]",
                self.z_min, self.z_max
            )));
        }
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(SgeError::InvalidParameter(format!(
                "grid size must be a power of two >= 2, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn dz(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Angular wavenumber of FFT bin `q`, in the usual order
    /// `0, 1, …, n/2 − 1, −n/2, …, −1` times `2π/L`.
    pub fn wavenumber(&self, q: usize) -> f64 {
        let signed = if q < self.n / 2 {
            q as f64
        } else {
            q as f64 - self.n as f64
        };
        2.0 * PI * signed / self.length()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|q| self.wavenumber(q)).collect()
    }
}
