//! Physical parameters of a Stern-Gerlach run, all in SI units.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgeError};

/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Mass of a silver atom (107.87 u), kg.
pub const SILVER_MASS: f64 = 1.79e-25;

/// Field `B = −βx î + (B₀ + βz) k̂` and the atom it acts on. Only the `z`
/// component enters the effective Hamiltonian used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mass: f64,
    pub g_factor: f64,
    pub bohr_magneton: f64,
    pub hbar: f64,
    pub b0: f64,
    pub beta: f64,
    pub v0: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_z: f64,
    pub magnet_length: f64,
}

impl ExperimentConfig {
    /// Silver atoms through a 3.5 cm magnet: `B₀ = 0.1 T`, `β = 10 T/cm`,
    /// `v₀ = 660 m/s`. Packet widths equal the slit half-width `a = 15 µm`.
    pub fn silver() -> Self {
        Self {
            mass: SILVER_MASS,
            g_factor: 2.0,
            bohr_magneton: BOHR_MAGNETON,
            hbar: HBAR,
            b0: 0.1,
            beta: 1000.0,
            v0: 660.0,
            sigma_x: 1.5e-5,
            sigma_y: 1.5e-5,
            sigma_z: 1.5e-5,
            magnet_length: 0.035,
        }
    }

    /// Dimensionless profile with `ħ = M = μ_B = 1` and the requested `γ`.
    ///
    /// `g` is set to `−γ` so that `γ = −g μ_B / ħ` holds.
    pub fn scaled(gamma: f64, b0: f64, beta: f64) -> Self {
        Self {
            mass: 1.0,
            g_factor: -gamma,
            bohr_magneton: 1.0,
            hbar: 1.0,
            b0,
            beta,
            v0: 1.0,
            sigma_x: 1.0,
            sigma_y: 1.0,
            sigma_z: 1.0,
            magnet_length: 1.0,
        }
    }

    /// Gyromagnetic ratio `γ = −g μ_B / ħ`, rad/(s·T).
    pub fn gamma(&self) -> f64 {
        -self.g_factor * self.bohr_magneton / self.hbar
    }

    /// Time spent inside the magnet, `L / v₀`.
    pub fn transit_time(&self) -> f64 {
        self.magnet_length / self.v0
    }

    /// Mean wavenumber of the beam along `y`.
    pub fn beam_wavenumber(&self) -> f64 {
        self.mass * self.v0 / self.hbar
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self {
            beta,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("sigma_x", self.sigma_x),
            ("sigma_y", self.sigma_y),
            ("sigma_z", self.sigma_z),
            ("magnet_length", self.magnet_length),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(SgeError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        let finite = [
            ("g_factor", self.g_factor),
            ("bohr_magneton", self.bohr_magneton),
            ("b0", self.b0),
            ("beta", self.beta),
            ("v0", self.v0),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(SgeError::InvalidParameter(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::silver()
    }
}

/// Interval of constant field gradient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientSegment {
    pub beta: f64,
    pub duration: f64,
}

impl GradientSegment {
    pub fn new(beta: f64, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) || !beta.is_finite() {
            return Err(SgeError::InvalidParameter(format!(
                "segment needs finite beta and duration >= 0, got ({beta}, {duration})"
            )));
        }
        Ok(Self { beta, duration })
    }
}

/// Gradient sequence `+β, −β, +β` held for `T, 2T, T`. It returns every
/// spin component to the field-free trajectory.
pub fn interferometer_segments(beta: f64, t: f64) -> Result<Vec<GradientSegment>> {
    Ok(vec![
        GradientSegment::new(beta, t)?,
        GradientSegment::new(-beta, 2.0 * t)?,
        GradientSegment::new(beta, t)?,
    ])
}
