//! Measurable outputs of an evolved state.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{ExperimentConfig, GradientSegment};
use crate::error::{Result, SgeError};
use crate::grid::Grid;
use crate::oracle::SampledSpinor;
use crate::propagator::HybridState;
use crate::spin_algebra::max_abs;
use crate::tolerances;
use crate::wavepacket::overlap;
use crate::{CMatrix, C64};

/// Probability density along `z` sampled on a grid, in 1/m.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityProfile {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DensityProfile {
    /// `Σ p_j dz`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dz()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    fn check_boundary(&self) -> Result<()> {
        let peak = self.peak();
        let n = self.grid.n;
        let edge = (n / 64).max(1);
        let worst = self.values[..edge]
            .iter()
            .chain(&self.values[n - edge..])
            .copied()
            .fold(0.0, f64::max);
        // Densities are squared amplitudes.
        let ratio = (worst / peak).sqrt();
        if peak > 0.0 && ratio > tolerances::BOUNDARY_LEAK {
            return Err(SgeError::BoundaryLeak {
                m: "all".into(),
                ratio,
                limit: tolerances::BOUNDARY_LEAK,
            });
        }
        Ok(())
    }
}

/// `p(z) = Σ_m |c_m|² |ψ_m(z)|²`. Components with different `m` are
/// orthogonal in spin space, so no cross terms appear.
pub fn position_density_z(state: &HybridState, grid: &Grid) -> Result<DensityProfile> {
    grid.validate()?;
    let mut values = vec![0.0; grid.n];
    for (_, c, packet) in state.components() {
        let w = c.norm_sqr();
        for (j, v) in values.iter_mut().enumerate() {
            *v += w * packet.value_at(grid.node(j)).norm_sqr();
        }
    }
    let profile = DensityProfile { grid: *grid, values };
    profile.check_boundary()?;
    Ok(profile)
}

/// Density of the spinor amplitudes `⟨Ψ(z)|Ψ(z)⟩ = Σ_m |c_m ψ_m(z)|²`.
pub fn spinor_density_z(state: &HybridState, grid: &Grid) -> Result<DensityProfile> {
    grid.validate()?;
    let profile = DensityProfile {
        grid: *grid,
        values: SampledSpinor::from_hybrid(state, grid).density(),
    };
    profile.check_boundary()?;
    Ok(profile)
}

/// Density of a statistical mixture `Σ_k w_k |Ψ_k⟩⟨Ψ_k|`.
pub fn mixed_density_z(ensemble: &[(f64, HybridState)], grid: &Grid) -> Result<DensityProfile> {
    let mut values = vec![0.0; grid.n];
    for (w, state) in ensemble {
        let p = spinor_density_z(state, grid)?;
        for (v, pj) in values.iter_mut().zip(p.values) {
            *v += w * pj;
        }
    }
    Ok(DensityProfile { grid: *grid, values })
}

/// Reduced spin state after tracing out position.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinRDM {
    pub matrix: CMatrix,
}

impl SpinRDM {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(SgeError::DimensionMismatch {
                left: matrix.shape(),
                right: (matrix.ncols(), matrix.nrows()),
            });
        }
        if max_abs(&(&matrix - matrix.adjoint())) > 1e-10 {
            return Err(SgeError::InvalidParameter("density matrix is not Hermitian".into()));
        }
        Ok(Self { matrix })
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// `ρ_mn = c_m c̄_n ⟨ψ_n|ψ_m⟩`. The shared `x`, `y` packets contribute a
/// factor of one.
pub fn spin_rdm(state: &HybridState) -> Result<SpinRDM> {
    let d = state.spin.dim();
    let mut rho = DMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..=m {
            let g = overlap(&state.z_packets[n], &state.z_packets[m])?;
            let v = state.coeffs[m] * state.coeffs[n].conj() * g;
            rho[(m, n)] = v;
            rho[(n, m)] = v.conj();
        }
        rho[(m, m)] = C64::from(rho[(m, m)].re);
    }
    SpinRDM::from_matrix(rho)
}

/// Von Neumann entropy `−Σ λ ln λ` in nats.
pub fn entanglement_entropy(rho: &SpinRDM) -> Result<f64> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(SgeError::BadTrace(trace));
    }
    Ok(entropy_of_spectrum(&rho.eigenvalues()))
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > tolerances::EIGEN_CLIP)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Entropy of the spatial reduction computed from grid samples: the nonzero
/// spectrum of `Σ c_m c̄_n |ψ_m⟩⟨ψ_n|` is that of the Gram matrix of the
/// sampled vectors `c_m ψ_m √dz`.
pub fn spatial_entropy_on_grid(state: &HybridState, grid: &Grid) -> Result<f64> {
    let sampled = SampledSpinor::from_hybrid(state, grid);
    sampled.check_boundary()?;
    let d = state.spin.dim();
    let cols: Vec<Vec<C64>> = (0..d).map(|i| sampled.values(i)).collect();
    let dz = grid.dz();
    let gram = CMatrix::from_fn(d, d, |a, b| {
        cols[a].iter().zip(&cols[b]).map(|(x, y)| x.conj() * y).sum::<C64>() * dz
    });
    let mut e: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
    let total: f64 = e.iter().sum();
    e.iter_mut().for_each(|l| *l /= total);
    Ok(entropy_of_spectrum(&e))
}

/// Newtonian picture of one spin component in a constant gradient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Semiclassical {
    /// `F_z = ħmγβ`, N.
    pub force: f64,
    /// `F_z t`, kg·m/s.
    pub momentum_change: f64,
    /// `F_z t²/(2M)`, m.
    pub deflection: f64,
}

pub fn semiclassical(cfg: &ExperimentConfig, t: f64, m: f64) -> Semiclassical {
    let force = cfg.hbar * m * cfg.gamma() * cfg.beta;
    Semiclassical {
        force,
        momentum_change: force * t,
        deflection: cfg.gamma() * cfg.beta * m * cfg.hbar * t * t / (2.0 * cfg.mass),
    }
}

/// Newtonian displacement and momentum change accumulated over a
/// piecewise-constant gradient schedule, starting at rest in `z`.
pub fn semiclassical_segments(cfg: &ExperimentConfig, segments: &[GradientSegment], m: f64) -> (f64, f64) {
    segments.iter().fold((0.0, 0.0), |(z, p), seg| {
        let sc = semiclassical(&cfg.with_beta(seg.beta), seg.duration, m);
        (z + p * seg.duration / cfg.mass + sc.deflection, p + sc.momentum_change)
    })
}

/// Distance between the two outermost local maxima above 5 % of the peak,
/// each refined by a parabola through its neighbours.
pub fn peak_separation(profile: &DensityProfile) -> Result<f64> {
    let v = &profile.values;
    let threshold = 0.05 * profile.peak();
    let grid = &profile.grid;
    let peaks: Vec<f64> = (1..v.len().saturating_sub(1))
        .filter(|&j| v[j] > threshold && v[j] > v[j - 1] && v[j] >= v[j + 1])
        .map(|j| {
            let (l, c, r) = (v[j - 1], v[j], v[j + 1]);
            let curv = l - 2.0 * c + r;
            let offset = if curv < 0.0 { 0.5 * (l - r) / curv } else { 0.0 };
            grid.node(j) + offset * grid.dz()
        })
        .collect();
    match (peaks.first(), peaks.last()) {
        (Some(lo), Some(hi)) if peaks.len() >= 2 => Ok(hi - lo),
        _ => Err(SgeError::Unresolved),
    }
}
