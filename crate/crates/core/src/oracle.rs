//! Brute-force references for the closed-form propagator.
//!
//! * [`split_step_evolve`]: Strang splitting of `H_e` on a periodic grid, one
//!   FFT pipeline per spin component.
//! * [`dense_hamiltonian`] + [`matrix_exponential`]: the full `(n·d)²` matrix
//!   of `H_e` and its exponential, for desk-scale grids.
//! * [`quadrature_overlap`]: grid inner products.
//!
//! None of these use the factorization they are meant to check.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::config::ExperimentConfig;
use crate::error::{Result, SgeError};
use crate::grid::Grid;
use crate::propagator::HybridState;
use crate::spin_algebra::{format_m, max_abs, SpinQN};
use crate::tolerances;
use crate::{CMatrix, C64};

/// Largest grid accepted by the dense builders.
pub const MAX_DENSE_GRID: usize = 256;
/// Largest matrix dimension accepted by the dense builders.
pub const MAX_DENSE_DIM: usize = 512;

/// Grid samples of each spin component of `Σ_m ψ_m(z)|m⟩`.
///
/// Component `i` is stored as `ψ_i(z) = e^{iκ_i z} φ_i(z)` with a plane-wave
/// carrier `κ_i` kept exactly and only the envelope `φ_i` sampled. A linear
/// potential then acts on `κ_i` alone, so momentum kicks far beyond the grid's
/// Nyquist wavenumber cost nothing in resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSpinor {
    pub grid: Grid,
    pub spin: SpinQN,
    pub components: Vec<Vec<C64>>,
    pub carriers: Vec<f64>,
}

impl SampledSpinor {
    /// Components given directly as wavefunction samples (zero carriers).
    pub fn new(grid: Grid, spin: SpinQN, components: Vec<Vec<C64>>) -> Result<Self> {
        if components.len() != spin.dim() || components.iter().any(|c| c.len() != grid.n) {
            return Err(SgeError::InvalidParameter(format!(
                "spinor needs {} components of length {}",
                spin.dim(),
                grid.n
            )));
        }
        let carriers = vec![0.0; spin.dim()];
        Ok(Self {
            grid,
            spin,
            components,
            carriers,
        })
    }

    /// Samples `c_m ψ_m(z)` of the `z` part of a closed-form state; each
    /// component's mean wavenumber becomes its carrier.
    pub fn from_hybrid(state: &HybridState, grid: &Grid) -> Self {
        let (components, carriers) = state
            .z_packets
            .iter()
            .zip(&state.coeffs)
            .map(|(packet, &c)| {
                let kappa = packet.wavenumber();
                let env = packet.boost(-kappa).sample(grid);
                (env.into_iter().map(|v| c * v).collect(), kappa)
            })
            .unzip();
        Self {
            grid: *grid,
            spin: state.spin,
            components,
            carriers,
        }
    }

    /// `Σ_m Σ_j |ψ_m(z_j)|² dz`.
    pub fn norm_sq(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            * self.grid.dz()
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm_sq().sqrt();
        self.components.iter_mut().flatten().for_each(|v| *v *= scale);
    }

    /// Position density summed over spin components.
    pub fn density(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.grid.n];
        for comp in &self.components {
            for (pj, v) in p.iter_mut().zip(comp) {
                *pj += v.norm_sqr();
            }
        }
        p
    }

    /// Wavefunction values of component `i` at the grid nodes.
    pub fn values(&self, i: usize) -> Vec<C64> {
        let kappa = self.carriers[i];
        self.components[i]
            .iter()
            .enumerate()
            .map(|(j, v)| C64::from_polar(1.0, kappa * self.grid.node(j)) * v)
            .collect()
    }

    /// `‖self − other‖ / ‖self‖` over all components, carriers included.
    pub fn rel_l2_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid || self.spin != other.spin {
            return Err(SgeError::InvalidParameter(
                "spinors live on different grids or spins".into(),
            ));
        }
        let mut diff = 0.0;
        let mut base = 0.0;
        for i in 0..self.spin.dim() {
            let dk = other.carriers[i] - self.carriers[i];
            for (j, (a, b)) in self.components[i].iter().zip(&other.components[i]).enumerate() {
                let b = C64::from_polar(1.0, dk * self.grid.node(j)) * b;
                diff += (a - b).norm_sqr();
                base += a.norm_sqr();
            }
        }
        Ok((diff / base).sqrt())
    }

    /// Fails if any component's amplitude near either edge exceeds
    /// `BOUNDARY_LEAK` times the largest amplitude in the spinor.
    pub fn check_boundary(&self) -> Result<()> {
        let peak = self
            .components
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return Ok(());
        }
        let n = self.grid.n;
        let edge = (n / 64).max(1);
        for (i, comp) in self.components.iter().enumerate() {
            let worst = comp[..edge]
                .iter()
                .chain(&comp[n - edge..])
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            let ratio = worst / peak;
            if ratio > tolerances::BOUNDARY_LEAK {
                return Err(SgeError::BoundaryLeak {
                    m: format_m(self.spin.twice_m(i)),
                    ratio,
                    limit: tolerances::BOUNDARY_LEAK,
                });
            }
        }
        Ok(())
    }
}

/// Strang splitting `e^{−iVτ/2ħ} e^{−iTτ/ħ} e^{−iVτ/2ħ}` of
/// `H_e = p²/2M − γ(B₀ + βz)S_z`, repeated `steps` times.
///
/// For component `m` the potential half-step is the plane wave
/// `e^{iγ(B₀+βz)mτ/2}`: it adds `γβmτ/2` to the carrier and a constant phase.
/// The kinetic step multiplies the envelope spectrum by
/// `e^{−iħτ(k + κ)²/2M}`, with `κ` the carrier at the step midpoint.
pub fn split_step_evolve(
    psi: &SampledSpinor,
    t: f64,
    steps: usize,
    cfg: &ExperimentConfig,
) -> Result<SampledSpinor> {
    if steps == 0 {
        return Err(SgeError::InvalidParameter("split-step needs at least one step".into()));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(SgeError::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    cfg.validate()?;
    psi.check_boundary()?;
    if t == 0.0 {
        return Ok(psi.clone());
    }

    let grid = psi.grid;
    let n = grid.n;
    let tau = t / steps as f64;
    let k = grid.wavenumbers();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let gamma = cfg.gamma();
    let kinetic = cfg.hbar * tau / (2.0 * cfg.mass);

    let evolved: Vec<(Vec<C64>, f64)> = (0..psi.spin.dim())
        .into_par_iter()
        .map(|i| {
            let m = psi.spin.m(i);
            let kick_rate = gamma * cfg.beta * m;
            let kappa0 = psi.carriers[i];
            let mut env = psi.components[i].clone();
            for step in 0..steps {
                let kappa = kappa0 + kick_rate * tau * (step as f64 + 0.5);
                kinetic_step(&mut env, &k, kappa, kinetic, &forward, &inverse);
            }
            let larmor = C64::from_polar(1.0, gamma * cfg.b0 * m * t);
            env.iter_mut().for_each(|v| *v *= larmor);
            (env, kappa0 + kick_rate * t)
        })
        .collect();

    let (components, carriers) = evolved.into_iter().unzip();
    let out = SampledSpinor {
        grid,
        spin: psi.spin,
        components,
        carriers,
    };
    out.check_boundary()?;
    Ok(out)
}

fn kinetic_step(
    env: &mut [C64],
    k: &[f64],
    kappa: f64,
    coeff: f64,
    forward: &Arc<dyn Fft<f64>>,
    inverse: &Arc<dyn Fft<f64>>,
) {
    let inv_n = 1.0 / env.len() as f64;
    forward.process(env);
    for (v, &kq) in env.iter_mut().zip(k) {
        let kk = kq + kappa;
        *v *= C64::from_polar(inv_n, -coeff * kk * kk);
    }
    inverse.process(env);
}

fn guard_dense(grid: &Grid, spin: SpinQN) -> Result<usize> {
    grid.validate()?;
    let dim = grid.n * spin.dim();
    if grid.n > MAX_DENSE_GRID || dim > MAX_DENSE_DIM {
        return Err(SgeError::GridTooLarge {
            dim,
            limit: MAX_DENSE_DIM,
        });
    }
    Ok(dim)
}

/// Dense `f(p̂/ħ)` for the spectral momentum on `grid`: the circulant matrix
/// `M_{jl} = (1/n) Σ_q e^{i k_q (z_j − z_l)} f(k_q)`.
pub fn spectral_operator(grid: &Grid, f: impl Fn(f64) -> C64) -> CMatrix {
    let n = grid.n;
    let roots: Vec<C64> = (0..n)
        .map(|r| C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64))
        .collect();
    let weights: Vec<C64> = (0..n).map(|q| f(grid.wavenumber(q))).collect();
    let column: Vec<C64> = (0..n)
        .map(|d| {
            (0..n).map(|q| roots[(q * d) % n] * weights[q]).sum::<C64>() / n as f64
        })
        .collect();
    CMatrix::from_fn(n, n, |j, l| column[(j + n - l) % n])
}

/// Position operator `ẑ` as a diagonal matrix of grid nodes.
pub fn position_operator(grid: &Grid) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        grid.n,
        grid.nodes().into_iter().map(C64::from),
    ))
}

/// `H_e` on `z ⊗ spin`, index `i·n + j` for spin index `i` and node `j`.
/// Kinetic term from the spectral momentum, potential `−γ(B₀ + βz_j)ħm`.
pub fn dense_hamiltonian(grid: &Grid, cfg: &ExperimentConfig, spin: SpinQN) -> Result<CMatrix> {
    let dim = guard_dense(grid, spin)?;
    cfg.validate()?;
    let n = grid.n;
    let kinetic = spectral_operator(grid, |k| C64::from(cfg.hbar * cfg.hbar * k * k / (2.0 * cfg.mass)));
    let gamma = cfg.gamma();
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..spin.dim() {
        let m = spin.m(i);
        let off = i * n;
        h.view_mut((off, off), (n, n)).copy_from(&kinetic);
        for j in 0..n {
            h[(off + j, off + j)] -= C64::from(gamma * (cfg.b0 + cfg.beta * grid.node(j)) * cfg.hbar * m);
        }
    }
    Ok(h)
}

/// `exp(scale · H)`.
///
/// Hermitian `H` with purely imaginary `scale` goes through the eigenvalue
/// decomposition, giving an exactly unitary result up to rounding; anything
/// else uses Padé scaling and squaring.
pub fn matrix_exponential(h: &CMatrix, scale: C64) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(SgeError::DimensionMismatch {
            left: h.shape(),
            right: (h.ncols(), h.nrows()),
        });
    }
    if h.nrows() > MAX_DENSE_DIM {
        return Err(SgeError::GridTooLarge {
            dim: h.nrows(),
            limit: MAX_DENSE_DIM,
        });
    }
    if !(h.iter().all(|z| z.is_finite()) && scale.is_finite()) {
        return Err(SgeError::NonFinite);
    }
    let size = max_abs(h);
    let hermitian = max_abs(&(h - h.adjoint())) <= 1e-13 * size.max(f64::MIN_POSITIVE);
    if scale.re == 0.0 && hermitian {
        let eig = h.clone().symmetric_eigen();
        let phases = DVector::from_iterator(
            h.nrows(),
            eig.eigenvalues.iter().map(|&l| (scale * l).exp()),
        );
        let v = &eig.eigenvectors;
        let mut scaled = v.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *p;
        }
        return Ok(scaled * v.adjoint());
    }
    Ok((h * scale).exp())
}

/// `max |U†U − I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let id = CMatrix::identity(u.nrows(), u.ncols());
    max_abs(&(u.adjoint() * u - id))
}

/// `Σ_j conj(f_j) g_j dz`.
pub fn quadrature_overlap(f: &[C64], g: &[C64], grid: &Grid) -> Result<C64> {
    if f.len() != g.len() {
        return Err(SgeError::DimensionMismatch {
            left: (f.len(), 1),
            right: (g.len(), 1),
        });
    }
    Ok(f.iter().zip(g).map(|(a, b)| a.conj() * b).sum::<C64>() * grid.dz())
}
