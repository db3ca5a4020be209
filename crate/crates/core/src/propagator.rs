//! The factorized evolution operator
//!
//! ```text
//! U_e(t) = U₁(t) U₂ₐ(t) U₂ᵦ(t) U₂ᵧ(t)
//! U₁  = exp( iγt(B₀ + βẑ)Ŝz/ħ )        Larmor phase + momentum kick
//! U₂ₐ = exp(−i p̂² t/(2Mħ))             free flight
//! U₂ᵦ = exp(−iγβt² Ŝz p̂z/(2ħM))        spin-dependent translation
//! U₂ᵧ = exp(−iγ²β²t³ Ŝz²/(6ħM))        nonlinear spin phase
//! ```
//!
//! applied to `Σ_m c_m ψ_m(r)|m⟩` with every spatial factor kept as a
//! [`QuadExpPacket`]. Factors act rightmost first. The three `U₂` factors
//! commute, so only the position of `U₁` matters.

use nalgebra::DVector;

use crate::config::{ExperimentConfig, GradientSegment};
use crate::error::{Result, SgeError};
use crate::grid::Grid;
use crate::oracle::{spectral_operator, MAX_DENSE_DIM, MAX_DENSE_GRID};
use crate::spin_algebra::{u2c_phase, SpinQN};
use crate::tolerances;
use crate::wavepacket::{overlap, QuadExpPacket};
use crate::{CMatrix, C64};

/// `Σ_m c_m ψ_x(x) ψ_y(y) ψ_{z,m}(z) |m⟩` with unit-norm packets.
///
/// The `x` and `y` packets are shared by all components because no factor of
/// the propagator couples them to spin.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    pub spin: SpinQN,
    pub coeffs: Vec<C64>,
    pub z_packets: Vec<QuadExpPacket>,
    pub x_packet: QuadExpPacket,
    pub y_packet: QuadExpPacket,
}

impl HybridState {
    pub fn new(
        spin: SpinQN,
        coeffs: Vec<C64>,
        z_packets: Vec<QuadExpPacket>,
        x_packet: QuadExpPacket,
        y_packet: QuadExpPacket,
    ) -> Result<Self> {
        if coeffs.len() != spin.dim() || z_packets.len() != spin.dim() {
            return Err(SgeError::InvalidParameter(format!(
                "spin {spin} needs {} coefficients and packets, got {} and {}",
                spin.dim(),
                coeffs.len(),
                z_packets.len()
            )));
        }
        let weight: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (weight - 1.0).abs() > 1e-10 {
            return Err(SgeError::InvalidParameter(format!(
                "spin coefficients must be normalized, Σ|c|² = {weight}"
            )));
        }
        for p in z_packets.iter().chain([&x_packet, &y_packet]) {
            if (p.norm_sq() - 1.0).abs() > 1e-10 {
                return Err(SgeError::InvalidParameter(format!(
                    "packets must have unit norm, got {}",
                    p.norm_sq()
                )));
            }
        }
        Ok(Self {
            spin,
            coeffs,
            z_packets,
            x_packet,
            y_packet,
        })
    }

    /// Initial product state: Gaussian of widths `σ_x, σ_y, σ_z` centred at the
    /// origin, moving with `v₀` along `y`, times the spin state `coeffs`.
    pub fn initial(cfg: &ExperimentConfig, spin: SpinQN, coeffs: Vec<C64>) -> Result<Self> {
        cfg.validate()?;
        let z = QuadExpPacket::from_gaussian(cfg.sigma_z, 0.0, 0.0)?;
        let x = QuadExpPacket::from_gaussian(cfg.sigma_x, 0.0, 0.0)?;
        let y = QuadExpPacket::from_gaussian(cfg.sigma_y, 0.0, cfg.beam_wavenumber())?;
        Self::new(spin, coeffs, vec![z; spin.dim()], x, y)
    }

    /// `Σ|c_m|²`.
    pub fn weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `(2m, c_m, ψ_{z,m})` in basis order.
    pub fn components(&self) -> impl Iterator<Item = (i64, C64, &QuadExpPacket)> {
        (0..self.spin.dim()).map(move |i| (self.spin.twice_m(i), self.coeffs[i], &self.z_packets[i]))
    }

    fn map_components(&self, f: impl Fn(f64, C64, &QuadExpPacket) -> Result<(C64, QuadExpPacket)>) -> Result<Self> {
        let mut next = self.clone();
        for i in 0..self.spin.dim() {
            let (c, p) = f(self.spin.m(i), self.coeffs[i], &self.z_packets[i])?;
            next.coeffs[i] = c;
            next.z_packets[i] = p;
        }
        Ok(next)
    }

    /// `c_m ← c_m e^{−iħγ²β²m²t³/(6M)}`.
    pub fn apply_u2c(&self, t: f64, cfg: &ExperimentConfig) -> Result<Self> {
        check_time(t)?;
        self.map_components(|m, c, p| Ok((c * C64::from_polar(1.0, u2c_phase(m, t, cfg)), *p)))
    }

    /// `ψ_m(z) ← ψ_m(z − γβt²ħm/(2M))`.
    pub fn apply_u2b(&self, t: f64, cfg: &ExperimentConfig) -> Result<Self> {
        check_time(t)?;
        self.map_components(|m, c, p| Ok((c, p.translate(u2b_shift(m, t, cfg)))))
    }

    /// Free flight of every packet.
    pub fn apply_u2a(&self, t: f64, cfg: &ExperimentConfig) -> Result<Self> {
        check_time(t)?;
        let mut next = self.map_components(|_, c, p| Ok((c, p.free_evolve(t, cfg.mass, cfg.hbar)?)))?;
        next.x_packet = self.x_packet.free_evolve(t, cfg.mass, cfg.hbar)?;
        next.y_packet = self.y_packet.free_evolve(t, cfg.mass, cfg.hbar)?;
        Ok(next)
    }

    /// `ψ_m ← e^{iγβmtz} ψ_m` and `c_m ← e^{iγmtB₀} c_m`.
    pub fn apply_u1(&self, t: f64, cfg: &ExperimentConfig) -> Result<Self> {
        check_time(t)?;
        let gamma = cfg.gamma();
        self.map_components(|m, c, p| {
            Ok((
                c * C64::from_polar(1.0, gamma * m * t * cfg.b0),
                p.boost(gamma * cfg.beta * m * t),
            ))
        })
    }

    /// `U_e(t)` applied rightmost factor first.
    pub fn evolve(&self, t: f64, cfg: &ExperimentConfig) -> Result<Self> {
        let mut next = self
            .apply_u2c(t, cfg)?
            .apply_u2b(t, cfg)?
            .apply_u2a(t, cfg)?
            .apply_u1(t, cfg)?;
        next.renormalize();
        Ok(next)
    }

    /// Piecewise-constant gradient: `evolve` once per segment with that
    /// segment's `β` and its own clock starting at zero.
    pub fn evolve_segments(&self, segments: &[GradientSegment], cfg: &ExperimentConfig) -> Result<Self> {
        segments.iter().try_fold(self.clone(), |state, seg| {
            state.evolve(seg.duration, &cfg.with_beta(seg.beta))
        })
    }

    /// Rescale packets to unit norm. Coefficients are left alone: every factor
    /// multiplies them by a pure phase.
    fn renormalize(&mut self) {
        for p in self
            .z_packets
            .iter_mut()
            .chain([&mut self.x_packet, &mut self.y_packet])
        {
            *p = p.normalized();
        }
    }

    /// Largest parameter distance between matching packets and coefficients.
    pub fn distance(&self, other: &Self) -> f64 {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let packets = self
            .z_packets
            .iter()
            .zip(&other.z_packets)
            .chain([(&self.x_packet, &other.x_packet), (&self.y_packet, &other.y_packet)])
            .map(|(a, b)| a.param_distance(b))
            .fold(0.0, f64::max);
        coeffs.max(packets)
    }

    /// `‖ψ − φ‖₂` of the `z ⊗ spin` wavefunctions. Insensitive to how a
    /// phase is split between a coefficient and its packet.
    pub fn spinor_distance(&self, other: &Self) -> Result<f64> {
        if self.spin != other.spin {
            return Err(SgeError::DimensionMismatch {
                left: (self.spin.dim(), 1),
                right: (other.spin.dim(), 1),
            });
        }
        let mut sq = 0.0;
        for i in 0..self.spin.dim() {
            let (c, d) = (self.coeffs[i], other.coeffs[i]);
            let (p, q) = (&self.z_packets[i], &other.z_packets[i]);
            let cross = c.conj() * d * overlap(p, q)?;
            sq += c.norm_sqr() * p.norm_sq() + d.norm_sqr() * q.norm_sq() - 2.0 * cross.re;
        }
        Ok(sq.max(0.0).sqrt())
    }

    /// Unit-weight and unit-norm invariants at `NORM` tolerance.
    pub fn check_invariants(&self) -> Result<()> {
        let weight = self.weight();
        if (weight - 1.0).abs() > tolerances::NORM {
            return Err(SgeError::InvalidParameter(format!("Σ|c|² drifted to {weight}")));
        }
        for p in self.z_packets.iter().chain([&self.x_packet, &self.y_packet]) {
            if (p.norm_sq() - 1.0).abs() > tolerances::NORM {
                return Err(SgeError::InvalidParameter(format!("packet norm drifted to {}", p.norm_sq())));
            }
        }
        Ok(())
    }
}

/// Displacement `γβt²ħm/(2M)` produced by `U₂ᵦ(t)`.
pub fn u2b_shift(m: f64, t: f64, cfg: &ExperimentConfig) -> f64 {
    cfg.gamma() * cfg.beta * t * t * cfg.hbar * m / (2.0 * cfg.mass)
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(SgeError::InvalidParameter(format!("evolution time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Dense `U₁U₂ₐU₂ᵦU₂ᵧ` on `z ⊗ spin` (index `i·n + j`), with `p̂z` the
/// spectral momentum of the periodic grid and `ẑ` diagonal.
pub fn dense_factored_matrix(grid: &Grid, t: f64, cfg: &ExperimentConfig, spin: SpinQN) -> Result<CMatrix> {
    grid.validate()?;
    check_time(t)?;
    let n = grid.n;
    let dim = n * spin.dim();
    if n > MAX_DENSE_GRID || dim > MAX_DENSE_DIM {
        return Err(SgeError::GridTooLarge {
            dim,
            limit: MAX_DENSE_DIM,
        });
    }
    let (hbar, mass, gamma) = (cfg.hbar, cfg.mass, cfg.gamma());
    let u2a = spectral_operator(grid, |k| C64::from_polar(1.0, -hbar * k * k * t / (2.0 * mass)));
    let z = grid.nodes();
    let mut u = CMatrix::zeros(dim, dim);
    for i in 0..spin.dim() {
        let m = spin.m(i);
        let shift = u2b_shift(m, t, cfg);
        // Translation by `shift` is e^{−i k shift} in the spectral basis.
        let u2b = spectral_operator(grid, |k| C64::from_polar(1.0, -k * shift));
        let u2c = C64::from_polar(1.0, u2c_phase(m, t, cfg));
        let u1 = DVector::from_iterator(
            n,
            z.iter().map(|&zj| C64::from_polar(1.0, gamma * t * (cfg.b0 + cfg.beta * zj) * m)),
        );
        let block = CMatrix::from_diagonal(&u1) * &u2a * u2b * u2c;
        u.view_mut((i * n, i * n), (n, n)).copy_from(&block);
    }
    Ok(u)
}

/// Dense `U₂ = exp(−i[p̂²t/2M + γβt²Ŝz p̂z/2M + γ²β²t³Ŝz²/6M]/ħ)`, the
/// interaction-picture propagator integrated in one exponential.
pub fn dense_interaction_generator(grid: &Grid, t: f64, cfg: &ExperimentConfig, spin: SpinQN) -> Result<CMatrix> {
    grid.validate()?;
    let n = grid.n;
    let dim = n * spin.dim();
    if n > MAX_DENSE_GRID || dim > MAX_DENSE_DIM {
        return Err(SgeError::GridTooLarge {
            dim,
            limit: MAX_DENSE_DIM,
        });
    }
    let (hbar, mass) = (cfg.hbar, cfg.mass);
    let gb = cfg.gamma() * cfg.beta;
    let mut g = CMatrix::zeros(dim, dim);
    for i in 0..spin.dim() {
        let sz = hbar * spin.m(i);
        let block = spectral_operator(grid, |k| {
            let p = hbar * k;
            C64::from(p * p * t / (2.0 * mass) + gb * t * t * sz * p / (2.0 * mass) + gb * gb * t.powi(3) * sz * sz / (6.0 * mass))
        });
        g.view_mut((i * n, i * n), (n, n)).copy_from(&block);
    }
    Ok(g)
}

/// Dense `U₁(t) = exp(iγt(B₀ + βẑ)Ŝz/ħ)`.
pub fn dense_u1(grid: &Grid, t: f64, cfg: &ExperimentConfig, spin: SpinQN) -> CMatrix {
    let n = grid.n;
    let gamma = cfg.gamma();
    let diag = DVector::from_iterator(
        n * spin.dim(),
        (0..spin.dim()).flat_map(|i| {
            let m = spin.m(i);
            (0..n).map(move |j| C64::from_polar(1.0, gamma * t * (cfg.b0 + cfg.beta * grid.node(j)) * m))
        }),
    );
    CMatrix::from_diagonal(&diag)
}
