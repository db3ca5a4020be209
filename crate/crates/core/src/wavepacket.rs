//! Complex Gaussians `ψ(z) = exp(a z² + b z + c)`.
//!
//! The family is closed under translation, momentum boosts, constant phases
//! and free evolution, which is every action the factorized propagator has on
//! the spatial part of a spin component.
//!
//! Internally a packet is stored in centred form
//!
//! ```text
//! ψ(z) = exp(a (z − z₀)² + i k (z − z₀) + c₀),   z₀, k real
//! ```
//!
//! which is the same family (`b = −2a z₀ + ik`, `c = c₀ + a z₀² − ik z₀`) but
//! keeps translations and boosts exact when `k z₀` is large. Atoms kicked by a
//! 10 T/cm gradient reach `k ~ 10⁹ m⁻¹` while `z₀ ~ 10⁻⁴ m`.

use std::f64::consts::PI;

use crate::error::{Result, SgeError};
use crate::grid::Grid;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadExpPacket {
    a: C64,
    center: f64,
    wavenumber: f64,
    log_amp: C64,
}

/// Closed-form moments of `|ψ|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub norm: f64,
    pub centroid: f64,
    pub variance: f64,
    pub mean_momentum: f64,
}

impl QuadExpPacket {
    /// Unit-norm Gaussian `(2πσ²)^{-1/4} exp(−(z − z₀)²/(4σ²) + i k₀ z)`.
    pub fn from_gaussian(sigma: f64, z0: f64, k0: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(SgeError::InvalidParameter(format!(
                "gaussian width must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            a: C64::from(-1.0 / (4.0 * sigma * sigma)),
            center: z0,
            wavenumber: k0,
            log_amp: C64::new(-0.25 * (2.0 * PI * sigma * sigma).ln(), k0 * z0),
        })
    }

    /// Packet with raw exponent coefficients; requires `Re a < 0`.
    pub fn from_exponent(a: C64, b: C64, c: C64) -> Result<Self> {
        if a.re.is_nan() || a.re >= 0.0 || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(SgeError::InvalidParameter(format!(
                "packet exponent needs finite coefficients and Re a < 0, got a = {a}"
            )));
        }
        let center = -b.re / (2.0 * a.re);
        let wavenumber = b.im + 2.0 * a.im * center;
        let log_amp = c - a * center * center + C64::new(0.0, wavenumber * center);
        Ok(Self {
            a,
            center,
            wavenumber,
            log_amp,
        })
    }

    /// Packet in centred form; requires `Re a < 0`.
    pub fn from_centered(a: C64, center: f64, wavenumber: f64, log_amp: C64) -> Result<Self> {
        if a.re.is_nan() || a.re >= 0.0 {
            return Err(SgeError::InvalidParameter(format!(
                "packet exponent needs Re a < 0, got a = {a}"
            )));
        }
        Ok(Self {
            a,
            center,
            wavenumber,
            log_amp,
        })
    }

    /// Quadratic coefficient `a` (1/length²).
    pub fn a(&self) -> C64 {
        self.a
    }

    /// Linear coefficient `b` (1/length).
    pub fn b(&self) -> C64 {
        -2.0 * self.a * self.center + C64::new(0.0, self.wavenumber)
    }

    /// Constant term `c`.
    pub fn c(&self) -> C64 {
        self.log_amp + self.a * self.center * self.center
            - C64::new(0.0, self.wavenumber * self.center)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// `ln ψ(z₀)`.
    pub fn log_amplitude(&self) -> C64 {
        self.log_amp
    }

    /// `ψ(z − Δ)`.
    pub fn translate(&self, delta: f64) -> Self {
        Self {
            center: self.center + delta,
            ..*self
        }
    }

    /// `e^{i Δk z} ψ(z)`.
    pub fn boost(&self, dk: f64) -> Self {
        Self {
            wavenumber: self.wavenumber + dk,
            log_amp: self.log_amp + C64::new(0.0, dk * self.center),
            ..*self
        }
    }

    /// `e^{iφ} ψ(z)`.
    pub fn global_phase(&self, phi: f64) -> Self {
        Self {
            log_amp: self.log_amp + C64::new(0.0, phi),
            ..*self
        }
    }

    /// Exact free evolution `e^{−i p² t/(2Mħ)} ψ`.
    ///
    /// Writing `a = −1/(4s)`, the width parameter moves to `s + iħt/(2M)` and
    /// the centre moves with the group velocity `ħk/M`.
    pub fn free_evolve(&self, t: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(SgeError::InvalidParameter(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !t.is_finite() {
            return Err(SgeError::InvalidParameter(format!("time must be finite, got {t}")));
        }
        if t == 0.0 {
            return Ok(*self);
        }
        let s0 = -0.25 / self.a;
        let st = s0 + C64::new(0.0, hbar * t / (2.0 * mass));
        let k = self.wavenumber;
        Ok(Self {
            a: -0.25 / st,
            center: self.center + hbar * k * t / mass,
            wavenumber: k,
            log_amp: self.log_amp
                + 0.5 * (s0.ln() - st.ln())
                + C64::new(0.0, hbar * k * k * t / (2.0 * mass)),
        })
    }

    pub fn value_at(&self, z: f64) -> C64 {
        let u = z - self.center;
        (self.a * u * u + C64::new(0.0, self.wavenumber * u) + self.log_amp).exp()
    }

    pub fn sample(&self, grid: &Grid) -> Vec<C64> {
        (0..grid.n).map(|j| self.value_at(grid.node(j))).collect()
    }

    /// `∫|ψ|² dz`.
    pub fn norm_sq(&self) -> f64 {
        (2.0 * self.log_amp.re).exp() * (PI / (-2.0 * self.a.re)).sqrt()
    }

    pub fn normalized(&self) -> Self {
        Self {
            log_amp: self.log_amp - 0.5 * self.norm_sq().ln(),
            ..*self
        }
    }

    /// Standard deviation of `|ψ|²`.
    pub fn width(&self) -> f64 {
        (-0.25 / self.a.re).sqrt()
    }

    pub fn moments(&self, hbar: f64) -> Moments {
        Moments {
            norm: self.norm_sq(),
            centroid: self.center,
            variance: -0.25 / self.a.re,
            mean_momentum: hbar * self.wavenumber,
        }
    }

    /// Dimensionless parameter distance: the worst of the relative change in
    /// `a`, centre and wavenumber shifts measured against the packet width,
    /// and the change of `ln ψ(z₀)` (phase wrapped, relative to its size).
    pub fn param_distance(&self, other: &Self) -> f64 {
        let width = self.width();
        let da = (self.a - other.a).norm() / self.a.norm();
        let dz = (self.center - other.center).abs() / width;
        let dk = (self.wavenumber - other.wavenumber).abs() * width;
        let dre = (self.log_amp.re - other.log_amp.re).abs();
        let dphase = wrap_angle(self.log_amp.im - other.log_amp.im).abs()
            / self.log_amp.im.abs().max(1.0);
        da.max(dz).max(dk).max(dre).max(dphase)
    }
}

/// `∫ conj(ψ_p) ψ_q dz` in closed form.
pub fn overlap(p: &QuadExpPacket, q: &QuadExpPacket) -> Result<C64> {
    let a_p = p.a.conj();
    let quad = a_p + q.a;
    if quad.re.is_nan() || quad.re >= 0.0 {
        return Err(SgeError::NonConvergent(quad.re));
    }
    // Expand around the centre of q: z − z_p = u + d.
    let d = q.center - p.center;
    let lin = 2.0 * a_p * d + C64::new(0.0, q.wavenumber - p.wavenumber);
    let cst = a_p * d * d - C64::new(0.0, p.wavenumber * d) + p.log_amp.conj() + q.log_amp;
    Ok((PI / -quad).sqrt() * (cst - lin * lin / (4.0 * quad)).exp())
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Trapezoid sums on a wide, fine grid; exponentially accurate for
    /// Gaussians that decay well inside the window.
    struct Quad {
        z: Vec<f64>,
        dz: f64,
    }

    impl Quad {
        fn new(lo: f64, hi: f64, n: usize) -> Self {
            let dz = (hi - lo) / n as f64;
            Self {
                z: (0..n).map(|j| lo + j as f64 * dz).collect(),
                dz,
            }
        }

        fn values(&self, p: &QuadExpPacket) -> Vec<C64> {
            self.z.iter().map(|&z| p.value_at(z)).collect()
        }

        fn norm(&self, p: &QuadExpPacket) -> f64 {
            self.values(p).iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dz
        }

        fn centroid(&self, p: &QuadExpPacket) -> f64 {
            let v = self.values(p);
            let n: f64 = v.iter().map(|v| v.norm_sqr()).sum();
            v.iter().zip(&self.z).map(|(v, z)| v.norm_sqr() * z).sum::<f64>() / n
        }

        fn variance(&self, p: &QuadExpPacket) -> f64 {
            let v = self.values(p);
            let c = self.centroid(p);
            let n: f64 = v.iter().map(|v| v.norm_sqr()).sum();
            v.iter().zip(&self.z).map(|(v, z)| v.norm_sqr() * (z - c).powi(2)).sum::<f64>() / n
        }

        /// `⟨p⟩/ħ` via a centred difference of ψ.
        fn mean_wavenumber(&self, p: &QuadExpPacket) -> f64 {
            let h = 1e-5;
            let mut num = C64::from(0.0);
            let mut den = 0.0;
            for &z in &self.z {
                let psi = p.value_at(z);
                let dpsi = (p.value_at(z + h) - p.value_at(z - h)) / (2.0 * h);
                num += psi.conj() * dpsi * C64::new(0.0, -1.0);
                den += psi.norm_sqr();
            }
            num.re / den
        }

        fn overlap(&self, p: &QuadExpPacket, q: &QuadExpPacket) -> C64 {
            self.values(p)
                .iter()
                .zip(self.values(q))
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                * self.dz
        }
    }

    fn unit() -> QuadExpPacket {
        QuadExpPacket::from_gaussian(1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn standard_gaussian_coefficients() {
        let p = unit();
        assert_eq!(p.a(), C64::from(-0.25));
        assert_eq!(p.b(), C64::from(0.0));
        assert!((p.c() - C64::from(-0.25 * (2.0 * PI).ln())).norm() < 1e-15);
        let m = p.moments(1.0);
        assert!((m.norm - 1.0).abs() < 1e-14);
        assert_eq!((m.centroid, m.mean_momentum), (0.0, 0.0));
        assert!((m.variance - 1.0).abs() < 1e-15);
        assert!(QuadExpPacket::from_gaussian(0.0, 0.0, 0.0).is_err());
        assert!(QuadExpPacket::from_gaussian(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn from_gaussian_moments_by_quadrature() {
        let q = Quad::new(-20.0, 20.0, 8192);
        let p = QuadExpPacket::from_gaussian(1.0, 2.0, 0.0).unwrap();
        assert!((q.centroid(&p) - 2.0).abs() < 1e-12);
        let p = QuadExpPacket::from_gaussian(1.3, -0.4, 5.0).unwrap();
        assert!((q.mean_wavenumber(&p) - 5.0).abs() < 1e-8);
        assert!((q.norm(&p) - 1.0).abs() < 1e-12);
        assert!((q.variance(&p) - 1.69).abs() < 1e-12);
    }

    #[test]
    fn raw_and_centered_forms_agree() {
        let a = C64::new(-0.3, 0.7);
        let b = C64::new(0.4, -1.1);
        let c = C64::new(0.2, 0.5);
        let p = QuadExpPacket::from_exponent(a, b, c).unwrap();
        assert!((p.a() - a).norm() < 1e-15);
        assert!((p.b() - b).norm() < 1e-15);
        assert!((p.c() - c).norm() < 1e-15);
        for z in [-1.5, 0.0, 0.3, 2.0] {
            let direct = (a * z * z + b * z + c).exp();
            assert!((p.value_at(z) - direct).norm() < 1e-14 * direct.norm().max(1.0));
        }
        assert!(QuadExpPacket::from_exponent(C64::new(0.1, 0.0), b, c).is_err());
    }

    #[test]
    fn translate_examples() {
        let p = unit();
        assert_eq!(p.translate(0.0), p);
        let t = p.translate(1.0);
        assert!((t.a() - p.a()).norm() == 0.0);
        assert!((t.b() - C64::from(0.5)).norm() < 1e-15);
        assert!((t.c() - (p.c() - 0.25)).norm() < 1e-15);

        let q = Quad::new(-25.0, 25.0, 8192);
        let p = QuadExpPacket::from_gaussian(0.8, 0.3, -2.0).unwrap();
        let t = p.translate(1.7);
        assert!((q.centroid(&t) - q.centroid(&p) - 1.7).abs() < 1e-12);
        assert!((q.variance(&t) - q.variance(&p)).abs() < 1e-12);
    }

    #[test]
    fn boost_and_phase_examples() {
        let p = QuadExpPacket::from_gaussian(1.1, 0.5, 1.0).unwrap();
        assert_eq!(p.boost(0.0), p);
        assert_eq!(p.global_phase(0.0), p);
        let b = p.boost(3.0);
        for z in [-2.0, -1.1, -0.3, 0.0, 0.2, 0.5, 0.9, 1.4, 2.2, 3.0] {
            assert!((b.value_at(z).norm_sqr() - p.value_at(z).norm_sqr()).abs() < 1e-15);
            let flipped = p.global_phase(PI).value_at(z);
            assert!((flipped + p.value_at(z)).norm() < 1e-15);
        }
        let q = Quad::new(-20.0, 20.0, 8192);
        assert!((q.mean_wavenumber(&b) - q.mean_wavenumber(&p) - 3.0).abs() < 1e-8);
        assert!((b.moments(1.0).mean_momentum - p.moments(1.0).mean_momentum - 3.0).abs() < 1e-15);
        assert!((p.global_phase(0.77).norm_sq() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn free_evolution_broadening() {
        let p = unit().free_evolve(2.0, 1.0, 1.0).unwrap();
        assert!((p.moments(1.0).variance - 2.0).abs() < 1e-12);
        assert!((p.norm_sq() - 1.0).abs() < 1e-12);
        assert_eq!(unit().free_evolve(0.0, 1.0, 1.0).unwrap(), unit());
        assert!(unit().free_evolve(1.0, 0.0, 1.0).is_err());

        let q = Quad::new(-40.0, 40.0, 16384);
        assert!((q.norm(&p) - 1.0).abs() < 1e-12);
        assert!((q.variance(&p) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn free_evolution_moves_with_group_velocity() {
        let p = QuadExpPacket::from_gaussian(1.0, 0.0, 5.0).unwrap();
        let e = p.free_evolve(1.0, 1.0, 1.0).unwrap();
        assert!((e.moments(1.0).centroid - 5.0).abs() < 1e-14);
        let q = Quad::new(-30.0, 40.0, 16384);
        assert!((q.centroid(&e) - 5.0).abs() < 1e-10);
        assert!((q.mean_wavenumber(&e) - 5.0).abs() < 1e-7);
    }

    #[test]
    fn free_evolution_matches_direct_schrodinger_check() {
        // iψ_t = −ψ_zz/2 checked by finite differences at a few points.
        let p = QuadExpPacket::from_gaussian(0.9, 0.4, 1.3).unwrap();
        let (t, h, dt) = (0.6, 1e-3, 1e-5);
        let at = |tt: f64, z: f64| p.free_evolve(tt, 1.0, 1.0).unwrap().value_at(z);
        for z in [-1.0, 0.0, 0.7, 2.1] {
            let dpsi_dt = (at(t + dt, z) - at(t - dt, z)) / (2.0 * dt);
            let lap = (at(t, z + h) - 2.0 * at(t, z) + at(t, z - h)) / (h * h);
            let resid = C64::i() * dpsi_dt + 0.5 * lap;
            assert!(resid.norm() < 1e-5, "residual {resid} at z = {z}");
        }
    }

    #[test]
    fn overlap_examples() {
        let p = QuadExpPacket::from_gaussian(1.0, 0.0, 0.0).unwrap();
        assert!((overlap(&p, &p).unwrap() - 1.0).norm() < 1e-14);
        for delta in [0.0, 0.5, 2.0, 4.0] {
            let q = p.translate(delta);
            let g = overlap(&p, &q).unwrap().norm();
            assert!((g - (-delta * delta / 8.0).exp()).abs() < 1e-14);
        }
        let r = QuadExpPacket::from_gaussian(0.7, 0.8, -1.2)
            .unwrap()
            .free_evolve(0.9, 1.0, 1.0)
            .unwrap()
            .global_phase(0.4);
        let s = QuadExpPacket::from_gaussian(1.4, -0.3, 0.6).unwrap().boost(0.25);
        let quad = Quad::new(-30.0, 30.0, 16384);
        assert!((overlap(&r, &s).unwrap() - quad.overlap(&r, &s)).norm() < 1e-8);
    }

    #[test]
    fn overlap_rejects_divergent_integral() {
        let p = unit();
        let bad = QuadExpPacket {
            a: C64::new(0.5, 0.0),
            ..p
        };
        assert!(matches!(overlap(&bad, &bad), Err(SgeError::NonConvergent(_))));
    }

    #[test]
    fn moments_after_operations() {
        let p = QuadExpPacket::from_gaussian(1.0, 0.0, 0.0).unwrap().boost(2.5);
        assert!((p.moments(1.0).mean_momentum - 2.5).abs() < 1e-15);
        let e = p.free_evolve(3.3, 2.0, 0.7).unwrap();
        assert!((e.moments(0.7).norm - 1.0).abs() < 1e-12);
        let q = Quad::new(-40.0, 40.0, 16384);
        assert!((q.norm(&e) - e.norm_sq()).abs() < 1e-12);
        assert!((q.variance(&e) - e.moments(0.7).variance).abs() < 1e-10);
    }

    #[test]
    fn sampling() {
        let g = Grid::new(-1.0, 1.0, 2).unwrap();
        let flat = QuadExpPacket::from_exponent(C64::from(-1.0), C64::from(0.0), C64::from(0.0)).unwrap();
        // Node 1 of this grid sits at z = 0.
        assert_eq!(flat.sample(&g)[1], C64::from(1.0));

        let g = Grid::new(-8.0, 8.0, 256).unwrap();
        let s = unit().sample(&g);
        for j in 1..g.n {
            assert!((s[j] - s[g.n - j]).norm() < 1e-15);
        }
        let discrete: f64 = s.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dz();
        assert!((discrete - 1.0).abs() < 1e-12);
    }

    fn arb_packet() -> impl Strategy<Value = QuadExpPacket> {
        (0.3f64..3.0, -2.0f64..2.0, -3.0f64..3.0, -1.0f64..1.0, 0.0f64..2.0).prop_map(
            |(sigma, z0, k0, phase, t)| {
                QuadExpPacket::from_gaussian(sigma, z0, k0)
                    .unwrap()
                    .global_phase(phase)
                    .free_evolve(t, 1.0, 1.0)
                    .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn operations_preserve_norm(p in arb_packet(), d in -5.0f64..5.0, k in -5.0f64..5.0, t in 0.0f64..4.0) {
            for q in [p.translate(d), p.boost(k), p.global_phase(k), p.free_evolve(t, 1.3, 0.8).unwrap()] {
                prop_assert!((q.norm_sq() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn free_evolution_is_a_semigroup(p in arb_packet(), t1 in 0.0f64..3.0, t2 in 0.0f64..3.0) {
            let two = p.free_evolve(t1, 1.0, 1.0).unwrap().free_evolve(t2, 1.0, 1.0).unwrap();
            let one = p.free_evolve(t1 + t2, 1.0, 1.0).unwrap();
            prop_assert!(one.param_distance(&two) < 1e-12, "distance {}", one.param_distance(&two));
        }

        #[test]
        fn centroid_follows_group_velocity(z0 in -3.0f64..3.0, k0 in -4.0f64..4.0, d in -2.0f64..2.0, t in 0.0f64..5.0, mass in 0.5f64..3.0) {
            let p = QuadExpPacket::from_gaussian(1.0, z0, k0).unwrap()
                .translate(d)
                .free_evolve(t, mass, 1.0).unwrap();
            let expected = z0 + d + k0 * t / mass;
            prop_assert!((p.moments(1.0).centroid - expected).abs() <= 1e-14 * expected.abs().max(1.0));
        }

        #[test]
        fn overlap_is_conjugate_symmetric(p in arb_packet(), q in arb_packet()) {
            let pq = overlap(&p, &q).unwrap();
            let qp = overlap(&q, &p).unwrap();
            prop_assert!((pq - qp.conj()).norm() < 1e-13);
        }
    }
}
