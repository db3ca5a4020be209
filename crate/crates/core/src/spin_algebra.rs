//! Spin operators for arbitrary `s` and the operator identities the
//! factorization relies on.
//!
//! Basis vectors are ordered by descending projection, `m = s, s−1, …, −s`,
//! so index `i` carries `m = s − i`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::config::ExperimentConfig;
use crate::error::{Result, SgeError};
use crate::{CMatrix, C64};

/// Spin quantum number stored as `2s` so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinQN {
    twice_s: u32,
}

impl SpinQN {
    pub const fn new(twice_s: u32) -> Self {
        Self { twice_s }
    }

    pub const fn half() -> Self {
        Self::new(1)
    }

    pub const fn twice_s(self) -> u32 {
        self.twice_s
    }

    pub fn s(self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    /// Hilbert space dimension `2s + 1`.
    pub const fn dim(self) -> usize {
        self.twice_s as usize + 1
    }

    /// `2m` for basis index `i`.
    pub fn twice_m(self, index: usize) -> i64 {
        self.twice_s as i64 - 2 * index as i64
    }

    pub fn m(self, index: usize) -> f64 {
        self.twice_m(index) as f64 / 2.0
    }

    /// Projections in basis order.
    pub fn m_values(self) -> impl ExactSizeIterator<Item = f64> {
        (0..self.dim()).map(move |i| self.m(i))
    }
}

impl fmt::Display for SpinQN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_s.is_multiple_of(2) {
            write!(f, "{}", self.twice_s / 2)
        } else {
            write!(f, "{}/2", self.twice_s)
        }
    }
}

impl FromStr for SpinQN {
    type Err = SgeError;

    /// Accepts `"1"`, `"3/2"` or a decimal such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || SgeError::InvalidParameter(format!("not a spin quantum number: {s:?}"));
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(Self::new(num)),
                "1" => Ok(Self::new(2 * num)),
                _ => Err(bad()),
            };
        }
        let value: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * value;
        if value < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(bad());
        }
        Ok(Self::new(twice as u32))
    }
}

/// Half-integer label used in messages and reports, e.g. `-1/2`.
pub fn format_m(twice_m: i64) -> String {
    if twice_m % 2 == 0 {
        format!("{}", twice_m / 2)
    } else {
        format!("{twice_m}/2")
    }
}

/// `Sx`, `Sy`, `Sz` in the `|s, m⟩` basis, in units where `ħ` is `hbar`.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub spin: SpinQN,
    pub hbar: f64,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl SpinMatrices {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// `S⁺` built from `S⁺|m⟩ = ħ√(s(s+1) − m(m+1)) |m+1⟩`.
    pub fn raising(&self) -> CMatrix {
        raising(self.spin, self.hbar)
    }

    /// `Sx² + Sy² + Sz²`.
    pub fn casimir(&self) -> CMatrix {
        &self.sx * &self.sx + &self.sy * &self.sy + &self.sz * &self.sz
    }
}

fn raising(spin: SpinQN, hbar: f64) -> CMatrix {
    let d = spin.dim();
    let s = spin.s();
    let mut plus = CMatrix::zeros(d, d);
    // |m⟩ at index i is raised to index i − 1.
    for i in 1..d {
        let m = spin.m(i);
        plus[(i - 1, i)] = C64::from(hbar * (s * (s + 1.0) - m * (m + 1.0)).sqrt());
    }
    plus
}

pub fn build_spin_matrices(spin: SpinQN, hbar: f64) -> SpinMatrices {
    let d = spin.dim();
    let plus = raising(spin, hbar);
    let minus = plus.adjoint();
    let sx = (&plus + &minus) * C64::from(0.5);
    let sy = (&plus - &minus) * C64::new(0.0, -0.5);
    let sz = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        spin.m_values().map(|m| C64::from(hbar * m)),
    ));
    SpinMatrices {
        spin,
        hbar,
        sx,
        sy,
        sz,
    }
}

fn check_square_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(SgeError::DimensionMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    Ok(a * b - b * a)
}

/// Truncated expansion `Σ_{k≤order} xᵏ/k! ad_Aᵏ(B)` of `e^{xA} B e^{−xA}`.
pub fn conjugate_series(a: &CMatrix, b: &CMatrix, x: C64, order: usize) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    let mut term = b.clone();
    let mut sum = b.clone();
    for k in 1..=order {
        term = (a * &term - &term * a) * (x / k as f64);
        sum += &term;
    }
    Ok(sum)
}

/// `α = −γ²β²t³ / (6ħM)`, the coefficient of `Sz²` in the exponent of `U₂ᵧ`.
pub fn u2c_alpha(t: f64, cfg: &ExperimentConfig) -> f64 {
    let gb = cfg.gamma() * cfg.beta;
    -gb * gb * t.powi(3) / (6.0 * cfg.hbar * cfg.mass)
}

/// Phase acquired by `|m⟩` under `U₂ᵧ(t)`: `−ħγ²β²m²t³ / (6M)`.
pub fn u2c_phase(m: f64, t: f64, cfg: &ExperimentConfig) -> f64 {
    let gb = cfg.gamma() * cfg.beta;
    -cfg.hbar * gb * gb * m * m * t.powi(3) / (6.0 * cfg.mass)
}

/// `U₂ᵧ(t) = diag(e^{iφ(m)})`.
pub fn u2c_matrix(spin: SpinQN, t: f64, cfg: &ExperimentConfig) -> CMatrix {
    diagonal_phases(spin.m_values().map(|m| u2c_phase(m, t, cfg)))
}

fn diagonal_phases(phases: impl ExactSizeIterator<Item = f64>) -> CMatrix {
    let d = phases.len();
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        phases.map(|phi| C64::from_polar(1.0, phi)),
    ))
}

/// Heisenberg-picture `U† Sx U` with `U = e^{iα Sz²}`. `alpha` carries units of
/// inverse action squared so that `α (ħm)²` is an angle.
///
/// `Sz` is diagonal, so `U` is built entrywise.
pub fn heisenberg_u2c_transform(spins: &SpinMatrices, alpha: f64) -> CMatrix {
    let u = diagonal_phases(
        spins
            .spin
            .m_values()
            .map(|m| alpha * (spins.hbar * m).powi(2)),
    );
    u.adjoint() * &spins.sx * u
}

/// Maximum absolute entry, the norm used for all matrix comparisons.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
