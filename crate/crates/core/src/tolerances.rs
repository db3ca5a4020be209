//! Acceptance thresholds, pinned in one place.
//!
//! Values are absolute unless the name says `REL`.

/// Spin algebra relations (`[Sx,Sy] = iħSz`, Casimir), scaled units.
pub const SPIN_ALGEBRA: f64 = 1e-12;

/// Norms and unit-coefficient bookkeeping of closed-form packets.
pub const NORM: f64 = 1e-12;

/// Dense factorized propagator vs. `expm(−iH t/ħ)`, max-entry norm.
pub const BCH_MAX_ENTRY: f64 = 1e-6;

/// Unitarity of any dense propagator, max-entry norm of `U†U − I`.
pub const UNITARITY: f64 = 1e-10;

/// Closed-form vs split-step relative L2 density error.
pub const ORACLE_DENSITY_REL_L2: f64 = 1e-4;

/// Expected ratio of splitting errors when the time step is halved.
pub const STRANG_RATIO: f64 = 4.0;
/// Allowed relative deviation of that ratio.
pub const STRANG_RATIO_SLACK: f64 = 0.2;

/// Closed-form identities (deflection, momentum kick) relative error.
pub const IDENTITY_REL: f64 = 1e-12;

/// Silver deflection and peak separation vs the expected magnitudes.
pub const SILVER_DEFLECTION_REL: f64 = 0.02;
/// `|Δz|` for one spin-1/2 component at the magnet exit, metres.
pub const SILVER_DEFLECTION_M: f64 = 7.3e-5;
/// Separation of the two spin-1/2 beams at the magnet exit, metres.
pub const SILVER_SEPARATION_M: f64 = 1.46e-4;

/// Maximum `σ_z(t)/σ_z(0) − 1` over the transit for silver.
pub const SILVER_BROADENING: f64 = 1e-6;

/// Entropy of a product state.
pub const ENTROPY_PRODUCT: f64 = 1e-12;
/// Entropy of two well separated spin-1/2 beams vs `ln 2`.
pub const ENTROPY_SEPARATED: f64 = 1e-6;
/// Entropy of `2s+1` orthogonal equal-weight beams vs `ln(2s+1)`.
pub const ENTROPY_ORTHOGONAL: f64 = 1e-10;
/// Entropy left after the interferometer recombines the beams.
pub const ENTROPY_RECOMBINED: f64 = 1e-6;

/// Pure-state vs mixed-ensemble density, relative to the peak density.
pub const PURE_VS_MIXED: f64 = 1e-14;

/// Truncated Cox expansion vs exact conjugation.
pub const COX_SERIES: f64 = 1e-10;

/// Net momentum kick after the interferometer, relative to one-arm kick.
pub const INTERFEROMETER_KICK_REL: f64 = 1e-10;

/// States produced by different orderings of commuting factors.
pub const FACTOR_ORDERING: f64 = 1e-12;

/// Eigenvalues at or below this contribute nothing to `−λ ln λ`.
pub const EIGEN_CLIP: f64 = 1e-14;

/// Edge-to-peak amplitude ratio that counts as leaking through the boundary.
pub const BOUNDARY_LEAK: f64 = 1e-8;
