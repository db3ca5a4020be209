//! Quantum dynamics of the Stern-Gerlach experiment for arbitrary spin.
//!
//! The effective Hamiltonian `p²/2M − γ(B₀ + βz)S_z` has an exactly factorized
//! propagator `U₁ U₂ₐ U₂ᵦ U₂ᵧ`. Every factor maps a complex Gaussian onto a
//! complex Gaussian, so the evolved position⊗spin state is carried in closed
//! form by [`propagator::HybridState`]. The [`oracle`] module holds the
//! independent brute-force references (split-step Fourier integration and dense
//! matrix exponentials) that the closed form is checked against.

pub mod config;
pub mod error;
pub mod grid;
pub mod harness;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod spin_algebra;
pub mod tolerances;
pub mod wavepacket;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for spin operators and desk-scale propagators.
pub type CMatrix = nalgebra::DMatrix<C64>;

pub use config::{ExperimentConfig, GradientSegment};
pub use error::{Result, SgeError};
pub use grid::Grid;
pub use propagator::HybridState;
pub use spin_algebra::{SpinMatrices, SpinQN};
pub use wavepacket::QuadExpPacket;
