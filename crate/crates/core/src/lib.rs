//! Typical entanglement of random pure Gaussian states.
//!
//! Pure Gaussian states of `n` bosonic modes are parametrised as
//! `σ = Oᵀ Z² O`, where `O` is a Haar-random orthogonal symplectic matrix
//! (obtained from `U(n)`) and `Z²` holds the squeezings fixed by the per-mode
//! energies. Energies are drawn from a flat distribution under a total-energy
//! cap (micro-canonical) or from i.i.d. Boltzmann laws at temperature `T`
//! (canonical). The crate provides
//!
//! * [`symplectic`] and [`entropy`]: covariance matrices, symplectic spectra,
//!   invariants, purity and von Neumann entropy,
//! * [`haar`] and [`measures`]: samplers for the compact and energy variables,
//! * [`analytics`]: closed-form moments of the inverse squared purity and
//!   asymptotic/extremal entropies,
//! * [`bounds`]: linear-programming bounds on the micro-canonical mean entropy,
//! * [`ensemble`] and [`scan`]: reproducible parallel Monte Carlo runs.
//!
//! Phase-space ordering is always `xxpp`: `(x_1..x_n, p_1..p_n)`. Energies are
//! in units of `ħω/4`, so the vacuum has `σ = 1` and energy 2 per mode.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod bch;
pub mod bounds;
pub mod ensemble;
pub mod entropy;
mod error;
pub mod haar;
pub mod measures;
pub mod output;
pub mod rng;
pub mod scan;
pub mod simplex;
pub mod stats;
pub mod symplectic;

pub use error::{Error, Result};

/// Asymmetry tolerance accepted for covariance matrices (max `|σ_ij − σ_ji|`).
pub const TOL_SYM: f64 = 1e-9;

/// Slack on the uncertainty principle `ν ≥ 1`; values in `[1 − TOL_UNC, 1)` are clamped to 1.
pub const TOL_UNC: f64 = 1e-7;

pub use entropy::LogBase;
pub use measures::{CanonicalConfig, EnergyVector, Measure, MicrocanonicalConfig};
pub use symplectic::{CovarianceMatrix, InvariantVector, SymplecticForm, SymplecticSpectrum};
