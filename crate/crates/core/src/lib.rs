//! Covariance versus statistical independence, classical and quantum.
//!
//! For a pair of random variables that each take exactly two distinct values,
//! zero covariance forces the joint table to factorize. The [`classical`]
//! module implements that machinery over general finite tables, the
//! [`quantum`] module provides two-qubit pure states and local observables,
//! and [`separation`] shows that the quantum analogue fails: an entangled
//! state can carry zero covariance between local observables.

#![forbid(unsafe_code)]

pub mod campaign;
pub mod classical;
pub mod cli;
pub mod complex;
pub mod quantum;
pub mod random;
pub mod rng;
pub mod separation;

pub use classical::{BinaryParameterization, ClassicalError, JointDistribution, SampleSummary};
pub use complex::{Complex, Mat2, Mat4};
pub use quantum::{Observable2, QuantumError, SpectralDecomposition2, TwoQubitState};
pub use rng::SplitMix64;
pub use separation::{SeparationError, SeparationReport, Verdict};

/// Tolerance for probability nonnegativity and normalization at construction.
pub const EPS_PROB: f64 = 1e-9;

/// Relative tolerance for analytic identities.
pub const EPS_NUM: f64 = 1e-10;
