//! Unbiased observable estimation from coherently noisy quantum circuits.
//!
//! An ideal Pauli rotation channel can be written as a signed, sum-to-one
//! mixture of over-rotated (noisy) channels. Sampling the mixture branches
//! with probabilities proportional to the magnitudes of the coefficients and
//! weighting every measurement by the product of per-gate one-norms (with the
//! product sign) yields an estimator whose expectation is the ideal-circuit
//! observable, even though every executed circuit is noisy. Combining the
//! mixture with Pauli twirling additionally suppresses error components that
//! do not commute with the rotation axis.
//!
//! The crate provides:
//!
//! - [`pauli`]: bitmask Pauli strings, commutation, twirl subgroups.
//! - [`statevec`]: a dense statevector engine with fast Pauli-rotation
//!   kernels and computational-basis sampling.
//! - [`mixture`]: the signed three-channel decomposition coefficients, the
//!   one-norm cost, branch sampling and the (A, B) offset landscape scan.
//! - [`noise`]: coherent error models (constant, uniform, three-axis),
//!   error-angle extraction from a given approximate unitary, twirl sampling.
//! - [`circuits`]: Trotterized Ising circuits, Clifford + Rz compilation,
//!   error attachment and randomized instance sampling.
//! - [`estimator`]: the Monte-Carlo estimation loop, the variance bound and
//!   the shot bound, plus the T-insertion overhead rate.
//! - [`oracle`]: exact superoperator / density-matrix references that verify
//!   every decomposition identity and the estimator's unbiasedness without
//!   sampling.
//!
//! The default `std` and `parallel` features enable multi-threaded instance
//! sampling via rayon. The crate itself is `no_std`-compatible (with `alloc`)
//! when built without default features; results are bit-identical either way
//! because every random stream is derived from `(seed, instance index)`.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod circuits;
pub mod error;
pub mod estimator;
mod math;
pub mod mixture;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod statevec;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
