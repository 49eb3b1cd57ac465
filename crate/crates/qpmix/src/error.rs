//! Crate error type.

use thiserror::Error;

/// Errors reported by the simulation and estimation primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two operators or states act on different qubit counts.
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    /// A gate or observable addresses a qubit outside the register.
    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    /// Requested register exceeds the dense-statevector capacity.
    #[error("{requested} qubits exceeds the supported maximum of {limit}")]
    CapacityExceeded { requested: usize, limit: usize },

    /// An operation that only supports single-qubit Pauli support was given
    /// a string with wider (or empty) support.
    #[error("{context} requires a Pauli string acting on exactly one qubit")]
    SingleQubitSupportRequired { context: &'static str },

    /// A decomposition denominator vanished for the chosen angle offsets.
    #[error("degenerate decomposition: {factor} vanishes ({value:e} within tolerance {tol:e})")]
    DegenerateDecomposition {
        factor: &'static str,
        value: f64,
        tol: f64,
    },

    /// A parameter left the regime where the formula in use is valid.
    #[error("{what} = {value} outside the valid regime |{what}| < {limit}")]
    OutOfRegime {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    /// A malformed Pauli text string.
    #[error("invalid Pauli character {0:?} (expected I, X, Y or Z)")]
    InvalidPauliChar(char),

    /// A supplied matrix is not unitary to the required accuracy.
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    /// A direction vector is not normalized.
    #[error("direction vector has norm {norm}, expected 1")]
    NonUnitDirection { norm: f64 },

    /// A rotation generator the compiler or error model cannot handle.
    #[error("unsupported rotation generator for {context}")]
    UnsupportedGenerator { context: &'static str },

    /// Mitigation policy incompatible with the rotation it is attached to.
    #[error("mitigation policy mismatch: {detail}")]
    PolicyMismatch { detail: &'static str },

    /// Instance sampling reached a rotation with mitigation disabled.
    #[error("cannot sample instances from a circuit with unmitigated rotations")]
    UnmitigatedRotation,

    /// Shots-per-instance must divide the total shot count.
    #[error("shots per instance {per_instance} does not divide total shots {total}")]
    ShotsNotDivisible { total: u64, per_instance: u64 },

    /// Estimation currently supports the all-Z parity observable only.
    #[error("unsupported observable: expected the full Z parity string")]
    UnsupportedObservable,

    /// Exhaustive enumeration past this size is intentionally refused.
    #[error("exact enumeration over {count} assignments exceeds the limit {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    /// The oracle's exact paths cannot resolve this error model.
    #[error("exact evaluation is undefined for randomized error models")]
    UnresolvableErrorModel,

    /// Generic invalid-argument failure with a static description.
    #[error("{0}")]
    InvalidArgument(&'static str),
}
