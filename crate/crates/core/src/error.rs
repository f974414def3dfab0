//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or checking structures.
#[derive(Debug, Error)]
pub enum Error {
    /// Two morphisms from different backends were combined.
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    /// Dimensions do not line up for the requested operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix expected to be Hermitian was not (within tolerance).
    #[error("matrix is not Hermitian: max |a - a†| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A matrix expected to be positive semidefinite was not.
    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.6e}")]
    NotPsd { min_eigenvalue: f64 },

    /// A matrix expected to be (safely) invertible was numerically singular.
    #[error("matrix is singular or nearly singular: min eigenvalue = {min_eigenvalue:.6e}")]
    Singular { min_eigenvalue: f64 },

    /// Structure data failed a dagger Frobenius axiom.
    #[error("not a dagger Frobenius algebra: {0}")]
    NotFrobenius(String),

    /// No central positive-definite normaliser satisfies the defining equations.
    #[error("algebra is not normalisable: {0}")]
    NotNormalisable(String),

    /// An operation required a validated algebra but got raw data.
    #[error("algebra has not been validated: {0}")]
    NotValidated(String),

    /// An operation required a commutative algebra.
    #[error("algebra is not commutative: {0}")]
    NotCommutative(String),

    /// A factor dimension came out non-integral.
    #[error("factor of dimension {block_dim} is not a perfect square of an integer")]
    NonIntegralFactor { block_dim: usize },

    /// The Wedderburn machinery failed to resolve the algebra.
    #[error("classification failed: {0}")]
    ClassificationFailed(String),

    /// A relational multiplication table does not describe a groupoid.
    #[error("not a groupoid: {0}")]
    NotAGroupoid(String),

    /// A morphism failed a required normalisation (counit preservation).
    #[error("morphism is not normalised: {0}")]
    NotNormalised(String),

    /// A matrix expected to be stochastic was not.
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),

    /// POVM completeness failed.
    #[error("POVM completeness failure: {0}")]
    CompletenessFailure(String),

    /// A certificate failed to re-verify, or a certified operation produced a reject.
    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    /// A morphism failed idempotent-membership on a split object.
    #[error("split membership failure: {0}")]
    MembershipFailure(String),

    /// No square root exists in the requested backend.
    #[error("no square root: {0}")]
    NoSquareRoot(String),

    /// A tolerance was out of its allowed range.
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    /// Text-format parse error.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O error (file formats, corpus files).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
