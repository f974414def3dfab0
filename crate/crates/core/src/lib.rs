//! Finite-dimensional CP*-construction toolkit.
//!
//! The crate models dagger compact categories with two concrete backends —
//! complex matrices (`fhilb`) and finite relations (`rel`) — and builds the
//! quantum/classical channel machinery on top of them:
//!
//! * [`numeric`] — complex matrix kernel: Kronecker products, Hermitian
//!   eigendecomposition, positive-semidefinite tests and factorisations, and
//!   the rearrangement (reshuffle) that turns channel matrices into Choi-style
//!   Gram matrices.
//! * [`backends`] — the two backends behind one [`backends::Morphism`] type:
//!   composition, tensor, dagger, conjugation, cups/caps/swaps.
//! * [`frobenius`] — dagger Frobenius algebras: structure checks, pants
//!   (endomorphism) algebras, normalisers, the star involution, copyable
//!   points.
//! * [`cpstar`] — the CP*-condition: certified complete-positivity checks
//!   between algebras, positive elements, star homomorphisms.
//! * [`cpm`] — the doubling fragment: CP maps between pants algebras and the
//!   embedding of that fragment into the full construction.
//! * [`stoch`] — the classical fragment: stochastic matrices, POVM
//!   extraction, Born-rule weights.
//! * [`classify`] — Wedderburn decomposition of matrix-backend algebras and
//!   groupoid extraction for relational ones, plus the concrete
//!   complete-positivity oracle.
//! * [`splitdag`] — splitting dagger idempotents: the functor that realises
//!   algebras as idempotents on doubled objects.
//! * [`corpus`] — deterministic generator corpus used by tests, the self-test
//!   driver and the shipped fixture files.
//! * [`format`] — line-oriented text formats for algebras and morphisms.
//! * [`report`] — human-readable check reports with a machine-readable fenced
//!   JSON block.
//! * [`selftest`] — the acceptance checks behind `cpstar selftest`.

pub mod backends;
pub mod classify;
pub mod corpus;
pub mod cpm;
pub mod cpstar;
pub mod error;
pub mod format;
pub mod frobenius;
pub mod numeric;
pub mod report;
pub mod selftest;
pub mod splitdag;
pub mod stoch;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
