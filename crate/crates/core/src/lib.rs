//! Functional gradient boosting by restricted gradient descent.
//!
//! Models live in the empirical L2 space of functions identified with their
//! values on a finite sample, with a probability-weighted inner product.
//! Training repeatedly projects loss subgradients onto a weak-learner class
//! and steps against the projection. Three variants are provided: a single
//! projection per step ([`descent::run_naive`]), a per-step reconstruction of
//! the gradient from several projections ([`descent::run_repeated`]), and a
//! carry-forward of the unprojected residual across steps
//! ([`descent::run_residual`]).

// Negated comparisons like `!(x > 0.0)` are used on purpose: they reject
// NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descent;
pub mod edge;
pub mod fspace;
pub mod learners;
pub mod objectives;

pub use fspace::{combine, FnVec, SampleSpace};

/// Error type shared by all modules in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("function vectors are bound to different sample spaces")]
    SpaceMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zero gradient target, nothing to fit")]
    ZeroGradient,
    #[error("zero projection: fitted hypothesis vanishes on the sample")]
    ZeroProjection,
    #[error("degenerate hypothesis with zero norm")]
    DegenerateHypothesis,
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
