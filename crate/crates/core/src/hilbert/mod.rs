//! Finite-dimensional complex linear algebra for the contextuality checks:
//! projectors, projective measurements, density operators, tensor products
//! and partial traces.
//!
//! All arithmetic is `f64`. Construction-time invariants use
//! [`CONSTRUCTION_TOL`]; aggregate comparisons use [`AGGREGATE_TOL`].

mod matrix;
mod operators;
mod state;

pub mod io;
pub mod sample;

use thiserror::Error;

pub use matrix::ComplexMatrix;
pub use operators::{
    observable_from_spectrum, projector_from_vector, ProjectiveMeasurement, Projector,
};
pub use state::{
    marginal_distribution, no_signaling_check, partial_trace, DensityOperator, NoSignalingReport,
    Subsystem,
};

/// Tolerance for projector, measurement and state invariants.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Tolerance for comparisons of derived quantities.
pub const AGGREGATE_TOL: f64 = 1e-9;
/// Lowest eigenvalue accepted in a density operator.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("zero vector has no projector")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("not a projector: {0}")]
    NotProjector(String),
    #[error("projectors do not resolve the identity (max deviation {deviation:e})")]
    IncompleteMeasurement { deviation: f64 },
    #[error("projectors {first} and {second} are not orthogonal (max |P_i P_j| = {overlap:e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        overlap: f64,
    },
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("matrix file line {line}: {message}")]
    Parse { line: usize, message: String },
}
