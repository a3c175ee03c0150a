//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid epsilon {0}: must satisfy 0 < epsilon <= 1")]
    InvalidEpsilon(f64),

    #[error("invalid mesh config: {0}")]
    InvalidMesh(String),

    #[error("singular system at row {row}: pivot {pivot:e} below threshold")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("meshes are not nested: node {index} differs by {delta:e}")]
    NonNestedMeshes { index: usize, delta: f64 },

    #[error("observed order requires positive errors, got ({0:e}, {1:e})")]
    NonPositiveError(f64, f64),

    #[error("problem `{0}` has no exact solution")]
    MissingExactSolution(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("failed at (epsilon={epsilon:e}, n={n}): {source}")]
    Cell {
        epsilon: f64,
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps an error with the (epsilon, n) cell it occurred in.
    pub fn at_cell(self, epsilon: f64, n: usize) -> Error {
        Error::Cell {
            epsilon,
            n,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
