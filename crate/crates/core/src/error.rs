use thiserror::Error;

/// Errors surfaced by the discretization, decomposition and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} below threshold at elimination step {step}")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    ConvergenceFailure(usize),

    #[error("invalid element count {0}; a mesh needs at least one element")]
    InvalidElementCount(usize),

    #[error("point {x} lies outside the domain [{left}, {right}]")]
    OutOfDomain { x: f64, left: f64, right: f64 },

    #[error("meshes are not nested: {0}")]
    NonNestedMeshes(String),

    #[error(
        "polynomial degree mismatch: coarse space has degree {coarse}, fine space degree {fine}"
    )]
    DegreeMismatch { coarse: usize, fine: usize },

    #[error("subdomain index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("local matrix {0} is singular; the space decomposition is not compatible")]
    SingularLocalMatrix(usize),

    #[error(
        "operator is numerically singular: sigma_min {sigma_min:e} vs sigma_max {sigma_max:e}"
    )]
    SingularOperator { sigma_min: f64, sigma_max: f64 },

    #[error("hybrid Schwarz operators need at least one subdomain besides the coarse space")]
    NoSubdomains,
}

pub type Result<T> = std::result::Result<T, Error>;
