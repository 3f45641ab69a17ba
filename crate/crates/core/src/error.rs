use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains non-finite entries")]
    InvalidInput,
    #[error("invalid tolerance: rank_tol={rank_tol}, residual_tol={residual_tol} (both must lie in (0, 1))")]
    InvalidTolerance { rank_tol: f64, residual_tol: f64 },
    #[error("decomposition failed to converge ({0})")]
    Decomposition(&'static str),
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("not a contraction: largest singular value is {sigma_max}")]
    NotContractive { sigma_max: f64 },
    #[error("not unitary: ||U*U - I|| = {residual}")]
    NotUnitary { residual: f64 },
    #[error("B has a unitary part of dimension {unitary_dim}; a completely nonunitary B is required")]
    BNotCnu { unitary_dim: usize },
    #[error("|lambda| = {modulus} is not inside the open unit disk")]
    LambdaOnBoundary { modulus: f64 },
    #[error("resolvent (I - lambda T*) is numerically singular")]
    SingularResolvent,
    #[error("sample grids do not match")]
    GridMismatch,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("subspace is not invariant: ||(I - P) T P|| = {residual}")]
    NotInvariant { residual: f64 },
    #[error("restriction is not unitary: residual {residual}")]
    RestrictionNotUnitary { residual: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("fixed-point iteration did not stabilise after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("Y is not a contraction: largest singular value is {sigma_max}")]
    YNotContraction { sigma_max: f64 },
    #[error("singular-value profiles differ (max gap {max_gap})")]
    NotApplicable { max_gap: f64 },
    #[error("dilation window too small: {0}")]
    WindowTooSmall(String),
    #[error("fixture dimensions too large: total {total} exceeds {limit}")]
    DimsTooLarge { total: usize, limit: usize },
}
