use thiserror::Error;

/// Errors raised by the numerical kernels and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("function is +inf at every sample")]
    AllInfinite,
    #[error("boundary function is not lower semicontinuous at sample {index}")]
    NotLowerSemicontinuous { index: usize },
    #[error("boundary function is not convex along a straight piece of the boundary near sample {index}")]
    NotConvexOnSegment { index: usize },
    #[error("region contains node {node} outside the interior of the effective domain")]
    RegionOutsideDomain { node: usize },
    #[error("segment leaves the effective domain")]
    SegmentLeavesDomain,
    #[error("stencil at node {node} leaves the effective domain")]
    StencilOutOfDomain { node: usize },
    #[error("boundary data is not convex-compatible: {0}")]
    NonConvexBoundaryData(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("domain too small: {interior} interior nodes, need at least 64")]
    DomainTooSmall { interior: usize },
    #[error("point ({0}, {1}) lies outside the closed domain")]
    PointOutsideDomain(f64, f64),
    #[error("first domain is not contained in the second")]
    NotContained,
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),
    #[error("convex hull of the effective domain has empty interior")]
    DegenerateHull,
    #[error("point ({0}, {1}) is not on the boundary of the effective domain")]
    NotBoundaryPoint(f64, f64),
    #[error("monotonicity in t violated at node {node} between t = {t_lo} and t = {t_hi}")]
    MonotonicityViolation { node: usize, t_lo: f64, t_hi: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("cone section must be bounded convex with the origin in its interior")]
    DegenerateCone,
    #[error("Hessian degenerate at {} nodes", nodes.len())]
    DegenerateHessian { nodes: Vec<usize> },
    #[error("affine metric not positive definite at {} nodes", nodes.len())]
    NegativeMetric { nodes: Vec<usize> },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
