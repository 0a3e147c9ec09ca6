use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid branching function: {0}")]
    InvalidBranching(String),
    #[error("invalid anisotropy: {0}")]
    InvalidAnisotropy(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("degenerate edge {index}: endpoints coincide")]
    DegenerateEdge { index: usize },
    #[error("polygon is not in generic position: {0}")]
    NotGeneric(String),
    #[error("numerical degeneracy between edges {prev} and {next}: normal difference is not parallel to the vertex direction")]
    NumericalDegeneracy { prev: usize, next: usize },
    #[error("anisotropy is not convex (worst triangle-inequality defect {defect:.3e})")]
    NonConvex { defect: f64 },
    #[error("approximation depth {0} outside the supported range 2..=16")]
    DepthOverflow(usize),
    #[error("slice fiber contains edge {edge}")]
    DegenerateSlice { edge: usize },
    #[error("unbalanced problem: source mass {sources} vs target mass {targets}")]
    Unbalanced { sources: f64, targets: f64 },
    #[error("mesh does not conform to the current: {0}")]
    NonConformingMesh(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}
