use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex {vertex} out of range 1..={p}")]
    VertexOutOfRange { vertex: usize, p: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("generator {0} is not an automorphism of the graph")]
    NotAutomorphism(usize),
    #[error("group order exceeds the enumeration cap of {0}")]
    GroupTooLarge(usize),
    #[error("vertex {0} is not in the subset")]
    NotInSubset(usize),
    #[error("{{{0},{1}}} is not an extended edge")]
    NotExtendedEdge(usize, usize),
    #[error("not a perfect elimination ordering: {0}")]
    NotPeo(String),
    #[error("graph admits no color perfect elimination ordering")]
    NoCpeo,
    #[error("classification search limited to r <= {cap} color classes (got {r})")]
    TooManyClasses { r: usize, cap: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("product leaves the span in block {block}: {detail}")]
    ProductLeavesSpan { block: usize, detail: String },
    #[error("block {0} algebra is not commutative")]
    NotCommutative(usize),
    #[error("spectrum not simple after {0} retries")]
    SpectrumNotSimple(usize),
    #[error("frame construction failed: {0}")]
    Frame(String),
    #[error("not a projection: {0}")]
    NotProjection(String),
    #[error("counting identity violated: sum (1 + m) = {found}, dim = {expected}")]
    CountingIdentity { expected: usize, found: usize },
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("integral diverges: s = {s} must exceed {threshold}")]
    Divergent { s: f64, threshold: f64 },
    #[error("matrix is not in the space (relative residual {0:e})")]
    NotInSpace(f64),
    #[error("generalized Cholesky failed: {0}")]
    Cholesky(String),
    #[error("invalid strongly regular graph: {0}")]
    InvalidSrg(String),
    #[error("graph is not CER ({0}); closed-form scoring is unavailable for it")]
    NotCer(String),
    #[error("graph is not decomposable")]
    NotDecomposable,
    #[error("oracle limited to dimension <= {max} (got {dim})")]
    OracleDimension { dim: usize, max: usize },
    #[error("proposal mismatch: effective sample size {ess:.1} below 1% of {n}")]
    ProposalMismatch { ess: f64, n: usize },
    #[error("data error: {0}")]
    Data(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
