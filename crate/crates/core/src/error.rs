use crate::rips::Simplex;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyInput,
    #[error("row {row} has {found} coordinates, expected {expected}")]
    RaggedDimensions {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("coordinate {col} of point {row} is not finite")]
    NonFiniteCoordinate { row: usize, col: usize },
    #[error("vertex {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("a vertex has no edge")]
    VertexSimplex,
    #[error("max_dim {0} exceeds the supported maximum of 3")]
    DimensionTooLarge(usize),
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("filtration is inconsistent: {0}")]
    InconsistentFiltration(String),
    #[error("loss includes an essential class of infinite persistence")]
    InfiniteLoss,
    #[error("diagram has dimension {found}, loss expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("kernel input {0} is negative")]
    NegativeInput(f64),
    #[error("weights were built for {expected} points, cloud has {found}")]
    StaleWeights { expected: usize, found: usize },
    #[error("weighted pair ({0}, {1}) has zero current distance")]
    DegeneratePair(usize, usize),
    #[error("critical edge ({0}, {1}) has zero length")]
    DegenerateEdge(usize, usize),
    #[error("gradient contains a non-finite entry at point {point}")]
    NonFiniteGradient { point: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}

impl Error {
    pub(crate) fn invalid_simplex(simplex: &Simplex, why: &str) -> Self {
        Error::InvalidSimplex(format!("{simplex}: {why}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
