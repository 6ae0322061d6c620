//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(String),
    #[error("edge index {0} out of range")]
    BadEdgeIndex(usize),
    #[error("vertex index {0} out of range")]
    BadVertexIndex(usize),
    #[error("subcurve must be non-empty")]
    EmptySubcurve,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("twister generator {0} has non-zero coordinate sum")]
    NonZeroSumGenerator(usize),
    #[error("total degrees differ: {left} vs {right}")]
    TotalMismatch { left: i64, right: i64 },
    #[error("multidegree is not indexed by this curve's components")]
    CurveMismatch,
    #[error("genus {0} is too small for this operation")]
    GenusTooSmall(i64),
    #[error("curve is not semistable")]
    NotSemistableCurve,
    #[error("curve is not quasistable")]
    NotQuasistableCurve,
    #[error("curve is not stable")]
    NotStableCurve,
    #[error("curve is not d-general")]
    NotDGeneral,
    #[error("partial normalization is disconnected")]
    DisconnectedNormalization,
    #[error("multidegree is not semibalanced")]
    NotSemibalanced,
    #[error("class group has positive free rank; classes cannot be listed")]
    InfiniteClassGroup,
    #[error("empty result where existence is a theorem")]
    EmptyResult,
    #[error("strata belong to different stratifications")]
    MixedStratifications,
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
