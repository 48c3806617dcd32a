use thiserror::Error;

/// Errors produced by dataset construction, signature computation, forest
/// fitting and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time grid must be strictly increasing")]
    NonIncreasingTimes,
    #[error("time grid must stay inside [0, 1], got [{first}, {last}]")]
    TimesOutOfRange { first: f64, last: f64 },
    #[error("path needs at least {min} grid points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("times and value rows disagree in length: {times} vs {rows}")]
    GridShapeMismatch { times: usize, rows: usize },
    #[error("values must be finite")]
    NonFiniteValues,
    #[error("value rows must all have the same dimension")]
    RaggedValues,
    #[error("window [{start}, {start}+{len}) exceeds a grid of {points} points")]
    WindowOutOfBounds { start: usize, len: usize, points: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("signature depth mismatch: {left} vs {right}")]
    DepthMismatch { left: usize, right: usize },
    #[error("signature depth must be at least 1")]
    ZeroDepth,
    #[error("segment duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("word must be non-empty")]
    EmptyWord,
    #[error("word index {index} outside [1, {dim}]")]
    WordIndexOutOfRange { index: usize, dim: usize },
    #[error("dataset needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("sample {index} does not conform to the shared grid")]
    SampleShapeMismatch { index: usize },
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("subsample size must be at least 2, got {0}")]
    SubsampleTooSmall(usize),
    #[error("forest needs at least one tree")]
    NoTrees,
    #[error("window count must be at least 1")]
    ZeroWindows,
    #[error("labels required for this metric")]
    MissingLabels,
    #[error("metric needs both classes present in the labels")]
    SingleClassLabels,
    #[error("score vectors disagree in length: {left} vs {right}")]
    ScoreLengthMismatch { left: usize, right: usize },
    #[error("scores must be finite")]
    NonFiniteScores,
    #[error("fraction of abnormal samples must lie in (0, 1), got {0}")]
    FractionOutOfRange(f64),
    #[error("file is empty: {0}")]
    EmptyFile(String),
    #[error("line {line}: expected {expected} values, got {got}")]
    RaggedRow { line: usize, expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("normal and anomaly label sets must be disjoint and non-empty")]
    InvalidLabelMap,
    #[error("dataset has {got} grid points where {expected} were expected; \
             check that the source file matches the preset")]
    UnexpectedGridSize { expected: usize, got: usize },
    #[error("unsupported format version {got} (this build reads version {expected})")]
    VersionMismatch { expected: u32, got: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
