//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // ---- raster ingestion / egress ----
    #[error("malformed image header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel payload: expected {expected} samples, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("operation requires {expected} color space, image is {actual}")]
    WrongColorSpace { expected: &'static str, actual: &'static str },

    // ---- transforms ----
    #[error("plane dimensions {width}x{height} are not divisible by 2^{levels}")]
    NonDyadic { width: usize, height: usize, levels: usize },
    #[error("decomposition level count must be at least 1")]
    ZeroLevels,
    #[error("inconsistent pyramid plane dimensions: {0}")]
    MalformedPyramid(String),

    // ---- saliency ----
    #[error("box '{label}' ({x},{y}) {w}x{h} exceeds image bounds {width}x{height}")]
    BoxOutOfBounds { label: String, x: u32, y: u32, w: u32, h: u32, width: usize, height: usize },
    #[error("saliency level {0} out of supported range 1..=15")]
    SaliencyLevelOutOfRange(u32),
    #[error("duplicate object label '{0}'")]
    DuplicateLabel(String),

    // ---- codec ----
    #[error("budget fraction {0} outside (0, 1]")]
    InvalidBudget(f64),
    #[error("coefficient address out of range: level {level} band {band} ({row},{col})")]
    AddressOutOfRange { level: u8, band: &'static str, row: u32, col: u32 },
    #[error("bad bitstream magic")]
    BadMagic,
    #[error("unsupported bitstream version {0}")]
    BadVersion(u8),
    #[error("truncated bitstream header")]
    TruncatedHeader,
    #[error("payload carries {found} codes but header selects {expected}")]
    PayloadLengthMismatch { expected: usize, found: usize },
    #[error("corrupt entropy stream: {0}")]
    CorruptEntropyStream(String),
    #[error("image dimensions exceed the bitstream box coordinate range")]
    DimsExceedBoxRange,

    // ---- metrics / ranking ----
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("mask selects no pixels")]
    EmptyMask,
    #[error("annotation has no labeled objects")]
    NoObjects,
    #[error("selected object count {q} outside 1..={p}")]
    InvalidObjectCounts { q: usize, p: usize },

    // ---- satisfaction / allocation ----
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("quality weights {0:?} must be non-negative and sum to 1")]
    InvalidWeights([f64; 3]),
    #[error("quality inputs invalid: {0}")]
    InvalidQualityInputs(String),
    #[error("survey table is empty")]
    EmptySurvey,
    #[error("neighbor count {k} outside 1..={rows}")]
    InvalidNeighborCount { k: usize, rows: usize },
    #[error("prediction input out of range: {0}")]
    PredictionInputOutOfRange(String),
    #[error("operation requires the parametric satisfaction model")]
    NonMonotoneModel,
    #[error("allocation vector infeasible: {0}")]
    InfeasibleAllocation(String),
    #[error("invalid optimizer configuration: {0}")]
    InvalidOptimizerConfig(String),
    #[error("scenario invalid: {0}")]
    InvalidScenario(String),
    #[error("brute force limited to {max} customers, scenario has {n}")]
    BruteForceTooLarge { n: usize, max: usize },

    // ---- plumbing ----
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
