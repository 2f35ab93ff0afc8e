//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("empty embedding input")]
    EmptyEmbeddings,

    #[error("line {line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: non-numeric vector component {value:?}")]
    NonNumericComponent { line: usize, value: String },

    #[error("malformed header {header:?}: expected \"count dim\"")]
    MalformedHeader { header: String },

    #[error("header declares {declared} entries but {found} data lines follow")]
    HeaderBodyMismatch { declared: usize, found: usize },

    #[error("no valid sense keys in input ({skipped} lines skipped)")]
    NoSenseKeys { skipped: usize },

    #[error("invalid sense key {token:?}")]
    InvalidSenseKey { token: String },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot compose an empty list of vectors")]
    EmptyComposition,

    #[error("lemma {lemma:?} has no senses in the table")]
    UnknownLemma { lemma: String },

    #[error("word {word:?} has no representation in the table")]
    UnknownWord { word: String },

    #[error("target word {word:?} is out of vocabulary")]
    TargetOov { word: String },

    #[error("sentence has no dependency annotation")]
    MissingDepAnnotation,

    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ConlluColumns { line: usize, found: usize },

    #[error("line {line}: non-integer head {value:?}")]
    ConlluHead { line: usize, value: String },

    #[error("inventory schema error: {0}")]
    InventorySchema(String),

    #[error("duplicate lexeme ({lemma}, {pos})")]
    DuplicateLexeme { lemma: String, pos: String },

    #[error("duplicate sense id {sense_id:?} for lexeme ({lemma}, {pos})")]
    DuplicateSenseId {
        lemma: String,
        pos: String,
        sense_id: String,
    },

    #[error("n_senses must be in [2, 5], got {0}")]
    BadSenseCount(u32),

    #[error("dev_fraction must be in (0, 1), got {0}")]
    BadDevFraction(f64),

    #[error("frequency band {band:?} is empty")]
    EmptyBand { band: String },

    #[error("band edges must be strictly increasing")]
    BadBandEdges,

    #[error("line {line}: malformed frequency row {row:?}")]
    MalformedFrequencyRow { line: usize, row: String },

    #[error("expected one prediction per instance: {predictions} predictions, {instances} instances")]
    CountMismatch {
        predictions: usize,
        instances: usize,
    },

    #[error("correctness vectors differ in length: {left} vs {right}")]
    VectorLengthMismatch { left: usize, right: usize },

    #[error("permutation test needs at least 1 round")]
    NoRounds,

    #[error("permutation test needs at least 1 paired observation")]
    NoObservations,

    #[error("oracle label names unknown sense id {sense_id:?} for lemma {lemma:?}")]
    UnknownOracleSense { lemma: String, sense_id: String },

    #[error("line {line}: malformed judgment row ({reason})")]
    MalformedJudgmentRow { line: usize, reason: String },

    #[error("line {line}: unknown phrase category {category:?}")]
    UnknownCategory { line: usize, category: String },

    #[error("correlation needs at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error("single mode requires a single-sense table")]
    ModeMismatch,

    #[error("no category had enough scoreable pairs")]
    NoUsableCategories,

    #[error("task record {line}: {reason}")]
    MalformedTaskRecord { line: usize, reason: String },

    #[error("{0}")]
    Invalid(String),
}
