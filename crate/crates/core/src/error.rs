use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate feature id {feature}")]
    DuplicateFeature { line: usize, feature: u32 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("unknown query id `{0}`")]
    UnknownQuery(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operation requires the {expected} representation")]
    UnsupportedRepresentation { expected: &'static str },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("group has no members")]
    EmptyGroup,

    #[error("best-object set is empty")]
    EmptyBestSet,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("pair is not oriented preferred-first: r_i = {ri}, r_j = {rj}")]
    Orientation { ri: u32, rj: u32 },

    #[error("rating {rating} outside label set of size {num_levels}")]
    RatingOutOfRange { rating: u32, num_levels: u32 },

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("enumeration of {states} states exceeds budget {budget}; use the pairwise or pseudo-likelihood approximations")]
    BudgetExceeded { states: f64, budget: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {message}")]
    Numerical { message: String, params: Vec<f64> },

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
