use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Coxeter matrix: {0}")]
    InvalidCoxeterMatrix(String),

    #[error("enumeration budget of {budget} elements exceeded (group infinite or too large)")]
    BudgetExceeded { budget: usize },

    #[error("element id {id} out of range for a group of order {order}")]
    InvalidElement { id: usize, order: usize },

    #[error("generator index {index} out of range for {count} generators")]
    InvalidGenerator { index: usize, count: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("size budget exceeded: {what} needs {needed}, limit {limit}")]
    SizeBudget {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("level cap {cap} too small: {needed} levels required")]
    InsufficientLevels { cap: usize, needed: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidCoxeterMatrix(_) => "invalid_coxeter_matrix",
            Error::BudgetExceeded { .. } => "enumeration_budget",
            Error::InvalidElement { .. } => "invalid_element",
            Error::InvalidGenerator { .. } => "invalid_generator",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvariantViolation(_) => "invariant_violation",
            Error::SizeBudget { .. } => "size_budget",
            Error::InsufficientLevels { .. } => "insufficient_levels",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::Io(_) => "io",
        }
    }

    /// Input errors are the caller's fault (bad file, bad scenario).
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidScenario(_) | Error::Io(_))
    }
}
