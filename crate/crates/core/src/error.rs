use thiserror::Error;

use crate::concept::Concept;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An evaluation point lies outside the admissible box.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The stage first-order condition has no sign change on `[0, q_max]`.
    #[error("no stage equilibrium at A = {goodwill}: {reason}")]
    NoEquilibrium { goodwill: f64, reason: String },

    #[error("comparative statics determinant is not positive (Delta = {0})")]
    DeterminantSign(f64),

    #[error("range error: {0}")]
    Range(String),

    #[error("{concept} is not applicable: {reason}")]
    ConceptNotApplicable { concept: Concept, reason: String },

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("no {concept} steady state on (0, {a_max}]")]
    NoSteadyState { concept: Concept, a_max: f64 },

    #[error("degenerate closed form: {0}")]
    Degenerate(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid sweep axis `{0}`")]
    InvalidAxis(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
