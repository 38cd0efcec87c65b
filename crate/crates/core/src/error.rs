use std::fmt;

use crate::model::FinStructure;
use crate::textio::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid input: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("colour set mismatch: {0}")]
    ColourMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: &'static str, limit: u64 },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// A problem found by one of the validators. Never raised as an error by the
/// validators themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
    /// A structure demonstrating the problem, when there is one.
    pub witness: Option<FinStructure>,
}

impl Diagnostic {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic { code, message: message.into(), witness: None }
    }

    pub fn with_witness(mut self, w: FinStructure) -> Self {
        self.witness = Some(w);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}
