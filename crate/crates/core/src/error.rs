use thiserror::Error;

use crate::game::Violation;
use crate::gdl::ParseError;

/// Errors raised by game construction, transformation and analysis.
///
/// Structural problems found by [`crate::game::Game::validate_structure`]
/// are plain data; they only become an `Error` when an operation needs a
/// valid game and receives one that is not.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    Invalid(Violation),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("unknown information set `{0}`")]
    UnknownInfoset(String),
    #[error("player `{0}` owns no decision nodes")]
    NoDecisions(String),
    #[error("forget spec: {0}")]
    ForgetSpec(String),
    #[error("action label `{label}` already used at node {node}")]
    LabelCollision { label: String, node: usize },
    #[error("memory classes violate forward closure: nodes {0} and {1} must share an information set")]
    ClosureViolation(usize, usize),
    #[error("profile: {0}")]
    Profile(String),
    #[error("beliefs: {0}")]
    Beliefs(String),
    #[error("refused: {what} has {size} elements, cap is {cap}")]
    Refused { what: String, size: f64, cap: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("player `{0}` does not have perfect recall")]
    ImperfectRecall(String),
    #[error("inconsistent origin map: {0}")]
    Origin(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// True for refusals caused by exhaustive-search caps.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
