//! The `.efx` text format and DOT export.
//!
//! Games are written as s-expressions:
//!
//! ```text
//! (game "coin" (players P1)
//!   (chance
//!     (H 0.5 (payoffs 1))
//!     (T 0.5 (player P1 infoset I
//!       (a (payoffs 0))
//!       (b (payoffs 2))))))
//! ```
//!
//! A document may end with forget blocks naming a taker, a memory class for
//! each listed information set and optionally the sites where X is offered:
//!
//! ```text
//! (forget P2 (classes I2A -> m I2B -> m) (sites I2A I2B))
//! ```
//!
//! [`serialize_game`] writes a canonical form: children sorted by action
//! label, two-space indentation, terminal payoffs inline.

mod dot;
mod lexer;
mod parser;
mod profile;
mod serialize;

use std::fmt;

use serde::Serialize;

pub use dot::{export_dot, DotOptions};
pub use parser::{parse_document, parse_game, GameDocument};
pub use profile::{parse_beliefs, parse_profile, serialize_beliefs, serialize_profile};
pub use serialize::{format_prob, serialize_document, serialize_game};

/// A diagnostic with a 1-based position inside the input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: &str, expected: &[&str], found: &str) -> ParseError {
        ParseError {
            line,
            col,
            message: message.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.to_string(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {}; found {})", self.expected.join(" or "), self.found)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
