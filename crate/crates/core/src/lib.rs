//! Finite extensive-form games with credible, conditional forgetting.
//!
//! The crate represents games whose information partitions may violate
//! perfect recall, classifies each player's recall, and implements the
//! forgetting transformation: a designated player gains a one-shot action
//! `X` that coarsens every information set they reach afterwards, while the
//! other players observe that `X` was taken. On top of that sit equilibrium
//! checks that stay sound under imperfect recall, generators for the
//! worked scenarios (a forgetful monopolist, reputation bargaining, a mafia
//! extortion chain, an entry game and an information sale) and a small
//! s-expression format for games.
//!
//! ```
//! use amnesia::models::corpus;
//! use amnesia::xform::{apply_x, validate_x_properties, ForgetSpec};
//!
//! let g = corpus::fig1_left();
//! let spec = ForgetSpec::new("P2").class("I2A", "m").class("I2B", "m");
//! let xg = apply_x(&g, &spec).unwrap();
//! assert!(validate_x_properties(&g, &xg).unwrap().all_pass());
//! ```

pub mod equilibrium;
pub mod error;
pub mod game;
pub mod gdl;
pub mod models;
pub mod recall;
pub mod xform;

pub use error::{Error, Result};
pub use game::{build_game, Game, InfosetId, NodeId, NodeSpec, PlayerId};

/// Absolute tolerance used for probability and payoff comparisons.
pub const TOL: f64 = 1e-9;
