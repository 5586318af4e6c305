//! Small worked puzzles: the CHSH game, anthropic room puzzles, Newcomb's
//! problem, and a validator for causal graphs that mix backward and
//! forward arrows.

pub mod causal;
pub mod chsh;
pub mod newcomb;
pub mod rooms;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GadgetError {
    #[error("no room in either branch is painted {0}")]
    NoMatchingRoom(String),
    #[error("invalid room puzzle: {0}")]
    BadPuzzle(String),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("invalid angle: {0}")]
    BadAngle(f64),
}
