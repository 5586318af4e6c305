//! Knightian freestates, a toy universal prior, desk-scale Kolmogorov
//! complexity and sophistication, a (t, ε, δ) prediction arena, and a few
//! small quantitative gadgets (CHSH, anthropic room puzzles, Newcomb payoffs,
//! micro/macrofact causal graphs).
//!
//! Every algorithmic-information quantity here is relative to the budgeted
//! toy machine [`toyvm`] and an explicit program-length bound; none of them
//! is the uncomputable quantity of the same name.

pub mod arena;
pub mod bits;
pub mod dyadic;
pub mod freestate;
pub mod gadgets;
pub mod prior;
pub mod soph;
pub mod toyvm;

/// Crate version embedded in reports.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
