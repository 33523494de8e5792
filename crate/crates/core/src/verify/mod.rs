//! Executable convergence checks for the transformation functions.
//!
//! Small state spaces are enumerated exhaustively: every tree (or list)
//! within the configured bounds, every pair of valid operations on it, in
//! both argument orders and under both priority assignments. Each case
//! transforms the pair and compares the two composition orders.

mod enumerate;
mod lemmas;
pub mod list_adapter;
pub mod scenario;
mod shrink;
pub mod sim;
mod tp1;

pub use enumerate::{enumerate_lists, enumerate_list_ops, enumerate_trees, enumerate_valid_ops, EnumConfig};
pub use lemmas::{check_lemmas, LemmaCheck, LemmaReport};
pub use shrink::shrink_counterexample;
pub use sim::{run_session, simulate_sessions, simulate_with_traces, Divergence, SessionOutcome, SimConfig, SimReport};
pub use tp1::{
    check_tp1, check_tp1_with, exhaustive_list_tp1, exhaustive_list_tp1_via_trees, exhaustive_tp1,
    exhaustive_tp1_with, Counterexample, Tp1Report, Tp1Verdict,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0} must be at least 1")]
    ZeroBound(&'static str),
    #[error("value alphabet must not be empty")]
    EmptyAlphabet,
    #[error("need at least {min} clients, got {got}")]
    TooFewClients { min: usize, got: usize },
    #[error("client range {0}..={1} is empty")]
    EmptyClientRange(usize, usize),
}

/// The insert payloads used throughout the exhaustive checks: a leaf and a
/// two-node chain.
pub fn default_payloads() -> Vec<crate::Tree<char>> {
    use crate::Tree;
    vec![Tree::leaf('p'), Tree::node('q', vec![Tree::leaf('r')])]
}
