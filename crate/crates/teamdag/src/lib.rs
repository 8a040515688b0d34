//! Solver library for two-team zero-sum adversarial team games.
//!
//! The pipeline: build a benchmark game tree, project it onto one team's
//! decision problem, normalize timing, preprocess (inflation, branching
//! reduction), construct the team belief DAG, and run regret-minimization
//! self-play over the two DAGs to approximate a team max-min strategy.

pub mod cli;
pub mod dag;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod games;
pub mod learn;
pub mod lp;
pub mod pipeline;
pub mod public;
pub mod reduce;
pub mod textio;
pub mod tfsdp;

pub use error::{Error, Result};
