//! Finite normal-form games with translucent players.
//!
//! Game analysis (minimax domination, individual rationality, classical
//! rationalizability), counterfactual belief structures, a model checker for
//! the epistemic logic over those structures, and builders for the structures
//! that witness the characterization results.

pub mod builtin;
pub mod cli;
pub mod domination;
pub mod error;
pub mod game;
pub mod gen;
pub mod json;
pub mod kripke;
pub mod logic;
pub mod lp;
pub mod oracle;
pub mod rational;
pub mod rationalizability;
pub mod trace;
pub mod witness;

pub use error::{Error, Result};
pub use game::{Game, Profile, Restriction, StrategyId};
pub use rational::Rational;
