//! Exact analysis of the winner-absorbs-loser coalescence chain.
//!
//! `n` players start on separate teams. Each step a uniformly random ordered
//! pair of distinct players is drawn; the loser leaves its team and joins the
//! winner's. States are integer partitions of `n`, grouped into stages by the
//! number of teams. This crate enumerates the stages, builds the exact
//! transition blocks, and computes landing distributions, expected stage and
//! total times, and the absorption-time variance in exact rational
//! arithmetic. A labeled-player Monte Carlo simulator provides an independent
//! empirical check.

pub mod analysis;
pub mod chain;
pub mod error;
pub mod export;
pub mod linalg;
pub mod partition;
pub mod simulate;
pub mod symmetric;
pub mod verify;

pub use analysis::{ChainAnalysis, LandingVector};
pub use chain::{build_full_chain, build_stage, Chain, EventClass, StageMatrices};
pub use error::{Error, Result};
pub use linalg::{Rational, RationalMatrix};
pub use partition::{enumerate_stage, Partition, SizeCap, StageSpace, WeightVector};
pub use simulate::{SimulationConfig, SimulationReport};
