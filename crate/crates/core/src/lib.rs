//! Distributional multi-objective bandit learning under the expected
//! scalarised returns (ESR) criterion.
//!
//! * [`distribution`]: Z-table counts, empirical PDF/CDF, shifted views, KS distance.
//! * [`dominance`]: Pareto, FSD and ESR dominance; ESR set, Pareto front, utility oracles.
//! * [`environment`]: bandit environments, presets and the JSON file schema.
//! * [`motdrl`]: the learner.
//! * [`evaluation`]: coverage ratio (precision, recall, F1).
//! * [`experiment`]: multi-run orchestration and file output used by the CLI.

pub mod distribution;
pub mod dominance;
pub mod environment;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod motdrl;
pub mod rng;

pub use distribution::{ks_distance, DiscreteDistribution, ReturnLattice, RewardVector, ZTable};
pub use dominance::{Criterion, DominanceVerdict, MonotoneUtility};
pub use environment::{preset, ArmSpec, EnvironmentSpec};
pub use error::{Error, Result};
pub use evaluation::{coverage_ratio, CoverageResult};
pub use motdrl::LearnerState;
