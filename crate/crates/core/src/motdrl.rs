//! Tabular distributional learner for the ESR set of a multi-objective bandit.
//!
//! Each arm keeps a [`ZTable`]. After `beta` initial pulls per arm, every
//! step translates each arm's empirical distribution by its UCB1 bonus,
//! keeps the arms whose translated distributions are not ESR-dominated, and
//! pulls one of them uniformly at random.

use rand::Rng;

use crate::distribution::{DiscreteDistribution, ZTable};
use crate::dominance::{esr_set, Criterion};
use crate::environment::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::rng::RunStreams;

/// `sqrt(2 ln(n * (D |E*|)^(1/4)) / N_i)`.
pub fn ucb_bonus_value(
    total_pulls: u64,
    arm_pulls: u64,
    dims: usize,
    esr_cardinality: usize,
) -> f64 {
    let n = total_pulls as f64;
    let scale = ((dims * esr_cardinality) as f64).powf(0.25);
    let log = (n * scale).ln().max(0.0);
    (2.0 * log / arm_pulls as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    tables: Vec<ZTable>,
    total_pulls: u64,
    beta: u64,
    esr_cardinality: usize,
    dims: usize,
    criterion: Criterion,
}

impl LearnerState {
    /// Pulls every arm `beta` times.
    pub fn initialize(
        env: &EnvironmentSpec,
        beta: u64,
        criterion: Criterion,
        streams: &mut RunStreams,
    ) -> Result<Self> {
        if beta < 1 {
            return Err(Error::InvalidParameter("beta must be at least 1".into()));
        }
        let mut tables = vec![ZTable::new(env.lattice().clone()); env.arm_count()];
        for (arm, table) in tables.iter_mut().enumerate() {
            for _ in 0..beta {
                table.update(&env.sample_arm(arm, streams.arm(arm))?)?;
            }
        }
        Ok(LearnerState {
            total_pulls: beta * env.arm_count() as u64,
            tables,
            beta,
            esr_cardinality: env.esr_cardinality(),
            dims: env.dims(),
            criterion,
        })
    }

    /// Builds a state from existing tables, e.g. to study selection on a frozen state.
    pub fn from_tables(
        tables: Vec<ZTable>,
        beta: u64,
        esr_cardinality: usize,
        criterion: Criterion,
    ) -> Result<Self> {
        let dims = tables.first().ok_or(Error::NoCandidates)?.dims();
        if esr_cardinality == 0 {
            return Err(Error::InvalidParameter(
                "esr cardinality must be positive".into(),
            ));
        }
        for t in &tables {
            if t.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: t.dims(),
                });
            }
        }
        Ok(LearnerState {
            total_pulls: tables.iter().map(ZTable::pulls).sum(),
            tables,
            beta,
            esr_cardinality,
            dims,
            criterion,
        })
    }

    pub fn tables(&self) -> &[ZTable] {
        &self.tables
    }

    pub fn total_pulls(&self) -> u64 {
        self.total_pulls
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    pub fn esr_cardinality(&self) -> usize {
        self.esr_cardinality
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn ucb_bonus(&self, arm: usize) -> Result<f64> {
        let table = self.tables.get(arm).ok_or(Error::InvalidArm {
            index: arm,
            len: self.tables.len(),
        })?;
        if table.pulls() == 0 || self.total_pulls == 0 {
            return Err(Error::EmptyDistribution);
        }
        Ok(ucb_bonus_value(
            self.total_pulls,
            table.pulls(),
            self.dims,
            self.esr_cardinality,
        ))
    }

    /// Current empirical distribution of every arm.
    pub fn distributions(&self) -> Result<Vec<DiscreteDistribution>> {
        self.tables.iter().map(ZTable::to_distribution).collect()
    }

    /// Arms not ESR-dominated by another arm, with or without exploration bonuses.
    pub fn current_esr_set(&self, with_bonus: bool) -> Result<Vec<usize>> {
        let candidates = if with_bonus {
            (0..self.tables.len())
                .map(|i| self.tables[i].shifted_view(self.ucb_bonus(i)?))
                .collect::<Result<Vec<_>>>()?
        } else {
            self.distributions()?
        };
        esr_set(&candidates, self.criterion)
    }

    /// Picks an arm uniformly from the optimistic ESR set without pulling it.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let set = self.current_esr_set(true)?;
        Ok(set[rng.random_range(0..set.len())])
    }

    /// One learning step; returns the pulled arm.
    pub fn step(&mut self, env: &EnvironmentSpec, streams: &mut RunStreams) -> Result<usize> {
        let arm = self.select(streams.selection())?;
        let reward = env.sample_arm(arm, streams.arm(arm))?;
        self.tables[arm].update(&reward)?;
        self.total_pulls += 1;
        Ok(arm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub episodes: u64,
    pub beta: u64,
    pub criterion: Criterion,
    pub snapshot_interval: u64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            episodes: 200_000,
            beta: 5,
            criterion: Criterion::Cdf,
            snapshot_interval: 1000,
        }
    }
}

/// Learned state at one snapshot episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub episode: u64,
    /// Bonus-free ESR set of the empirical distributions.
    pub esr_set: Vec<usize>,
    pub distributions: Vec<DiscreteDistribution>,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub snapshots: Vec<Snapshot>,
    pub final_state: LearnerState,
    /// Pulls per arm during the stepping phase.
    pub selections: Vec<u64>,
}

/// Initialises, then runs `episodes` steps, snapshotting every
/// `snapshot_interval` episodes and at the last one.
pub fn run(env: &EnvironmentSpec, settings: &RunSettings, seed: u64) -> Result<RunTrace> {
    if settings.episodes < 1 {
        return Err(Error::InvalidParameter(
            "episodes must be at least 1".into(),
        ));
    }
    if settings.snapshot_interval < 1 {
        return Err(Error::InvalidParameter(
            "snapshot interval must be at least 1".into(),
        ));
    }
    let mut streams = RunStreams::new(seed, env.arm_count());
    let mut state = LearnerState::initialize(env, settings.beta, settings.criterion, &mut streams)?;
    let mut snapshots = Vec::new();
    let mut selections = vec![0; env.arm_count()];
    for episode in 1..=settings.episodes {
        selections[state.step(env, &mut streams)?] += 1;
        if episode % settings.snapshot_interval == 0 || episode == settings.episodes {
            snapshots.push(Snapshot {
                episode,
                esr_set: state.current_esr_set(false)?,
                distributions: state.distributions()?,
            });
        }
    }
    Ok(RunTrace {
        snapshots,
        final_state: state,
        selections,
    })
}
