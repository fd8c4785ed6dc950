//! Multi-run experiments, ground-truth analysis and data export.
//!
//! `run` writes four files into the output directory:
//!
//! * `records.csv`: one row per run and snapshot episode
//!   (`run,episode,precision,recall,f1,solution_set`);
//! * `mean_f1.csv`: the F1 curve averaged over runs;
//! * `final_distributions.json`: every run's final Z-tables;
//! * `metadata.json`: the configuration, derived seeds and environment.
//!
//! Everything is a function of the configuration, so identical configs give
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{DiscreteDistribution, ZTable, ZTableDocument};
use crate::dominance::{
    fsd_undominated_set, pareto_front_of_expectations, verdict_matrix, Criterion, DominanceVerdict,
};
use crate::environment::{EnvironmentDocument, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::evaluation::coverage_ratio;
use crate::motdrl::{self, RunSettings};
use crate::rng::run_seed;

pub const RECORDS_FILE: &str = "records.csv";
pub const MEAN_F1_FILE: &str = "mean_f1.csv";
pub const FINAL_DISTRIBUTIONS_FILE: &str = "final_distributions.json";
pub const METADATA_FILE: &str = "metadata.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Preset name or path to an environment file.
    pub environment: String,
    pub episodes: u64,
    pub runs: u64,
    pub beta: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub snapshot_interval: u64,
    pub criterion: Criterion,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            environment: "momab5".into(),
            episodes: 200_000,
            runs: 10,
            beta: 5,
            epsilon: 0.01,
            seed: 0,
            snapshot_interval: 1000,
            criterion: Criterion::Cdf,
            out: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("episodes", self.episodes),
            ("runs", self.runs),
            ("beta", self.beta),
            ("snapshot_interval", self.snapshot_interval),
        ];
        for (name, v) in positive {
            if v < 1 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be at least 1"
                )));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    fn settings(&self) -> RunSettings {
        RunSettings {
            episodes: self.episodes,
            beta: self.beta,
            criterion: self.criterion,
            snapshot_interval: self.snapshot_interval,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub run: u64,
    pub episode: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Bonus-free ESR set at this episode.
    pub solution_set: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run: u64,
    pub seed: u64,
    pub records: Vec<ExperimentRecord>,
    pub final_tables: Vec<ZTable>,
    pub final_esr_set: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub environment: EnvironmentSpec,
    pub truth: Vec<usize>,
    pub runs: Vec<RunOutcome>,
    /// `(episode, mean F1 over runs)` at each snapshot episode.
    pub mean_f1: Vec<(u64, f64)>,
}

impl ExperimentSummary {
    /// First snapshot episode whose mean F1 is exactly 1.
    pub fn first_perfect_episode(&self) -> Option<u64> {
        self.mean_f1
            .iter()
            .find(|(_, f)| *f == 1.0)
            .map(|(e, _)| *e)
    }

    pub fn final_mean_f1(&self) -> Option<f64> {
        self.mean_f1.last().map(|(_, f)| *f)
    }
}

fn run_one(
    env: &EnvironmentSpec,
    truth: &[DiscreteDistribution],
    config: &ExperimentConfig,
    run: u64,
) -> Result<RunOutcome> {
    let seed = run_seed(config.seed, run);
    let trace = motdrl::run(env, &config.settings(), seed)?;
    let records = trace
        .snapshots
        .iter()
        .map(|snap| {
            let found: Vec<DiscreteDistribution> = snap
                .esr_set
                .iter()
                .map(|&i| snap.distributions[i].clone())
                .collect();
            let cov = coverage_ratio(&found, truth, config.epsilon)?;
            Ok(ExperimentRecord {
                run,
                episode: snap.episode,
                precision: cov.precision,
                recall: cov.recall,
                f1: cov.f1,
                solution_set: snap.esr_set.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let final_esr_set = trace
        .snapshots
        .last()
        .map(|s| s.esr_set.clone())
        .unwrap_or_default();
    Ok(RunOutcome {
        run,
        seed,
        records,
        final_tables: trace.final_state.tables().to_vec(),
        final_esr_set,
    })
}

/// Runs the experiment without touching the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let env = EnvironmentSpec::resolve(&config.environment)?;
    let truth_idx = env.ground_truth_esr_set()?;
    let truth: Vec<DiscreteDistribution> = truth_idx
        .iter()
        .map(|&i| env.exact_distribution(i))
        .collect::<Result<_>>()?;
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|r| run_one(&env, &truth, config, r))
        .collect::<Result<Vec<_>>>()?;

    let mut mean_f1: Vec<(u64, f64)> = runs[0].records.iter().map(|r| (r.episode, 0.0)).collect();
    for outcome in &runs {
        for (acc, rec) in mean_f1.iter_mut().zip(&outcome.records) {
            acc.1 += rec.f1;
        }
    }
    for acc in &mut mean_f1 {
        acc.1 /= runs.len() as f64;
    }
    Ok(ExperimentSummary {
        environment: env,
        truth: truth_idx,
        runs,
        mean_f1,
    })
}

#[derive(Serialize, Deserialize)]
struct RunTables {
    run: u64,
    seed: u64,
    final_esr_set: Vec<String>,
    tables: Vec<ZTableDocument>,
}

#[derive(Serialize, Deserialize)]
struct FinalDistributions {
    arms: Vec<String>,
    runs: Vec<RunTables>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    config: &'a ExperimentConfig,
    run_seeds: Vec<u64>,
    true_esr_set: Vec<String>,
    esr_cardinality: usize,
    environment: EnvironmentDocument,
}

/// Runs the experiment and writes its artifacts into `config.out`.
pub fn cmd_run(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let summary = execute(config)?;
    write_artifacts(config, &summary)?;
    Ok(summary)
}

fn write_artifacts(config: &ExperimentConfig, summary: &ExperimentSummary) -> Result<()> {
    let out = &config.out;
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let env = &summary.environment;

    let mut w = csv::Writer::from_path(out.join(RECORDS_FILE))?;
    w.write_record([
        "run",
        "episode",
        "precision",
        "recall",
        "f1",
        "solution_set",
    ])?;
    for outcome in &summary.runs {
        for r in &outcome.records {
            w.write_record([
                r.run.to_string(),
                r.episode.to_string(),
                r.precision.to_string(),
                r.recall.to_string(),
                r.f1.to_string(),
                env.arm_names(&r.solution_set).join(";"),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(out.join(MEAN_F1_FILE))?;
    w.write_record(["episode", "mean_f1"])?;
    for (episode, f1) in &summary.mean_f1 {
        w.write_record([episode.to_string(), f1.to_string()])?;
    }
    w.flush()?;

    let finals = FinalDistributions {
        arms: env.arm_names(&(0..env.arm_count()).collect::<Vec<_>>()),
        runs: summary
            .runs
            .iter()
            .map(|o| RunTables {
                run: o.run,
                seed: o.seed,
                final_esr_set: env.arm_names(&o.final_esr_set),
                tables: o.final_tables.iter().map(ZTable::to_document).collect(),
            })
            .collect(),
    };
    fs::write(
        out.join(FINAL_DISTRIBUTIONS_FILE),
        serde_json::to_string_pretty(&finals)?,
    )?;

    let meta = Metadata {
        config,
        run_seeds: summary.runs.iter().map(|o| o.seed).collect(),
        true_esr_set: env.arm_names(&summary.truth),
        esr_cardinality: env.esr_cardinality(),
        environment: env.to_document(),
    };
    fs::write(
        out.join(METADATA_FILE),
        serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub environment: String,
    pub arms: Vec<String>,
    pub expectations: Vec<Vec<f64>>,
    pub esr_set_cdf: Vec<String>,
    pub esr_set_pdf: Vec<String>,
    pub fsd_undominated_set: Vec<String>,
    pub pareto_front: Vec<String>,
    pub declared_true_esr_set: Option<Vec<String>>,
    /// Declared set, if any, equals the computed CDF ESR set.
    pub consistent: bool,
    pub verdicts_cdf: Vec<Vec<DominanceVerdict>>,
    pub verdicts_pdf: Vec<Vec<DominanceVerdict>>,
}

impl AnalysisReport {
    pub fn verdict(&self, a: &str, b: &str) -> Option<DominanceVerdict> {
        let i = self.arms.iter().position(|n| n == a)?;
        let j = self.arms.iter().position(|n| n == b)?;
        Some(self.verdicts_cdf[i][j])
    }
}

/// Dominance analysis of the exact arm distributions.
pub fn analyze(env: &EnvironmentSpec) -> Result<AnalysisReport> {
    let dists = env.exact_distributions()?;
    let esr_cdf = env.computed_esr_set(Criterion::Cdf)?;
    let esr_pdf = env.computed_esr_set(Criterion::Pdf)?;
    // expectation tables are built straight from the exact masses
    let means: Vec<Vec<f64>> = dists.iter().map(|d| d.expectation().0).collect();
    let pareto = crate::dominance::pareto_front(
        &means
            .iter()
            .map(|m| crate::distribution::RewardVector(m.clone()))
            .collect::<Vec<_>>(),
    )?;
    let all: Vec<usize> = (0..env.arm_count()).collect();
    Ok(AnalysisReport {
        environment: env.name().to_string(),
        arms: env.arm_names(&all),
        expectations: means,
        esr_set_cdf: env.arm_names(&esr_cdf),
        esr_set_pdf: env.arm_names(&esr_pdf),
        fsd_undominated_set: env.arm_names(&fsd_undominated_set(&dists)?),
        pareto_front: env.arm_names(&pareto),
        declared_true_esr_set: env.declared_esr_set().map(|s| env.arm_names(s)),
        consistent: env
            .declared_esr_set()
            .is_none_or(|s| s == esr_cdf.as_slice()),
        verdicts_cdf: verdict_matrix(&dists, Criterion::Cdf)?,
        verdicts_pdf: verdict_matrix(&dists, Criterion::Pdf)?,
    })
}

/// Writes the analysis of `environment` to `out` as JSON and returns it.
pub fn cmd_analyze(environment: &str, out: Option<&Path>) -> Result<AnalysisReport> {
    let env = EnvironmentSpec::resolve(environment)?;
    let report = analyze(&env)?;
    if let Some(path) = out {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

/// Final Z-tables of one run, read back from a run directory.
pub fn load_final_tables(run_dir: &Path, run: u64) -> Result<(Vec<String>, Vec<ZTable>)> {
    let path = run_dir.join(FINAL_DISTRIBUTIONS_FILE);
    let text =
        fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let finals: FinalDistributions = serde_json::from_str(&text)?;
    let entry = finals.runs.iter().find(|r| r.run == run).ok_or_else(|| {
        Error::InvalidParameter(format!("run {run} not found in {}", path.display()))
    })?;
    let tables = entry
        .tables
        .iter()
        .map(ZTable::from_document)
        .collect::<Result<Vec<_>>>()?;
    Ok((finals.arms, tables))
}

/// Writes the learned PDF and CDF of one arm as grid tables.
///
/// Two-objective tables are matrices with objective 1 down the rows and
/// objective 2 across the columns; other dimensions use one row per lattice
/// point. Returns the two file paths.
pub fn cmd_export_dist(
    run_dir: &Path,
    arm: &str,
    run: u64,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    let (names, tables) = load_final_tables(run_dir, run)?;
    let index = names
        .iter()
        .position(|n| n == arm)
        .or_else(|| arm.parse::<usize>().ok().filter(|&i| i < tables.len()))
        .ok_or_else(|| Error::UnknownArm(arm.to_string()))?;
    let table = &tables[index];
    fs::create_dir_all(out_dir)?;
    let name = &names[index];
    let pdf_path = out_dir.join(format!("{name}_pdf.csv"));
    let cdf_path = out_dir.join(format!("{name}_cdf.csv"));
    write_grid(table, &pdf_path, |t, p| t.pdf(p))?;
    write_grid(table, &cdf_path, |t, p| t.cdf(p))?;
    Ok((pdf_path, cdf_path))
}

fn write_grid(
    table: &ZTable,
    path: &Path,
    value: impl Fn(&ZTable, &crate::distribution::RewardVector) -> Result<f64>,
) -> Result<()> {
    let lattice = table.lattice();
    let axis = lattice.axis_values();
    let mut w = csv::Writer::from_path(path)?;
    if lattice.dims() == 2 {
        let mut header = vec!["x1\\x2".to_string()];
        header.extend(axis.iter().map(|v| v.to_string()));
        w.write_record(&header)?;
        for &x1 in &axis {
            let mut row = vec![x1.to_string()];
            for &x2 in &axis {
                let p = crate::distribution::RewardVector(vec![x1, x2]);
                row.push(value(table, &p)?.to_string());
            }
            w.write_record(&row)?;
        }
    } else {
        let mut header: Vec<String> = (1..=lattice.dims()).map(|d| format!("x{d}")).collect();
        header.push("value".into());
        w.write_record(&header)?;
        for p in lattice.points() {
            let mut row: Vec<String> = p.as_slice().iter().map(|v| v.to_string()).collect();
            row.push(value(table, &p)?.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub name: String,
    pub objectives: usize,
    pub arms: usize,
    pub lattice_points_per_axis: usize,
    pub esr_set: Vec<String>,
    pub declared: bool,
}

/// Loads and validates an environment, reporting its ground-truth ESR set.
pub fn cmd_validate_env(environment: &str) -> Result<ValidationSummary> {
    let env = EnvironmentSpec::resolve(environment)?;
    Ok(ValidationSummary {
        name: env.name().to_string(),
        objectives: env.dims(),
        arms: env.arm_count(),
        lattice_points_per_axis: env.lattice().points_per_axis(),
        esr_set: env.arm_names(&env.ground_truth_esr_set()?),
        declared: env.declared_esr_set().is_some(),
    })
}

/// Pareto front of the run's final learned means, for comparison with the ESR set.
pub fn learned_pareto_front(outcome: &RunOutcome) -> Result<Vec<usize>> {
    pareto_front_of_expectations(&outcome.final_tables)
}
