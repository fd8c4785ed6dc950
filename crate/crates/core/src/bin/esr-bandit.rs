use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use esr_core::experiment::{self, ExperimentConfig};
use esr_core::Criterion;

#[derive(Parser)]
#[command(
    name = "esr-bandit",
    version,
    about = "Learn and evaluate ESR sets on multi-objective bandits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Cdf,
    Pdf,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Cdf => Criterion::Cdf,
            CriterionArg::Pdf => Criterion::Pdf,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated learning experiments and write records and learned distributions.
    Run {
        /// Preset name (momab5, vrs, lottery12, lottery34) or environment file.
        #[arg(long, default_value = "momab5")]
        env: String,
        #[arg(long, default_value_t = 200_000)]
        episodes: u64,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[arg(long, default_value_t = 5)]
        beta: u64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        snapshot_interval: u64,
        #[arg(long, value_enum, default_value = "cdf")]
        criterion: CriterionArg,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Dominance analysis of the exact arm distributions.
    Analyze {
        #[arg(long)]
        env: String,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export one arm's learned PDF and CDF grids from a run directory.
    ExportDist {
        /// Output directory of a previous `run`.
        #[arg(long)]
        run_dir: PathBuf,
        /// Arm name or index.
        #[arg(long)]
        arm: String,
        #[arg(long, default_value_t = 0)]
        run: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate an environment and print its ground-truth ESR set.
    ValidateEnv {
        #[arg(long)]
        env: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> esr_core::Result<()> {
    match command {
        Command::Run {
            env,
            episodes,
            runs,
            beta,
            epsilon,
            seed,
            snapshot_interval,
            criterion,
            out,
        } => {
            let config = ExperimentConfig {
                environment: env,
                episodes,
                runs,
                beta,
                epsilon,
                seed,
                snapshot_interval,
                criterion: criterion.into(),
                out,
            };
            let summary = experiment::cmd_run(&config)?;
            let env = &summary.environment;
            println!("environment: {}", env.name());
            println!("true ESR set: {}", env.arm_names(&summary.truth).join(", "));
            for o in &summary.runs {
                println!(
                    "run {}: final ESR set {{{}}}",
                    o.run,
                    env.arm_names(&o.final_esr_set).join(", ")
                );
            }
            if let Some(f1) = summary.final_mean_f1() {
                println!("final mean F1: {f1}");
            }
            match summary.first_perfect_episode() {
                Some(e) => println!("mean F1 first reached 1 at episode {e}"),
                None => println!("mean F1 never reached 1"),
            }
            println!("wrote {}", config.out.display());
        }
        Command::Analyze { env, out } => {
            let report = experiment::cmd_analyze(&env, out.as_deref())?;
            match out {
                Some(path) => println!("wrote {}", path.display()),
                None => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(esr_core::Error::from)?
                ),
            }
        }
        Command::ExportDist {
            run_dir,
            arm,
            run,
            out,
        } => {
            let (pdf, cdf) = experiment::cmd_export_dist(&run_dir, &arm, run, &out)?;
            println!("wrote {}", pdf.display());
            println!("wrote {}", cdf.display());
        }
        Command::ValidateEnv { env } => {
            let s = experiment::cmd_validate_env(&env)?;
            println!(
                "{}: {} objectives, {} arms, {} lattice points per axis",
                s.name, s.objectives, s.arms, s.lattice_points_per_axis
            );
            let origin = if s.declared { "declared" } else { "computed" };
            println!("ESR set ({origin}): {}", s.esr_set.join(", "));
        }
    }
    Ok(())
}
