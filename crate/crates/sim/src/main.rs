use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use broker_core::oracle::{brute_force_oracle, OracleOutcome};
use broker_core::workload::{generate_scenario, DistributionConfig};
use broker_core::{OracleError, PruneMetric};
use broker_sim::experiment::{evaluate, write_experiment, ExperimentConfig, RunSettings};
use broker_sim::io::{load_scenario, result_to_json, save_scenario, ScenarioError};
use broker_sim::report::{write_csv, CsvRow};
use broker_sim::{run_experiment, PolicyChoice};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_ORACLE_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "broker-sim",
    version,
    about = "Geo-distributed job assignment and scheduling simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Raw,
    Normalized,
}

impl From<MetricArg> for PruneMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Raw => PruneMetric::Raw,
            MetricArg::Normalized => PruneMetric::Normalized,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario file.
    Generate {
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Schedule one scenario and write a one-row CSV.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyChoice::RandomCandidate)]
        policy: PolicyChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reschedule computation once after transfer rejections.
        #[arg(long)]
        recompute: bool,
        #[arg(long, value_enum, default_value_t = MetricArg::Normalized)]
        prune_metric: MetricArg,
        #[arg(long)]
        out: PathBuf,
        /// Also write the full schedule as JSON.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Report wall time as 0 for byte-reproducible output.
        #[arg(long)]
        no_timing: bool,
    },
    /// Compare a policy with the baseline over several seeds.
    Experiment {
        #[arg(long)]
        sites: usize,
        #[arg(long)]
        jobs: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long, value_enum, default_value_t = PolicyChoice::RandomCandidate)]
        policy: PolicyChoice,
        #[arg(long)]
        recompute: bool,
        #[arg(long, value_enum, default_value_t = MetricArg::Normalized)]
        prune_metric: MetricArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_timing: bool,
    },
    /// Exhaustively search a tiny scenario for the cheapest feasible assignment.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn scenario_failure(err: ScenarioError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_FAILURE
    })
}

fn failure(err: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            sites,
            jobs,
            seed,
            out,
        } => {
            let scenario = match generate_scenario(sites, jobs, &DistributionConfig::default(), seed) {
                Ok(s) => s,
                Err(e) => return failure(e, EXIT_VALIDATION),
            };
            if let Err(e) = save_scenario(&scenario, &out) {
                return scenario_failure(e);
            }
        }
        Command::Run {
            scenario,
            policy,
            seed,
            recompute,
            prune_metric,
            out,
            schedule,
            no_timing,
        } => {
            let scenario = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => return scenario_failure(e),
            };
            let settings = RunSettings {
                policy,
                seed,
                prune_metric: prune_metric.into(),
                recompute,
                record_wall_time: !no_timing,
            };
            let (result, comparison) = match evaluate(&scenario, &settings) {
                Ok(r) => r,
                Err(e) => return failure(e, EXIT_VALIDATION),
            };
            let row = CsvRow::from_comparison(seed, policy.name(), &comparison);
            let written = fs::File::create(&out)
                .map_err(|e| e.to_string())
                .and_then(|f| write_csv(&[row], f).map_err(|e| e.to_string()));
            if let Err(e) = written {
                return failure(format!("{}: {e}", out.display()), EXIT_FAILURE);
            }
            if let Some(path) = schedule {
                if let Err(e) = fs::write(&path, result_to_json(&result)) {
                    return failure(format!("{}: {e}", path.display()), EXIT_FAILURE);
                }
            }
            let m = &comparison.proposed;
            println!(
                "{}: admitted {}/{} ({:.3}), cost {:.3}, normalized admission {:.3}, normalized cost {:.3}",
                policy.name(),
                m.admitted,
                m.total,
                m.admission_rate,
                m.total_cost,
                comparison.normalized_admission,
                comparison.normalized_cost
            );
        }
        Command::Experiment {
            sites,
            jobs,
            seeds,
            policy,
            recompute,
            prune_metric,
            out,
            no_timing,
        } => {
            let mut config = ExperimentConfig::new(sites, jobs, seeds);
            config.policy = policy;
            config.recompute = recompute;
            config.prune_metric = prune_metric.into();
            config.record_wall_time = !no_timing;
            let report = match run_experiment(&config) {
                Ok(r) => r,
                Err(e) => return failure(e, EXIT_VALIDATION),
            };
            match write_experiment(&report, &out) {
                Ok(path) => println!(
                    "{}: mean normalized admission {:.3}, mean normalized cost {:.3}",
                    path.display(),
                    report.mean_normalized_admission,
                    report.mean_normalized_cost
                ),
                Err(e) => return failure(e, EXIT_FAILURE),
            }
        }
        Command::Oracle { scenario } => {
            let scenario = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => return scenario_failure(e),
            };
            match brute_force_oracle(&scenario) {
                Ok(OracleOutcome::Feasible { cost, assignment }) => {
                    println!(
                        "{}",
                        serde_json::json!({ "feasible": true, "cost": cost, "assignment": assignment })
                    );
                }
                Ok(OracleOutcome::Infeasible) => {
                    println!("{}", serde_json::json!({ "feasible": false }));
                }
                Err(e @ OracleError::TooLarge { .. }) => return failure(e, EXIT_ORACLE_LIMIT),
                Err(e) => return failure(e, EXIT_VALIDATION),
            }
        }
    }
    ExitCode::SUCCESS
}
