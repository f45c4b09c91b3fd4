//! Multi-seed comparison of the proposed pipeline against the baseline.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use broker_core::pipeline::Comparison;
use broker_core::workload::{generate_scenario, DistributionConfig};
use broker_core::{
    run_baseline, run_pipeline, ConfigError, PipelineOptions, Policy, PruneMetric, RunMetrics, Scenario,
    ScheduleResult, ValidationError,
};
use serde::{Deserialize, Serialize};

use crate::report::{write_csv, CsvRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyChoice {
    MinCost,
    RandomCandidate,
    Baseline,
}

impl PolicyChoice {
    pub fn name(self) -> &'static str {
        match self {
            PolicyChoice::MinCost => "min-cost",
            PolicyChoice::RandomCandidate => "random-candidate",
            PolicyChoice::Baseline => "baseline",
        }
    }
}

/// Everything that shapes one evaluation besides the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub policy: PolicyChoice,
    pub seed: u64,
    pub prune_metric: PruneMetric,
    pub recompute: bool,
    /// When false, `wall_time_s` is reported as 0 so output is reproducible.
    pub record_wall_time: bool,
}

impl RunSettings {
    pub fn new(policy: PolicyChoice, seed: u64) -> Self {
        Self {
            policy,
            seed,
            prune_metric: PruneMetric::default(),
            recompute: false,
            record_wall_time: true,
        }
    }
}

fn timed<T>(record: bool, f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (
        out,
        if record {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        },
    )
}

/// Runs the chosen policy and the baseline on `scenario`. Returns the chosen
/// policy's schedule and its comparison against the baseline.
pub fn evaluate(
    scenario: &Scenario,
    settings: &RunSettings,
) -> Result<(ScheduleResult, Comparison), ValidationError> {
    let (baseline, base_time) = timed(settings.record_wall_time, || run_baseline(scenario));
    let (base_result, mut base_metrics) = baseline?;
    base_metrics.wall_time_s = base_time;

    let policy = match settings.policy {
        PolicyChoice::Baseline => {
            let cmp = Comparison::new(base_metrics.clone(), base_metrics);
            return Ok((base_result, cmp));
        }
        PolicyChoice::MinCost => Policy::MinCost,
        PolicyChoice::RandomCandidate => Policy::RandomCandidate,
    };
    let options = PipelineOptions {
        policy,
        seed: settings.seed,
        prune_metric: settings.prune_metric,
        recompute: settings.recompute,
    };
    let (proposed, time) = timed(settings.record_wall_time, || run_pipeline(scenario, &options));
    let (result, mut metrics): (ScheduleResult, RunMetrics) = proposed?;
    metrics.wall_time_s = time;
    Ok((result, Comparison::new(metrics, base_metrics)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub num_sites: usize,
    pub num_jobs: usize,
    pub seeds: Vec<u64>,
    pub policy: PolicyChoice,
    pub prune_metric: PruneMetric,
    pub recompute: bool,
    pub record_wall_time: bool,
    pub distributions: DistributionConfig,
}

impl ExperimentConfig {
    /// 20 sites, 200 jobs.
    pub fn small_scale(seeds: Vec<u64>) -> Self {
        Self::new(20, 200, seeds)
    }

    /// 100 sites, 1000 jobs.
    pub fn large_scale(seeds: Vec<u64>) -> Self {
        Self::new(100, 1000, seeds)
    }

    pub fn new(num_sites: usize, num_jobs: usize, seeds: Vec<u64>) -> Self {
        Self {
            num_sites,
            num_jobs,
            seeds,
            policy: PolicyChoice::RandomCandidate,
            prune_metric: PruneMetric::default(),
            recompute: false,
            record_wall_time: true,
            distributions: DistributionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub runs: Vec<SeedRun>,
    pub mean_normalized_admission: f64,
    pub mean_normalized_cost: f64,
}

impl ExperimentReport {
    /// One row per seed followed by the mean row.
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let mut rows: Vec<CsvRow> = self
            .runs
            .iter()
            .map(|r| CsvRow::from_comparison(r.seed, self.config.policy.name(), &r.comparison))
            .collect();
        if let Some(mean) = CsvRow::mean(&rows) {
            rows.push(mean);
        }
        rows
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("no seeds given")]
    NoSeeds,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Generates one scenario per seed and compares the chosen policy with the
/// baseline on each. Seeds run on separate threads; results come back in
/// seed order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if config.seeds.is_empty() {
        return Err(ExperimentError::NoSeeds);
    }
    let one = |seed: u64| -> Result<SeedRun, ExperimentError> {
        let scenario = generate_scenario(config.num_sites, config.num_jobs, &config.distributions, seed)?;
        let settings = RunSettings {
            policy: config.policy,
            seed,
            prune_metric: config.prune_metric,
            recompute: config.recompute,
            record_wall_time: config.record_wall_time,
        };
        let (_, comparison) = evaluate(&scenario, &settings)?;
        Ok(SeedRun { seed, comparison })
    };
    let runs = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .seeds
            .iter()
            .map(|&seed| scope.spawn(move || one(seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let n = runs.len() as f64;
    let mean_normalized_admission = runs
        .iter()
        .map(|r| r.comparison.normalized_admission)
        .sum::<f64>()
        / n;
    let mean_normalized_cost = runs.iter().map(|r| r.comparison.normalized_cost).sum::<f64>() / n;
    Ok(ExperimentReport {
        config: config.clone(),
        runs,
        mean_normalized_admission,
        mean_normalized_cost,
    })
}

/// Writes `results.csv` and `report.json` into `dir`, creating it if needed.
/// Returns the CSV path.
pub fn write_experiment(report: &ExperimentReport, dir: &Path) -> Result<PathBuf, ExperimentError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join("results.csv");
    let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    write_csv(&report.csv_rows(), file).map_err(|e| ExperimentError::Io {
        path: csv_path.clone(),
        source: e.into(),
    })?;
    let json_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(&json_path, json).map_err(io_err(&json_path))?;
    Ok(csv_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_seed_mean_matches_row() {
        let mut config = ExperimentConfig::new(4, 20, vec![3]);
        config.record_wall_time = false;
        let report = run_experiment(&config).unwrap();
        let rows = report.csv_rows();
        assert_eq!(rows.len(), 2);
        assert_eq!(
            CsvRow {
                seed: "3".into(),
                ..rows[1].clone()
            },
            rows[0]
        );
    }

    #[test]
    fn baseline_normalizes_to_one() {
        let mut config = ExperimentConfig::new(4, 30, vec![1, 2]);
        config.policy = PolicyChoice::Baseline;
        let report = run_experiment(&config).unwrap();
        for r in &report.runs {
            assert_eq!(r.comparison.normalized_admission, 1.0);
            assert_eq!(r.comparison.normalized_cost, 1.0);
        }
    }

    #[test]
    fn no_seeds_is_an_error() {
        assert!(matches!(
            run_experiment(&ExperimentConfig::new(2, 2, vec![])),
            Err(ExperimentError::NoSeeds)
        ));
    }
}
