//! End-to-end runs: the proposed pipeline and the home-site baseline.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::comp::{fcfs_edf_schedule, latest_start_times, reverse_transform, srtf_schedule, CompSchedule};
use crate::cost::{job_cost, total_cost, transfer_time, CostReport};
use crate::error::ValidationError;
use crate::model::{Assignment, Interval, Scenario};
use crate::rng::Stream;
use crate::site_selection::{candidate_sites, select_site, Policy};
use crate::transfer::{
    mcf_edf, normalize_flows, prune, verify_schedule, PortTimeline, PruneMetric, Violation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    /// The computation phase could not fit the job in its window.
    NoFeasibleWindow,
    /// Admission control dropped the job's transfer.
    PrunedTransfer,
    /// The transfer could not be packed before the computation start.
    TransferConflict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Admitted,
    Rejected(RejectReason),
}

impl Verdict {
    pub fn is_admitted(&self) -> bool {
        matches!(self, Verdict::Admitted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobOutcome {
    pub job_id: usize,
    pub verdict: Verdict,
    pub assignment: Assignment,
    /// Occupies the home egress and target ingress ports. Remote jobs only.
    pub transfer: Option<Interval>,
    /// Computation at the target site, forward time.
    pub compute_segments: Vec<Interval>,
    /// Cost of the job at its assignment; only booked when admitted.
    pub energy_cost: f64,
    pub network_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    /// One entry per job, in job id order.
    pub jobs: Vec<JobOutcome>,
    pub cost: CostReport,
}

impl ScheduleResult {
    pub fn admitted(&self) -> impl Iterator<Item = &JobOutcome> {
        self.jobs.iter().filter(|j| j.verdict.is_admitted())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub admitted: usize,
    pub total: usize,
    /// `admitted / total`; 1.0 for an empty scenario.
    pub admission_rate: f64,
    pub energy_cost: f64,
    pub network_cost: f64,
    pub total_cost: f64,
    pub rejections: BTreeMap<RejectReason, usize>,
    /// Filled in by callers that measure it.
    pub wall_time_s: f64,
}

impl RunMetrics {
    pub fn from_result(result: &ScheduleResult) -> Self {
        let total = result.jobs.len();
        let admitted = result.admitted().count();
        let mut rejections = BTreeMap::new();
        for j in &result.jobs {
            if let Verdict::Rejected(reason) = j.verdict {
                *rejections.entry(reason).or_insert(0) += 1;
            }
        }
        Self {
            admitted,
            total,
            admission_rate: if total == 0 {
                1.0
            } else {
                admitted as f64 / total as f64
            },
            energy_cost: result.cost.energy(),
            network_cost: result.cost.network(),
            total_cost: result.cost.total,
            rejections,
            wall_time_s: 0.0,
        }
    }

    pub fn rejected(&self, reason: RejectReason) -> usize {
        self.rejections.get(&reason).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub policy: Policy,
    /// Seeds the random-candidate draws.
    pub seed: u64,
    pub prune_metric: PruneMetric,
    /// Reschedule computation once more after dropping transfer rejects.
    pub recompute: bool,
}

/// Outcome of one comp + transfer pass over a set of participating jobs.
struct Pass {
    compute: BTreeMap<usize, Vec<Interval>>,
    transfers: BTreeMap<usize, Interval>,
    rejected: BTreeMap<usize, RejectReason>,
}

fn run_pass(
    scenario: &Scenario,
    assignments: &[Assignment],
    participating: &BTreeSet<usize>,
    metric: PruneMetric,
) -> Pass {
    let mut compute = BTreeMap::new();
    let mut rejected = BTreeMap::new();
    let mut starts = BTreeMap::new();

    for site in &scenario.sites {
        let here: Vec<&Assignment> = assignments
            .iter()
            .filter(|a| a.target_site == site.id && participating.contains(&a.job_id))
            .collect();
        if here.is_empty() {
            continue;
        }
        let mut reversal = reverse_transform(here.iter().map(|a| &scenario.jobs[a.job_id]), site);
        for a in here.iter().filter(|a| a.is_remote) {
            let job = &scenario.jobs[a.job_id];
            reversal.set_lead(a.job_id, transfer_time(job, scenario.home_of(job), site));
        }
        let schedule = srtf_schedule(&reversal);
        starts.extend(latest_start_times(&schedule));
        for id in &schedule.rejected {
            rejected.insert(*id, RejectReason::NoFeasibleWindow);
        }
        for cj in schedule.jobs {
            compute.insert(cj.job_id, cj.segments);
        }
    }

    let in_play: Vec<Assignment> = assignments
        .iter()
        .filter(|a| participating.contains(&a.job_id))
        .copied()
        .collect();
    let flows = normalize_flows(&in_play, scenario, &starts);
    let empty = PortTimeline::for_scenario(scenario);
    let (kept, pruned) = prune(&flows, &empty, metric);
    for id in pruned {
        rejected.insert(id, RejectReason::PrunedTransfer);
    }
    let mut ports = empty.clone();
    let (mut transfers, conflicts) = mcf_edf(&kept, &mut ports);
    for id in conflicts {
        rejected.insert(id, RejectReason::TransferConflict);
    }
    if let Err(violations) = verify_schedule(&transfers, &kept, &empty) {
        for v in violations {
            let ids = match v {
                Violation::Length { job_id, .. }
                | Violation::Window { job_id, .. }
                | Violation::Reserved { job_id, .. }
                | Violation::UnknownFlow { job_id } => [Some(job_id), None],
                Violation::Overlap { first, second, .. } => [Some(first), Some(second)],
            };
            for id in ids.into_iter().flatten() {
                transfers.remove(&id);
                rejected.insert(id, RejectReason::TransferConflict);
            }
        }
    }
    for id in rejected.keys() {
        compute.remove(id);
    }
    Pass {
        compute,
        transfers,
        rejected,
    }
}

fn assemble(
    scenario: &Scenario,
    assignments: &[Assignment],
    compute: &BTreeMap<usize, Vec<Interval>>,
    transfers: &BTreeMap<usize, Interval>,
    rejected: &BTreeMap<usize, RejectReason>,
) -> ScheduleResult {
    let jobs: Vec<JobOutcome> = assignments
        .iter()
        .map(|a| {
            let job = &scenario.jobs[a.job_id];
            let (energy_cost, network_cost) = job_cost(
                job,
                &scenario.sites[a.target_site],
                scenario.home_of(job),
                a.is_remote,
            );
            let verdict = match rejected.get(&a.job_id) {
                Some(r) => Verdict::Rejected(*r),
                None => Verdict::Admitted,
            };
            let admitted = verdict.is_admitted();
            JobOutcome {
                job_id: a.job_id,
                verdict,
                assignment: *a,
                transfer: if admitted {
                    transfers.get(&a.job_id).copied()
                } else {
                    None
                },
                compute_segments: if admitted {
                    compute.get(&a.job_id).cloned().unwrap_or_default()
                } else {
                    Vec::new()
                },
                energy_cost,
                network_cost,
            }
        })
        .collect();
    let cost = total_cost(
        scenario.sites.len(),
        jobs.iter()
            .filter(|j| j.verdict.is_admitted())
            .map(|j| (j.assignment.target_site, j.energy_cost, j.network_cost)),
    );
    ScheduleResult { jobs, cost }
}

/// Site selection, SRTF computation scheduling, transfer admission and
/// MCF-EDF, then cost accounting. A job is admitted iff it survives every
/// stage. Deterministic in `(scenario, options)`.
pub fn run_pipeline(
    scenario: &Scenario,
    options: &PipelineOptions,
) -> Result<(ScheduleResult, RunMetrics), ValidationError> {
    scenario.validate()?;
    let mut rng = Stream::new(options.seed);
    let assignments: Vec<Assignment> = scenario
        .jobs
        .iter()
        .map(|job| {
            let candidates = candidate_sites(job, scenario);
            select_site(job, scenario, &candidates, options.policy, &mut rng)
        })
        .collect();

    let everyone: BTreeSet<usize> = scenario.jobs.iter().map(|j| j.id).collect();
    let mut pass = run_pass(scenario, &assignments, &everyone, options.prune_metric);

    if options.recompute {
        let transfer_rejects: BTreeMap<usize, RejectReason> = pass
            .rejected
            .iter()
            .filter(|(_, r)| **r != RejectReason::NoFeasibleWindow)
            .map(|(id, r)| (*id, *r))
            .collect();
        if !transfer_rejects.is_empty() {
            let survivors: BTreeSet<usize> = everyone
                .iter()
                .filter(|id| !transfer_rejects.contains_key(id))
                .copied()
                .collect();
            pass = run_pass(scenario, &assignments, &survivors, options.prune_metric);
            pass.rejected.extend(transfer_rejects);
        }
    }

    let result = assemble(
        scenario,
        &assignments,
        &pass.compute,
        &pass.transfers,
        &pass.rejected,
    );
    let metrics = RunMetrics::from_result(&result);
    Ok((result, metrics))
}

/// Every job stays home and each site runs FCFS with EDF tie-breaking.
pub fn run_baseline(scenario: &Scenario) -> Result<(ScheduleResult, RunMetrics), ValidationError> {
    scenario.validate()?;
    let assignments: Vec<Assignment> = scenario.jobs.iter().map(Assignment::local).collect();
    let mut compute = BTreeMap::new();
    let mut rejected = BTreeMap::new();
    for site in &scenario.sites {
        let schedule: CompSchedule =
            fcfs_edf_schedule(scenario.jobs.iter().filter(|j| j.home == site.id), site);
        for id in schedule.rejected {
            rejected.insert(id, RejectReason::NoFeasibleWindow);
        }
        for cj in schedule.jobs {
            compute.insert(cj.job_id, cj.segments);
        }
    }
    let result = assemble(scenario, &assignments, &compute, &BTreeMap::new(), &rejected);
    let metrics = RunMetrics::from_result(&result);
    Ok((result, metrics))
}

/// `proposed / baseline`, with `0 / 0 = 1`.
pub fn normalized(proposed: f64, baseline: f64) -> f64 {
    if baseline == 0.0 {
        if proposed == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        proposed / baseline
    }
}

/// Proposed metrics against the baseline on the same scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub proposed: RunMetrics,
    pub baseline: RunMetrics,
    pub normalized_admission: f64,
    pub normalized_cost: f64,
}

impl Comparison {
    pub fn new(proposed: RunMetrics, baseline: RunMetrics) -> Self {
        let normalized_admission = normalized(proposed.admission_rate, baseline.admission_rate);
        let normalized_cost = normalized(proposed.total_cost, baseline.total_cost);
        Self {
            proposed,
            baseline,
            normalized_admission,
            normalized_cost,
        }
    }
}
