//! Candidate screening and site choice.
//!
//! A site other than the job's home is a candidate when the job could be
//! shipped and computed there inside its window (ignoring congestion) and
//! doing so is strictly cheaper than computing at home. Jobs without
//! candidates stay home.
//!
//! Regulatory or privacy filters would slot in as an extra predicate in
//! [`candidate_sites`].

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::cost::{bottleneck_rate, job_cost};
use crate::model::{Assignment, Job, Scenario, EPS};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Cheapest candidate, lowest site id on ties.
    MinCost,
    /// Uniform draw among candidates; spreads load away from hotspots.
    #[default]
    RandomCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub job_id: usize,
    pub candidates: Vec<usize>,
    pub chosen: usize,
}

/// Time feasibility of shipping `job` to `site`, alone.
pub fn fits_window(job: &Job, scenario: &Scenario, site: usize) -> bool {
    let home = scenario.home_of(job);
    let target = &scenario.sites[site];
    let needed = job.workload / target.compute_capacity + job.data_size / bottleneck_rate(home, target);
    needed <= job.deadline - job.arrival + EPS
}

/// Strict cost benefit of running `job` at `site` instead of at home.
pub fn is_cheaper(job: &Job, scenario: &Scenario, site: usize) -> bool {
    let home = scenario.home_of(job);
    let target = &scenario.sites[site];
    let (energy, network) = job_cost(job, target, home, true);
    energy + network < job.workload * home.energy_price - EPS
}

/// Every non-home site passing both screening conditions, in id order.
pub fn candidate_sites(job: &Job, scenario: &Scenario) -> Vec<usize> {
    (0..scenario.sites.len())
        .filter(|&s| s != job.home)
        .filter(|&s| fits_window(job, scenario, s) && is_cheaper(job, scenario, s))
        .collect()
}

/// Picks the target site. An empty candidate list keeps the job home.
///
/// The random policy consumes exactly one draw from `rng` when there is at
/// least one candidate, and none otherwise.
pub fn select_site(
    job: &Job,
    scenario: &Scenario,
    candidates: &[usize],
    policy: Policy,
    rng: &mut Stream,
) -> Assignment {
    if candidates.is_empty() {
        return Assignment::local(job);
    }
    let home = scenario.home_of(job);
    let target = match policy {
        Policy::MinCost => {
            let cost = |s: usize| {
                let (e, n) = job_cost(job, &scenario.sites[s], home, true);
                e + n
            };
            let mut best = candidates[0];
            let mut best_cost = cost(best);
            for &s in &candidates[1..] {
                let c = cost(s);
                if c < best_cost - EPS || (c <= best_cost + EPS && s < best) {
                    best = s;
                    best_cost = c;
                }
            }
            best
        }
        Policy::RandomCandidate => candidates[rng.index(candidates.len())],
    };
    Assignment::new(job, target)
}

/// Screens and selects in one go.
pub fn screen(job: &Job, scenario: &Scenario, policy: Policy, rng: &mut Stream) -> CandidateSet {
    let candidates = candidate_sites(job, scenario);
    let chosen = select_site(job, scenario, &candidates, policy, rng).target_site;
    CandidateSet {
        job_id: job.id,
        candidates,
        chosen,
    }
}
