//! Exhaustive search over assignments for tiny instances.
//!
//! An assignment is feasible when, at every site and for every non-empty
//! subset of the jobs placed there, the back-to-back computation time plus
//! the back-to-back transfer time of the remote jobs fits between the
//! subset's earliest arrival and latest deadline. This is a necessary
//! condition that treats transfer and computation as sequential.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{bottleneck_rate, job_cost};
use crate::error::OracleError;
use crate::model::{Job, Scenario, EPS};

pub const MAX_JOBS: usize = 8;
pub const MAX_SITES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    /// Cheapest feasible assignment; `assignment[j]` is job `j`'s site.
    Feasible {
        cost: f64,
        assignment: Vec<usize>,
    },
    Infeasible,
}

/// Checks the subset constraints for the jobs placed at `site`.
pub fn site_load_feasible(scenario: &Scenario, site: usize, jobs: &[&Job]) -> bool {
    let k = jobs.len();
    assert!(k < 32, "subset enumeration over {k} jobs");
    let target = &scenario.sites[site];
    let need: Vec<f64> = jobs
        .iter()
        .map(|j| {
            let comp = j.workload / target.compute_capacity;
            let comm = if j.home == site {
                0.0
            } else {
                j.data_size / bottleneck_rate(scenario.home_of(j), target)
            };
            comp + comm
        })
        .collect();
    (1u32..(1u32 << k)).all(|mask| {
        let mut total = 0.0;
        let mut first = f64::INFINITY;
        let mut last = f64::NEG_INFINITY;
        for (i, j) in jobs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                total += need[i];
                first = first.min(j.arrival);
                last = last.max(j.deadline);
            }
        }
        total <= last - first + EPS
    })
}

/// Checks every site of a full assignment.
pub fn assignment_feasible(scenario: &Scenario, assignment: &[usize]) -> bool {
    (0..scenario.sites.len()).all(|site| {
        let here: Vec<&Job> = scenario
            .jobs
            .iter()
            .filter(|j| assignment[j.id] == site)
            .collect();
        site_load_feasible(scenario, site, &here)
    })
}

/// Minimum-cost feasible assignment over all `m^n` choices. Ties keep the
/// lexicographically first assignment.
pub fn brute_force_oracle(scenario: &Scenario) -> Result<OracleOutcome, OracleError> {
    scenario.validate()?;
    let n = scenario.jobs.len();
    let m = scenario.sites.len();
    if n > MAX_JOBS || m > MAX_SITES {
        return Err(OracleError::TooLarge {
            jobs: n,
            sites: m,
            max_jobs: MAX_JOBS,
            max_sites: MAX_SITES,
        });
    }
    let cost_at = |job: &Job, site: usize| {
        let (e, net) = job_cost(
            job,
            &scenario.sites[site],
            scenario.home_of(job),
            site != job.home,
        );
        e + net
    };
    let mut assignment = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        if assignment_feasible(scenario, &assignment) {
            let cost: f64 = scenario.jobs.iter().map(|j| cost_at(j, assignment[j.id])).sum();
            if best.as_ref().is_none_or(|(c, _)| cost < c - EPS) {
                best = Some((cost, assignment.clone()));
            }
        }
        // odometer, last job fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(match best {
                    Some((cost, assignment)) => OracleOutcome::Feasible { cost, assignment },
                    None => OracleOutcome::Infeasible,
                });
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < m {
                break;
            }
            assignment[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{job, site};

    fn worked() -> Scenario {
        Scenario {
            sites: vec![
                site(0, 1.0, 10.0, 5.0, 20.0, 0.5, 0.5),
                site(1, 3.0, 10.0, 5.0, 5.0, 0.5, 0.5),
            ],
            jobs: vec![job(0, 0.0, 10.0, 6.0, 10.0, 0)],
            seed: None,
        }
    }

    #[test]
    fn single_job_prefers_cheap_site() {
        let s = worked();
        assert!(assignment_feasible(&s, &[0]));
        assert!(assignment_feasible(&s, &[1]));
        assert_eq!(
            brute_force_oracle(&s).unwrap(),
            OracleOutcome::Feasible {
                cost: 40.0,
                assignment: vec![1]
            }
        );
    }

    #[test]
    fn overloaded_everywhere_is_infeasible() {
        let s = Scenario {
            sites: vec![
                site(0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
                site(1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
            ],
            jobs: vec![job(0, 0.0, 10.0, 6.0, 1.0, 0), job(1, 0.0, 10.0, 6.0, 1.0, 0)],
            seed: None,
        };
        // one job per site fits: 6 local, 6 + 1 of transfer remote
        assert!(assignment_feasible(&s, &[0, 1]));
        assert!(!assignment_feasible(&s, &[0, 0]));

        // 6 + 6 never fits in 6.5, and a remote job needs 6 + 10 alone
        let mut s = s;
        for j in &mut s.jobs {
            j.deadline = 6.5;
            j.data_size = 10.0;
        }
        assert_eq!(brute_force_oracle(&s).unwrap(), OracleOutcome::Infeasible);
    }

    #[test]
    fn empty_and_oversized() {
        let mut s = worked();
        s.jobs.clear();
        assert_eq!(
            brute_force_oracle(&s).unwrap(),
            OracleOutcome::Feasible {
                cost: 0.0,
                assignment: vec![]
            }
        );
        let mut s = worked();
        s.jobs = (0..9).map(|i| job(i, 0.0, 10.0, 1.0, 1.0, 0)).collect();
        assert!(matches!(
            brute_force_oracle(&s),
            Err(OracleError::TooLarge { .. })
        ));
    }
}
