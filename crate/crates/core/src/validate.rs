//! Independent check of a [`ScheduleResult`] against its scenario.
//!
//! Everything is recomputed from the raw job and site parameters; nothing is
//! taken from the schedulers except the result being checked.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::model::{Interval, Scenario, EPS};
use crate::pipeline::ScheduleResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Invalid {
    JobCount {
        expected: usize,
        actual: usize,
    },
    JobOrder {
        position: usize,
        job_id: usize,
    },
    RemoteFlag {
        job_id: usize,
    },
    UnknownSite {
        job_id: usize,
        site: usize,
    },
    NoComputation {
        job_id: usize,
    },
    ComputeOutsideWindow {
        job_id: usize,
        segment: Interval,
    },
    ComputeAmount {
        job_id: usize,
        expected: f64,
        actual: f64,
    },
    UnsortedSegments {
        job_id: usize,
    },
    MissingTransfer {
        job_id: usize,
    },
    UnexpectedTransfer {
        job_id: usize,
    },
    TransferBeforeArrival {
        job_id: usize,
    },
    TransferLength {
        job_id: usize,
        expected: f64,
        actual: f64,
    },
    TransferAfterCompute {
        job_id: usize,
    },
    MachineOverlap {
        site: usize,
        first: usize,
        second: usize,
    },
    EgressOverlap {
        site: usize,
        first: usize,
        second: usize,
    },
    IngressOverlap {
        site: usize,
        first: usize,
        second: usize,
    },
    RejectedHoldsResources {
        job_id: usize,
    },
    CostMismatch {
        expected: f64,
        actual: f64,
    },
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS * a.abs().max(b.abs()).max(1.0)
}

fn overlaps(
    groups: BTreeMap<usize, Vec<(Interval, usize)>>,
    make: impl Fn(usize, usize, usize) -> Invalid,
    out: &mut Vec<Invalid>,
) {
    for (site, mut spans) in groups {
        spans.sort_by(|a, b| a.0.start.total_cmp(&b.0.start).then(a.1.cmp(&b.1)));
        for i in 0..spans.len() {
            for j in i + 1..spans.len() {
                if spans[j].0.start >= spans[i].0.end - EPS {
                    break;
                }
                if spans[i].0.conflicts(&spans[j].0) && spans[i].1 != spans[j].1 {
                    out.push(make(site, spans[i].1, spans[j].1));
                }
            }
        }
    }
}

/// Returns every violation found; an empty list means the result is valid.
///
/// Admitted jobs must: compute exactly `l / C` inside `[a, b]`; if remote,
/// transfer exactly `d / min(B_out, B_in)` after arrival and before the
/// first compute segment. No two admitted jobs may overlap on a machine, an
/// egress port or an ingress port. Rejected jobs must hold nothing, and the
/// cost report must equal the recomputed cost of the admitted jobs.
pub fn validate_result(scenario: &Scenario, result: &ScheduleResult) -> Vec<Invalid> {
    let mut out = Vec::new();
    if result.jobs.len() != scenario.jobs.len() {
        out.push(Invalid::JobCount {
            expected: scenario.jobs.len(),
            actual: result.jobs.len(),
        });
        return out;
    }
    let mut machine: BTreeMap<usize, Vec<(Interval, usize)>> = BTreeMap::new();
    let mut egress: BTreeMap<usize, Vec<(Interval, usize)>> = BTreeMap::new();
    let mut ingress: BTreeMap<usize, Vec<(Interval, usize)>> = BTreeMap::new();
    let mut expected_cost = 0.0;

    for (position, outcome) in result.jobs.iter().enumerate() {
        let job_id = outcome.job_id;
        if job_id != position {
            out.push(Invalid::JobOrder { position, job_id });
            continue;
        }
        let job = &scenario.jobs[job_id];
        let target_id = outcome.assignment.target_site;
        if target_id >= scenario.sites.len() {
            out.push(Invalid::UnknownSite {
                job_id,
                site: target_id,
            });
            continue;
        }
        let remote = target_id != job.home;
        if outcome.assignment.is_remote != remote || outcome.assignment.job_id != job_id {
            out.push(Invalid::RemoteFlag { job_id });
        }
        if !outcome.verdict.is_admitted() {
            if outcome.transfer.is_some() || !outcome.compute_segments.is_empty() {
                out.push(Invalid::RejectedHoldsResources { job_id });
            }
            continue;
        }
        let target = &scenario.sites[target_id];
        let home = &scenario.sites[job.home];
        let segments = &outcome.compute_segments;
        if segments.is_empty() {
            out.push(Invalid::NoComputation { job_id });
            continue;
        }
        if segments.windows(2).any(|w| w[0].end > w[1].start + EPS) {
            out.push(Invalid::UnsortedSegments { job_id });
        }
        let window = Interval {
            start: job.arrival,
            end: job.deadline,
        };
        for seg in segments {
            if seg.start > seg.end || !seg.within(&window) {
                out.push(Invalid::ComputeOutsideWindow {
                    job_id,
                    segment: *seg,
                });
            }
            machine.entry(target_id).or_default().push((*seg, job_id));
        }
        let amount: f64 = segments.iter().map(|s| s.end - s.start).sum();
        let needed = job.workload / target.compute_capacity;
        if !close(amount, needed) {
            out.push(Invalid::ComputeAmount {
                job_id,
                expected: needed,
                actual: amount,
            });
        }

        match (remote, outcome.transfer) {
            (true, None) => out.push(Invalid::MissingTransfer { job_id }),
            (false, Some(_)) => out.push(Invalid::UnexpectedTransfer { job_id }),
            (false, None) => {}
            (true, Some(t)) => {
                let rate = home.bw_out.min(target.bw_in);
                let needed = job.data_size / rate;
                if t.start < job.arrival - EPS {
                    out.push(Invalid::TransferBeforeArrival { job_id });
                }
                if !close(t.end - t.start, needed) || t.start > t.end {
                    out.push(Invalid::TransferLength {
                        job_id,
                        expected: needed,
                        actual: t.end - t.start,
                    });
                }
                if t.end > segments[0].start + EPS {
                    out.push(Invalid::TransferAfterCompute { job_id });
                }
                egress.entry(job.home).or_default().push((t, job_id));
                ingress.entry(target_id).or_default().push((t, job_id));
            }
        }

        expected_cost += job.workload * target.energy_price;
        if remote {
            expected_cost += job.data_size * (home.net_price_out + target.net_price_in);
        }
    }

    overlaps(
        machine,
        |site, first, second| Invalid::MachineOverlap { site, first, second },
        &mut out,
    );
    overlaps(
        egress,
        |site, first, second| Invalid::EgressOverlap { site, first, second },
        &mut out,
    );
    overlaps(
        ingress,
        |site, first, second| Invalid::IngressOverlap { site, first, second },
        &mut out,
    );

    if !close(expected_cost, result.cost.total) {
        out.push(Invalid::CostMismatch {
            expected: expected_cost,
            actual: result.cost.total,
        });
    }
    out
}
