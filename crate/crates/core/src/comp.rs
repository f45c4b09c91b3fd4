//! Computation-phase scheduling at one site.
//!
//! Starting each job as late as possible leaves the most room for its data
//! transfer. Maximizing the average start time on one machine is the mirror
//! image of minimizing average completion time: read time backwards from the
//! latest deadline `T`, so deadlines become releases, and run preemptive
//! shortest-remaining-time-first there. A reversed completion `c` is the
//! forward start `T - c`.
//!
//! The site is a single machine of rate `C`, so a job needs `l / C` time.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::model::{DataCenter, Interval, Job, EPS};

/// A job on the reversed time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversedJob {
    pub job_id: usize,
    /// `T - deadline`
    pub rev_arrival: f64,
    /// `T - arrival`
    pub rev_deadline: f64,
    /// `workload / C`
    pub proc: f64,
    /// Time that must remain between arrival and the forward start, e.g. the
    /// minimal transfer time of a remote job. Zero for local jobs.
    pub lead: f64,
}

impl ReversedJob {
    /// Latest admissible reversed completion.
    pub fn completion_limit(&self) -> f64 {
        self.rev_deadline - self.lead
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reversal {
    /// Mirror point `T`, the latest deadline at the site.
    pub mirror: f64,
    pub jobs: Vec<ReversedJob>,
}

impl Reversal {
    /// Sets the lead time of `job_id`.
    pub fn set_lead(&mut self, job_id: usize, lead: f64) {
        if let Some(j) = self.jobs.iter_mut().find(|j| j.job_id == job_id) {
            j.lead = lead;
        }
    }
}

/// Maps the jobs assigned to `site` onto the reversed axis.
pub fn reverse_transform<'a, I>(jobs: I, site: &DataCenter) -> Reversal
where
    I: IntoIterator<Item = &'a Job>,
{
    let jobs: Vec<&Job> = jobs.into_iter().collect();
    let mirror = jobs.iter().map(|j| j.deadline).fold(f64::NEG_INFINITY, f64::max);
    let jobs = jobs
        .iter()
        .map(|j| ReversedJob {
            job_id: j.id,
            rev_arrival: mirror - j.deadline,
            rev_deadline: mirror - j.arrival,
            proc: j.workload / site.compute_capacity,
            lead: 0.0,
        })
        .collect();
    Reversal { mirror, jobs }
}

/// Forward-time computation plan for one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompJob {
    pub job_id: usize,
    /// Sorted, disjoint, forward time.
    pub segments: Vec<Interval>,
}

impl CompJob {
    pub fn start(&self) -> f64 {
        self.segments.first().map_or(f64::NAN, |s| s.start)
    }

    pub fn end(&self) -> f64 {
        self.segments.last().map_or(f64::NAN, |s| s.end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompSchedule {
    /// Admitted jobs, in job id order.
    pub jobs: Vec<CompJob>,
    /// Jobs that could not be placed, in rejection order.
    pub rejected: Vec<usize>,
    pub discipline: Discipline,
}

impl CompSchedule {
    /// Every segment at the site, sorted by start.
    pub fn busy(&self) -> Vec<Interval> {
        let mut all: Vec<Interval> = self
            .jobs
            .iter()
            .flat_map(|j| j.segments.iter().copied())
            .collect();
        all.sort_by(|a, b| a.start.total_cmp(&b.start));
        all
    }

    pub fn get(&self, job_id: usize) -> Option<&CompJob> {
        self.jobs.iter().find(|j| j.job_id == job_id)
    }
}

/// Which single-machine rule produced a site's plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discipline {
    /// Shortest remaining time first on the reversed axis.
    #[default]
    Srtf,
    /// Earliest completion limit first on the reversed axis.
    Edf,
}

/// Event-driven preemptive simulation on a unit-rate machine. At every
/// arrival or completion the ready job with the smallest `priority(index,
/// remaining)` runs, lowest job id on ties. Returns per-job segments indexed
/// like `jobs`.
fn simulate(jobs: &[ReversedJob], priority: impl Fn(usize, f64) -> f64) -> Vec<Vec<Interval>> {
    let n = jobs.len();
    let mut segments: Vec<Vec<Interval>> = (0..n).map(|_| Vec::new()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        jobs[a]
            .rev_arrival
            .total_cmp(&jobs[b].rev_arrival)
            .then(jobs[a].job_id.cmp(&jobs[b].job_id))
    });
    let mut remaining: Vec<f64> = jobs.iter().map(|j| j.proc).collect();
    let mut ready: Vec<usize> = Vec::new();
    let mut next = 0;
    let mut now = f64::NEG_INFINITY;

    while next < n || !ready.is_empty() {
        if ready.is_empty() {
            now = now.max(jobs[order[next]].rev_arrival);
        }
        while next < n && jobs[order[next]].rev_arrival <= now {
            ready.push(order[next]);
            next += 1;
        }
        let (pos, &run) = ready
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                priority(a, remaining[a])
                    .total_cmp(&priority(b, remaining[b]))
                    .then(jobs[a].job_id.cmp(&jobs[b].job_id))
            })
            .expect("ready set is non-empty");
        let horizon = if next < n {
            jobs[order[next]].rev_arrival
        } else {
            f64::INFINITY
        };
        let finish = now + remaining[run];
        let (until, done) = if finish <= horizon {
            (finish, true)
        } else {
            (horizon, false)
        };
        if until > now {
            match segments[run].last_mut() {
                Some(last) if last.end == now => last.end = until,
                _ => segments[run].push(Interval::new(now, until)),
            }
        }
        if done {
            remaining[run] = 0.0;
            ready.swap_remove(pos);
        } else {
            remaining[run] -= until - now;
        }
        now = until;
    }
    segments
}

/// Preemptive SRPT on a unit-rate machine, reversed axis. Preemption happens
/// only at arrivals; ties go to the lowest job id.
pub fn srpt_segments(jobs: &[ReversedJob]) -> Vec<Vec<Interval>> {
    simulate(jobs, |_, remaining| remaining)
}

/// Preemptive EDF on the reversed axis, keyed by completion limit. Meets
/// every limit whenever any preemptive schedule does.
pub fn edf_segments(jobs: &[ReversedJob]) -> Vec<Vec<Interval>> {
    simulate(jobs, |i, _| jobs[i].completion_limit())
}

/// Reversed segments of `jobs` under `discipline`.
pub fn reversed_segments(jobs: &[ReversedJob], discipline: Discipline) -> Vec<Vec<Interval>> {
    match discipline {
        Discipline::Srtf => srpt_segments(jobs),
        Discipline::Edf => edf_segments(jobs),
    }
}

fn completion(job: &ReversedJob, segments: &[Interval]) -> f64 {
    segments.last().map_or(job.rev_arrival, |s| s.end)
}

fn late(job: &ReversedJob, segments: &[Interval]) -> bool {
    completion(job, segments) > job.completion_limit() + EPS
}

/// Job to drop from an EDF plan that misses a limit. Starting at the
/// earliest miss, walk back while the machine is continuously busy with jobs
/// whose limit is no later than the missed one. Those jobs arrived inside
/// that span and cannot all fit in it, so the longest of them (lowest id on
/// ties) goes.
fn overload_victim(jobs: &[ReversedJob], edf: &[Vec<Interval>]) -> usize {
    let (missed, miss_at) = jobs
        .iter()
        .zip(edf)
        .filter(|(j, segs)| late(j, segs))
        .map(|(j, segs)| (j, completion(j, segs)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.job_id.cmp(&b.0.job_id)))
        .expect("called with a late job");
    let mut before: Vec<(Interval, usize)> = edf
        .iter()
        .enumerate()
        .flat_map(|(i, segs)| segs.iter().map(move |s| (*s, i)))
        .filter(|(s, _)| s.end <= miss_at)
        .collect();
    before.sort_by(|a, b| b.0.end.total_cmp(&a.0.end));
    let mut from = miss_at;
    let mut victim = missed;
    for (seg, i) in before {
        let job = &jobs[i];
        if seg.end < from - EPS || job.completion_limit() > missed.completion_limit() + EPS {
            break;
        }
        from = seg.start;
        if job.proc > victim.proc || (job.proc == victim.proc && job.job_id < victim.job_id) {
            victim = job;
        }
    }
    victim.job_id
}

/// Schedules the reversed instance and maps it back to forward time.
///
/// SRTF is used whenever it keeps every job within its
/// [`ReversedJob::completion_limit`] (otherwise the job would start before
/// its arrival, or too early to receive its data). If SRTF misses a limit
/// but EDF does not, the site runs the EDF plan. If EDF misses too, the
/// overload is unavoidable: one job is dropped (see `overload_victim`) and
/// the whole procedure restarts on the rest.
pub fn srtf_schedule(reversal: &Reversal) -> CompSchedule {
    let mut active: Vec<ReversedJob> = reversal.jobs.clone();
    let mut rejected = Vec::new();
    loop {
        let srtf = srpt_segments(&active);
        let (discipline, segments) = if active.iter().zip(&srtf).any(|(j, s)| late(j, s)) {
            let edf = edf_segments(&active);
            if active.iter().zip(&edf).any(|(j, s)| late(j, s)) {
                let victim = overload_victim(&active, &edf);
                rejected.push(victim);
                active.retain(|j| j.job_id != victim);
                continue;
            }
            (Discipline::Edf, edf)
        } else {
            (Discipline::Srtf, srtf)
        };
        let t = reversal.mirror;
        let mut jobs: Vec<CompJob> = active
            .iter()
            .zip(segments)
            .map(|(j, segs)| CompJob {
                job_id: j.job_id,
                segments: segs
                    .iter()
                    .rev()
                    .map(|s| Interval::new(t - s.end, t - s.start))
                    .collect(),
            })
            .collect();
        jobs.sort_by_key(|j| j.job_id);
        return CompSchedule {
            jobs,
            rejected,
            discipline,
        };
    }
}

/// Forward start time of every admitted job. These are the transfer
/// deadlines of remote jobs.
pub fn latest_start_times(schedule: &CompSchedule) -> BTreeMap<usize, f64> {
    schedule.jobs.iter().map(|j| (j.job_id, j.start())).collect()
}

/// Non-preemptive first-come-first-served with earliest-deadline-first among
/// simultaneous arrivals. Jobs that would finish late are rejected without
/// occupying the machine.
pub fn fcfs_edf_schedule<'a, I>(jobs: I, site: &DataCenter) -> CompSchedule
where
    I: IntoIterator<Item = &'a Job>,
{
    let mut queue: Vec<&Job> = jobs.into_iter().collect();
    queue.sort_by(|a, b| {
        a.arrival
            .total_cmp(&b.arrival)
            .then(a.deadline.total_cmp(&b.deadline))
            .then(a.id.cmp(&b.id))
    });
    let mut free_at = f64::NEG_INFINITY;
    let mut admitted = Vec::new();
    let mut rejected = Vec::new();
    for job in queue {
        let start = free_at.max(job.arrival);
        let end = start + job.workload / site.compute_capacity;
        if end > job.deadline + EPS {
            rejected.push(job.id);
        } else {
            admitted.push(CompJob {
                job_id: job.id,
                segments: alloc::vec![Interval::new(start, end)],
            });
            free_at = end;
        }
    }
    admitted.sort_by_key(|j| j.job_id);
    CompSchedule {
        jobs: admitted,
        rejected,
        discipline: Discipline::Edf,
    }
}
