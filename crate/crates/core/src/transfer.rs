//! Transfer-phase scheduling on the single-switch WAN.
//!
//! Every site exposes two capacity-1 ports once flow sizes are divided by
//! their bottleneck rate: egress and ingress. A flow occupies the source's
//! egress and the destination's ingress over the same span.
//!
//! Admission works on *intensity*: for a port and an interval, the normalized
//! size of the flows whose windows lie inside the interval, divided by the
//! port's free time in it. Anything above 1 cannot be served. [`prune`]
//! repeatedly takes the most intense (port, interval) pair and drops the flow
//! contributing most until no pair exceeds 1. [`mcf_edf`] then schedules the
//! most critical interval first, EDF within it, and repeats on what is left.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use serde::{Deserialize, Serialize};

use crate::cost::bottleneck_rate;
use crate::model::{Assignment, Interval, Scenario, EPS};
use crate::timeline::{earliest_common_fit, SiteTimeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Egress,
    Ingress,
}

/// One side of a site's WAN link. Orders by site, then egress before ingress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PortId {
    pub site: usize,
    pub dir: Direction,
}

impl PortId {
    pub const fn egress(site: usize) -> Self {
        Self {
            site,
            dir: Direction::Egress,
        }
    }

    pub const fn ingress(site: usize) -> Self {
        Self {
            site,
            dir: Direction::Ingress,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub job_id: usize,
    pub src: usize,
    pub dst: usize,
    pub raw_size: f64,
    /// Transfer time at the bottleneck rate.
    pub norm_size: f64,
    /// `[arrival, computation start]`
    pub window: Interval,
}

impl Flow {
    pub fn ports(&self) -> [PortId; 2] {
        [PortId::egress(self.src), PortId::ingress(self.dst)]
    }

    pub fn uses(&self, port: PortId) -> bool {
        match port.dir {
            Direction::Egress => self.src == port.site,
            Direction::Ingress => self.dst == port.site,
        }
    }

    pub fn release(&self) -> f64 {
        self.window.start
    }

    pub fn deadline(&self) -> f64 {
        self.window.end
    }
}

/// Busy time of every port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortTimeline {
    egress: Vec<SiteTimeline>,
    ingress: Vec<SiteTimeline>,
}

impl PortTimeline {
    pub fn new(num_sites: usize, horizon: Interval) -> Self {
        Self {
            egress: (0..num_sites).map(|_| SiteTimeline::new(horizon)).collect(),
            ingress: (0..num_sites).map(|_| SiteTimeline::new(horizon)).collect(),
        }
    }

    pub fn for_scenario(scenario: &Scenario) -> Self {
        Self::new(scenario.sites.len(), scenario.horizon())
    }

    pub fn port(&self, id: PortId) -> &SiteTimeline {
        match id.dir {
            Direction::Egress => &self.egress[id.site],
            Direction::Ingress => &self.ingress[id.site],
        }
    }

    pub fn port_mut(&mut self, id: PortId) -> &mut SiteTimeline {
        match id.dir {
            Direction::Egress => &mut self.egress[id.site],
            Direction::Ingress => &mut self.ingress[id.site],
        }
    }

    /// Reserves `span` on both ends of `flow`.
    pub fn reserve(&mut self, flow: &Flow, span: Interval) -> Result<(), Interval> {
        let [out, inn] = flow.ports();
        if !self.port(out).is_free(&span) || !self.port(inn).is_free(&span) {
            return Err(span);
        }
        self.port_mut(out).mark_busy(span)?;
        self.port_mut(inn).mark_busy(span)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalInterval {
    pub port: PortId,
    pub interval: Interval,
    pub intensity: f64,
    /// Job ids of the flows at `port` whose windows lie in `interval`.
    pub flow_set: Vec<usize>,
}

/// Which size the pruning step divides by the free window time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneMetric {
    /// Raw data volume `d_j`.
    Raw,
    /// Normalized size, in the same units as intensity.
    #[default]
    Normalized,
}

/// One flow per remote job that has a computation start in `deadlines`.
pub fn normalize_flows(
    assignments: &[Assignment],
    scenario: &Scenario,
    deadlines: &BTreeMap<usize, f64>,
) -> Vec<Flow> {
    assignments
        .iter()
        .filter(|a| a.is_remote)
        .filter_map(|a| {
            let start = *deadlines.get(&a.job_id)?;
            let job = &scenario.jobs[a.job_id];
            let src = &scenario.sites[job.home];
            let dst = &scenario.sites[a.target_site];
            Some(Flow {
                job_id: job.id,
                src: src.id,
                dst: dst.id,
                raw_size: job.data_size,
                norm_size: job.data_size / bottleneck_rate(src, dst),
                window: Interval::new(job.arrival, start.max(job.arrival)),
            })
        })
        .collect()
}

fn ratio(amount: f64, free: f64) -> f64 {
    if amount <= 0.0 {
        0.0
    } else if free <= EPS {
        f64::INFINITY
    } else {
        amount / free
    }
}

/// Intensity of `port` over `interval`: enclosed normalized demand over
/// free port time. Zero with no enclosed demand, infinite with demand but no
/// free time.
pub fn intensity(port: PortId, interval: Interval, flows: &[Flow], ports: &PortTimeline) -> f64 {
    let demand: f64 = flows
        .iter()
        .filter(|f| f.uses(port) && f.window.within(&interval))
        .map(|f| f.norm_size)
        .sum();
    ratio(demand, ports.port(port).free_time(&interval))
}

fn outranks(a: &CriticalInterval, b: &CriticalInterval) -> bool {
    let tie = a.intensity == b.intensity || (a.intensity - b.intensity).abs() <= EPS;
    if !tie {
        return a.intensity > b.intensity;
    }
    let key = |c: &CriticalInterval| (c.interval.start, c.port, c.interval.end);
    let (sa, pa, ea) = key(a);
    let (sb, pb, eb) = key(b);
    sa.total_cmp(&sb).then(pa.cmp(&pb)).then(ea.total_cmp(&eb)) == Ordering::Less
}

/// Most intense (port, interval) pair over intervals whose endpoints are a
/// flow release and a flow deadline at that port. Only intervals enclosing at
/// least one flow are considered. Ties go to the earlier start, then the
/// lower site, then egress, then the earlier end.
///
/// Returns `None` when `flows` is empty.
pub fn most_critical_interval(flows: &[Flow], ports: &PortTimeline) -> Option<CriticalInterval> {
    let mut by_port: BTreeMap<PortId, Vec<&Flow>> = BTreeMap::new();
    for f in flows {
        for p in f.ports() {
            by_port.entry(p).or_default().push(f);
        }
    }
    let mut best: Option<CriticalInterval> = None;
    for (port, mut at_port) in by_port {
        at_port.sort_by(|a, b| {
            a.deadline()
                .total_cmp(&b.deadline())
                .then(a.job_id.cmp(&b.job_id))
        });
        let timeline = ports.port(port);
        let mut starts: Vec<f64> = at_port.iter().map(|f| f.release()).collect();
        starts.sort_by(f64::total_cmp);
        starts.dedup();
        for &start in &starts {
            // Flows released no earlier than `start`, in deadline order.
            let inside: Vec<&&Flow> = at_port.iter().filter(|f| f.release() >= start - EPS).collect();
            let mut demand = 0.0;
            let mut i = 0;
            while i < inside.len() {
                let end = inside[i].deadline();
                while i < inside.len() && inside[i].deadline() <= end + EPS {
                    demand += inside[i].norm_size;
                    i += 1;
                }
                if end < start - EPS {
                    continue;
                }
                let interval = Interval::new(start, end.max(start));
                let candidate = CriticalInterval {
                    port,
                    interval,
                    intensity: ratio(demand, timeline.free_time(&interval)),
                    flow_set: Vec::new(),
                };
                if best.as_ref().is_none_or(|b| outranks(&candidate, b)) {
                    best = Some(candidate);
                }
            }
        }
    }
    best.map(|mut c| {
        c.flow_set = flows
            .iter()
            .filter(|f| f.uses(c.port) && f.window.within(&c.interval))
            .map(|f| f.job_id)
            .collect();
        c
    })
}

/// Drops flows until no (port, interval) pair has intensity above 1.
///
/// Each round removes, from the flow set of the most critical interval, the
/// flow with the largest size over free time in its own window at that port
/// (lowest job id on ties).
pub fn prune(flows: &[Flow], ports: &PortTimeline, metric: PruneMetric) -> (Vec<Flow>, Vec<usize>) {
    let mut kept: Vec<Flow> = flows.to_vec();
    let mut rejected = Vec::new();
    while let Some(critical) = most_critical_interval(&kept, ports) {
        if critical.intensity <= 1.0 + EPS {
            break;
        }
        let timeline = ports.port(critical.port);
        let victim = kept
            .iter()
            .filter(|f| critical.flow_set.contains(&f.job_id))
            .map(|f| {
                let size = match metric {
                    PruneMetric::Raw => f.raw_size,
                    PruneMetric::Normalized => f.norm_size,
                };
                (ratio(size, timeline.free_time(&f.window)), f.job_id)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, id)| id)
            .expect("critical flow set is non-empty");
        kept.retain(|f| f.job_id != victim);
        rejected.push(victim);
    }
    (kept, rejected)
}

/// Most-critical-first scheduling with EDF inside each critical interval.
///
/// Each flow goes into the earliest span free on both of its ports, at or
/// after its release (and the interval start). A flow that cannot finish by
/// its deadline is rejected. Scheduled spans are reserved in `ports`.
pub fn mcf_edf(flows: &[Flow], ports: &mut PortTimeline) -> (BTreeMap<usize, Interval>, Vec<usize>) {
    let mut pending: Vec<Flow> = flows.to_vec();
    let mut scheduled = BTreeMap::new();
    let mut rejected = Vec::new();
    while let Some(critical) = most_critical_interval(&pending, ports) {
        let (mut batch, rest): (Vec<Flow>, Vec<Flow>) = pending
            .into_iter()
            .partition(|f| critical.flow_set.contains(&f.job_id));
        pending = rest;
        batch.sort_by(|a, b| {
            a.deadline()
                .total_cmp(&b.deadline())
                .then(a.job_id.cmp(&b.job_id))
        });
        for flow in batch {
            let [out, inn] = flow.ports();
            let from = critical.interval.start.max(flow.release());
            let fit = earliest_common_fit(
                &[ports.port(out), ports.port(inn)],
                from,
                flow.norm_size,
                flow.deadline(),
            );
            match fit {
                Some(t) => {
                    let span = Interval::new(t, t + flow.norm_size);
                    ports
                        .reserve(&flow, span)
                        .expect("span was found free on both ports");
                    scheduled.insert(flow.job_id, span);
                }
                None => rejected.push(flow.job_id),
            }
        }
    }
    (scheduled, rejected)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    Length {
        job_id: usize,
        expected: f64,
        actual: f64,
    },
    Window {
        job_id: usize,
        span: Interval,
        window: Interval,
    },
    Overlap {
        port: PortId,
        first: usize,
        second: usize,
    },
    Reserved {
        port: PortId,
        job_id: usize,
    },
    UnknownFlow {
        job_id: usize,
    },
}

/// Checks a transfer schedule: each span has the flow's normalized length,
/// lies in its window, and no two spans (or a span and an existing
/// reservation in `reserved`) overlap on any port.
pub fn verify_schedule(
    scheduled: &BTreeMap<usize, Interval>,
    flows: &[Flow],
    reserved: &PortTimeline,
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut by_port: BTreeMap<PortId, Vec<(Interval, usize)>> = BTreeMap::new();
    for (&job_id, span) in scheduled {
        let Some(flow) = flows.iter().find(|f| f.job_id == job_id) else {
            violations.push(Violation::UnknownFlow { job_id });
            continue;
        };
        if (span.len() - flow.norm_size).abs() > EPS {
            violations.push(Violation::Length {
                job_id,
                expected: flow.norm_size,
                actual: span.len(),
            });
        }
        if !span.within(&flow.window) {
            violations.push(Violation::Window {
                job_id,
                span: *span,
                window: flow.window,
            });
        }
        for port in flow.ports() {
            if reserved.port(port).busy().iter().any(|b| b.conflicts(span)) {
                violations.push(Violation::Reserved { port, job_id });
            }
            by_port.entry(port).or_default().push((*span, job_id));
        }
    }
    for (port, mut spans) in by_port {
        spans.sort_by(|a, b| a.0.start.total_cmp(&b.0.start).then(a.1.cmp(&b.1)));
        for (i, (a, first)) in spans.iter().enumerate() {
            for (b, second) in &spans[i + 1..] {
                if b.start >= a.end - EPS {
                    break;
                }
                if a.conflicts(b) {
                    violations.push(Violation::Overlap {
                        port,
                        first: *first,
                        second: *second,
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{job, site};
    use alloc::vec;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b)
    }

    /// Flow from its own source site into site 0.
    fn flow(job_id: usize, src: usize, norm: f64, window: Interval) -> Flow {
        Flow {
            job_id,
            src,
            dst: 0,
            raw_size: norm,
            norm_size: norm,
            window,
        }
    }

    fn ports() -> PortTimeline {
        PortTimeline::new(8, iv(0.0, 100.0))
    }

    #[test]
    fn normalization() {
        let s = Scenario {
            sites: vec![
                site(0, 1.0, 1.0, 5.0, 1.0, 1.0, 1.0),
                site(1, 1.0, 10.0, 1.0, 1.0, 1.0, 1.0),
            ],
            jobs: vec![
                job(0, 0.0, 10.0, 1.0, 10.0, 0),
                job(1, 0.0, 10.0, 1.0, 0.0, 0),
                job(2, 0.0, 10.0, 1.0, 4.0, 1),
            ],
            seed: None,
        };
        let assignments = [
            Assignment::new(&s.jobs[0], 1),
            Assignment::new(&s.jobs[1], 1),
            Assignment::new(&s.jobs[2], 1),
        ];
        let deadlines: BTreeMap<usize, f64> = [(0, 7.0), (1, 3.0), (2, 5.0)].into_iter().collect();
        let flows = normalize_flows(&assignments, &s, &deadlines);
        assert_eq!(flows.len(), 2);
        assert_eq!(flows[0].norm_size, 2.0);
        assert_eq!(flows[0].window, iv(0.0, 7.0));
        assert_eq!(flows[1].norm_size, 0.0);
    }

    #[test]
    fn intensity_examples() {
        let p = ports();
        let flows = vec![flow(1, 1, 4.0, iv(0.0, 10.0)), flow(2, 2, 5.0, iv(0.0, 10.0))];
        let port = PortId::ingress(0);
        assert!((intensity(port, iv(0.0, 10.0), &flows, &p) - 0.9).abs() < 1e-12);
        assert_eq!(intensity(PortId::ingress(3), iv(0.0, 10.0), &flows, &p), 0.0);

        let mut flows = flows;
        flows.push(flow(3, 3, 3.0, iv(0.0, 4.0)));
        assert!((intensity(port, iv(0.0, 10.0), &flows, &p) - 1.2).abs() < 1e-12);
        assert!((intensity(port, iv(0.0, 4.0), &flows, &p) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn intensity_accounts_for_busy_time() {
        let mut p = ports();
        p.port_mut(PortId::ingress(0)).mark_busy(iv(0.0, 5.0)).unwrap();
        let flows = vec![flow(1, 1, 2.0, iv(0.0, 10.0))];
        assert!((intensity(PortId::ingress(0), iv(0.0, 10.0), &flows, &p) - 0.4).abs() < 1e-12);
        p.port_mut(PortId::ingress(0)).mark_busy(iv(5.0, 10.0)).unwrap();
        assert_eq!(
            intensity(PortId::ingress(0), iv(0.0, 10.0), &flows, &p),
            f64::INFINITY
        );
    }

    #[test]
    fn most_critical_examples() {
        let p = ports();
        let flows = vec![
            flow(1, 1, 4.0, iv(0.0, 10.0)),
            flow(2, 2, 5.0, iv(0.0, 10.0)),
            flow(3, 3, 3.0, iv(0.0, 4.0)),
        ];
        let c = most_critical_interval(&flows, &p).unwrap();
        assert_eq!(c.port, PortId::ingress(0));
        assert_eq!(c.interval, iv(0.0, 10.0));
        assert!((c.intensity - 1.2).abs() < 1e-12);
        assert_eq!(c.flow_set, vec![1, 2, 3]);

        let single = vec![flow(1, 1, 2.0, iv(0.0, 5.0))];
        let c = most_critical_interval(&single, &p).unwrap();
        assert_eq!(c.interval, iv(0.0, 5.0));
        assert!((c.intensity - 0.4).abs() < 1e-12);
        // egress of site 1 ties with ingress of site 0; lower site wins
        assert_eq!(c.port, PortId::ingress(0));

        assert!(most_critical_interval(&[], &p).is_none());
    }

    #[test]
    fn most_critical_picks_hotter_port() {
        let p = ports();
        let mut a = flow(1, 1, 9.0, iv(0.0, 10.0));
        a.dst = 4;
        let mut b = flow(2, 2, 8.0, iv(0.0, 10.0));
        b.dst = 5;
        let c = most_critical_interval(&[b, a], &p).unwrap();
        assert!((c.intensity - 0.9).abs() < 1e-12);
        assert_eq!(c.flow_set, vec![1]);
    }

    #[test]
    fn prune_examples() {
        let p = ports();
        let flows = vec![
            flow(1, 1, 4.0, iv(0.0, 10.0)),
            flow(2, 2, 5.0, iv(0.0, 10.0)),
            flow(3, 3, 3.0, iv(0.0, 4.0)),
        ];
        let (kept, rejected) = prune(&flows, &p, PruneMetric::Normalized);
        assert_eq!(rejected, vec![3]);
        assert_eq!(kept.len(), 2);
        let c = most_critical_interval(&kept, &p).unwrap();
        assert!((c.intensity - 0.9).abs() < 1e-12);

        let (kept, rejected) = prune(&flows[..2], &p, PruneMetric::Normalized);
        assert!(rejected.is_empty());
        assert_eq!(kept.len(), 2);

        let twins = vec![flow(1, 1, 6.0, iv(0.0, 10.0)), flow(2, 2, 6.0, iv(0.0, 10.0))];
        let (kept, rejected) = prune(&twins, &p, PruneMetric::Normalized);
        assert_eq!(rejected, vec![1]);
        let c = most_critical_interval(&kept, &p).unwrap();
        assert!((c.intensity - 0.6).abs() < 1e-12);
    }

    #[test]
    fn prune_raw_metric_uses_data_volume() {
        let p = ports();
        // Normalized: F1 0.5, F2 0.6 -> drop F2. Raw: F1 5.0, F2 0.6 -> drop F1.
        let mut f1 = flow(1, 1, 5.0, iv(0.0, 10.0));
        f1.raw_size = 50.0;
        let f2 = flow(2, 2, 6.0, iv(0.0, 10.0));
        let (_, rejected) = prune(&[f1.clone(), f2.clone()], &p, PruneMetric::Normalized);
        assert_eq!(rejected, vec![2]);
        let (_, rejected) = prune(&[f1, f2], &p, PruneMetric::Raw);
        assert_eq!(rejected, vec![1]);
    }

    #[test]
    fn mcf_edf_examples() {
        let mut p = ports();
        let flows = vec![flow(1, 1, 3.0, iv(0.0, 9.0)), flow(2, 2, 2.0, iv(0.0, 5.0))];
        let (sched, rejected) = mcf_edf(&flows, &mut p);
        assert!(rejected.is_empty());
        assert_eq!(sched[&2], iv(0.0, 2.0));
        assert_eq!(sched[&1], iv(2.0, 5.0));
        assert!(verify_schedule(&sched, &flows, &ports()).is_ok());

        let mut p = ports();
        let (sched, _) = mcf_edf(&[flow(1, 1, 2.0, iv(0.0, 10.0))], &mut p);
        assert_eq!(sched[&1], iv(0.0, 2.0));
    }

    #[test]
    fn mcf_edf_scans_past_busy_counterpart() {
        let mut p = ports();
        p.port_mut(PortId::egress(1)).mark_busy(iv(0.0, 2.0)).unwrap();
        let flows = vec![flow(1, 1, 2.0, iv(0.0, 6.0))];
        let (sched, rejected) = mcf_edf(&flows, &mut p);
        assert!(rejected.is_empty());
        assert_eq!(sched[&1], iv(2.0, 4.0));
        assert_eq!(p.port(PortId::ingress(0)).busy(), &[iv(2.0, 4.0)]);
        assert_eq!(p.port(PortId::egress(1)).busy(), &[iv(0.0, 4.0)]);
    }

    #[test]
    fn mcf_edf_rejects_unpackable_flow() {
        // Density never exceeds 1 but no non-preemptive order fits both.
        let p0 = ports();
        let flows = vec![flow(1, 1, 2.0, iv(0.0, 4.0)), flow(2, 2, 2.0, iv(1.0, 3.0))];
        let (kept, pruned) = prune(&flows, &p0, PruneMetric::Normalized);
        assert!(pruned.is_empty());
        let mut p = p0.clone();
        let (sched, rejected) = mcf_edf(&kept, &mut p);
        assert_eq!(rejected, vec![1]);
        assert_eq!(sched[&2], iv(1.0, 3.0));
    }

    #[test]
    fn verify_reports_violations() {
        let flows = vec![flow(1, 1, 2.0, iv(0.0, 10.0)), flow(2, 2, 2.0, iv(0.0, 10.0))];
        let sched: BTreeMap<usize, Interval> = [(1, iv(0.0, 2.0)), (2, iv(1.0, 3.0))].into_iter().collect();
        let err = verify_schedule(&sched, &flows, &ports()).unwrap_err();
        assert_eq!(
            err,
            vec![Violation::Overlap {
                port: PortId::ingress(0),
                first: 1,
                second: 2
            }]
        );

        let sched: BTreeMap<usize, Interval> = [(1, iv(9.0, 11.0))].into_iter().collect();
        let err = verify_schedule(&sched, &flows, &ports()).unwrap_err();
        assert!(matches!(err[0], Violation::Window { job_id: 1, .. }));
    }
}
