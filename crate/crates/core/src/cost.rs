//! Energy/network cost and the minimum time formulas.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::model::{DataCenter, Job};

/// Energy and network cost of running `job` at `target`.
///
/// Energy is `P_target * l`. Network cost is only charged for remote jobs and
/// covers sending from home plus receiving at the target.
pub fn job_cost(job: &Job, target: &DataCenter, home: &DataCenter, is_remote: bool) -> (f64, f64) {
    let energy = target.energy_price * job.workload;
    let network = if is_remote {
        job.data_size * (home.net_price_out + target.net_price_in)
    } else {
        0.0
    };
    (energy, network)
}

/// Minimum time to compute `workloads` back to back at `site`.
pub fn comp_time(workloads: &[f64], site: &DataCenter) -> f64 {
    workloads.iter().sum::<f64>() / site.compute_capacity
}

/// Transfer rate of a `home -> target` flow, bounded by the slower port.
pub fn bottleneck_rate(home: &DataCenter, target: &DataCenter) -> f64 {
    home.bw_out.min(target.bw_in)
}

/// Minimum time to move the job's input from `home` to `target`.
pub fn transfer_time(job: &Job, home: &DataCenter, target: &DataCenter) -> f64 {
    if home.id == target.id {
        0.0
    } else {
        job.data_size / bottleneck_rate(home, target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteCost {
    pub site: usize,
    pub energy: f64,
    pub network: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub per_site: Vec<SiteCost>,
    pub total: f64,
}

impl CostReport {
    pub fn energy(&self) -> f64 {
        self.per_site.iter().map(|s| s.energy).sum()
    }

    pub fn network(&self) -> f64 {
        self.per_site.iter().map(|s| s.network).sum()
    }
}

/// Sums booked costs by target site. `booked` yields `(target site, energy,
/// network)` for admitted jobs only.
pub fn total_cost<I>(num_sites: usize, booked: I) -> CostReport
where
    I: IntoIterator<Item = (usize, f64, f64)>,
{
    let mut per_site: Vec<SiteCost> = (0..num_sites)
        .map(|site| SiteCost {
            site,
            energy: 0.0,
            network: 0.0,
        })
        .collect();
    for (site, energy, network) in booked {
        per_site[site].energy += energy;
        per_site[site].network += network;
    }
    let total = per_site.iter().map(|s| s.energy + s.network).sum();
    CostReport { per_site, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{job, site};
    use alloc::vec;

    #[test]
    fn job_cost_examples() {
        let home = site(0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0);
        let target = site(1, 1.0, 1.0, 1.0, 10.0, 5.0, 1.0);
        let j = job(0, 0.0, 10.0, 6.0, 10.0, 0);
        assert_eq!(job_cost(&j, &target, &home, true), (60.0, 150.0));
        assert_eq!(job_cost(&j, &target, &target, false), (60.0, 0.0));
        let mut zero = j.clone();
        zero.workload = 0.0;
        assert_eq!(job_cost(&zero, &target, &target, false), (0.0, 0.0));
    }

    #[test]
    fn comp_time_examples() {
        let s = site(0, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(comp_time(&[6.0], &s), 2.0);
        assert_eq!(comp_time(&[], &s), 0.0);
        assert_eq!(comp_time(&[6.0, 3.0], &s), 3.0);
    }

    #[test]
    fn transfer_time_examples() {
        let home = site(0, 1.0, 1.0, 5.0, 1.0, 1.0, 1.0);
        let fast = site(1, 1.0, 10.0, 1.0, 1.0, 1.0, 1.0);
        let slow = site(2, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0);
        let j = job(0, 0.0, 10.0, 1.0, 10.0, 0);
        assert_eq!(transfer_time(&j, &home, &fast), 2.0);
        assert_eq!(transfer_time(&j, &home, &slow), 5.0);
        assert_eq!(transfer_time(&j, &home, &home), 0.0);
    }

    #[test]
    fn total_cost_examples() {
        assert_eq!(total_cost(2, [(0, 60.0, 0.0)]).total, 60.0);
        let r = total_cost(2, [(1, 60.0, 150.0), (0, 60.0, 0.0)]);
        assert_eq!(r.total, 270.0);
        assert_eq!(r.per_site[1].network, 150.0);
        assert_eq!(total_cost(3, vec![]).total, 0.0);
    }
}
