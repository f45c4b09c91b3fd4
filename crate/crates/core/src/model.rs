//! Domain types shared by every stage.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::ValidationError;

/// Absolute tolerance for every time and cost comparison.
pub const EPS: f64 = 1e-9;

/// One data center: compute capacity, port bandwidths and prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataCenter {
    pub id: usize,
    /// Workload units per time unit.
    #[serde(rename = "C")]
    pub compute_capacity: f64,
    /// Ingress bandwidth, data units per time unit.
    #[serde(rename = "B_in")]
    pub bw_in: f64,
    /// Egress bandwidth, data units per time unit.
    #[serde(rename = "B_out")]
    pub bw_out: f64,
    /// Energy cost per workload unit.
    #[serde(rename = "P")]
    pub energy_price: f64,
    /// Cost per data unit received.
    #[serde(rename = "Q_in")]
    pub net_price_in: f64,
    /// Cost per data unit sent.
    #[serde(rename = "Q_out")]
    pub net_price_out: f64,
}

/// A tenant job. Its input data is stored at `home`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub id: usize,
    #[serde(rename = "a")]
    pub arrival: f64,
    #[serde(rename = "b")]
    pub deadline: f64,
    #[serde(rename = "l")]
    pub workload: f64,
    #[serde(rename = "d")]
    pub data_size: f64,
    pub home: usize,
}

impl Job {
    pub fn window(&self) -> Interval {
        Interval::new(self.arrival, self.deadline)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub sites: Vec<DataCenter>,
    pub jobs: Vec<Job>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Scenario {
    /// Checks every invariant of the model: dense ids, positive capacities,
    /// non-negative prices, `arrival < deadline` and valid home sites.
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.sites.is_empty() {
            return Err(ValidationError::NoSites);
        }
        for (position, site) in self.sites.iter().enumerate() {
            if site.id != position {
                return Err(ValidationError::SiteId {
                    position,
                    id: site.id,
                });
            }
            let positive = [
                ("C", site.compute_capacity),
                ("B_in", site.bw_in),
                ("B_out", site.bw_out),
            ];
            for (field, value) in positive {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(ValidationError::Site {
                        site: site.id,
                        field,
                        requirement: "positive and finite",
                        value,
                    });
                }
            }
            let prices = [
                ("P", site.energy_price),
                ("Q_in", site.net_price_in),
                ("Q_out", site.net_price_out),
            ];
            for (field, value) in prices {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(ValidationError::Site {
                        site: site.id,
                        field,
                        requirement: "non-negative and finite",
                        value,
                    });
                }
            }
        }
        for (position, job) in self.jobs.iter().enumerate() {
            if job.id != position {
                return Err(ValidationError::JobId { position, id: job.id });
            }
            for (field, value) in [("a", job.arrival), ("b", job.deadline)] {
                if !value.is_finite() {
                    return Err(ValidationError::Job {
                        job: job.id,
                        field,
                        requirement: "finite",
                        value,
                    });
                }
            }
            if !(job.workload > 0.0 && job.workload.is_finite()) {
                return Err(ValidationError::Job {
                    job: job.id,
                    field: "l",
                    requirement: "positive and finite",
                    value: job.workload,
                });
            }
            if !(job.data_size >= 0.0 && job.data_size.is_finite()) {
                return Err(ValidationError::Job {
                    job: job.id,
                    field: "d",
                    requirement: "non-negative and finite",
                    value: job.data_size,
                });
            }
            if job.arrival >= job.deadline {
                return Err(ValidationError::Window {
                    job: job.id,
                    arrival: job.arrival,
                    deadline: job.deadline,
                });
            }
            if job.home >= self.sites.len() {
                return Err(ValidationError::HomeSite {
                    job: job.id,
                    home: job.home,
                    sites: self.sites.len(),
                });
            }
        }
        Ok(())
    }

    pub fn home_of(&self, job: &Job) -> &DataCenter {
        &self.sites[job.home]
    }

    /// Smallest interval containing every job window, extended to include 0.
    pub fn horizon(&self) -> Interval {
        let start = self.jobs.iter().map(|j| j.arrival).fold(0.0_f64, f64::min);
        let end = self.jobs.iter().map(|j| j.deadline).fold(start, f64::max);
        Interval::new(start, end)
    }
}

/// Closed time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        debug_assert!(start <= end + EPS, "interval [{start}, {end}] is reversed");
        Self { start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= EPS
    }

    /// Length of the intersection with `other`.
    pub fn overlap(&self, other: &Interval) -> f64 {
        (self.end.min(other.end) - self.start.max(other.start)).max(0.0)
    }

    /// `self ⊆ other` up to tolerance.
    pub fn within(&self, other: &Interval) -> bool {
        self.start >= other.start - EPS && self.end <= other.end + EPS
    }

    /// True when the interiors intersect by more than the tolerance.
    pub fn conflicts(&self, other: &Interval) -> bool {
        self.overlap(other) > EPS
    }
}

/// Where a job runs. `is_remote` holds exactly when `target_site != home`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub job_id: usize,
    pub target_site: usize,
    pub is_remote: bool,
}

impl Assignment {
    pub fn new(job: &Job, target_site: usize) -> Self {
        Self {
            job_id: job.id,
            target_site,
            is_remote: target_site != job.home,
        }
    }

    pub fn local(job: &Job) -> Self {
        Self::new(job, job.home)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn site(id: usize, c: f64, b_in: f64, b_out: f64, p: f64, q_in: f64, q_out: f64) -> DataCenter {
        DataCenter {
            id,
            compute_capacity: c,
            bw_in: b_in,
            bw_out: b_out,
            energy_price: p,
            net_price_in: q_in,
            net_price_out: q_out,
        }
    }

    pub fn job(id: usize, a: f64, b: f64, l: f64, d: f64, home: usize) -> Job {
        Job {
            id,
            arrival: a,
            deadline: b,
            workload: l,
            data_size: d,
            home,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;

    fn scenario() -> Scenario {
        Scenario {
            sites: vec![site(0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)],
            jobs: vec![job(0, 0.0, 10.0, 4.0, 1.0, 0)],
            seed: None,
        }
    }

    #[test]
    fn accepts_valid_scenario() {
        scenario().validate().unwrap();
    }

    #[test]
    fn rejects_reversed_window() {
        let mut s = scenario();
        s.jobs[0].arrival = 10.0;
        assert!(matches!(
            s.validate(),
            Err(ValidationError::Window { job: 0, .. })
        ));
    }

    #[test]
    fn rejects_bad_home_and_ids() {
        let mut s = scenario();
        s.jobs[0].home = 3;
        assert!(matches!(s.validate(), Err(ValidationError::HomeSite { .. })));
        let mut s = scenario();
        s.sites[0].id = 1;
        assert!(matches!(s.validate(), Err(ValidationError::SiteId { .. })));
    }

    #[test]
    fn rejects_zero_capacity_and_negative_price() {
        let mut s = scenario();
        s.sites[0].compute_capacity = 0.0;
        assert!(matches!(
            s.validate(),
            Err(ValidationError::Site { field: "C", .. })
        ));
        let mut s = scenario();
        s.sites[0].net_price_out = -1.0;
        assert!(matches!(
            s.validate(),
            Err(ValidationError::Site { field: "Q_out", .. })
        ));
    }

    #[test]
    fn interval_overlap() {
        let a = Interval::new(0.0, 4.0);
        let b = Interval::new(2.0, 6.0);
        assert_eq!(a.overlap(&b), 2.0);
        assert!(a.conflicts(&b));
        assert!(!a.conflicts(&Interval::new(4.0, 5.0)));
        assert!(Interval::new(1.0, 2.0).within(&a));
    }

    #[test]
    fn assignment_remote_flag() {
        let j = job(0, 0.0, 1.0, 1.0, 1.0, 2);
        assert!(!Assignment::new(&j, 2).is_remote);
        assert!(Assignment::new(&j, 0).is_remote);
    }
}
