//! Random scenario generation.
//!
//! By default capacities and bandwidths are uniform while prices and job
//! sizes are normal, truncated from below by redrawing. Draw order is fixed so that a seed fully determines a scenario
//! (see [`crate::rng`] for the stream itself):
//!
//! 1. per site, in id order: `C`, `B_out`, `B_in`, `P`, `Q_out`, `Q_in`;
//! 2. per job, in id order: the `(a, b)` pair, `d`, `l`, then the home site.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::model::{DataCenter, Job, Scenario};
use crate::rng::Stream;

/// Truncation floor applied to normal draws of positive quantities.
pub const DEFAULT_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dist {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Normal truncated to `[floor, ∞)` by redrawing.
    Normal {
        mean: f64,
        std_dev: f64,
        floor: f64,
    },
}

impl Dist {
    pub const fn uniform(lo: f64, hi: f64) -> Self {
        Dist::Uniform { lo, hi }
    }

    pub const fn normal(mean: f64, std_dev: f64) -> Self {
        Dist::Normal {
            mean,
            std_dev,
            floor: DEFAULT_FLOOR,
        }
    }

    fn check(&self, parameter: &'static str, positive: bool) -> Result<(), ConfigError> {
        let fail = |reason| Err(ConfigError::Distribution { parameter, reason });
        match *self {
            Dist::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return fail(format!("uniform bounds need lo < hi, got ({lo}, {hi})"));
                }
                if positive && lo <= 0.0 {
                    return fail(format!("uniform support ({lo}, {hi}) is not strictly positive"));
                }
            }
            Dist::Normal { mean, std_dev, floor } => {
                if !(mean.is_finite() && std_dev.is_finite() && std_dev > 0.0 && floor.is_finite()) {
                    return fail(format!(
                        "normal needs finite mean and std_dev > 0, got N({mean}, {std_dev})"
                    ));
                }
                if positive && floor <= 0.0 {
                    return fail(format!("truncation floor {floor} must be positive"));
                }
                // Beyond three standard deviations the redraw loop is
                // effectively unbounded.
                if floor > mean + 3.0 * std_dev {
                    return fail(format!(
                        "truncation floor {floor} leaves no practical mass for N({mean}, {std_dev})"
                    ));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut Stream) -> f64 {
        match *self {
            Dist::Uniform { lo, hi } => rng.uniform(lo, hi),
            Dist::Normal { mean, std_dev, floor } => loop {
                let x = rng.normal(mean, std_dev);
                if x >= floor {
                    break x;
                }
            },
        }
    }
}

/// Distribution for every generated parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionConfig {
    pub compute_capacity: Dist,
    pub bw_out: Dist,
    pub bw_in: Dist,
    pub energy_price: Dist,
    pub net_price_out: Dist,
    pub net_price_in: Dist,
    /// Both arrival and deadline are drawn from this; the smaller becomes
    /// the arrival.
    pub window: Dist,
    pub data_size: Dist,
    pub workload: Dist,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        Self {
            compute_capacity: Dist::uniform(1.0, 9.0),
            bw_out: Dist::uniform(1.0, 5.0),
            bw_in: Dist::uniform(1.0, 10.0),
            energy_price: Dist::normal(10.0, 3.0),
            net_price_out: Dist::normal(10.0, 3.0),
            net_price_in: Dist::normal(5.0, 3.0),
            window: Dist::uniform(1.0, 100.0),
            data_size: Dist::normal(10.0, 5.0),
            workload: Dist::normal(6.0, 5.0),
        }
    }
}

impl DistributionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.compute_capacity.check("C", true)?;
        self.bw_out.check("B_out", true)?;
        self.bw_in.check("B_in", true)?;
        self.energy_price.check("P", true)?;
        self.net_price_out.check("Q_out", true)?;
        self.net_price_in.check("Q_in", true)?;
        self.window.check("a/b", false)?;
        self.data_size.check("d", true)?;
        self.workload.check("l", true)?;
        Ok(())
    }
}

/// Generates a scenario; identical arguments give identical scenarios.
pub fn generate_scenario(
    num_sites: usize,
    num_jobs: usize,
    config: &DistributionConfig,
    seed: u64,
) -> Result<Scenario, ConfigError> {
    if num_sites == 0 {
        return Err(ConfigError::NoSites);
    }
    config.validate()?;
    let mut rng = Stream::new(seed);

    let sites = (0..num_sites)
        .map(|id| {
            let compute_capacity = config.compute_capacity.sample(&mut rng);
            let bw_out = config.bw_out.sample(&mut rng);
            let bw_in = config.bw_in.sample(&mut rng);
            let energy_price = config.energy_price.sample(&mut rng);
            let net_price_out = config.net_price_out.sample(&mut rng);
            let net_price_in = config.net_price_in.sample(&mut rng);
            DataCenter {
                id,
                compute_capacity,
                bw_in,
                bw_out,
                energy_price,
                net_price_in,
                net_price_out,
            }
        })
        .collect();

    let jobs: Vec<Job> = (0..num_jobs)
        .map(|id| {
            let (arrival, deadline) = loop {
                let x = config.window.sample(&mut rng);
                let y = config.window.sample(&mut rng);
                if x != y {
                    break (x.min(y), x.max(y));
                }
            };
            let data_size = config.data_size.sample(&mut rng);
            let workload = config.workload.sample(&mut rng);
            let home = rng.index(num_sites);
            Job {
                id,
                arrival,
                deadline,
                workload,
                data_size,
                home,
            }
        })
        .collect();

    Ok(Scenario {
        sites,
        jobs,
        seed: Some(seed),
    })
}
