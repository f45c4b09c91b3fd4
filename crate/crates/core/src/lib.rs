//! Broker-side job assignment and two-phase scheduling for geo-distributed
//! data centers.
//!
//! A job `⟨arrival, deadline, workload, data_size, home⟩` is either processed
//! where its data lives or shipped to a cheaper site. Shipping means the job
//! first occupies the home site's egress port and the target's ingress port
//! for the same span (the WAN is modeled as one non-blocking switch), and only
//! then computes at the target.
//!
//! The pipeline is:
//!
//! 1. [`site_selection`]: screen every other site for time and cost
//!    feasibility, then pick one (cheapest, or uniformly among candidates).
//! 2. [`comp`]: per site, schedule computation as late as possible by
//!    running SRTF on the time-reversed instance.
//! 3. [`transfer`]: the computed start times become transfer deadlines;
//!    flows are normalized, pruned until no port interval is overloaded and
//!    then packed most-critical-interval first with EDF.
//! 4. [`cost`]: energy plus network cost over admitted jobs.
//!
//! [`pipeline`] wires these together and also provides the FCFS+EDF
//! home-site baseline. [`oracle`] brute-forces small instances and
//! [`validate`] re-checks any result without trusting the schedulers.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod comp;
pub mod cost;
pub mod error;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod site_selection;
pub mod timeline;
pub mod transfer;
pub mod validate;
pub mod workload;

pub use error::{ConfigError, OracleError, ValidationError};
pub use model::{Assignment, DataCenter, Interval, Job, Scenario, EPS};
pub use pipeline::{
    run_baseline, run_pipeline, JobOutcome, PipelineOptions, RejectReason, RunMetrics, ScheduleResult,
    Verdict,
};
pub use site_selection::Policy;
pub use timeline::SiteTimeline;
pub use transfer::PruneMetric;
