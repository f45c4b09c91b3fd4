//! File formats, experiment driver and command-line front end for
//! [`broker_core`].

pub mod experiment;
pub mod io;
pub mod report;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, PolicyChoice};
pub use io::{load_scenario, save_scenario, ScenarioError};
