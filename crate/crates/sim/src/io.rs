//! Scenario and result files (JSON).

use std::fs;
use std::path::Path;

use broker_core::{Scenario, ScheduleResult, ValidationError};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ValidationError),
}

impl ScenarioError {
    /// Malformed or invalid content, as opposed to an unreadable file.
    pub fn is_validation(&self) -> bool {
        !matches!(self, ScenarioError::Io { .. })
    }
}

/// Rewrites serde's backtick style into `missing field: jobs`.
fn parse_message(err: &serde_json::Error) -> String {
    let msg = err.to_string();
    for kind in ["missing field", "unknown field", "duplicate field"] {
        if let Some(rest) = msg.strip_prefix(&format!("{kind} `")) {
            if let Some(name) = rest.split('`').next() {
                return format!("{kind}: {name}");
            }
        }
    }
    msg
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(parse_message(&e)))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn scenario_to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    scenario_from_json(&text)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, scenario_to_json(scenario)).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Canonical serialized form of a schedule; equal results give equal bytes.
pub fn result_to_json(result: &ScheduleResult) -> String {
    serde_json::to_string_pretty(result).expect("schedule serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use broker_core::workload::{generate_scenario, DistributionConfig};

    #[test]
    fn missing_jobs_key() {
        let err = scenario_from_json(r#"{"sites": [], "seed": 1}"#).unwrap_err();
        assert_eq!(err.to_string(), "missing field: jobs");
    }

    #[test]
    fn unknown_field_rejected() {
        let text =
            r#"{"sites":[{"id":0,"C":1,"B_in":1,"B_out":1,"P":1,"Q_in":1,"Q_out":1,"X":3}],"jobs":[]}"#;
        let err = scenario_from_json(text).unwrap_err();
        assert_eq!(err.to_string(), "unknown field: X");
    }

    #[test]
    fn reversed_window_rejected() {
        let text = r#"{"sites":[{"id":0,"C":1,"B_in":1,"B_out":1,"P":1,"Q_in":1,"Q_out":1}],
                       "jobs":[{"id":0,"a":5,"b":5,"l":1,"d":1,"home":0}]}"#;
        let err = scenario_from_json(text).unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::Invalid(ValidationError::Window { job: 0, .. })
        ));
    }

    #[test]
    fn round_trip_is_exact() {
        let s = generate_scenario(7, 50, &DistributionConfig::default(), 12345).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_scenario(&s, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }
}
