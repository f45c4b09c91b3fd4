use alloc::string::String;

/// A scenario that breaks one of the model invariants.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("scenario has no sites")]
    NoSites,
    #[error("site at position {position} has id {id}; ids must be dense and 0-based")]
    SiteId { position: usize, id: usize },
    #[error("job at position {position} has id {id}; ids must be dense and 0-based")]
    JobId { position: usize, id: usize },
    #[error("site {site}: {field} must be {requirement}, got {value}")]
    Site {
        site: usize,
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("job {job}: {field} must be {requirement}, got {value}")]
    Job {
        job: usize,
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("job {job}: arrival {arrival} must be earlier than deadline {deadline}")]
    Window { job: usize, arrival: f64, deadline: f64 },
    #[error("job {job}: home site {home} does not exist ({sites} sites)")]
    HomeSite { job: usize, home: usize, sites: usize },
}

/// A workload distribution that cannot produce a valid value.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{parameter}: {reason}")]
    Distribution { parameter: &'static str, reason: String },
    #[error("at least one site is required")]
    NoSites,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {jobs} jobs on {sites} sites (limit {max_jobs} jobs, {max_sites} sites)")]
    TooLarge {
        jobs: usize,
        sites: usize,
        max_jobs: usize,
        max_sites: usize,
    },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}
