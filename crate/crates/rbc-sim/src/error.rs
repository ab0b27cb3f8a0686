use std::path::PathBuf;

/// Errors produced by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),

    #[error("state error: {0}")]
    State(String),

    #[error("solver did not converge after {round_trips} round trips (last |rho| = {last_rho:.9})")]
    NotConverged { round_trips: usize, last_rho: f64 },

    #[error("{0}")]
    Scenario(#[from] ScenarioError),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Scenario and sweep file diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{origin}: missing required key `{key}`")]
    MissingField { origin: String, key: String },

    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: String, key: String },

    #[error("{origin}: `{key}` out of range: {reason}")]
    Range {
        origin: String,
        key: String,
        reason: String,
    },

    #[error("{origin}: {message}")]
    Syntax { origin: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
