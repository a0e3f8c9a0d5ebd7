use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),

    #[error("unknown experiment `{0}`; see `crip-sim list`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] spinlab_core::Error),

    #[error(transparent)]
    Pde(#[from] crip_pde::Error),

    #[error(transparent)]
    Observables(#[from] observables::Error),

    #[error(transparent)]
    Oracle(#[from] discrete_oracle::Error),

    #[error(transparent)]
    Scaleup(#[from] scaleup::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Machine-readable form for the CLI's failure output.
    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            Error::Parse(_) => "parse",
            Error::Invalid(_) => "invalid-config",
            Error::UnknownExperiment(_) => "unknown-experiment",
            Error::Io(_) => "io",
            Error::Core(_) | Error::Pde(_) | Error::Observables(_) | Error::Oracle(_)
            | Error::Scaleup(_) => "simulation",
            Error::Json(_) => "serialization",
        };
        let mut value = serde_json::json!({ "kind": kind, "error": self.to_string() });
        if let Error::Invalid(violations) = self {
            value["violations"] = serde_json::json!(violations);
        }
        value
    }
}
