use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("numeric failure: {0}")]
    Numeric(covert_watch_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 3,
            _ => 2,
        }
    }
}

impl From<covert_watch_core::Error> for CliError {
    fn from(e: covert_watch_core::Error) -> Self {
        use covert_watch_core::Error as E;
        match e {
            E::ParameterDomain { .. } | E::ClosedFormDomain(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}
