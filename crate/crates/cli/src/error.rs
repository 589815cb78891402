pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] pairci_core::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            other => other.to_string(),
        }
    }

    /// 1 for bad input, 2 for a failed computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_configuration() => 2,
            _ => 1,
        }
    }
}
