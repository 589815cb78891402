use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("index ({i}, {j}) out of range for cutoff {k}")]
    IndexOutOfRange { i: usize, j: usize, k: usize },

    #[error("no interior minimum in bracket [{lo}, {hi}]; samples (x, f): {samples:?}")]
    Bracket { lo: f64, hi: f64, samples: Vec<(f64, f64)> },

    #[error("input error: {0}")]
    Input(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than a failed computation.
    pub fn is_configuration(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::Bracket { .. })
    }
}
