use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {what} (residual {residual:e})")]
    NumericalFailure { what: &'static str, residual: f64 },

    #[error(
        "instance generation failed after {attempts} attempts \
         (smallest front seen: {smallest_front}, required <= {limit})"
    )]
    GenerationFailure {
        attempts: usize,
        smallest_front: usize,
        limit: usize,
    },

    #[error("trial failed (algo {algo}, trial {trial}, seed {seed}): {source}")]
    Trial {
        algo: String,
        trial: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// `true` for errors caused by bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::Format(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
