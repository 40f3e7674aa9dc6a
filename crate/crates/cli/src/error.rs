use thiserror::Error;

/// Process exit status for usage errors (bad flags, config, arguments).
pub const EXIT_USAGE: i32 = 2;
/// Process exit status for failed computations.
pub const EXIT_COMPUTATION: i32 = 3;
/// Process exit status for output failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{scenario} failed: {source}{hint}")]
    Computation {
        scenario: String,
        #[source]
        source: dispcancel_core::Error,
        /// Remediation advice, prefixed with "; " when present.
        hint: String,
    },
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn computation(scenario: &str, source: dispcancel_core::Error) -> Self {
        let hint = match &source {
            dispcancel_core::Error::WindowOverflow { .. } => {
                "; increase grid_count to widen the coincidence time window".to_string()
            }
            dispcancel_core::Error::Coverage { .. } => {
                "; increase coverage or grid_count".to_string()
            }
            dispcancel_core::Error::InsufficientSampling { .. } => {
                "; increase delay_count or narrow delay_span".to_string()
            }
            _ => String::new(),
        };
        Self::Computation {
            scenario: scenario.to_string(),
            source,
            hint,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Computation { .. } => EXIT_COMPUTATION,
            Self::Io(_) => EXIT_IO,
        }
    }

    /// Message without the category prefix.
    pub fn message(&self) -> String {
        match self {
            Self::Usage(m) => m.clone(),
            other => other.to_string(),
        }
    }
}
