use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Numerical(#[from] fluxindex::Error),

    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for bad input, 3 for numerical failures, 4 for a violated identity.
    pub fn exit_code(&self) -> u8 {
        use fluxindex::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(
                E::InvalidArgument(_)
                | E::TooManyModes { .. }
                | E::OriginOnBoundary
                | E::DecayViolation { .. }
                | E::NotCommensurate(_)
                | E::NotSquare { .. }
                | E::InvalidMatrix
                | E::NotProjection { .. }
                | E::DimensionMismatch { .. },
            ) => 2,
            CliError::Numerical(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}
