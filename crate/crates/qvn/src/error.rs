use std::path::PathBuf;

/// Errors raised by the file formats, the registry and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum QvnError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: malformed JSON: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{context}:{line}: {message}")]
    Parse { context: String, line: usize, message: String },
    #[error("{context}: {message}")]
    Format { context: String, message: String },
    #[error("{context}: {source}")]
    Validation {
        context: String,
        #[source]
        source: qvn_core::Error,
    },
    #[error("registry entry `{0}` already exists")]
    NameCollision(String),
    #[error("registry entry `{0}` not found")]
    NotFound(String),
    #[error("invalid registry name `{0}` (use letters, digits, `-`, `_` or `.`)")]
    InvalidName(String),
    #[error("{0}")]
    Usage(String),
}

impl QvnError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QvnError::Io { path: path.into(), source }
    }

    pub(crate) fn core(context: impl Into<String>, source: qvn_core::Error) -> Self {
        QvnError::Validation { context: context.into(), source }
    }

    pub(crate) fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        QvnError::Format { context: context.into(), message: message.into() }
    }

    /// Process exit code for this error class.
    ///
    /// | code | meaning |
    /// |------|---------|
    /// | 1 | I/O or other failure |
    /// | 2 | usage error |
    /// | 3 | parse error (JSON, circuit text, schema) |
    /// | 4 | validation error (states, channels, registry names) |
    /// | 5 | heralded failure (retry budget exhausted) |
    pub fn exit_code(&self) -> u8 {
        match self {
            QvnError::Io { .. } | QvnError::NotFound(_) => 1,
            QvnError::Usage(_) => 2,
            QvnError::Json { .. } | QvnError::Parse { .. } | QvnError::Format { .. } => 3,
            QvnError::Validation { source: qvn_core::Error::HeraldedFailure { .. }, .. } => 5,
            QvnError::Validation { .. } | QvnError::NameCollision(_) | QvnError::InvalidName(_) => 4,
        }
    }
}

pub type Result<T, E = QvnError> = std::result::Result<T, E>;
