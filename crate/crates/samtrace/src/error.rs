use std::path::PathBuf;

use serde_json::json;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] samtrace_core::Error),
    #[error("io: {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{module}: {message}")]
    Invalid { module: &'static str, message: String },
    #[error("cli: {0}")]
    Usage(String),
}

impl Error {
    pub fn invalid(module: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            module,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(e) => e.kind(),
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
            Error::Invalid { .. } => "invalid_input",
            Error::Usage(_) => "usage",
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            Error::Core(e) => e.module(),
            Error::Io { .. } | Error::Json { .. } => "io",
            Error::Invalid { module, .. } => module,
            Error::Usage(_) => "cli",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }

    /// The object printed to stderr when a command fails.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = json!({
            "error": {
                "kind": self.kind(),
                "module": self.module(),
                "message": self.to_string(),
            }
        });
        let path = match self {
            Error::Io { path, .. } | Error::Json { path, .. } => Some(path),
            _ => None,
        };
        if let Some(p) = path {
            obj["error"]["path"] = json!(p.display().to_string());
        }
        obj
    }
}
