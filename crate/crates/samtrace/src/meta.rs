//! Reproducibility header shared by every JSON artifact.

use std::path::Path;

use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::error::{Error, Result};

pub const TOOL: &str = "samtrace";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    /// RFC 3339 UTC creation time. Honors `SOURCE_DATE_EPOCH`.
    pub created: String,
    pub command: String,
    /// Fully resolved configuration of the run, defaults included.
    pub config: serde_json::Value,
}

impl Meta {
    pub fn new(command: &str, config: &impl Serialize) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            created: timestamp(),
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
        }
    }
}

fn timestamp() -> String {
    let at = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| OffsetDateTime::from_unix_timestamp(secs).ok())
        .unwrap_or_else(OffsetDateTime::now_utc);
    at.replace_nanosecond(0)
        .unwrap_or(at)
        .format(&Rfc3339)
        .unwrap_or_default()
}

/// A payload with the header attached under `meta`.
#[derive(Debug, Serialize)]
pub struct Artifact<'a, T: Serialize> {
    pub meta: &'a Meta,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn write_artifact<T: Serialize>(path: &Path, meta: &Meta, body: &T) -> Result<()> {
    write_json(path, &Artifact { meta, body })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
