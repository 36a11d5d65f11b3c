//! Reading and writing traces and models.

use std::path::{Path, PathBuf};

use samtrace_core::{parse_trace, FittedModel, FrameTrace, TraceFormat};
use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Trace format selector for the command line. `auto` picks CSV for `.csv`
/// files and the bare sizes format otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatChoice {
    #[default]
    Auto,
    Csv,
    Sizes,
}

impl FormatChoice {
    pub fn resolve(self, path: &Path) -> TraceFormat {
        match self {
            FormatChoice::Csv => TraceFormat::Csv,
            FormatChoice::Sizes => TraceFormat::SizesOnly,
            FormatChoice::Auto => match path.extension().and_then(|e| e.to_str()) {
                Some(ext) if ext.eq_ignore_ascii_case("csv") => TraceFormat::Csv,
                _ => TraceFormat::SizesOnly,
            },
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path, format: FormatChoice) -> Result<FrameTrace> {
    let text = read_text(path)?;
    let mut trace = parse_trace(&text, format.resolve(path))?;
    trace.source = trace_name(path);
    Ok(trace)
}

pub fn write_trace(path: &Path, trace: &FrameTrace, format: FormatChoice) -> Result<()> {
    std::fs::write(path, trace.serialize(format.resolve(path))).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a model file: a fit artifact, or any object carrying the parameter
/// keys (`phi`, `theta`, `Phi_s`, `Theta_s`, `s`, `sigma`, optional `mode`).
pub fn read_model(path: &Path) -> Result<FittedModel> {
    let model: FittedModel = read_json(path)?;
    model.params.validate()?;
    Ok(model)
}

/// File stem used as the trace's display name.
pub fn trace_name(path: &Path) -> String {
    path.file_stem()
        .or_else(|| path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Regular, non-hidden files of `dir` with a trace extension, sorted by name.
pub fn list_traces(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        let ext_ok = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| TRACE_EXTENSIONS.iter().any(|t| e.eq_ignore_ascii_case(t)));
        if path.is_file() && !hidden && ext_ok {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

const TRACE_EXTENSIONS: [&str; 4] = ["csv", "txt", "dat", "trace"];
