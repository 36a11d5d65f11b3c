//! File formats, IO and the command-line front end for `samtrace-core`.
//!
//! JSON artifacts carry a `meta` header (tool version, creation time and the
//! resolved configuration of the run) next to their payload. Trace files use
//! the CSV format `index,frame_type,size_bytes` or one size per line.

pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod meta;
pub mod scenario;
pub mod table;

pub use error::{Error, Result};
pub use samtrace_core as core;
