//! Video frame-size traffic modeling with the SAM seasonal ARIMA model
//! `(1,0,1)x(1,1,1)^s`, and a downlink scheduler simulator for video flows.
//!
//! The crate is `no_std` and needs only `alloc`. File IO, JSON formats and the
//! command-line front end live in the `samtrace` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod estimation;
pub mod generation;
pub mod prediction;
pub mod sam;
pub mod sched;
pub mod stats;
pub mod trace;

pub use error::{Error, Result};
pub use estimation::{diagnostics, fit_ar, fit_sam, ArModel, Diagnostics, FitOptions, FittedModel};
pub use generation::{generate, GenerationConfig};
pub use prediction::{evaluate_predictors, forecast, EvaluationOptions, Forecast, PredictionReport};
pub use sam::{
    css_objective, gaussian_loglik, one_step, residuals, DifferencingMode, InnovationSeries, ModelOrder, SamParams,
};
pub use sched::{jain_fairness, simulate, Flow, SchedulerKind, SimConfig, SimReport};
pub use stats::{
    acf, compare, ecdf, kmeans, pca, AcfSeries, ClusterResult, ComparisonReport, FeatureVector, PcaResult,
};
pub use trace::{detect_seasonality, parse_trace, summarize, Frame, FrameKind, FrameTrace, TraceFormat, TraceStats};
