//! One function per subcommand. Each writes the artifacts it was asked for
//! and returns the artifact body plus a human-readable table.

use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use samtrace_core::estimation::diagnostics;
use samtrace_core::generation::RNG_ALGORITHM;
use samtrace_core::stats::{feature_vector, standardize, FEATURE_NAMES};
use samtrace_core::{
    compare, detect_seasonality, evaluate_predictors, fit_sam, forecast, generate, kmeans, pca, ClusterResult,
    ComparisonReport, Diagnostics, DifferencingMode, EvaluationOptions, FeatureVector, FitOptions, FittedModel,
    Forecast, FrameTrace, GenerationConfig, PcaResult, PredictionReport, SamParams, SimReport,
};

use crate::error::{Error, Result};
use crate::io::{read_model, read_trace, write_trace, FormatChoice};
use crate::meta::{write_artifact, Meta};
use crate::scenario::{self, ResolvedScenario};
use crate::table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
pub enum ModeArg {
    #[default]
    #[value(name = "EQ3_LITERAL")]
    #[serde(rename = "EQ3_LITERAL")]
    Eq3Literal,
    #[value(name = "STANDARD_SEASONAL")]
    #[serde(rename = "STANDARD_SEASONAL")]
    StandardSeasonal,
}

impl From<ModeArg> for DifferencingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Eq3Literal => DifferencingMode::Eq3Literal,
            ModeArg::StandardSeasonal => DifferencingMode::StandardSeasonal,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Trace to fit.
    #[arg(long)]
    pub trace: PathBuf,
    /// Seasonality (GoP length). Detected from the ACF when omitted.
    #[arg(long)]
    pub season: Option<usize>,
    /// Largest period considered by seasonality detection.
    #[arg(long, default_value_t = 48)]
    pub max_period: usize,
    /// Differencing form of the model.
    #[arg(long, value_enum, default_value_t = ModeArg::Eq3Literal)]
    pub mode: ModeArg,
    /// Objective evaluation budget, shared by all optimizer restarts.
    #[arg(long, default_value_t = 2000)]
    pub max_evals: usize,
    /// Relative simplex spread at which the optimizer stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Trace format.
    #[arg(long, value_enum, default_value_t = FormatChoice::Auto)]
    pub format: FormatChoice,
    /// Model JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Seasonality {
    pub declared: Option<usize>,
    pub detected: Option<usize>,
    pub used: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    #[serde(flatten)]
    pub diagnostics: Diagnostics,
    /// Upper-tail chi-square probability of the Ljung-Box statistic.
    pub p_value: Option<f64>,
}

impl DiagnosticsReport {
    pub fn new(diagnostics: Diagnostics) -> Self {
        let p_value = (diagnostics.degrees_of_freedom > 0)
            .then(|| ChiSquared::new(diagnostics.degrees_of_freedom as f64).ok())
            .flatten()
            .map(|chi| chi.sf(diagnostics.ljung_box));
        Self { diagnostics, p_value }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitOutput {
    #[serde(flatten)]
    pub model: FittedModel,
    pub seasonality: Seasonality,
    pub diagnostics: Option<DiagnosticsReport>,
}

pub fn fit(args: &FitArgs) -> Result<(FitOutput, String)> {
    let trace = read_trace(&args.trace, args.format)?;
    let detected = detect_seasonality(&trace, args.max_period).ok();
    let s = args
        .season
        .or(detected)
        .ok_or_else(|| Error::invalid("fit", "no --season given and none could be detected"))?;
    let options = FitOptions {
        max_evals: args.max_evals,
        tolerance: args.tolerance,
        ..FitOptions::standard()
    };
    let model = fit_sam(&trace, s, args.mode.into(), &options)?;
    let diag = diagnostics(&model, &trace).ok().map(DiagnosticsReport::new);
    let out = FitOutput {
        model,
        seasonality: Seasonality {
            declared: args.season,
            detected,
            used: s,
        },
        diagnostics: diag,
    };
    if let Some(path) = &args.out {
        write_artifact(path, &Meta::new("fit", args), &out)?;
    }
    let table = table::fit(&out);
    Ok((out, table))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    /// Model JSON (fit output or a bare parameter object).
    #[arg(long)]
    pub model: PathBuf,
    /// Frames to emit.
    #[arg(long)]
    pub length: usize,
    /// RNG seed. Required.
    #[arg(long)]
    pub seed: u64,
    /// Trace file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar JSON path. Defaults to the trace path with `.json` appended.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Discarded warm-up steps. Defaults to 10 s.
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Level of the initial history when the model carries no anchor.
    /// Defaults to the model's source mean.
    #[arg(long)]
    pub init_level: Option<f64>,
    /// Ignore the model's anchor and start from a flat history.
    #[arg(long)]
    pub no_anchor: bool,
    /// Smallest emitted frame size.
    #[arg(long, default_value_t = 0)]
    pub clamp_floor: u64,
    /// Frames per second recorded with the trace.
    #[arg(long, default_value_t = samtrace_core::trace::DEFAULT_FRAME_RATE)]
    pub frame_rate: f64,
    /// Trace format.
    #[arg(long, value_enum, default_value_t = FormatChoice::Auto)]
    pub format: FormatChoice,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationSidecar {
    pub params: SamParams,
    pub mode: DifferencingMode,
    pub config: GenerationConfig,
    pub rng: String,
    pub model_path: PathBuf,
    pub trace_path: PathBuf,
    pub frames: usize,
    pub total_bytes: u64,
}

pub fn generation_config(args: &GenerateArgs, model: &FittedModel) -> GenerationConfig {
    let mut cfg = GenerationConfig::new(args.length, args.seed);
    cfg.burn_in = args.burn_in;
    cfg.clamp_floor = args.clamp_floor;
    cfg.frame_rate = args.frame_rate;
    cfg.init_level = args.init_level.unwrap_or(model.source_mean);
    if !args.no_anchor && args.init_level.is_none() && !model.anchor.is_empty() {
        cfg.initial_history = Some(model.anchor.clone());
    }
    cfg
}

pub fn generate_cmd(args: &GenerateArgs) -> Result<(FrameTrace, String)> {
    let model = read_model(&args.model)?;
    let cfg = generation_config(args, &model);
    let mut trace = generate(&model.params, model.mode, &cfg)?;
    trace.source = crate::io::trace_name(&args.out);
    write_trace(&args.out, &trace, args.format)?;
    let sidecar_path = args.sidecar.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".json");
        PathBuf::from(p)
    });
    let sidecar = GenerationSidecar {
        params: model.params,
        mode: model.mode,
        config: cfg,
        rng: RNG_ALGORITHM.to_string(),
        model_path: args.model.clone(),
        trace_path: args.out.clone(),
        frames: trace.len(),
        total_bytes: trace.total_bytes(),
    };
    write_artifact(&sidecar_path, &Meta::new("generate", args), &sidecar)?;
    let table = table::generate(&sidecar, &trace);
    Ok((trace, table))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    /// Model JSON supplying s, mode and the forecasting parameters.
    #[arg(long)]
    pub model: PathBuf,
    /// Observed trace.
    #[arg(long)]
    pub trace: PathBuf,
    /// Forecast horizon in frames.
    #[arg(long)]
    pub horizon: usize,
    /// Fraction of the trace used for training in the rolling-origin evaluation.
    #[arg(long, default_value_t = 0.8)]
    pub split: f64,
    /// Order of the autoregressive baseline.
    #[arg(long, default_value_t = 1)]
    pub ar_order: usize,
    /// Refit both models every this many origins during evaluation.
    #[arg(long)]
    pub refit_every: Option<usize>,
    /// Only forecast from the end of the trace; skip the evaluation.
    #[arg(long)]
    pub no_evaluate: bool,
    /// Trace format.
    #[arg(long, value_enum, default_value_t = FormatChoice::Auto)]
    pub format: FormatChoice,
    /// Report JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictOutput {
    pub forecast: Forecast,
    pub evaluation: Option<PredictionReport>,
}

pub fn predict(args: &PredictArgs) -> Result<(PredictOutput, String)> {
    let model = read_model(&args.model)?;
    let trace = read_trace(&args.trace, args.format)?;
    let fc = forecast(&model, &trace, args.horizon)?;
    let evaluation = if args.no_evaluate {
        None
    } else {
        let options = EvaluationOptions {
            mode: model.mode,
            ar_order: args.ar_order,
            refit_every: args.refit_every,
            fit: FitOptions::standard(),
        };
        Some(evaluate_predictors(
            &trace,
            model.params.s,
            args.horizon,
            args.split,
            &options,
        )?)
    };
    let out = PredictOutput {
        forecast: fc,
        evaluation,
    };
    if let Some(path) = &args.out {
        write_artifact(path, &Meta::new("predict", args), &out)?;
    }
    let table = table::predict(&out);
    Ok((out, table))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Seed for synthetic flows that do not carry their own.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateOutput {
    pub scenario: ResolvedScenario,
    pub reports: Vec<SimReport>,
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<(SimulateOutput, String)> {
    let spec = scenario::load(&args.scenario)?;
    let base = args.scenario.parent().unwrap_or(Path::new("."));
    let resolved = spec.resolve(base, args.seed)?;
    let reports = resolved
        .schedulers
        .iter()
        .map(|&k| resolved.run(k))
        .collect::<Result<Vec<_>>>()?;
    let out = SimulateOutput {
        scenario: resolved,
        reports,
    };
    if let Some(path) = &args.out {
        #[derive(Serialize)]
        struct Config<'a> {
            #[serde(flatten)]
            args: &'a SimulateArgs,
            scenario_file: &'a scenario::Scenario,
        }
        let meta = Meta::new(
            "simulate",
            &Config {
                args,
                scenario_file: &spec,
            },
        );
        write_artifact(path, &meta, &out)?;
    }
    let table = table::simulate(&out);
    Ok((out, table))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Directory of traces (.csv, .txt, .dat, .trace).
    #[arg(long)]
    pub dir: PathBuf,
    /// Seasonality used for the seasonal ACF features.
    #[arg(long)]
    pub season: usize,
    /// Largest period considered by seasonality detection.
    #[arg(long, default_value_t = 48)]
    pub max_period: usize,
    /// Principal components to keep. No PCA when omitted.
    #[arg(long)]
    pub components: Option<usize>,
    /// Number of k-means clusters. No clustering when omitted.
    #[arg(long, requires = "seed")]
    pub clusters: Option<usize>,
    /// Seed for k-means initialization. Required with --clusters.
    #[arg(long)]
    pub seed: Option<u64>,
    /// k-means iteration cap.
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    /// Trace format.
    #[arg(long, value_enum, default_value_t = FormatChoice::Auto)]
    pub format: FormatChoice,
    /// Report JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of the raw feature matrix.
    #[arg(long)]
    pub features_csv: Option<PathBuf>,
    /// CSV of the PCA scores.
    #[arg(long)]
    pub scores_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterOutput {
    pub k: usize,
    pub seed: u64,
    /// `pca_scores` or `standardized_features`.
    pub space: String,
    pub result: ClusterResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeOutput {
    pub traces: Vec<String>,
    pub feature_names: Vec<String>,
    pub features: Vec<FeatureVector>,
    pub pca: Option<PcaResult>,
    pub clusters: Option<ClusterOutput>,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(AnalyzeOutput, String)> {
    let paths = crate::io::list_traces(&args.dir)?;
    if paths.is_empty() {
        return Err(Error::invalid(
            "analyze",
            format!("no traces in {}", args.dir.display()),
        ));
    }
    // Results are collected in path order, so output order never depends on
    // which trace finishes first.
    let features = paths
        .par_iter()
        .map(|p| {
            let trace = read_trace(p, args.format)?;
            Ok(feature_vector(&trace, &trace.source, args.season, args.max_period)?)
        })
        .collect::<Result<Vec<FeatureVector>>>()?;
    let rows: Vec<Vec<f64>> = features.iter().map(|f| f.values.to_vec()).collect();

    let pca_result = match args.components {
        Some(keep) => Some(pca(&rows, &FEATURE_NAMES, keep)?),
        None => None,
    };
    let clusters = match args.clusters {
        Some(k) => {
            let seed = args
                .seed
                .ok_or_else(|| Error::Usage("--clusters needs --seed".into()))?;
            let (space, points) = match &pca_result {
                Some(p) => ("pca_scores", p.scores.clone()),
                None => ("standardized_features", standardize(&rows, &FEATURE_NAMES)?),
            };
            Some(ClusterOutput {
                k,
                seed,
                space: space.to_string(),
                result: kmeans(&points, k, seed, args.max_iters)?,
            })
        }
        None => None,
    };

    let out = AnalyzeOutput {
        traces: features.iter().map(|f| f.name.clone()).collect(),
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        features,
        pca: pca_result,
        clusters,
    };
    if let Some(path) = &args.features_csv {
        write_text(path, &table::features_csv(&out))?;
    }
    if let Some(path) = &args.scores_csv {
        let pca = out
            .pca
            .as_ref()
            .ok_or_else(|| Error::Usage("--scores-csv needs --components".into()))?;
        write_text(path, &table::scores_csv(&out.traces, pca))?;
    }
    if let Some(path) = &args.out {
        write_artifact(path, &Meta::new("analyze", args), &out)?;
    }
    let table = table::analyze(&out);
    Ok((out, table))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// Reference trace.
    #[arg(long)]
    pub real: PathBuf,
    /// Trace to compare against the reference.
    #[arg(long)]
    pub synthetic: PathBuf,
    /// Seasonality; ACFs are compared over lags 1..=3s.
    #[arg(long)]
    pub season: usize,
    /// Trace format (both inputs).
    #[arg(long, value_enum, default_value_t = FormatChoice::Auto)]
    pub format: FormatChoice,
    /// Comparison JSON to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareOutput {
    pub real: String,
    pub synthetic: String,
    #[serde(flatten)]
    pub report: ComparisonReport,
}

pub fn compare_cmd(args: &CompareArgs) -> Result<(CompareOutput, String)> {
    let real = read_trace(&args.real, args.format)?;
    let synthetic = read_trace(&args.synthetic, args.format)?;
    let report = compare(&real, &synthetic, args.season)?;
    let out = CompareOutput {
        real: real.source.clone(),
        synthetic: synthetic.source.clone(),
        report,
    };
    if let Some(path) = &args.out {
        write_artifact(path, &Meta::new("compare", args), &out)?;
    }
    let table = table::compare(&out);
    Ok((out, table))
}
