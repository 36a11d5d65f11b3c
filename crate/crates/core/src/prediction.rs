//! Point forecasts from the SAM recursion and a rolling-origin comparison
//! against an AR baseline.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::estimation::{fit_ar_series, fit_series, ArModel, FitOptions, FittedModel};
use crate::sam::{next_value, residuals_unchecked, warm_up, DifferencingMode, SamParams};
use crate::trace::FrameTrace;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Forecast {
    /// Index of the last observed frame.
    pub origin: usize,
    pub horizon: usize,
    /// Unclamped point forecasts for origin+1 ..= origin+horizon.
    pub point_values: Vec<f64>,
}

/// Iterates the recursion `horizon` times past the end of `values`, with
/// future innovations set to zero. `eps` must align with `values`.
fn extend(values: &[f64], eps: &[f64], p: &SamParams, mode: DifferencingMode, horizon: usize) -> Vec<f64> {
    let lag = mode.value_lag(p.s);
    let elag = mode.innovation_lag(p.s);
    let mut xs: Vec<f64> = values[values.len() - lag..].to_vec();
    let mut es: Vec<f64> = eps[eps.len() - elag..].to_vec();
    xs.reserve(horizon);
    es.reserve(horizon);
    for _ in 0..horizon {
        let x = next_value(&xs, &es, 0.0, p, mode);
        xs.push(x);
        es.push(0.0);
    }
    xs.split_off(lag)
}

/// Forecast from a raw series; residuals over the history supply past
/// innovations.
pub fn forecast_series(series: &[f64], params: &SamParams, mode: DifferencingMode, horizon: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if horizon == 0 {
        return Err(invalid("prediction", "horizon must be >= 1"));
    }
    let needed = warm_up(params.s).max(mode.value_lag(params.s));
    if series.len() < needed {
        return Err(Error::TooShort {
            context: "prediction",
            needed,
            got: series.len(),
        });
    }
    let eps = residuals_unchecked(series, params, mode);
    Ok(extend(series, &eps, params, mode, horizon))
}

pub fn forecast(model: &FittedModel, history: &FrameTrace, horizon: usize) -> Result<Forecast> {
    let point_values = forecast_series(&history.sizes(), &model.params, model.mode, horizon)?;
    Ok(Forecast {
        origin: history.len() - 1,
        horizon,
        point_values,
    })
}

/// Error summary over a set of (actual, predicted) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorMetrics {
    pub count: usize,
    pub mae: f64,
    pub rmse: f64,
    /// Mean of `|error| / |actual|` over pairs with a non-zero actual.
    pub mean_relative_error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    count: usize,
    abs: f64,
    sq: f64,
    rel: f64,
    rel_count: usize,
}

impl Accumulator {
    fn push(&mut self, actual: f64, predicted: f64) {
        let e = actual - predicted;
        self.count += 1;
        self.abs += e.abs();
        self.sq += e * e;
        if actual != 0.0 {
            self.rel += e.abs() / actual.abs();
            self.rel_count += 1;
        }
    }

    fn finish(&self) -> ErrorMetrics {
        let n = self.count.max(1) as f64;
        ErrorMetrics {
            count: self.count,
            mae: self.abs / n,
            rmse: libm::sqrt(self.sq / n),
            mean_relative_error: if self.rel_count > 0 {
                self.rel / self.rel_count as f64
            } else {
                0.0
            },
        }
    }
}

impl ErrorMetrics {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut acc = Accumulator::default();
        for (a, p) in pairs {
            acc.push(a, p);
        }
        acc.finish()
    }
}

/// Errors of one predictor over all origins.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelScore {
    pub name: String,
    /// Pooled over steps 1..=horizon.
    pub overall: ErrorMetrics,
    /// Indexed by step - 1.
    pub per_step: Vec<ErrorMetrics>,
}

impl ModelScore {
    pub fn at_horizon(&self) -> &ErrorMetrics {
        self.per_step.last().expect("horizon >= 1")
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredictionReport {
    pub horizon: usize,
    pub train_len: usize,
    pub origins: usize,
    pub sam: ModelScore,
    pub baseline: ModelScore,
    /// `1 - rmse_sam / rmse_baseline`, pooled over steps.
    pub improvement: f64,
    /// Same ratio using only the `horizon`-step errors.
    pub improvement_at_horizon: f64,
    pub sam_model: FittedModel,
    pub baseline_model: ArModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationOptions {
    pub mode: DifferencingMode,
    pub ar_order: usize,
    /// Refit both models on all data up to the origin every this many origins.
    pub refit_every: Option<usize>,
    pub fit: FitOptions,
}

impl Default for EvaluationOptions {
    fn default() -> Self {
        Self {
            mode: DifferencingMode::Eq3Literal,
            ar_order: 1,
            refit_every: None,
            fit: FitOptions::standard(),
        }
    }
}

fn ratio(model: f64, baseline: f64) -> f64 {
    if baseline > 0.0 {
        1.0 - model / baseline
    } else if model > 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    }
}

struct Scorer {
    overall: Accumulator,
    per_step: Vec<Accumulator>,
}

impl Scorer {
    fn new(horizon: usize) -> Self {
        Self {
            overall: Accumulator::default(),
            per_step: vec![Accumulator::default(); horizon],
        }
    }

    fn record(&mut self, actual: &[f64], predicted: &[f64]) {
        for (k, (a, p)) in actual.iter().zip(predicted).enumerate() {
            self.overall.push(*a, *p);
            self.per_step[k].push(*a, *p);
        }
    }

    fn finish(self, name: &str) -> ModelScore {
        ModelScore {
            name: String::from(name),
            overall: self.overall.finish(),
            per_step: self.per_step.iter().map(Accumulator::finish).collect(),
        }
    }
}

/// Scores fixed SAM parameters on every origin in `origins` (ascending).
pub fn score_sam(
    series: &[f64],
    params: &SamParams,
    mode: DifferencingMode,
    origins: core::ops::RangeInclusive<usize>,
    horizon: usize,
) -> Result<ModelScore> {
    params.validate()?;
    let (first, last) = (*origins.start(), *origins.end());
    if horizon == 0 || last + horizon >= series.len() || first + 1 < warm_up(params.s) {
        return Err(invalid("prediction", "origins out of range for the series"));
    }
    // Residuals are causal, so one pass over the whole series serves every origin.
    let eps = residuals_unchecked(series, params, mode);
    let mut scorer = Scorer::new(horizon);
    for o in origins {
        let f = extend(&series[..=o], &eps[..=o], params, mode, horizon);
        scorer.record(&series[o + 1..=o + horizon], &f);
    }
    Ok(scorer.finish("SAM"))
}

/// Fits SAM and AR on the leading `split` fraction and forecasts 1..=horizon
/// steps from every later origin.
pub fn evaluate_predictors(
    trace: &FrameTrace,
    s: usize,
    horizon: usize,
    split: f64,
    options: &EvaluationOptions,
) -> Result<PredictionReport> {
    if !(split > 0.0 && split < 1.0) {
        return Err(invalid("prediction", "split must be in (0, 1)"));
    }
    if horizon == 0 {
        return Err(invalid("prediction", "horizon must be >= 1"));
    }
    let series = trace.sizes();
    let n = series.len();
    let train_len = (n as f64 * split) as usize;
    let held_out = n - train_len;
    if held_out < 50 || held_out <= horizon {
        return Err(Error::TooShort {
            context: "prediction",
            needed: 50.max(horizon + 1),
            got: held_out,
        });
    }
    let first = train_len - 1;
    let last = n - 1 - horizon;

    let mut sam_model = fit_series(&series[..train_len], s, options.mode, &options.fit, &trace.source)?;
    let mut ar = fit_ar_series(&series[..train_len], options.ar_order)?;
    let (report_sam, report_ar) = (sam_model.clone(), ar.clone());
    let mut eps = residuals_unchecked(&series, &sam_model.params, options.mode);

    let mut sam_scorer = Scorer::new(horizon);
    let mut ar_scorer = Scorer::new(horizon);
    for (i, o) in (first..=last).enumerate() {
        if let Some(k) = options.refit_every {
            if k > 0 && i > 0 && i % k == 0 {
                sam_model = fit_series(&series[..=o], s, options.mode, &options.fit, &trace.source)?;
                ar = fit_ar_series(&series[..=o], options.ar_order)?;
                eps = residuals_unchecked(&series, &sam_model.params, options.mode);
            }
        }
        let actual = &series[o + 1..=o + horizon];
        let f = extend(&series[..=o], &eps[..=o], &sam_model.params, options.mode, horizon);
        sam_scorer.record(actual, &f);
        ar_scorer.record(actual, &ar.forecast(&series[..=o], horizon));
    }

    let sam = sam_scorer.finish("SAM");
    let baseline = ar_scorer.finish(&alloc::format!("AR({})", options.ar_order));
    Ok(PredictionReport {
        horizon,
        train_len,
        origins: last - first + 1,
        improvement: ratio(sam.overall.rmse, baseline.overall.rmse),
        improvement_at_horizon: ratio(sam.at_horizon().rmse, baseline.at_horizon().rmse),
        sam,
        baseline,
        sam_model: report_sam,
        baseline_model: report_ar,
    })
}
