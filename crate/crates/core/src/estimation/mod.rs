//! Coefficient estimation for SAM by conditional sum of squares, and the
//! Yule-Walker AR baseline.

mod ar;
mod diagnostics;
pub mod simplex;

pub use ar::{fit_ar, fit_ar_series, ArModel, MAX_AR_ORDER};
pub use diagnostics::{diagnostics, ljung_box, Diagnostics};
pub use simplex::SimplexOptions;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::sam::{css_unchecked, effective_len, DifferencingMode, SamParams};
use crate::trace::FrameTrace;

const COEF_LIMIT: f64 = 1.0 - f64::EPSILON;

/// Maps the real line onto (-1, 1). Smooth, odd and monotone.
pub fn squash(u: f64) -> f64 {
    libm::tanh(u).clamp(-COEF_LIMIT, COEF_LIMIT)
}

/// Inverse of [`squash`] on (-1, 1).
pub fn unsquash(c: f64) -> f64 {
    libm::atanh(c)
}

/// Settings for [`fit_sam`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    pub max_evals: usize,
    pub tolerance: f64,
    pub initial_step: f64,
}

impl FitOptions {
    pub fn standard() -> Self {
        let d = SimplexOptions::default();
        Self {
            max_evals: d.max_evals,
            tolerance: d.tolerance,
            initial_step: d.initial_step,
        }
    }

    fn simplex(&self) -> SimplexOptions {
        SimplexOptions {
            max_evals: self.max_evals,
            tolerance: self.tolerance,
            initial_step: self.initial_step,
        }
    }
}

/// SAM parameters together with how they were obtained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittedModel {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub params: SamParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub mode: DifferencingMode,
    /// Final conditional sum of squares.
    #[cfg_attr(feature = "serde", serde(default))]
    pub objective_value: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub n_effective: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub converged: bool,
    #[cfg_attr(feature = "serde", serde(default))]
    pub iterations: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub evaluations: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub source: String,
    /// Mean frame size of the fitted trace, used as a default generation level.
    #[cfg_attr(feature = "serde", serde(default))]
    pub source_mean: f64,
    /// Leading values of the fitted trace, long enough to seed the recursion.
    #[cfg_attr(feature = "serde", serde(default))]
    pub anchor: Vec<f64>,
    /// Best objective after each optimizer iteration.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub objective_history: Vec<f64>,
}

impl FittedModel {
    /// Wraps fixed parameters (no fitting) so they can drive forecasts.
    pub fn from_params(params: SamParams, mode: DifferencingMode) -> Self {
        Self {
            params,
            mode,
            objective_value: 0.0,
            n_effective: 0,
            converged: true,
            iterations: 0,
            evaluations: 0,
            source: String::new(),
            source_mean: 0.0,
            anchor: Vec::new(),
            objective_history: Vec::new(),
        }
    }
}

/// Minimum trace length accepted by [`fit_sam`].
pub fn min_fit_len(s: usize) -> usize {
    4 * s + 8
}

/// Fits the four coefficients by Nelder-Mead on the conditional sum of
/// squares, starting from all-zero coefficients. Coefficients live in
/// unconstrained space and are squashed into (-1, 1); sigma is profiled out as
/// `sqrt(CSS / n_effective)`.
pub fn fit_sam(trace: &FrameTrace, s: usize, mode: DifferencingMode, options: &FitOptions) -> Result<FittedModel> {
    fit_series(&trace.sizes(), s, mode, options, &trace.source)
}

pub fn fit_series(
    series: &[f64],
    s: usize,
    mode: DifferencingMode,
    options: &FitOptions,
    source: &str,
) -> Result<FittedModel> {
    if s < 2 {
        return Err(invalid(
            "estimation",
            alloc::format!("seasonality must be >= 2, got {s}"),
        ));
    }
    let needed = min_fit_len(s);
    if series.len() < needed {
        return Err(Error::TooShort {
            context: "estimation",
            needed,
            got: series.len(),
        });
    }
    let base = SamParams::zero(s, 0.0);
    let to_params = |u: &[f64]| base.with_coefficients([squash(u[0]), squash(u[1]), squash(u[2]), squash(u[3])]);
    let objective = |u: &[f64]| css_unchecked(series, &to_params(u), mode);

    let result =
        simplex::minimize(objective, &[0.0; 4], &options.simplex()).map_err(|bad| Error::NonFiniteObjective {
            params: to_params(&bad.0).coefficients().to_vec(),
        })?;

    let n_effective = effective_len(series.len(), s);
    let mut params = to_params(&result.x);
    params.sigma = libm::sqrt(result.value / n_effective as f64);
    let source_mean = series.iter().sum::<f64>() / series.len() as f64;
    let anchor = series[..mode.value_lag(s)].to_vec();
    Ok(FittedModel {
        params,
        mode,
        objective_value: result.value,
        n_effective,
        converged: result.converged,
        iterations: result.iterations,
        evaluations: result.evaluations,
        source: String::from(source),
        source_mean,
        anchor,
        objective_history: result.best_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::simulate_path;
    use crate::sam::css_objective;
    use alloc::vec;
    use proptest::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn too_short_trace() {
        let t = FrameTrace::from_sizes(1..=10, "").unwrap();
        assert!(matches!(
            fit_sam(&t, 12, DifferencingMode::Eq3Literal, &FitOptions::standard()),
            Err(Error::TooShort {
                needed: 56,
                got: 10,
                ..
            })
        ));
    }

    #[test]
    fn noiseless_path_fits_exactly() {
        let p = SamParams::new(0.5, 0.3, 0.4, 0.6, 12, 0.0).unwrap();
        let mode = DifferencingMode::Eq3Literal;
        let initial: Vec<f64> = (0..14).map(|i| 1000.0 + 300.0 * ((i * 5) % 7) as f64).collect();
        let series = simulate_path(&p, mode, &initial, &vec![0.0; 600]).values;
        let fit = fit_series(&series, 12, mode, &FitOptions::standard(), "skeleton").unwrap();
        assert!(fit.objective_value <= 1e-6, "{}", fit.objective_value);
    }

    #[test]
    fn fit_is_deterministic_and_improves_on_start() {
        let p = SamParams::new(0.3, -0.2, 0.5, 0.4, 6, 2.0).unwrap();
        let mode = DifferencingMode::Eq3Literal;
        let eps: Vec<f64> = gaussian(4, 3000).iter().map(|z| 2.0 * z).collect();
        let series = simulate_path(&p, mode, &[100.0; 8], &eps).values;
        let a = fit_series(&series, 6, mode, &FitOptions::standard(), "x").unwrap();
        let b = fit_series(&series, 6, mode, &FitOptions::standard(), "x").unwrap();
        assert_eq!(a, b);
        let start = css_objective(&series, &SamParams::zero(6, 1.0), mode).unwrap();
        assert!(a.objective_value <= start);
        for w in a.objective_history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(a.n_effective, series.len() - 14);
        assert!((a.params.sigma - libm::sqrt(a.objective_value / a.n_effective as f64)).abs() < 1e-12);
        a.params.validate().unwrap();
    }

    #[test]
    fn mode_discrimination() {
        let p = SamParams::new(0.4, 0.2, 0.5, 0.3, 4, 1.0).unwrap();
        for seed in 0..10 {
            let series = simulate_path(
                &p,
                DifferencingMode::StandardSeasonal,
                &[50.0; 9],
                &gaussian(seed, 2000),
            )
            .values;
            let matched = fit_series(
                &series,
                4,
                DifferencingMode::StandardSeasonal,
                &FitOptions::standard(),
                "",
            )
            .unwrap();
            let literal = fit_series(&series, 4, DifferencingMode::Eq3Literal, &FitOptions::standard(), "").unwrap();
            assert!(literal.objective_value > matched.objective_value, "seed {seed}");
        }
    }

    proptest! {
        #[test]
        fn squash_round_trip(x in -0.999f64..0.999) {
            prop_assert!((squash(unsquash(x)) - x).abs() <= 1e-12);
        }

        #[test]
        fn squash_stays_open(u in -1e6f64..1e6) {
            let c = squash(u);
            prop_assert!(c.abs() < 1.0);
            prop_assert_eq!(squash(-u), -c);
        }
    }
}
