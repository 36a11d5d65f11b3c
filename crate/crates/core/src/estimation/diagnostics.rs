use alloc::vec::Vec;

use crate::error::Result;
use crate::sam::residuals;
use crate::stats::{acf, AcfSeries};
use crate::trace::FrameTrace;

use super::FittedModel;

/// Number of coefficients estimated by SAM, subtracted from Ljung-Box lags.
const ESTIMATED_COEFFICIENTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    /// ACF of post-warm-up residuals at lags `0..=3s`.
    pub residual_acf: AcfSeries,
    pub ljung_box: f64,
    pub ljung_box_lag: usize,
    pub degrees_of_freedom: usize,
    pub residual_mean: f64,
    pub residual_variance: f64,
    pub n: usize,
}

/// Ljung-Box `Q = n (n + 2) sum_k r_k^2 / (n - k)` over lags `1..=lags`.
pub fn ljung_box(acf: &AcfSeries, n: usize, lags: usize) -> f64 {
    let n = n as f64;
    let sum: f64 = (1..=lags).map(|k| acf.values[k] * acf.values[k] / (n - k as f64)).sum();
    n * (n + 2.0) * sum
}

/// Residual whiteness checks for a fitted model on `trace`.
pub fn diagnostics(model: &FittedModel, trace: &FrameTrace) -> Result<Diagnostics> {
    let s = model.params.s;
    let eps = residuals(&trace.sizes(), &model.params, model.mode)?;
    let r: Vec<f64> = eps.post_warm_up(s).to_vec();
    let n = r.len();
    let residual_acf = acf(&r, 3 * s)?;
    let lag = 2 * s;
    let mean = r.iter().sum::<f64>() / n as f64;
    let variance = r.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n as f64 - 1.0);
    Ok(Diagnostics {
        ljung_box: ljung_box(&residual_acf, n, lag),
        residual_acf,
        ljung_box_lag: lag,
        degrees_of_freedom: lag.saturating_sub(ESTIMATED_COEFFICIENTS),
        residual_mean: mean,
        residual_variance: variance,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{fit_series, FitOptions};
    use crate::generation::simulate_path;
    use crate::sam::{DifferencingMode, SamParams};
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn white_noise_ljung_box_below_99th_percentile() {
        let lags = 24;
        let q99 = ChiSquared::new(lags as f64).unwrap().inverse_cdf(0.99);
        let below = (0..100)
            .filter(|&seed| {
                let x = noise(seed, 2000);
                ljung_box(&acf(&x, lags).unwrap(), x.len(), lags) < q99
            })
            .count();
        assert!(below >= 95, "{below}/100");
    }

    #[test]
    fn self_generated_trace_has_white_residuals() {
        let s = 4;
        let p = SamParams::new(0.5, 0.3, 0.4, 0.6, s, 20.0).unwrap();
        let mode = DifferencingMode::Eq3Literal;
        let eps: Vec<f64> = noise(17, 6000).iter().map(|z| 20.0 * z).collect();
        let series = simulate_path(&p, mode, &[5000.0; 6], &eps).values;
        let trace = FrameTrace::from_sizes(series.iter().map(|v| v.round().max(0.0) as u64), "self").unwrap();
        let fit = fit_series(&trace.sizes(), s, mode, &FitOptions::standard(), "self").unwrap();
        let d = diagnostics(&fit, &trace).unwrap();
        assert_eq!(d.residual_acf.values[0], 1.0);
        assert_eq!(d.residual_acf.values.len(), 3 * s + 1);
        assert_eq!(d.degrees_of_freedom, 2 * s - 4);
        let band = 3.0 / libm::sqrt(d.n as f64);
        for k in 1..=3 * s {
            assert!(
                d.residual_acf.values[k].abs() < band,
                "lag {k}: {}",
                d.residual_acf.values[k]
            );
        }
        assert!(d.residual_mean.abs() < 3.0 * libm::sqrt(d.residual_variance / d.n as f64));
    }
}
