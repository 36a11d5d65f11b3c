//! Statistical validation and corpus analysis.

mod cluster;
mod features;
mod pca;

pub use cluster::{kmeans, ClusterResult};
pub use features::{feature_vector, standardize, FeatureVector, FEATURE_NAMES};
pub use pca::{pca, PcaResult};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::trace::{FrameTrace, Moments};

/// Autocorrelations at lags `0..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AcfSeries {
    pub values: Vec<f64>,
}

impl AcfSeries {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, lag: usize) -> f64 {
        self.values[lag]
    }
}

/// Sample autocorrelation with the biased `1/n` autocovariance estimator.
pub fn acf(series: &[f64], max_lag: usize) -> Result<AcfSeries> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::TooShort {
            context: "stats",
            needed: max_lag + 1,
            got: n,
        });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0: f64 = centered.iter().map(|d| d * d).sum();
    if c0.is_nan() || c0 <= 0.0 {
        return Err(Error::ZeroVariance { context: "stats" });
    }
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(1.0);
    for lag in 1..=max_lag {
        let ck: f64 = centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum();
        values.push(ck / c0);
    }
    Ok(AcfSeries { values })
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Jump points and CDF value after each jump.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = (i + 1) as f64 / n,
                _ => out.push((v, (i + 1) as f64 / n)),
            }
        }
        out
    }
}

pub fn ecdf(series: &[f64]) -> Result<Ecdf> {
    Ecdf::new(series)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &Ecdf, b: &Ecdf) -> f64 {
    let (xs, ys) = (&a.sorted, &b.sorted);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentDelta {
    pub real: f64,
    pub synthetic: f64,
    /// `(synthetic - real) / |real|`, or the absolute difference when `real` is 0.
    pub relative: f64,
}

impl MomentDelta {
    fn new(real: f64, synthetic: f64) -> Self {
        let diff = synthetic - real;
        let relative = if real != 0.0 { diff / real.abs() } else { diff };
        Self {
            real,
            synthetic,
            relative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub s: usize,
    /// Mean absolute ACF difference over lags `1..=3s`.
    pub acf_distance: f64,
    /// Kolmogorov-Smirnov statistic of the frame-size distributions.
    pub cdf_distance: f64,
    pub mean: MomentDelta,
    pub std_dev: MomentDelta,
    pub real_acf: AcfSeries,
    pub synthetic_acf: AcfSeries,
}

/// ACF, CDF and moment comparison of a real trace against a synthetic one.
pub fn compare(real: &FrameTrace, synthetic: &FrameTrace, s: usize) -> Result<ComparisonReport> {
    let (x, y) = (real.sizes(), synthetic.sizes());
    let lags = 3 * s;
    let real_acf = acf(&x, lags)?;
    let synthetic_acf = acf(&y, lags)?;
    let acf_distance = (1..=lags)
        .map(|k| (real_acf.values[k] - synthetic_acf.values[k]).abs())
        .sum::<f64>()
        / lags.max(1) as f64;
    let cdf_distance = ks_statistic(&Ecdf::new(&x)?, &Ecdf::new(&y)?);
    let (mx, my) = (Moments::of(&x)?, Moments::of(&y)?);
    Ok(ComparisonReport {
        s,
        acf_distance,
        cdf_distance,
        mean: MomentDelta::new(mx.mean, my.mean),
        std_dev: MomentDelta::new(mx.std_dev, my.std_dev),
        real_acf,
        synthetic_acf,
    })
}
