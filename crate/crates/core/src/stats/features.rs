use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::trace::{detect_seasonality, summarize, FrameTrace};

use super::acf;

/// Column order of [`FeatureVector::values`].
pub const FEATURE_NAMES: [&str; 10] = [
    "mean",
    "std_dev",
    "min",
    "max",
    "skewness",
    "kurtosis",
    "acf_lag1",
    "acf_half_season",
    "acf_season",
    "detected_seasonality",
];

/// Per-trace summary used for PCA and clustering.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub name: String,
    pub values: [f64; 10],
}

/// Features of one trace. ACF lags are 1, round(s/2) and s; the detected
/// seasonality searches lags up to `max_period`.
pub fn feature_vector(trace: &FrameTrace, name: &str, s: usize, max_period: usize) -> Result<FeatureVector> {
    let stats = summarize(trace)?.overall;
    let half = s.div_ceil(2);
    let a = acf(&trace.sizes(), s)?;
    let detected = detect_seasonality(trace, max_period)?;
    Ok(FeatureVector {
        name: name.to_string(),
        values: [
            stats.mean,
            stats.std_dev,
            stats.min,
            stats.max,
            stats.skewness,
            stats.kurtosis,
            a.at(1),
            a.at(half.max(1)),
            a.at(s),
            detected as f64,
        ],
    })
}

/// Z-scores per column (sample standard deviation). Zero-variance columns are
/// reported by name.
pub fn standardize(rows: &[Vec<f64>], names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = rows.first() else {
        return Err(Error::EmptyTrace);
    };
    let dim = first.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(crate::error::invalid("stats", "rows differ in dimension"));
    }
    if rows.len() < 2 {
        return Err(Error::TooShort {
            context: "stats",
            needed: 2,
            got: rows.len(),
        });
    }
    let n = rows.len() as f64;
    let mut out: Vec<Vec<f64>> = rows.to_vec();
    for j in 0..dim {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / (n - 1.0);
        let sd = libm::sqrt(var);
        if sd.is_nan() || sd <= 1e-12 * mean.abs().max(1.0) {
            let name = names
                .get(j)
                .map(|s| s.to_string())
                .unwrap_or_else(|| alloc::format!("column {j}"));
            return Err(Error::ZeroVarianceFeature { name });
        }
        for r in out.iter_mut() {
            r[j] = (r[j] - mean) / sd;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn features_of_periodic_trace() {
        let pattern = [5000u64, 800, 900, 2000, 850, 950];
        let sizes: Vec<u64> = (0..300).map(|i| pattern[i % 6]).collect();
        let t = FrameTrace::from_sizes(sizes, "").unwrap();
        let f = feature_vector(&t, "p6", 6, 12).unwrap();
        assert_eq!(f.values[9], 6.0);
        assert!(f.values[8] > 0.9);
        assert_eq!(f.values[2], 800.0);
        assert_eq!(f.values[3], 5000.0);
    }

    #[test]
    fn standardize_reports_constant_column() {
        let rows = vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]];
        assert_eq!(
            standardize(&rows, &["a", "b"]),
            Err(Error::ZeroVarianceFeature { name: "b".into() })
        );
        let z = standardize(&[vec![1.0], vec![3.0]], &["a"]).unwrap();
        assert!((z[0][0] + libm::sqrt(0.5)).abs() < 1e-12);
    }
}
