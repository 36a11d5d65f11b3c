use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::trace::FrameTrace;

pub const MAX_AR_ORDER: usize = 24;

/// Autoregressive baseline `X_t = c + sum_i a_i X_{t-i} + e_t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArModel {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub sigma: f64,
    pub mean: f64,
    /// Spectral radius of the companion matrix.
    pub spectral_radius: f64,
    pub stationary: bool,
}

impl ArModel {
    pub fn predict_next(&self, history: &[f64]) -> f64 {
        let n = history.len();
        self.intercept
            + self
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, a)| a * history.get(n.wrapping_sub(i + 1)).copied().unwrap_or(self.mean))
                .sum::<f64>()
    }

    /// Iterated point forecasts from the end of `history`.
    pub fn forecast(&self, history: &[f64], horizon: usize) -> Vec<f64> {
        let keep = history.len().min(self.order);
        let mut buf: Vec<f64> = history[history.len() - keep..].to_vec();
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let next = self.predict_next(&buf);
            buf.push(next);
            out.push(next);
        }
        out
    }
}

/// Yule-Walker fit through the Levinson-Durbin recursion on biased sample
/// autocovariances.
pub fn fit_ar(trace: &FrameTrace, order: usize) -> Result<ArModel> {
    fit_ar_series(&trace.sizes(), order)
}

pub fn fit_ar_series(series: &[f64], order: usize) -> Result<ArModel> {
    if order == 0 || order > MAX_AR_ORDER {
        return Err(invalid(
            "estimation",
            alloc::format!("AR order must be in 1..={MAX_AR_ORDER}, got {order}"),
        ));
    }
    let needed = 10 * order;
    if series.len() < needed {
        return Err(Error::TooShort {
            context: "estimation",
            needed,
            got: series.len(),
        });
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let gamma: Vec<f64> = (0..=order)
        .map(|k| {
            series[..series.len() - k]
                .iter()
                .zip(&series[k..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n
        })
        .collect();
    if gamma[0].is_nan() || gamma[0] <= 0.0 {
        return Err(Error::ZeroVariance { context: "estimation" });
    }

    let (a, err) = levinson_durbin(&gamma, order)?;

    let spectral_radius = companion_spectral_radius(&a);
    Ok(ArModel {
        order,
        intercept: mean * (1.0 - a.iter().sum::<f64>()),
        sigma: libm::sqrt(err),
        mean,
        stationary: spectral_radius < 1.0,
        spectral_radius,
        coefficients: a,
    })
}

/// Solves the Yule-Walker system for `gamma[0..=order]`; returns the
/// coefficients and the final prediction-error variance.
fn levinson_durbin(gamma: &[f64], order: usize) -> Result<(Vec<f64>, f64)> {
    let mut a = vec![0.0; order];
    let mut err = gamma[0];
    for k in 0..order {
        let acc: f64 = (0..k).map(|j| a[j] * gamma[k - j]).sum();
        let kappa = (gamma[k + 1] - acc) / err;
        let prev = a.clone();
        a[k] = kappa;
        for j in 0..k {
            a[j] = prev[j] - kappa * prev[k - 1 - j];
        }
        err *= 1.0 - kappa * kappa;
        if err.is_nan() || err <= 1e-10 * gamma[0] {
            return Err(Error::SingularSystem { order: k + 1 });
        }
    }
    Ok((a, err))
}

fn companion_spectral_radius(coefficients: &[f64]) -> f64 {
    let p = coefficients.len();
    let m = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            coefficients[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues()
        .iter()
        .map(|z| libm::hypot(z.re, z.im))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn ar1(coef: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = 0.0;
        (0..n + 500)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                x = coef * x + z;
                x + 100.0
            })
            .skip(500)
            .collect()
    }

    #[test]
    fn recovers_ar1_coefficient() {
        for seed in 0..10 {
            let m = fit_ar_series(&ar1(0.8, 10_000, seed), 1).unwrap();
            assert!(
                (m.coefficients[0] - 0.8).abs() < 0.03,
                "seed {seed}: {}",
                m.coefficients[0]
            );
            assert!(m.stationary);
            assert!((m.spectral_radius - m.coefficients[0].abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn white_noise_near_zero() {
        for seed in 0..10 {
            let m = fit_ar_series(&ar1(0.0, 10_000, seed), 1).unwrap();
            assert!(m.coefficients[0].abs() < 0.03);
            assert!((m.mean - 100.0).abs() < 0.1);
        }
    }

    #[test]
    fn levinson_matches_direct_solve() {
        let x = ar1(0.5, 2000, 3);
        let m = fit_ar_series(&x, 3).unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let g = |k: usize| {
            x[..x.len() - k]
                .iter()
                .zip(&x[k..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n
        };
        let toeplitz = DMatrix::from_fn(3, 3, |i, j| g(i.abs_diff(j)));
        let rhs = nalgebra::DVector::from_fn(3, |i, _| g(i + 1));
        let direct = toeplitz.lu().solve(&rhs).unwrap();
        for i in 0..3 {
            assert!((direct[i] - m.coefficients[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            fit_ar_series(&[4.0; 50], 1),
            Err(Error::ZeroVariance { context: "estimation" })
        );
        assert!(matches!(
            fit_ar_series(&[1.0, 2.0, 3.0], 1),
            Err(Error::TooShort { .. })
        ));
        assert!(fit_ar_series(&ar1(0.5, 1000, 1), 25).is_err());
        assert_eq!(
            levinson_durbin(&[2.0, 2.0, 2.0], 2),
            Err(Error::SingularSystem { order: 1 })
        );
    }

    #[test]
    fn forecast_decays_to_mean() {
        let m = fit_ar_series(&ar1(0.8, 5000, 9), 1).unwrap();
        let f = m.forecast(&[150.0], 200);
        assert!((f[199] - m.mean).abs() < 1e-6);
        assert!((f[0] - (m.intercept + m.coefficients[0] * 150.0)).abs() < 1e-12);
    }
}
