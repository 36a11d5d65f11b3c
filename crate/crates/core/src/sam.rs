//! The SAM model: a (1,0,1)x(1,1,1)^s seasonal ARIMA with four coefficients,
//! evaluated through its difference-form recursion.
//!
//! Two differencing conventions are supported. [`DifferencingMode::Eq3Literal`]
//! expands `(1 - phi B)(1 - Phi_s B^s)(1 - B) X_t = (1 - theta B)(1 - Theta_s B^s) e_t`,
//! which references value lags 1, 2, s, s+1, s+2. [`DifferencingMode::StandardSeasonal`]
//! replaces `(1 - B)` by the seasonal difference `(1 - B^s)` and reaches back to lag 2s+1.
//! Both share the same moving-average side (innovation lags 1, s, s+1).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DifferencingMode {
    /// Non-seasonal first difference, term-for-term the published difference form.
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "EQ3_LITERAL"))]
    Eq3Literal,
    /// Seasonal difference `(1 - B^s)`, as the order notation conventionally reads.
    #[cfg_attr(feature = "serde", serde(rename = "STANDARD_SEASONAL"))]
    StandardSeasonal,
}

impl DifferencingMode {
    /// Deepest value lag the recursion touches.
    pub fn value_lag(self, s: usize) -> usize {
        match self {
            DifferencingMode::Eq3Literal => s + 2,
            DifferencingMode::StandardSeasonal => 2 * s + 1,
        }
    }

    /// Deepest innovation lag the recursion touches.
    pub fn innovation_lag(self, s: usize) -> usize {
        s + 1
    }

    /// Differencing lag: 1 or s.
    pub fn difference_lag(self, s: usize) -> usize {
        match self {
            DifferencingMode::Eq3Literal => 1,
            DifferencingMode::StandardSeasonal => s,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DifferencingMode::Eq3Literal => "EQ3_LITERAL",
            DifferencingMode::StandardSeasonal => "STANDARD_SEASONAL",
        }
    }
}

impl fmt::Display for DifferencingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Seasonal ARIMA order `(p,d,q) x (P,D,Q)^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelOrder {
    pub p: u8,
    pub d: u8,
    pub q: u8,
    pub seasonal_p: u8,
    pub seasonal_d: u8,
    pub seasonal_q: u8,
    pub s: usize,
}

impl ModelOrder {
    /// The fixed SAM order (1,0,1)x(1,1,1)^s.
    pub fn sam(s: usize) -> Self {
        Self {
            p: 1,
            d: 0,
            q: 1,
            seasonal_p: 1,
            seasonal_d: 1,
            seasonal_q: 1,
            s,
        }
    }

    pub fn is_sam(&self) -> bool {
        *self == Self::sam(self.s)
    }
}

impl fmt::Display for ModelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})x({},{},{})^{}",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.s
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamParams {
    /// Non-seasonal AR coefficient.
    pub phi: f64,
    /// Non-seasonal MA coefficient.
    pub theta: f64,
    /// Seasonal AR coefficient.
    #[cfg_attr(feature = "serde", serde(rename = "Phi_s"))]
    pub seasonal_phi: f64,
    /// Seasonal MA coefficient.
    #[cfg_attr(feature = "serde", serde(rename = "Theta_s"))]
    pub seasonal_theta: f64,
    /// Seasonality, normally the GoP length.
    pub s: usize,
    /// Innovation standard deviation in bytes.
    pub sigma: f64,
}

impl SamParams {
    pub fn new(phi: f64, theta: f64, seasonal_phi: f64, seasonal_theta: f64, s: usize, sigma: f64) -> Result<Self> {
        let p = Self {
            phi,
            theta,
            seasonal_phi,
            seasonal_theta,
            s,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    /// All four coefficients zero: a random walk under `Eq3Literal`.
    pub fn zero(s: usize, sigma: f64) -> Self {
        Self {
            phi: 0.0,
            theta: 0.0,
            seasonal_phi: 0.0,
            seasonal_theta: 0.0,
            s,
            sigma,
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.phi, self.theta, self.seasonal_phi, self.seasonal_theta]
    }

    pub fn with_coefficients(&self, c: [f64; 4]) -> Self {
        Self {
            phi: c[0],
            theta: c[1],
            seasonal_phi: c[2],
            seasonal_theta: c[3],
            ..*self
        }
    }

    pub fn order(&self) -> ModelOrder {
        ModelOrder::sam(self.s)
    }

    pub fn validate(&self) -> Result<()> {
        let names = ["phi", "theta", "Phi_s", "Theta_s"];
        for (name, c) in names.iter().zip(self.coefficients()) {
            if !(c.is_finite() && c.abs() < 1.0) {
                return Err(invalid("sam", format!("|{name}| must be < 1, got {c}")));
            }
        }
        if self.s < 2 {
            return Err(invalid("sam", format!("seasonality must be >= 2, got {}", self.s)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid("sam", format!("sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Innovations aligned index-for-index with the series they explain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InnovationSeries {
    pub values: Vec<f64>,
}

impl InnovationSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Innovations entering the objective (index >= 2s+2).
    pub fn post_warm_up(&self, s: usize) -> &[f64] {
        &self.values[warm_up(s).min(self.values.len())..]
    }
}

/// Leading positions excluded from the objective, shared by both modes.
pub fn warm_up(s: usize) -> usize {
    2 * s + 2
}

/// Every right-hand term of the recursion except `e_t`. `x(k)` is the value at
/// lag k, `e(k)` the innovation at lag k.
#[inline(always)]
fn conditional_mean(p: &SamParams, mode: DifferencingMode, x: impl Fn(usize) -> f64, e: impl Fn(usize) -> f64) -> f64 {
    let (phi, theta, sphi, stheta, s) = (p.phi, p.theta, p.seasonal_phi, p.seasonal_theta, p.s);
    let ma = -theta * e(1) - stheta * e(s) + theta * stheta * e(s + 1);
    match mode {
        DifferencingMode::Eq3Literal => {
            x(1) + phi * x(1) - phi * x(2) + sphi * x(s) - phi * sphi * x(s + 1) - sphi * x(s + 1)
                + phi * sphi * x(s + 2)
                + ma
        }
        DifferencingMode::StandardSeasonal => {
            phi * x(1) + x(s) + sphi * x(s) - phi * x(s + 1) - phi * sphi * x(s + 1) - sphi * x(2 * s)
                + phi * sphi * x(2 * s + 1)
                + ma
        }
    }
}

/// Next value of the recursion given trailing history (most recent last).
/// Longer slices are accepted; only the tail is read.
pub fn one_step(
    history: &[f64],
    past_innovations: &[f64],
    eps_t: f64,
    params: &SamParams,
    mode: DifferencingMode,
) -> Result<f64> {
    params.validate()?;
    let needed = mode.value_lag(params.s);
    let needed_eps = mode.innovation_lag(params.s);
    if history.len() < needed || past_innovations.len() < needed_eps {
        return Err(Error::InsufficientHistory { needed, needed_eps });
    }
    Ok(next_value(history, past_innovations, eps_t, params, mode))
}

/// Unchecked `one_step`; `values` and `eps` are full histories ending at t-1.
#[inline]
pub(crate) fn next_value(values: &[f64], eps: &[f64], eps_t: f64, p: &SamParams, mode: DifferencingMode) -> f64 {
    let (nv, ne) = (values.len(), eps.len());
    conditional_mean(p, mode, |k| values[nv - k], |k| eps[ne - k]) + eps_t
}

fn check_series(series: &[f64], params: &SamParams) -> Result<()> {
    params.validate()?;
    let needed = warm_up(params.s) + 1;
    if series.len() < needed {
        return Err(Error::TooShort {
            context: "sam",
            needed,
            got: series.len(),
        });
    }
    Ok(())
}

/// Innovations implied by the series: zero until the recursion has full
/// history, then `e_t = X_t - conditional_mean(t)` using earlier residuals.
pub fn residuals(series: &[f64], params: &SamParams, mode: DifferencingMode) -> Result<InnovationSeries> {
    check_series(series, params)?;
    Ok(InnovationSeries {
        values: residuals_unchecked(series, params, mode),
    })
}

pub(crate) fn residuals_unchecked(series: &[f64], p: &SamParams, mode: DifferencingMode) -> Vec<f64> {
    let start = mode.value_lag(p.s).min(series.len());
    let mut eps = vec![0.0; series.len()];
    for t in start..series.len() {
        let m = conditional_mean(p, mode, |k| series[t - k], |k| eps[t - k]);
        eps[t] = series[t] - m;
    }
    eps
}

pub(crate) fn css_unchecked(series: &[f64], p: &SamParams, mode: DifferencingMode) -> f64 {
    let eps = residuals_unchecked(series, p, mode);
    eps[warm_up(p.s)..].iter().map(|e| e * e).sum()
}

/// Conditional sum of squares over post-warm-up residuals.
pub fn css_objective(series: &[f64], params: &SamParams, mode: DifferencingMode) -> Result<f64> {
    check_series(series, params)?;
    Ok(css_unchecked(series, params, mode))
}

/// Number of residuals that enter the objective.
pub fn effective_len(n: usize, s: usize) -> usize {
    n.saturating_sub(warm_up(s))
}

/// Conditional Gaussian log-likelihood at `params.sigma`.
pub fn gaussian_loglik(series: &[f64], params: &SamParams, mode: DifferencingMode) -> Result<f64> {
    if params.sigma.is_nan() || params.sigma <= 0.0 {
        return Err(invalid("sam", "sigma must be > 0 for the likelihood"));
    }
    let css = css_objective(series, params, mode)?;
    Ok(loglik_from_css(
        css,
        effective_len(series.len(), params.s),
        params.sigma,
    ))
}

pub fn loglik_from_css(css: f64, n: usize, sigma: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * libm::log(2.0 * core::f64::consts::PI * sigma * sigma) - css / (2.0 * sigma * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(phi: f64, theta: f64, sphi: f64, stheta: f64, s: usize) -> SamParams {
        SamParams::new(phi, theta, sphi, stheta, s, 1.0).unwrap()
    }

    #[test]
    fn zero_coefficients_random_walk_step() {
        let p = SamParams::zero(4, 1.0);
        let mut history = vec![0.0; 6];
        history[5] = 7.0;
        let eps = vec![0.0; 5];
        assert_eq!(
            one_step(&history, &eps, 0.0, &p, DifferencingMode::Eq3Literal).unwrap(),
            7.0
        );
    }

    #[test]
    fn phi_only_hand_evaluation() {
        let p = params(0.5, 0.0, 0.0, 0.0, 4);
        // ... X_{t-2} = 2, X_{t-1} = 4
        let history = [0.0, 0.0, 0.0, 0.0, 2.0, 4.0];
        let eps = [0.0; 5];
        let x = one_step(&history, &eps, 0.0, &p, DifferencingMode::Eq3Literal).unwrap();
        assert_eq!(x, 4.0 + 0.5 * 4.0 - 0.5 * 2.0);
        assert_eq!(x, 5.0);
    }

    #[test]
    fn hand_evaluation_all_terms() {
        // s = 2: value lags 1..=4, innovation lags 1..=3.
        let (phi, theta, sphi, stheta) = (0.5, 0.25, -0.5, 0.75);
        let p = params(phi, theta, sphi, stheta, 2);
        let x = [11.0, 13.0, 17.0, 19.0]; // X_{t-4}, X_{t-3}, X_{t-2}, X_{t-1}
        let e = [3.0, 5.0, 7.0]; // e_{t-3}, e_{t-2}, e_{t-1}
        let expected = x[3] + phi * x[3] - phi * x[2] + sphi * x[2] - phi * sphi * x[1] - sphi * x[1]
            + phi * sphi * x[0]
            - theta * e[2]
            - stheta * e[1]
            + theta * stheta * e[0]
            + 2.0;
        let got = one_step(&x, &e, 2.0, &p, DifferencingMode::Eq3Literal).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn boundary_coefficient_rejected() {
        let p = SamParams::zero(4, 1.0).with_coefficients([0.0, 0.0, 1.0, 0.0]);
        let err = one_step(&[0.0; 10], &[0.0; 10], 0.0, &p, DifferencingMode::Eq3Literal).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { context: "sam", .. }));
        assert!(SamParams::new(0.0, 0.0, 0.0, 0.0, 1, 1.0).is_err());
        assert!(SamParams::new(0.0, 0.0, 0.0, 0.0, 2, -1.0).is_err());
    }

    #[test]
    fn insufficient_history() {
        let p = SamParams::zero(4, 1.0);
        assert!(matches!(
            one_step(&[1.0; 5], &[0.0; 5], 0.0, &p, DifferencingMode::Eq3Literal),
            Err(Error::InsufficientHistory {
                needed: 6,
                needed_eps: 5
            })
        ));
        assert!(matches!(
            one_step(&[1.0; 8], &[0.0; 5], 0.0, &p, DifferencingMode::StandardSeasonal),
            Err(Error::InsufficientHistory { needed: 9, .. })
        ));
    }

    #[test]
    fn constant_series_has_zero_residuals() {
        let p = SamParams::zero(12, 1.0);
        let r = residuals(&[5.0; 60], &p, DifferencingMode::Eq3Literal).unwrap();
        assert!(r.values.iter().all(|&e| e == 0.0));
        assert_eq!(r.len(), 60);
    }

    #[test]
    fn residuals_too_short() {
        let p = SamParams::zero(12, 1.0);
        assert!(matches!(
            residuals(&[1.0; 26], &p, DifferencingMode::Eq3Literal),
            Err(Error::TooShort { needed: 27, .. })
        ));
    }

    #[test]
    fn strong_ma_residuals_stay_bounded() {
        let p = params(0.2, 0.9, 0.1, 0.9, 12);
        let mut state = 88172645463325252u64;
        let series: Vec<f64> = (0..10_000)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 * 1000.0
            })
            .collect();
        let r = residuals(&series, &p, DifferencingMode::Eq3Literal).unwrap();
        assert!(r.values.iter().all(|e| e.is_finite() && e.abs() < 1e5));
    }

    #[test]
    fn css_zero_for_exact_path_and_monotone() {
        let p = params(0.5, 0.3, 0.4, 0.6, 4);
        let mode = DifferencingMode::Eq3Literal;
        let mut x: Vec<f64> = (0..6).map(|i| (i * i) as f64).collect();
        let mut e = vec![0.0; 6];
        for _ in 0..50 {
            let v = next_value(&x, &e, 0.0, &p, mode);
            x.push(v);
            e.push(0.0);
        }
        assert!(css_objective(&x, &p, mode).unwrap() < 1e-18);
    }

    #[test]
    fn css_dominated_residuals() {
        // Objective is a sum of squares: scaling every residual up cannot lower it.
        let p = SamParams::zero(3, 1.0);
        let series: Vec<f64> = (0..40).map(|i| ((i * 7) % 5) as f64).collect();
        let doubled: Vec<f64> = series.iter().map(|v| 2.0 * v).collect();
        let a = css_objective(&doubled, &p, DifferencingMode::Eq3Literal).unwrap();
        let b = css_objective(&series, &p, DifferencingMode::Eq3Literal).unwrap();
        assert!(a >= b);
        assert!((a - 4.0 * b).abs() < 1e-9);
    }

    #[test]
    fn white_noise_css_matches_differenced_variance() {
        use rand_core::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let sigma = 3.0;
        let series: Vec<f64> = (0..200_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sigma * z
            })
            .collect();
        let p = SamParams::zero(12, 1.0);
        let mode = DifferencingMode::Eq3Literal;
        let css = css_objective(&series, &p, mode).unwrap();
        let n = effective_len(series.len(), 12);
        // Brute-force oracle: sum of squared first differences over the same window.
        let brute: f64 = (warm_up(12)..series.len())
            .map(|t| (series[t] - series[t - 1]).powi(2))
            .sum();
        assert!((css - brute).abs() <= 1e-9 * brute);
        let per = css / n as f64;
        assert!((per - 2.0 * sigma * sigma).abs() < 0.02 * 2.0 * sigma * sigma, "{per}");
    }

    #[test]
    fn loglik_closed_form() {
        let ll = loglik_from_css(0.0, 10, 1.0);
        assert!((ll + 5.0 * libm::log(2.0 * core::f64::consts::PI)).abs() < 1e-12);
        // sigma = sqrt(css / n) is the maximizer; scan a grid around it.
        let (css, n) = (37.5, 25);
        let best = libm::sqrt(css / n as f64);
        let at_best = loglik_from_css(css, n, best);
        for i in 1..200 {
            let sigma = 0.05 * i as f64;
            assert!(loglik_from_css(css, n, sigma) <= at_best + 1e-12);
        }
    }

    #[test]
    fn loglik_rejects_nonpositive_sigma_and_drops_with_scale() {
        let series: Vec<f64> = (0..40).map(|i| ((i * 13) % 7) as f64).collect();
        let p = SamParams::zero(3, 0.0);
        assert!(gaussian_loglik(&series, &p, DifferencingMode::Eq3Literal).is_err());
        let p = SamParams::zero(3, 1.0);
        let doubled: Vec<f64> = series.iter().map(|v| 2.0 * v).collect();
        assert!(
            gaussian_loglik(&doubled, &p, DifferencingMode::Eq3Literal).unwrap()
                < gaussian_loglik(&series, &p, DifferencingMode::Eq3Literal).unwrap()
        );
    }

    fn coef() -> impl Strategy<Value = f64> {
        -0.95f64..0.95
    }

    proptest! {
        #[test]
        fn zero_coefficients_are_pure_differences(
            s in 2usize..8,
            xs in prop::collection::vec(-1e4f64..1e4, 40),
            eps_t in -100f64..100.0,
        ) {
            let p = SamParams::zero(s, 1.0);
            let e = vec![0.0; 40];
            let lit = one_step(&xs, &e, eps_t, &p, DifferencingMode::Eq3Literal).unwrap();
            prop_assert_eq!(lit, xs[39] + eps_t);
            let seas = one_step(&xs, &e, eps_t, &p, DifferencingMode::StandardSeasonal).unwrap();
            prop_assert_eq!(seas, xs[40 - s] + eps_t);
        }

        #[test]
        fn unit_slope_in_innovation(
            c in prop::array::uniform4(-7i32..8),
            xs in prop::collection::vec(-1000i32..1000, 30),
            es in prop::collection::vec(-100i32..100, 30),
            a in -1000i32..1000,
            s in 2usize..6,
        ) {
            // Dyadic coefficients and integer data keep every term exact.
            let p = SamParams::zero(s, 1.0).with_coefficients(c.map(|k| k as f64 / 8.0));
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let es: Vec<f64> = es.into_iter().map(f64::from).collect();
            for mode in [DifferencingMode::Eq3Literal, DifferencingMode::StandardSeasonal] {
                let base = one_step(&xs, &es, 0.0, &p, mode).unwrap();
                let shifted = one_step(&xs, &es, f64::from(a), &p, mode).unwrap();
                prop_assert_eq!(shifted - base, f64::from(a));
            }
        }

        #[test]
        fn css_shift_invariant_eq3(
            c in prop::array::uniform4(coef()),
            shift in -1e4f64..1e4,
            seed in any::<u64>(),
        ) {
            let s = 4;
            let p = SamParams::zero(s, 1.0).with_coefficients(c);
            let mut state = seed | 1;
            let series: Vec<f64> = (0..200).map(|_| {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                (state >> 40) as f64
            }).collect();
            let shifted: Vec<f64> = series.iter().map(|v| v + shift).collect();
            let a = css_objective(&series, &p, DifferencingMode::Eq3Literal).unwrap();
            let b = css_objective(&shifted, &p, DifferencingMode::Eq3Literal).unwrap();
            prop_assert!((a - b).abs() <= 1e-6 * a.max(b).max(1e-300));
        }
    }
}
