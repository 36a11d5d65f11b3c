//! Synthetic frame-size traces driven by the SAM recursion.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::sam::{next_value, DifferencingMode, SamParams};
use crate::trace::{Frame, FrameTrace, DEFAULT_FRAME_RATE};

/// Identifier of the innovation stream, recorded next to generated traces.
/// `seed_from_u64` seeding, standard normals by ziggurat, scaled by sigma.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9/seed_from_u64+standard_normal/rand_distr-0.5";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationConfig {
    /// Frames to emit.
    pub length: usize,
    pub seed: u64,
    /// Steps discarded before emission; `None` means `10 * s`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub burn_in: Option<usize>,
    /// Level of the recursion's initial history, in bytes.
    #[cfg_attr(feature = "serde", serde(default))]
    pub init_level: f64,
    /// Smallest emitted size. Applied to output only.
    #[cfg_attr(feature = "serde", serde(default))]
    pub clamp_floor: u64,
    /// Explicit initial history (e.g. the head of a reference trace). Only the
    /// last `value_lag` entries are used. Overrides `init_level`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub initial_history: Option<Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(default = "default_frame_rate"))]
    pub frame_rate: f64,
}

#[cfg(feature = "serde")]
fn default_frame_rate() -> f64 {
    DEFAULT_FRAME_RATE
}

impl GenerationConfig {
    pub fn new(length: usize, seed: u64) -> Self {
        Self {
            length,
            seed,
            burn_in: None,
            init_level: 0.0,
            clamp_floor: 0,
            initial_history: None,
            frame_rate: DEFAULT_FRAME_RATE,
        }
    }

    pub fn burn_in_for(&self, s: usize) -> usize {
        self.burn_in.unwrap_or(10 * s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(invalid("generation", "length must be >= 1"));
        }
        if !self.init_level.is_finite() {
            return Err(invalid("generation", "init_level must be finite"));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return Err(invalid("generation", "frame rate must be positive"));
        }
        Ok(())
    }
}

/// Real-valued recursion output with the innovations that produced it,
/// index-aligned. The leading `value_lag` entries are the initial history and
/// carry zero innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPath {
    pub values: Vec<f64>,
    pub innovations: Vec<f64>,
}

/// Runs the recursion from `initial` (last `value_lag` entries used) with the
/// given innovations, one new value per innovation.
pub fn simulate_path(
    params: &SamParams,
    mode: DifferencingMode,
    initial: &[f64],
    innovations: &[f64],
) -> SyntheticPath {
    let lag = mode.value_lag(params.s);
    assert!(initial.len() >= lag, "initial history shorter than {lag}");
    let mut values = Vec::with_capacity(lag + innovations.len());
    values.extend_from_slice(&initial[initial.len() - lag..]);
    let mut eps = vec![0.0; lag];
    eps.reserve(innovations.len());
    for &e in innovations {
        let x = next_value(&values, &eps, e, params, mode);
        values.push(x);
        eps.push(e);
    }
    SyntheticPath {
        values,
        innovations: eps,
    }
}

fn initial_history(params: &SamParams, mode: DifferencingMode, config: &GenerationConfig) -> Result<Vec<f64>> {
    let lag = mode.value_lag(params.s);
    match &config.initial_history {
        Some(h) if h.len() < lag => Err(invalid(
            "generation",
            format!("initial history needs {lag} values, got {}", h.len()),
        )),
        Some(h) => Ok(h[h.len() - lag..].to_vec()),
        None => Ok(vec![config.init_level; lag]),
    }
}

/// Full path including initial history and burn-in.
pub fn generate_path(params: &SamParams, mode: DifferencingMode, config: &GenerationConfig) -> Result<SyntheticPath> {
    params.validate()?;
    config.validate()?;
    let initial = initial_history(params, mode, config)?;
    let steps = config.burn_in_for(params.s) + config.length;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let innovations: Vec<f64> = (0..steps)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            params.sigma * z
        })
        .collect();
    Ok(simulate_path(params, mode, &initial, &innovations))
}

/// Emits `config.length` frames of kind `Unknown`, rounded to whole bytes and
/// clamped below at `clamp_floor`. Identical inputs give identical output.
pub fn generate(params: &SamParams, mode: DifferencingMode, config: &GenerationConfig) -> Result<FrameTrace> {
    let path = generate_path(params, mode, config)?;
    let start = path.values.len() - config.length;
    let floor = config.clamp_floor as f64;
    let frames = path.values[start..]
        .iter()
        .map(|&v| {
            let r = libm::round(v);
            Frame::unknown(if r > floor { r as u64 } else { config.clamp_floor })
        })
        .collect();
    FrameTrace::new(
        frames,
        config.frame_rate,
        format!("sam {} seed={} mode={}", RNG_ALGORITHM, config.seed, mode),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sam::residuals;

    #[test]
    fn zero_noise_random_walk_stays_put() {
        let p = SamParams::zero(12, 0.0);
        let mut cfg = GenerationConfig::new(500, 3);
        cfg.init_level = 500.0;
        let t = generate(&p, DifferencingMode::Eq3Literal, &cfg).unwrap();
        assert_eq!(t.len(), 500);
        assert!(t.frames.iter().all(|f| f.size == 500));
    }

    #[test]
    fn same_config_same_trace() {
        let p = SamParams::new(0.5, 0.3, 0.4, 0.6, 12, 300.0).unwrap();
        let mut cfg = GenerationConfig::new(2000, 42);
        cfg.init_level = 8000.0;
        for mode in [DifferencingMode::Eq3Literal, DifferencingMode::StandardSeasonal] {
            assert_eq!(generate(&p, mode, &cfg).unwrap(), generate(&p, mode, &cfg).unwrap());
        }
        let mut other = cfg.clone();
        other.seed = 43;
        assert_ne!(
            generate(&p, DifferencingMode::Eq3Literal, &cfg).unwrap(),
            generate(&p, DifferencingMode::Eq3Literal, &other).unwrap()
        );
    }

    #[test]
    fn sigma_zero_is_deterministic_skeleton() {
        let p = SamParams::new(0.5, 0.3, 0.4, 0.6, 4, 0.0).unwrap();
        let mut cfg = GenerationConfig::new(100, 1);
        cfg.initial_history = Some(vec![10.0, 40.0, 20.0, 30.0, 15.0, 35.0]);
        let a = generate_path(&p, DifferencingMode::Eq3Literal, &cfg).unwrap();
        cfg.seed = 999;
        let b = generate_path(&p, DifferencingMode::Eq3Literal, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.innovations.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn clamp_applies_to_output_only() {
        // Downward-trending skeleton: the level goes negative, output stays >= 0.
        let p = SamParams::new(0.9, 0.0, 0.0, 0.0, 2, 0.0).unwrap();
        let mut cfg = GenerationConfig::new(50, 0);
        cfg.burn_in = Some(0);
        cfg.initial_history = Some(vec![40.0, 30.0, 20.0, 10.0]);
        let path = generate_path(&p, DifferencingMode::Eq3Literal, &cfg).unwrap();
        let trace = generate(&p, DifferencingMode::Eq3Literal, &cfg).unwrap();
        assert!(path.values.iter().any(|&v| v < -50.0));
        let tail = &path.values[path.values.len() - 50..];
        for (f, &v) in trace.frames.iter().zip(tail) {
            assert_eq!(f.size, if v > 0.0 { libm::round(v) as u64 } else { 0 });
        }
        // The recursion kept running on unclamped values.
        assert!(tail.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn generated_path_round_trips_through_residuals() {
        let p = SamParams::new(-0.4, 0.7, 0.5, -0.3, 5, 10.0).unwrap();
        let mut cfg = GenerationConfig::new(400, 5);
        cfg.burn_in = Some(0);
        cfg.init_level = 1000.0;
        for mode in [DifferencingMode::Eq3Literal, DifferencingMode::StandardSeasonal] {
            let path = generate_path(&p, mode, &cfg).unwrap();
            let r = residuals(&path.values, &p, mode).unwrap();
            for (a, b) in r.values.iter().zip(&path.innovations) {
                assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn differenced_output_has_no_drift() {
        let p = SamParams::new(0.5, 0.3, 0.4, 0.6, 12, 1.0).unwrap();
        for mode in [DifferencingMode::Eq3Literal, DifferencingMode::StandardSeasonal] {
            let mut cfg = GenerationConfig::new(20_000, 77);
            cfg.init_level = 100.0;
            let path = generate_path(&p, mode, &cfg).unwrap();
            let out = &path.values[path.values.len() - cfg.length..];
            let d = mode.difference_lag(12);
            let diffs: Vec<f64> = (d..out.len()).map(|t| out[t] - out[t - d]).collect();
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            assert!(
                mean.abs() < 5.0 * p.sigma / libm::sqrt(cfg.length as f64),
                "{mode}: {mean}"
            );
        }
    }

    #[test]
    fn rejects_bad_config() {
        let p = SamParams::zero(4, 1.0);
        assert!(generate(&p, DifferencingMode::Eq3Literal, &GenerationConfig::new(0, 1)).is_err());
        let mut cfg = GenerationConfig::new(10, 1);
        cfg.initial_history = Some(vec![1.0; 3]);
        assert!(generate(&p, DifferencingMode::Eq3Literal, &cfg).is_err());
    }
}
