//! Scheduler scenario files: a flow set plus simulation settings.
//!
//! ```json
//! {
//!   "name": "example",
//!   "duration": 10000,
//!   "capacity_fraction": 0.7,
//!   "flows": [
//!     { "id": 0, "deadline_offset": 10, "source": { "trace": { "path": "a.csv" } } },
//!     { "id": 1, "deadline_offset": 400, "quantum": 1500,
//!       "source": { "synthetic": { "params": { "phi": 0.5, "theta": 0.3, "Phi_s": 0.0,
//!         "Theta_s": 0.9, "s": 12, "sigma": 400.0 }, "mode": "STANDARD_SEASONAL",
//!         "seed": 7, "anchor_pattern": [20000, 3000, 3000, 8000] } } }
//!   ]
//! }
//! ```
//!
//! Exactly one of `capacity` (bytes per interval) and `capacity_fraction` (of
//! the aggregate mean demand) must be given. A missing `quantum` defaults to
//! the flow's mean demand per interval, rounded up.

use std::path::{Path, PathBuf};

use samtrace_core::sched::{arrival_interval, frames_needed};
use samtrace_core::trace::DEFAULT_FRAME_RATE;
use samtrace_core::{
    generate, DifferencingMode, Flow, FrameTrace, GenerationConfig, SamParams, SchedulerKind, SimConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_trace, FormatChoice};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_interval")]
    pub interval: f64,
    pub duration: u64,
    #[serde(default)]
    pub capacity: Option<u64>,
    #[serde(default)]
    pub capacity_fraction: Option<f64>,
    #[serde(default = "all_schedulers")]
    pub schedulers: Vec<SchedulerKind>,
    #[serde(default)]
    pub drop_expired: bool,
    pub flows: Vec<FlowSpec>,
}

fn default_interval() -> f64 {
    0.005
}

fn all_schedulers() -> Vec<SchedulerKind> {
    SchedulerKind::ALL.to_vec()
}

fn default_frame_rate() -> f64 {
    DEFAULT_FRAME_RATE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub id: u32,
    pub deadline_offset: u64,
    #[serde(default)]
    pub quantum: Option<u64>,
    pub source: FlowSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowSource {
    Trace {
        /// Relative paths resolve against the scenario file's directory.
        path: PathBuf,
        #[serde(default)]
        format: FormatChoice,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub params: SamParams,
    #[serde(default)]
    pub mode: DifferencingMode,
    /// Falls back to the command's `--seed` plus the flow id.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub init_level: f64,
    /// Repeated to fill the recursion's initial history.
    #[serde(default)]
    pub anchor_pattern: Option<Vec<f64>>,
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "default_frame_rate")]
    pub frame_rate: f64,
}

impl SyntheticSpec {
    pub fn generation_config(&self, length: usize, seed: u64) -> GenerationConfig {
        let mut cfg = GenerationConfig::new(length, seed);
        cfg.burn_in = self.burn_in;
        cfg.init_level = self.init_level;
        cfg.frame_rate = self.frame_rate;
        cfg.initial_history = self.anchor_pattern.as_ref().filter(|p| !p.is_empty()).map(|p| {
            let need = self.mode.value_lag(self.params.s);
            p.iter().copied().cycle().take(need).collect()
        });
        cfg
    }
}

/// What a flow became after loading, for the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedFlow {
    pub id: u32,
    pub deadline_offset: u64,
    pub quantum: u64,
    pub source: String,
    /// Seed used for a synthetic flow.
    pub seed: Option<u64>,
    pub frames_in_window: usize,
    pub mean_demand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedScenario {
    pub name: String,
    pub interval: f64,
    pub duration: u64,
    pub capacity: u64,
    pub capacity_fraction: Option<f64>,
    /// Aggregate mean bytes arriving per interval.
    pub demand_per_interval: f64,
    pub drop_expired: bool,
    pub schedulers: Vec<SchedulerKind>,
    pub flows: Vec<ResolvedFlow>,
    #[serde(skip)]
    pub flow_set: Vec<Flow>,
}

impl ResolvedScenario {
    pub fn config(&self, scheduler: SchedulerKind) -> SimConfig {
        let mut cfg = SimConfig::new(self.capacity, self.duration, scheduler);
        cfg.interval = self.interval;
        cfg.drop_expired = self.drop_expired;
        cfg
    }

    pub fn run(&self, scheduler: SchedulerKind) -> Result<samtrace_core::SimReport> {
        Ok(samtrace_core::simulate(self.flow_set.clone(), self.config(scheduler))?)
    }
}

pub fn load(path: &Path) -> Result<Scenario> {
    crate::io::read_json(path)
}

/// Bytes per interval arriving in `[0, duration)`.
pub fn mean_demand(trace: &FrameTrace, interval: f64, duration: u64) -> (usize, f64) {
    let mut frames = 0;
    let mut bytes = 0u64;
    for (k, f) in trace.frames.iter().enumerate() {
        if arrival_interval(k, trace.frame_rate, interval) >= duration {
            break;
        }
        frames += 1;
        bytes += f.size;
    }
    (frames, bytes as f64 / duration as f64)
}

impl Scenario {
    /// Loads traces, generates synthetic flows and fixes capacity and quanta.
    pub fn resolve(&self, base_dir: &Path, seed: Option<u64>) -> Result<ResolvedScenario> {
        let bad = |m: String| Error::invalid("scenario", m);
        if self.flows.is_empty() {
            return Err(bad("no flows".into()));
        }
        if self.duration == 0 {
            return Err(bad("duration must be positive".into()));
        }
        if !(self.interval.is_finite() && self.interval > 0.0) {
            return Err(bad("interval must be positive".into()));
        }
        if self.schedulers.is_empty() {
            return Err(bad("no schedulers".into()));
        }
        let mut ids: Vec<u32> = self.flows.iter().map(|f| f.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("duplicate flow id".into()));
        }

        let mut flows = Vec::with_capacity(self.flows.len());
        let mut resolved = Vec::with_capacity(self.flows.len());
        for spec in &self.flows {
            let (trace, source, used_seed) = match &spec.source {
                FlowSource::Trace { path, format } => {
                    let full = base_dir.join(path);
                    let trace = read_trace(&full, *format)?;
                    (trace, path.display().to_string(), None)
                }
                FlowSource::Synthetic(syn) => {
                    let seed = match (syn.seed, seed) {
                        (Some(s), _) => s,
                        (None, Some(base)) => base.wrapping_add(u64::from(spec.id)),
                        (None, None) => {
                            return Err(Error::Usage(format!(
                                "flow {} is synthetic without a seed; pass --seed",
                                spec.id
                            )))
                        }
                    };
                    let length = frames_needed(syn.frame_rate, self.interval, self.duration);
                    let trace = generate(&syn.params, syn.mode, &syn.generation_config(length, seed))?;
                    (trace, format!("synthetic:{}", syn.mode), Some(seed))
                }
            };
            let (frames_in_window, demand) = mean_demand(&trace, self.interval, self.duration);
            let quantum = spec.quantum.unwrap_or(demand.ceil().max(1.0) as u64);
            flows.push(Flow {
                id: spec.id,
                trace,
                deadline_offset: spec.deadline_offset,
                quantum,
            });
            resolved.push(ResolvedFlow {
                id: spec.id,
                deadline_offset: spec.deadline_offset,
                quantum,
                source,
                seed: used_seed,
                frames_in_window,
                mean_demand: demand,
            });
        }

        let demand: f64 = resolved.iter().map(|f| f.mean_demand).sum();
        let capacity = match (self.capacity, self.capacity_fraction) {
            (Some(c), None) => c,
            (None, Some(frac)) if frac.is_finite() && frac > 0.0 => (frac * demand).round() as u64,
            (None, Some(_)) => return Err(bad("capacity_fraction must be positive".into())),
            _ => return Err(bad("give exactly one of capacity and capacity_fraction".into())),
        };
        if capacity == 0 {
            return Err(bad("capacity resolves to zero".into()));
        }

        Ok(ResolvedScenario {
            name: self.name.clone(),
            interval: self.interval,
            duration: self.duration,
            capacity,
            capacity_fraction: self.capacity_fraction,
            demand_per_interval: demand,
            drop_expired: self.drop_expired,
            schedulers: self.schedulers.clone(),
            flows: resolved,
            flow_set: flows,
        })
    }
}
