//! Slotted downlink simulator comparing EDF, DRR and the deadline-ordered
//! DRR hybrid on video flows.
//!
//! Time advances in fixed scheduling intervals. Each interval the frames whose
//! display time falls inside it join their flow's queue, then the configured
//! policy hands out up to `capacity` bytes. Frames may be served across several
//! intervals. A frame is on time when its last byte goes out no later than
//! `arrival + deadline_offset`; late frames are still delivered (unless
//! `drop_expired` is set) and counted as misses.

mod policy;

pub use policy::{
    schedule_drr, schedule_edf, schedule_edf_drr, Allocation, DrrState, EdfDrrState, FlowQueue, QueuedFrame,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::trace::FrameTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SchedulerKind {
    #[cfg_attr(feature = "serde", serde(rename = "EDF"))]
    Edf,
    #[cfg_attr(feature = "serde", serde(rename = "DRR"))]
    Drr,
    #[cfg_attr(feature = "serde", serde(rename = "EDF_DRR"))]
    EdfDrr,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 3] = [SchedulerKind::Edf, SchedulerKind::Drr, SchedulerKind::EdfDrr];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Edf => "EDF",
            SchedulerKind::Drr => "DRR",
            SchedulerKind::EdfDrr => "EDF_DRR",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A video stream: one frame per frame period, each due `deadline_offset`
/// intervals after arrival.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Flow {
    pub id: u32,
    pub trace: FrameTrace,
    pub deadline_offset: u64,
    /// Bytes credited per DRR visit.
    pub quantum: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Bytes servable per interval.
    pub capacity: u64,
    /// Seconds per interval.
    #[cfg_attr(feature = "serde", serde(default = "default_interval"))]
    pub interval: f64,
    /// Number of intervals to simulate.
    pub duration: u64,
    pub scheduler: SchedulerKind,
    /// Discard frames once their deadline has passed instead of serving late.
    #[cfg_attr(feature = "serde", serde(default))]
    pub drop_expired: bool,
}

pub const DEFAULT_INTERVAL: f64 = 0.005;

#[cfg(feature = "serde")]
fn default_interval() -> f64 {
    DEFAULT_INTERVAL
}

impl SimConfig {
    pub fn new(capacity: u64, duration: u64, scheduler: SchedulerKind) -> Self {
        Self {
            capacity,
            interval: DEFAULT_INTERVAL,
            duration,
            scheduler,
            drop_expired: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowReport {
    pub id: u32,
    pub offered_bytes: u64,
    pub served_bytes: u64,
    pub queued_bytes: u64,
    pub dropped_bytes: u64,
    pub frames_offered: u64,
    pub frames_on_time: u64,
    /// Late deliveries, drops, and queued frames already past their deadline.
    pub frames_missed: u64,
    /// Queued frames whose deadline lies beyond the simulated horizon.
    pub frames_pending: u64,
    /// Mean of completion interval minus arrival interval over delivered frames.
    pub mean_delay_intervals: f64,
    pub max_delay_intervals: u64,
    /// `served_bytes / offered_bytes` (1 when nothing was offered).
    pub normalized_throughput: f64,
}

impl FlowReport {
    pub fn miss_rate(&self) -> f64 {
        let decided = self.frames_on_time + self.frames_missed;
        if decided == 0 {
            0.0
        } else {
            self.frames_missed as f64 / decided as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimReport {
    pub scheduler: SchedulerKind,
    pub capacity: u64,
    pub duration: u64,
    pub interval: f64,
    pub flows: Vec<FlowReport>,
    pub total_served: u64,
    /// Served bytes over `capacity * duration`.
    pub utilization: f64,
    /// Jain index over per-flow normalized throughput.
    pub jain_fairness: f64,
}

/// `(sum v)^2 / (n * sum v^2)`.
pub fn jain_fairness(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Scheduler {
            reason: "fairness of an empty set".into(),
        });
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Scheduler {
            reason: "fairness inputs must be finite and non-negative".into(),
        });
    }
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|v| v * v).sum();
    if sq == 0.0 {
        return Err(Error::Scheduler {
            reason: "fairness of an all-zero allocation".into(),
        });
    }
    Ok((sum * sum / (values.len() as f64 * sq)).min(1.0))
}

/// Interval in which frame `k` is displayed.
pub fn arrival_interval(k: usize, frame_rate: f64, interval: f64) -> u64 {
    libm::floor(k as f64 / (frame_rate * interval) + 1e-9) as u64
}

/// Frames a trace needs to cover `duration` intervals.
pub fn frames_needed(frame_rate: f64, interval: f64, duration: u64) -> usize {
    let mut k = libm::ceil(duration as f64 * interval * frame_rate) as usize;
    while k > 0 && arrival_interval(k - 1, frame_rate, interval) >= duration {
        k -= 1;
    }
    while arrival_interval(k, frame_rate, interval) < duration {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Default)]
struct FlowCounters {
    offered_bytes: u64,
    served_bytes: u64,
    dropped_bytes: u64,
    frames_offered: u64,
    on_time: u64,
    late: u64,
    dropped: u64,
    delivered: u64,
    delay_sum: u64,
    max_delay: u64,
}

enum Policy {
    Edf,
    Drr(DrrState),
    EdfDrr(EdfDrrState),
}

/// What happened in one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub interval: u64,
    /// Queued bytes after arrivals (and drops), before service.
    pub queued_before: Vec<u64>,
    pub allocation: Allocation,
}

/// Interval-by-interval driver behind [`simulate`].
pub struct Simulator {
    flows: Vec<Flow>,
    config: SimConfig,
    queues: Vec<FlowQueue>,
    next_frame: Vec<usize>,
    counters: Vec<FlowCounters>,
    policy: Policy,
    quanta: Vec<u64>,
    now: u64,
}

impl Simulator {
    /// Flows are ordered by id; the id order is the tie-break order everywhere.
    pub fn new(mut flows: Vec<Flow>, config: SimConfig) -> Result<Self> {
        let err = |reason: alloc::string::String| Err(Error::Scheduler { reason });
        if flows.is_empty() {
            return err("empty flow set".into());
        }
        if config.capacity == 0 || config.duration == 0 {
            return err("capacity and duration must be positive".into());
        }
        if !(config.interval.is_finite() && config.interval > 0.0) {
            return err("interval must be positive".into());
        }
        flows.sort_by_key(|f| f.id);
        for w in flows.windows(2) {
            if w[0].id == w[1].id {
                return err(format!("duplicate flow id {}", w[0].id));
            }
        }
        for f in &flows {
            if f.deadline_offset < 1 {
                return err(format!("flow {}: deadline_offset must be >= 1", f.id));
            }
            if f.quantum == 0 {
                return err(format!("flow {}: quantum must be positive", f.id));
            }
            let needed = frames_needed(f.trace.frame_rate, config.interval, config.duration);
            if f.trace.len() < needed {
                return err(format!(
                    "flow {}: trace has {} frames, duration needs {}",
                    f.id,
                    f.trace.len(),
                    needed
                ));
            }
        }
        let n = flows.len();
        let policy = match config.scheduler {
            SchedulerKind::Edf => Policy::Edf,
            SchedulerKind::Drr => Policy::Drr(DrrState::new(n)),
            SchedulerKind::EdfDrr => Policy::EdfDrr(EdfDrrState::new(n)),
        };
        let quanta = flows.iter().map(|f| f.quantum).collect();
        Ok(Self {
            flows,
            config,
            queues: vec![FlowQueue::new(); n],
            next_frame: vec![0; n],
            counters: vec![FlowCounters::default(); n],
            policy,
            quanta,
            now: 0,
        })
    }

    pub fn is_done(&self) -> bool {
        self.now >= self.config.duration
    }

    pub fn queued_bytes(&self) -> Vec<u64> {
        self.queues
            .iter()
            .map(|q| q.iter().map(|f| f.remaining).sum())
            .collect()
    }

    pub fn offered_bytes(&self) -> Vec<u64> {
        self.counters.iter().map(|c| c.offered_bytes).collect()
    }

    pub fn served_bytes(&self) -> Vec<u64> {
        self.counters.iter().map(|c| c.served_bytes).collect()
    }

    pub fn dropped_bytes(&self) -> Vec<u64> {
        self.counters.iter().map(|c| c.dropped_bytes).collect()
    }

    /// Advances one interval. Returns `None` once the horizon is reached.
    pub fn step(&mut self) -> Option<StepOutcome> {
        if self.is_done() {
            return None;
        }
        let t = self.now;
        for (i, flow) in self.flows.iter().enumerate() {
            let trace = &flow.trace;
            while self.next_frame[i] < trace.len()
                && arrival_interval(self.next_frame[i], trace.frame_rate, self.config.interval) <= t
            {
                let k = self.next_frame[i];
                let size = trace.frames[k].size;
                self.next_frame[i] += 1;
                let c = &mut self.counters[i];
                c.frames_offered += 1;
                c.offered_bytes += size;
                if size == 0 {
                    // Nothing to transmit: delivered on arrival.
                    c.on_time += 1;
                    c.delivered += 1;
                    continue;
                }
                self.queues[i].push_back(QueuedFrame::new(k, t, t + flow.deadline_offset, size));
            }
        }
        if self.config.drop_expired {
            for (q, c) in self.queues.iter_mut().zip(self.counters.iter_mut()) {
                q.retain(|f| {
                    let expired = f.deadline < t;
                    if expired {
                        c.dropped += 1;
                        c.dropped_bytes += f.remaining;
                    }
                    !expired
                });
            }
        }
        let queued_before = self.queued_bytes();
        let cap = self.config.capacity;
        let allocation = match &mut self.policy {
            Policy::Edf => schedule_edf(&mut self.queues, cap),
            Policy::Drr(st) => schedule_drr(&mut self.queues, cap, &self.quanta, st),
            Policy::EdfDrr(st) => schedule_edf_drr(&mut self.queues, cap, &self.quanta, st),
        };
        for (c, b) in self.counters.iter_mut().zip(&allocation.bytes) {
            c.served_bytes += b;
        }
        for (flow, frame) in &allocation.completed {
            let c = &mut self.counters[*flow];
            let delay = t - frame.arrival;
            c.delivered += 1;
            c.delay_sum += delay;
            c.max_delay = c.max_delay.max(delay);
            if t <= frame.deadline {
                c.on_time += 1;
            } else {
                c.late += 1;
            }
        }
        self.now += 1;
        Some(StepOutcome {
            interval: t,
            queued_before,
            allocation,
        })
    }

    pub fn report(&self) -> Result<SimReport> {
        let horizon = self.now;
        let mut flows = Vec::with_capacity(self.flows.len());
        for ((flow, c), q) in self.flows.iter().zip(&self.counters).zip(&self.queues) {
            let expired = q.iter().filter(|f| f.deadline < horizon).count() as u64;
            let pending = q.len() as u64 - expired;
            flows.push(FlowReport {
                id: flow.id,
                offered_bytes: c.offered_bytes,
                served_bytes: c.served_bytes,
                queued_bytes: q.iter().map(|f| f.remaining).sum(),
                dropped_bytes: c.dropped_bytes,
                frames_offered: c.frames_offered,
                frames_on_time: c.on_time,
                frames_missed: c.late + c.dropped + expired,
                frames_pending: pending,
                mean_delay_intervals: if c.delivered > 0 {
                    c.delay_sum as f64 / c.delivered as f64
                } else {
                    0.0
                },
                max_delay_intervals: c.max_delay,
                normalized_throughput: if c.offered_bytes > 0 {
                    c.served_bytes as f64 / c.offered_bytes as f64
                } else {
                    1.0
                },
            });
        }
        let total_served: u64 = flows.iter().map(|f| f.served_bytes).sum();
        let normalized: Vec<f64> = flows.iter().map(|f| f.normalized_throughput).collect();
        Ok(SimReport {
            scheduler: self.config.scheduler,
            capacity: self.config.capacity,
            duration: horizon,
            interval: self.config.interval,
            total_served,
            utilization: total_served as f64 / (self.config.capacity as f64 * horizon.max(1) as f64),
            jain_fairness: jain_fairness(&normalized)?,
            flows,
        })
    }
}

/// Runs the whole horizon. Fully deterministic: there is no randomness inside
/// a simulation run.
pub fn simulate(flows: Vec<Flow>, config: SimConfig) -> Result<SimReport> {
    let mut sim = Simulator::new(flows, config)?;
    while sim.step().is_some() {}
    sim.report()
}
