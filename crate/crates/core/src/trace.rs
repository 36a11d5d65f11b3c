//! Frame-trace data model, text formats and GoP seasonality detection.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::stats;

/// Frame rate assumed when a trace file does not carry one.
pub const DEFAULT_FRAME_RATE: f64 = 25.0;

/// MPEG picture type. `Unknown` covers trace formats that omit the type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FrameKind {
    I,
    P,
    B,
    Unknown,
}

impl FrameKind {
    pub fn code(self) -> char {
        match self {
            FrameKind::I => 'I',
            FrameKind::P => 'P',
            FrameKind::B => 'B',
            FrameKind::Unknown => 'U',
        }
    }
}

impl FromStr for FrameKind {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "I" => Ok(FrameKind::I),
            "P" => Ok(FrameKind::P),
            "B" => Ok(FrameKind::B),
            "U" => Ok(FrameKind::Unknown),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Frame {
    pub kind: FrameKind,
    /// Size in bytes.
    pub size: u64,
}

impl Frame {
    pub fn new(kind: FrameKind, size: u64) -> Self {
        Self { kind, size }
    }

    pub fn unknown(size: u64) -> Self {
        Self::new(FrameKind::Unknown, size)
    }
}

/// Frames in display order at a fixed frame rate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameTrace {
    pub frames: Vec<Frame>,
    /// Frames per second.
    pub frame_rate: f64,
    /// Free-text provenance label.
    pub source: String,
}

impl FrameTrace {
    pub fn new(frames: Vec<Frame>, frame_rate: f64, source: impl Into<String>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyTrace);
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(crate::error::invalid("trace", "frame rate must be positive"));
        }
        Ok(Self {
            frames,
            frame_rate,
            source: source.into(),
        })
    }

    /// Trace of `Unknown` frames at the default frame rate.
    pub fn from_sizes(sizes: impl IntoIterator<Item = u64>, source: impl Into<String>) -> Result<Self> {
        let frames = sizes.into_iter().map(Frame::unknown).collect();
        Self::new(frames, DEFAULT_FRAME_RATE, source)
    }

    pub fn with_frame_rate(mut self, frame_rate: f64) -> Result<Self> {
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(crate::error::invalid("trace", "frame rate must be positive"));
        }
        self.frame_rate = frame_rate;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Frame sizes as reals, the series the models operate on.
    pub fn sizes(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.size as f64).collect()
    }

    pub fn total_bytes(&self) -> u64 {
        self.frames.iter().map(|f| f.size).sum()
    }

    /// CSV rendering with the `index,frame_type,size_bytes` header and LF line ends.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * self.frames.len() + 32);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (i, f) in self.frames.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i, f.kind.code(), f.size);
        }
        out
    }

    pub fn to_sizes_only(&self) -> String {
        let mut out = String::with_capacity(8 * self.frames.len());
        for f in &self.frames {
            let _ = writeln!(out, "{}", f.size);
        }
        out
    }

    pub fn serialize(&self, format: TraceFormat) -> String {
        match format {
            TraceFormat::Csv => self.to_csv(),
            TraceFormat::SizesOnly => self.to_sizes_only(),
        }
    }
}

pub const CSV_HEADER: &str = "index,frame_type,size_bytes";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TraceFormat {
    /// `index,frame_type,size_bytes` with a header row.
    Csv,
    /// One non-negative integer per line.
    SizesOnly,
}

fn parse_size(field: &str, line: usize) -> Result<u64> {
    let field = field.trim();
    if let Some(rest) = field.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::NegativeSize {
                line,
                value: field.to_string(),
            });
        }
    }
    field.parse::<u64>().map_err(|_| Error::MalformedRow {
        line,
        reason: alloc::format!("invalid frame size '{field}'"),
    })
}

/// Parses a trace. Blank lines are skipped; line numbers in errors are 1-based
/// and count the header.
pub fn parse_trace(text: &str, format: TraceFormat) -> Result<FrameTrace> {
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l));
    let mut frames = Vec::new();

    match format {
        TraceFormat::Csv => {
            let header = lines.by_ref().find(|(_, l)| !l.trim().is_empty());
            match header {
                None => return Err(Error::EmptyTrace),
                Some((n, h)) if h.trim() != CSV_HEADER => {
                    return Err(Error::MalformedRow {
                        line: n,
                        reason: alloc::format!("expected header '{CSV_HEADER}'"),
                    })
                }
                Some(_) => {}
            }
            let mut last_index: Option<u64> = None;
            for (n, l) in lines {
                if l.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = l.split(',').collect();
                if fields.len() != 3 {
                    return Err(Error::MalformedRow {
                        line: n,
                        reason: alloc::format!("expected 3 fields, found {}", fields.len()),
                    });
                }
                let index = fields[0].trim().parse::<u64>().map_err(|_| Error::MalformedRow {
                    line: n,
                    reason: alloc::format!("invalid index '{}'", fields[0].trim()),
                })?;
                if last_index.is_some_and(|prev| index <= prev) {
                    return Err(Error::MalformedRow {
                        line: n,
                        reason: "frame indices must be strictly increasing".to_string(),
                    });
                }
                last_index = Some(index);
                let kind = fields[1].trim().parse::<FrameKind>().map_err(|_| Error::MalformedRow {
                    line: n,
                    reason: alloc::format!("unknown frame type '{}'", fields[1].trim()),
                })?;
                let size = parse_size(fields[2], n)?;
                frames.push(Frame::new(kind, size));
            }
        }
        TraceFormat::SizesOnly => {
            for (n, l) in lines {
                if l.trim().is_empty() {
                    continue;
                }
                frames.push(Frame::unknown(parse_size(l, n)?));
            }
        }
    }

    if frames.is_empty() {
        return Err(Error::EmptyTrace);
    }
    FrameTrace::new(frames, DEFAULT_FRAME_RATE, "")
}

/// Lag in `[2, max_period]` with the largest sample autocorrelation of frame
/// sizes. Ties go to the smallest lag.
pub fn detect_seasonality(trace: &FrameTrace, max_period: usize) -> Result<usize> {
    if max_period < 2 {
        return Err(crate::error::invalid("trace", "max_period must be at least 2"));
    }
    let needed = 3 * max_period;
    if trace.len() < needed {
        return Err(Error::TooShort {
            context: "trace",
            needed,
            got: trace.len(),
        });
    }
    let acf = stats::acf(&trace.sizes(), max_period).map_err(|e| match e {
        Error::ZeroVariance { .. } => Error::ZeroVariance { context: "trace" },
        other => other,
    })?;
    let mut best = 2;
    for lag in 3..=max_period {
        if acf.values[lag] > acf.values[best] + 1e-12 {
            best = lag;
        }
    }
    Ok(best)
}

/// Sample moments of a set of frame sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    /// Moment skewness m3 / m2^1.5; 0 when the variance is zero.
    pub skewness: f64,
    /// Excess kurtosis m4 / m2^2 - 3; 0 when the variance is zero.
    pub kurtosis: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
            min = min.min(v);
            max = max.max(v);
        }
        let std_dev = if values.len() > 1 {
            libm::sqrt(m2 / (n - 1.0))
        } else {
            0.0
        };
        let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
        let (skewness, kurtosis) = if m2 > 0.0 {
            (m3 / libm::pow(m2, 1.5), m4 / (m2 * m2) - 3.0)
        } else {
            (0.0, 0.0)
        };
        // Rounding can push the mean a hair outside [min, max] for constant input.
        let mean = mean.clamp(min, max);
        Ok(Self {
            count: values.len(),
            mean,
            std_dev,
            min,
            max,
            skewness,
            kurtosis,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceStats {
    pub overall: Moments,
    /// Present only for I/P/B kinds that occur in the trace.
    pub per_kind: Vec<(FrameKind, Moments)>,
}

pub fn summarize(trace: &FrameTrace) -> Result<TraceStats> {
    let overall = Moments::of(&trace.sizes())?;
    let mut per_kind = Vec::new();
    for kind in [FrameKind::I, FrameKind::P, FrameKind::B] {
        let sizes: Vec<f64> = trace
            .frames
            .iter()
            .filter(|f| f.kind == kind)
            .map(|f| f.size as f64)
            .collect();
        if !sizes.is_empty() {
            per_kind.push((kind, Moments::of(&sizes)?));
        }
    }
    Ok(TraceStats { overall, per_kind })
}
