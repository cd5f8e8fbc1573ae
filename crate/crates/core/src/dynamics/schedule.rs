use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Piecewise-constant control field `Ω(t)`.
///
/// `values[i]` holds on `[breakpoints[i-1], breakpoints[i])`, with an implicit
/// breakpoint at `t = 0` and the last value extending to infinity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawSchedule", into = "RawSchedule"))]
pub struct ControlSchedule {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(default)]
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawSchedule> for ControlSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        ControlSchedule::new(raw.breakpoints, raw.values)
    }
}

#[cfg(feature = "serde")]
impl From<ControlSchedule> for RawSchedule {
    fn from(s: ControlSchedule) -> Self {
        RawSchedule {
            breakpoints: s.breakpoints,
            values: s.values,
        }
    }
}

/// One constant-field interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub omega: f64,
}

impl ControlSchedule {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParameter {
                name: "schedule",
                reason: "needs exactly one more value than interior breakpoints",
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "schedule",
                reason: "field values must be finite",
            });
        }
        let mut prev = 0.0;
        for &t in &breakpoints {
            if !(t.is_finite() && t > prev) {
                return Err(Error::InvalidParameter {
                    name: "schedule",
                    reason: "breakpoints must be positive and strictly increasing",
                });
            }
            prev = t;
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn constant(omega: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            values: vec![omega],
        }
    }

    /// Builds a schedule from `(start_time, value)` pairs; the first start
    /// must be `0`.
    pub fn from_segments(segments: &[(f64, f64)]) -> Result<Self> {
        match segments.first() {
            Some(&(t0, _)) if t0 == 0.0 => {}
            _ => {
                return Err(Error::InvalidParameter {
                    name: "schedule",
                    reason: "first segment must start at t = 0",
                })
            }
        }
        let breakpoints = segments[1..].iter().map(|&(t, _)| t).collect();
        let values = segments.iter().map(|&(_, v)| v).collect();
        Self::new(breakpoints, values)
    }

    /// Same schedule with the field forced to zero on `[t_off, t_on)`.
    pub fn with_pause(&self, t_off: f64, t_on: f64) -> Result<Self> {
        if !(t_off >= 0.0 && t_on > t_off && t_on.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "pause",
                reason: "requires 0 <= t_off < t_on",
            });
        }
        let mut segs: Vec<(f64, f64)> = Vec::new();
        let mut push = |t: f64, v: f64| match segs.last_mut() {
            Some(last) if last.0 == t => last.1 = v,
            _ => segs.push((t, v)),
        };
        push(0.0, self.value_at(0.0));
        for &t in &self.breakpoints {
            if t < t_off {
                push(t, self.value_at(t));
            }
        }
        push(t_off, 0.0);
        push(t_on, self.value_at(t_on));
        for &t in &self.breakpoints {
            if t > t_on {
                push(t, self.value_at(t));
            }
        }
        Self::from_segments(&segs)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        self.values[idx]
    }

    /// Constant intervals covering `[0, t_end)`.
    pub fn segments(&self, t_end: f64) -> impl Iterator<Item = Segment> + '_ {
        let starts = core::iter::once(0.0).chain(self.breakpoints.iter().copied());
        let ends = self
            .breakpoints
            .iter()
            .copied()
            .chain(core::iter::once(f64::INFINITY));
        starts
            .zip(ends)
            .zip(self.values.iter().copied())
            .filter(move |((start, _), _)| *start < t_end)
            .map(move |((start, end), omega)| Segment {
                start,
                end: end.min(t_end),
                omega,
            })
    }
}
