//! Scalar signals and piecewise references with known jump instants.
//!
//! A [`PiecewiseReference`] is a list of segments, segment `k` covering the
//! interval `(t_{k-1}, t_k]`. At an interior boundary the value belongs to the
//! segment that ends there (pre-jump); [`Side::Right`] selects the right limit
//! instead, which is what an integrator step starting at a jump needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which one-sided limit to use when `t` coincides with a jump instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    /// Value at `t_k` is the pre-jump value (right-closed segments).
    #[default]
    Left,
    /// Value at `t_k` is the post-jump right limit.
    Right,
}

/// Closed algebra of scalar time signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalExpr {
    Constant {
        value: f64,
    },
    /// `amplitude * sin(omega * t + phase)`
    Sinusoid {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `slope * t + intercept`
    Ramp { slope: f64, intercept: f64 },
    Sum { terms: Vec<SignalExpr> },
    Scaled { factor: f64, inner: Box<SignalExpr> },
}

impl SignalExpr {
    pub fn constant(value: f64) -> Self {
        SignalExpr::Constant { value }
    }

    pub fn sin(amplitude: f64, omega: f64, phase: f64) -> Self {
        SignalExpr::Sinusoid {
            amplitude,
            omega,
            phase,
        }
    }

    pub fn ramp(slope: f64, intercept: f64) -> Self {
        SignalExpr::Ramp { slope, intercept }
    }

    pub fn sum(terms: Vec<SignalExpr>) -> Self {
        SignalExpr::Sum { terms }
    }

    pub fn scaled(factor: f64, inner: SignalExpr) -> Self {
        SignalExpr::Scaled {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SignalExpr::Constant { value } => *value,
            SignalExpr::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).sin(),
            SignalExpr::Ramp { slope, intercept } => slope * t + intercept,
            SignalExpr::Sum { terms } => terms.iter().map(|s| s.eval(t)).sum(),
            SignalExpr::Scaled { factor, inner } => {
                // Scaled(1, s) must be identical to s, bit for bit.
                if *factor == 1.0 {
                    inner.eval(t)
                } else {
                    factor * inner.eval(t)
                }
            }
        }
    }

    /// True when every parameter in the expression tree is finite.
    pub fn is_finite(&self) -> bool {
        match self {
            SignalExpr::Constant { value } => value.is_finite(),
            SignalExpr::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude.is_finite() && omega.is_finite() && phase.is_finite(),
            SignalExpr::Ramp { slope, intercept } => slope.is_finite() && intercept.is_finite(),
            SignalExpr::Sum { terms } => terms.iter().all(SignalExpr::is_finite),
            SignalExpr::Scaled { factor, inner } => factor.is_finite() && inner.is_finite(),
        }
    }
}

pub fn eval_signal(expr: &SignalExpr, t: f64) -> f64 {
    expr.eval(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Right end of the segment; `f64::INFINITY` for the last one.
    pub end: f64,
    pub expr: SignalExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseReference {
    segments: Vec<Segment>,
}

impl PiecewiseReference {
    /// Builds a reference from `(end_time, expr)` pairs. End times must be
    /// strictly increasing and positive; only the last may be infinite, and it
    /// must be.
    pub fn new(segments: Vec<(f64, SignalExpr)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::param("segments", "at least one segment is required"));
        }
        let last = segments.len() - 1;
        let mut prev = 0.0;
        for (k, (end, expr)) in segments.iter().enumerate() {
            if !expr.is_finite() {
                return Err(Error::param("segments", format!("segment {k} has a non-finite parameter")));
            }
            if k == last {
                if *end != f64::INFINITY {
                    return Err(Error::param("segments", "the final segment must extend to +inf"));
                }
            } else if !(end.is_finite() && *end > prev) {
                return Err(Error::param(
                    "segments",
                    format!("segment {k} end time {end} must be finite and greater than {prev}"),
                ));
            }
            prev = *end;
        }
        Ok(Self {
            segments: segments
                .into_iter()
                .map(|(end, expr)| Segment { end, expr })
                .collect(),
        })
    }

    pub fn single(expr: SignalExpr) -> Self {
        Self {
            segments: vec![Segment {
                end: f64::INFINITY,
                expr,
            }],
        }
    }

    /// Builds from interior boundaries and one expression per resulting segment.
    pub fn from_boundaries(boundaries: &[f64], exprs: Vec<SignalExpr>) -> Result<Self> {
        if exprs.len() != boundaries.len() + 1 {
            return Err(Error::param(
                "exprs",
                format!("need {} expressions for {} boundaries", boundaries.len() + 1, boundaries.len()),
            ));
        }
        let ends = boundaries.iter().copied().chain(std::iter::once(f64::INFINITY));
        Self::new(ends.zip(exprs).collect())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    fn segment_index(&self, t: f64, side: Side) -> usize {
        let last = self.segments.len() - 1;
        self.segments[..last]
            .iter()
            .position(|s| match side {
                Side::Left => t <= s.end,
                Side::Right => t < s.end,
            })
            .unwrap_or(last)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_at(t, Side::Left)
    }

    pub fn eval_at(&self, t: f64, side: Side) -> f64 {
        self.segments[self.segment_index(t, side)].expr.eval(t)
    }

    /// Interior segment boundaries, ascending.
    pub fn jump_instants(&self) -> Vec<f64> {
        self.segments[..self.segments.len() - 1]
            .iter()
            .map(|s| s.end)
            .collect()
    }

    /// `x_r(t_k+) - x_r(t_k)` for every interior boundary.
    pub fn jump_magnitudes(&self) -> Vec<f64> {
        self.segments
            .windows(2)
            .map(|w| w[1].expr.eval(w[0].end) - w[0].expr.eval(w[0].end))
            .collect()
    }
}

pub fn eval_reference(reference: &PiecewiseReference, t: f64) -> f64 {
    reference.eval(t)
}

pub fn jump_instants(reference: &PiecewiseReference) -> Vec<f64> {
    reference.jump_instants()
}

/// Largest `t_k < t`. At `t == t_k` the pre-jump regime still applies.
pub fn last_jump_before(jumps: &[f64], t: f64) -> Option<f64> {
    last_jump(jumps, t, Side::Left)
}

/// Most recent jump relative to `t`: strictly before for [`Side::Left`],
/// at or before for [`Side::Right`].
pub fn last_jump(jumps: &[f64], t: f64, side: Side) -> Option<f64> {
    let count = match side {
        Side::Left => jumps.partition_point(|&tk| tk < t),
        Side::Right => jumps.partition_point(|&tk| tk <= t),
    };
    count.checked_sub(1).map(|k| jumps[k])
}
