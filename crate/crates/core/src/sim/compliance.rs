//! Trace-level checks of the two guarantees: the shifted errors never leave
//! the envelope, and after each reference jump the raw tracking error is back
//! inside it within the shift length `T`.

use serde::Serialize;

use super::trace::SimulationTrace;
use crate::envelope::Envelope;
use crate::error::PerformanceViolation;
use crate::shift::ShiftFunction;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClauseReport {
    /// Rows examined.
    pub checked: usize,
    /// Rows where at least one channel was outside the bound.
    pub violations: usize,
    pub first_violation: Option<f64>,
    /// Largest `|err| / rho` seen over checked rows.
    pub worst_ratio: f64,
}

impl ClauseReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, t: f64, errors: &[f64], rho: f64) {
        self.checked += 1;
        let worst = errors.iter().map(|e| e.abs()).fold(0.0, f64::max);
        if rho.is_finite() {
            self.worst_ratio = self.worst_ratio.max(worst / rho);
        }
        if !errors.iter().all(|e| e.abs() < rho) {
            self.violations += 1;
            self.first_violation.get_or_insert(t);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RecoveryStatus {
    /// `|e_1| < rho` from `at` until the next jump or the end of the trace.
    Recovered { at: f64, after: f64 },
    /// The trace ends before the deadline without a persistent recovery.
    Pending,
    NotRecovered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub jump: f64,
    pub deadline: f64,
    pub outcome: RecoveryStatus,
    pub passed: bool,
}

impl Recovery {
    pub fn time(&self) -> Option<f64> {
        match self.outcome {
            RecoveryStatus::Recovered { after, .. } => Some(after),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceReport {
    /// `|z_i| < rho(t)` at every sample with `t > 0`.
    pub shifted_within_envelope: ClauseReport,
    /// `|e_i| < rho(t)` at every sample with `t > 0` outside the post-jump windows `(t_k, t_k + T]`.
    pub raw_within_envelope: ClauseReport,
    pub recoveries: Vec<Recovery>,
    pub completed: bool,
    pub violation: Option<PerformanceViolation>,
}

impl ComplianceReport {
    pub fn passed(&self) -> bool {
        self.completed
            && self.shifted_within_envelope.passed()
            && self.raw_within_envelope.passed()
            && self.recoveries.iter().all(|r| r.passed)
    }
}

fn recovery_after(trace: &SimulationTrace, jumps: &[f64], k: usize, support: f64) -> Option<Recovery> {
    let tk = jumps[k];
    let end = trace.final_time()?;
    if tk >= end {
        return None;
    }
    let next = jumps.get(k + 1).copied().unwrap_or(f64::INFINITY);
    let deadline = tk + support;
    let window: Vec<_> = trace.rows.iter().filter(|r| r.t > tk && r.t <= next).collect();
    let last_bad = window.iter().rposition(|r| !(r.e[0].abs() < r.rho));
    let first_good = match last_bad {
        None => window.first(),
        Some(i) => window.get(i + 1),
    };
    let outcome = match first_good {
        Some(r) => RecoveryStatus::Recovered {
            at: r.t,
            after: r.t - tk,
        },
        None if trace.aborted.is_none() && end < deadline => RecoveryStatus::Pending,
        None => RecoveryStatus::NotRecovered,
    };
    let passed = match outcome {
        RecoveryStatus::Recovered { after, .. } => after <= support,
        RecoveryStatus::Pending => true,
        RecoveryStatus::NotRecovered => false,
    };
    Some(Recovery {
        jump: tk,
        deadline,
        outcome,
        passed,
    })
}

pub fn check_compliance(
    trace: &SimulationTrace,
    env: &Envelope,
    sf: &ShiftFunction,
    jumps: &[f64],
) -> ComplianceReport {
    let support = sf.support();
    let mut shifted = ClauseReport::default();
    let mut raw = ClauseReport::default();
    for r in trace.rows.iter().filter(|r| r.t > 0.0) {
        let rho = env.rho(r.t);
        shifted.record(r.t, &r.z, rho);
        let in_window = jumps.iter().any(|&tk| r.t > tk && r.t <= tk + support);
        if !in_window {
            raw.record(r.t, &r.e, rho);
        }
    }
    let recoveries = (0..jumps.len())
        .filter_map(|k| recovery_after(trace, jumps, k, support))
        .collect();
    ComplianceReport {
        shifted_within_envelope: shifted,
        raw_within_envelope: raw,
        recoveries,
        completed: trace.aborted.is_none(),
        violation: trace.aborted,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowMetric {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
    pub max_abs_e1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub rows: usize,
    pub final_time: Option<f64>,
    pub aborted: bool,
    /// Windows where the envelope is settled and no recovery is in progress:
    /// `[T1, t_1)`, `[t_k + T, t_{k+1})`, ..., closed at the trace end.
    pub steady_windows: Vec<WindowMetric>,
    pub rms_e1: f64,
    pub recovery_times: Vec<Option<f64>>,
    pub max_abs_u: f64,
}

pub fn summarize_metrics(trace: &SimulationTrace) -> Metrics {
    let end = trace.final_time().unwrap_or(0.0);
    let mut steady_windows = Vec::new();
    for k in 0..=trace.jumps.len() {
        let after_recovery = if k == 0 { 0.0 } else { trace.jumps[k - 1] + trace.shift_support };
        let start = trace.predefined_time.max(after_recovery);
        if start > end {
            break;
        }
        let stop = trace.jumps.get(k).copied().unwrap_or(f64::INFINITY);
        // the trace may end inside the window; the end sample then counts
        let closed = stop > end;
        let values: Vec<f64> = trace
            .rows
            .iter()
            .filter(|r| r.t >= start && (r.t < stop || (closed && r.t <= end)))
            .map(|r| r.e[0].abs())
            .collect();
        if !values.is_empty() {
            steady_windows.push(WindowMetric {
                start,
                end: stop.min(end),
                samples: values.len(),
                max_abs_e1: values.iter().copied().fold(0.0, f64::max),
            });
        }
    }

    let rows = trace.rows.len();
    let rms_e1 = if rows == 0 {
        0.0
    } else {
        (trace.rows.iter().map(|r| r.e[0] * r.e[0]).sum::<f64>() / rows as f64).sqrt()
    };
    let recovery_times = (0..trace.jumps.len())
        .filter_map(|k| recovery_after(trace, &trace.jumps, k, trace.shift_support))
        .map(|r| r.time())
        .collect();
    Metrics {
        rows,
        final_time: trace.final_time(),
        aborted: trace.aborted.is_some(),
        steady_windows,
        rms_e1,
        recovery_times,
        max_abs_u: trace.rows.iter().map(|r| r.u.abs()).fold(0.0, f64::max),
    }
}
