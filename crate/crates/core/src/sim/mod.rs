//! Closed-loop simulation of `x_i' = x_{i+1} + d_i(t)`, `x_n' = u + d_n(t)`.
//!
//! Classical four-stage Runge-Kutta on a fixed grid that has every reference
//! jump (and the envelope's predefined time, where `h` is only `C^1`) as a
//! step boundary. The first stage of every step is evaluated with right
//! limits, so a step starting at a jump sees the post-jump reference and
//! `mu(0+) = 0`.

mod compliance;
mod trace;

pub use compliance::{
    check_compliance, summarize_metrics, ClauseReport, ComplianceReport, Metrics, Recovery, RecoveryStatus,
    WindowMetric,
};
pub use trace::{SimulationTrace, TraceRow};

use crate::controller::{ControlOutput, Controller};
use crate::error::{Error, PerformanceViolation, Result};
use crate::signals::{SignalExpr, Side};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64, x0: Vec<f64>) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::param("t_end", format!("must be positive and finite, got {t_end}")));
        }
        if !(dt.is_finite() && dt > 0.0 && dt <= t_end) {
            return Err(Error::param("dt", format!("must satisfy 0 < dt <= t_end, got {dt}")));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("x0", "initial state must be finite"));
        }
        Ok(Self { dt, t_end, x0 })
    }
}

/// The strict-feedback chain with additive disturbances.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    disturbances: Vec<SignalExpr>,
}

impl Plant {
    pub fn new(disturbances: Vec<SignalExpr>) -> Self {
        Self { disturbances }
    }

    /// Undisturbed chain of `order` integrators.
    pub fn undisturbed(order: usize) -> Self {
        Self::new(vec![SignalExpr::constant(0.0); order])
    }

    pub fn order(&self) -> usize {
        self.disturbances.len()
    }

    pub fn derivative(&self, t: f64, x: &[f64], u: f64, dx: &mut [f64]) {
        let n = self.order();
        for i in 0..n {
            let next = if i + 1 < n { x[i + 1] } else { u };
            dx[i] = next + self.disturbances[i].eval(t);
        }
    }
}

/// Step boundaries from 0 to `t_end`. Each breakpoint inside `(0, t_end)` is a
/// boundary; between breakpoints the step is the largest size `<= dt` that
/// divides the interval evenly.
pub fn step_grid(t_end: f64, dt: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut marks: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b < t_end)
        .collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    marks.push(t_end);

    let mut grid = vec![0.0];
    let mut start = 0.0;
    for end in marks {
        let steps = (((end - start) / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = (end - start) / steps as f64;
        grid.extend((1..steps).map(|j| start + j as f64 * h));
        grid.push(end);
        start = end;
    }
    grid
}

/// One classical RK4 step of `x' = f(t, side, x)` from `t0` over `h`.
pub fn rk4_step<E>(
    t0: f64,
    h: f64,
    x: &[f64],
    mut f: impl FnMut(f64, Side, &[f64], &mut [f64]) -> std::result::Result<(), E>,
) -> std::result::Result<Vec<f64>, E> {
    let n = x.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    f(t0, Side::Right, x, &mut k1)?;
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    f(t0 + 0.5 * h, Side::Left, &tmp, &mut k2)?;
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    f(t0 + 0.5 * h, Side::Left, &tmp, &mut k3)?;
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    f(t0 + h, Side::Left, &tmp, &mut k4)?;

    Ok((0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

#[derive(Debug, Clone)]
pub struct Simulation {
    controller: Controller,
    plant: Plant,
    config: SimConfig,
}

impl Simulation {
    pub fn new(controller: Controller, plant: Plant, config: SimConfig) -> Result<Self> {
        let n = controller.config().order();
        if plant.order() != n {
            return Err(Error::param("disturbances", format!("expected {n} disturbances, got {}", plant.order())));
        }
        if config.x0.len() != n {
            return Err(Error::param("x0", format!("expected {n} initial states, got {}", config.x0.len())));
        }
        Ok(Self {
            controller,
            plant,
            config,
        })
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn plant(&self) -> &Plant {
        &self.plant
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> Vec<f64> {
        let mut breaks = self.controller.jumps().to_vec();
        breaks.push(self.controller.envelope().predefined_time());
        step_grid(self.config.t_end, self.config.dt, &breaks)
    }

    fn row(&self, t: f64, x: &[f64], out: &ControlOutput) -> TraceRow {
        let n = x.len();
        TraceRow {
            t,
            x: x.to_vec(),
            x_r: out.alphas[0],
            u: out.u,
            e: out.channels.iter().map(|c| c.e).collect(),
            z: out.channels.iter().map(|c| c.z).collect(),
            rho: self.controller.envelope().rho(t),
            varsigma: out.channels.iter().map(|c| c.varsigma).collect(),
            lyapunov: out.lyapunov.clone(),
            alpha: out.alphas[1..n].to_vec(),
        }
    }

    /// Integrates until `t_end` or the first performance violation. An aborted
    /// run keeps every row logged before the violation.
    pub fn run(&self) -> SimulationTrace {
        let grid = self.grid();
        let env = self.controller.envelope();
        let mut trace = SimulationTrace {
            order: self.controller.config().order(),
            predefined_time: env.predefined_time(),
            preset_range: env.preset_range(),
            shift_support: self.controller.shift().support(),
            jumps: self.controller.jumps().to_vec(),
            rows: Vec::with_capacity(grid.len()),
            aborted: None,
        };

        let mut x = self.config.x0.clone();
        for (j, &t0) in grid.iter().enumerate() {
            match self.controller.compute(&x, t0) {
                Ok(out) => trace.rows.push(self.row(t0, &x, &out)),
                Err(v) => {
                    trace.aborted = Some(v);
                    return trace;
                }
            }
            let Some(&t1) = grid.get(j + 1) else { break };
            let rhs = |t: f64, side: Side, state: &[f64], dx: &mut [f64]| -> Result<(), PerformanceViolation> {
                let u = self.controller.compute_at(state, t, side)?.u;
                self.plant.derivative(t, state, u, dx);
                Ok(())
            };
            match rk4_step(t0, t1 - t0, &x, rhs) {
                Ok(next) => x = next,
                Err(v) => {
                    trace.aborted = Some(v);
                    return trace;
                }
            }
        }
        trace
    }

    pub fn simulate(&self) -> Result<SimulationTrace> {
        let trace = self.run();
        match trace.aborted {
            Some(v) => Err(Error::Violation(v)),
            None => Ok(trace),
        }
    }
}
