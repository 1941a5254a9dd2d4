//! Declarative scenario files (JSON, `schema_version` 1).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "order": 2,
//!   "gains": [50.0, 50.0],
//!   "T1": 1.0,
//!   "c": 0.1,
//!   "shift_T": 2.0,
//!   "shift_grid_size": 4096,
//!   "reference": [
//!     { "until": 3.0, "signal": { "kind": "sinusoid", "amplitude": 1.0, "omega": 1.0, "phase": 0.0 } },
//!     { "signal": { "kind": "constant", "value": 0.5 } }
//!   ],
//!   "disturbances": [ { "kind": "constant", "value": 0.0 }, { "kind": "constant", "value": 0.0 } ],
//!   "dt": 1e-4,
//!   "t_end": 10.0,
//!   "x0": [0.0, 0.0]
//! }
//! ```
//!
//! Every segment but the last carries `until`; the last extends to infinity.
//! `shift_grid_size`, `dt` and `x0` are optional (4096, `1e-4`, zeros).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::{Controller, ControllerConfig};
use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::shift::{ShiftFunction, DEFAULT_GRID_SIZE, MIN_GRID_SIZE};
use crate::signals::{PiecewiseReference, SignalExpr};
use crate::sim::{check_compliance, ComplianceReport, Plant, SimConfig, Simulation, SimulationTrace};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_DT: f64 = 1e-4;

const REPRODUCTION: &str = include_str!("../scenarios/reproduction.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub until: Option<f64>,
    pub signal: SignalExpr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub order: usize,
    pub gains: Vec<f64>,
    #[serde(rename = "T1")]
    pub predefined_time: f64,
    #[serde(rename = "c")]
    pub preset_range: f64,
    #[serde(rename = "shift_T")]
    pub shift_support: f64,
    #[serde(default = "default_grid_size")]
    pub shift_grid_size: usize,
    pub reference: Vec<SegmentSpec>,
    pub disturbances: Vec<SignalExpr>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::scenario(field, format!("must be positive and finite, got {v}")))
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text)?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    /// The bundled second-order reproduction scenario.
    pub fn reproduction() -> Self {
        parse_scenario(REPRODUCTION).expect("bundled scenario is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        parse_scenario(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.0; self.order])
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::scenario(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let n = self.order;
        if n == 0 {
            return Err(Error::scenario("order", "must be at least 1"));
        }
        if self.gains.len() != n {
            return Err(Error::scenario("gains", format!("expected {n} gains, got {}", self.gains.len())));
        }
        for (i, &k) in self.gains.iter().enumerate() {
            positive(&format!("gains[{i}]"), k)?;
        }
        positive("T1", self.predefined_time)?;
        positive("c", self.preset_range)?;
        positive("shift_T", self.shift_support)?;
        if self.shift_grid_size < MIN_GRID_SIZE {
            return Err(Error::scenario(
                "shift_grid_size",
                format!("must be at least {MIN_GRID_SIZE}, got {}", self.shift_grid_size),
            ));
        }
        positive("t_end", self.t_end)?;
        positive("dt", self.dt)?;
        if self.dt > self.t_end {
            return Err(Error::scenario("dt", format!("{} exceeds t_end {}", self.dt, self.t_end)));
        }
        if self.predefined_time >= self.t_end {
            return Err(Error::scenario(
                "T1",
                format!("predefined time {} must be less than t_end {}", self.predefined_time, self.t_end),
            ));
        }
        if self.disturbances.len() != n {
            return Err(Error::scenario(
                "disturbances",
                format!("expected {n} disturbances, got {}", self.disturbances.len()),
            ));
        }
        if let Some(i) = self.disturbances.iter().position(|d| !d.is_finite()) {
            return Err(Error::scenario(format!("disturbances[{i}]"), "non-finite parameter"));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != n {
                return Err(Error::scenario("x0", format!("expected {n} initial states, got {}", x0.len())));
            }
            if x0.iter().any(|v| !v.is_finite()) {
                return Err(Error::scenario("x0", "initial state must be finite"));
            }
        }

        let reference = self.build_reference()?;
        let jumps = reference.jump_instants();
        for w in jumps.windows(2) {
            let gap = w[1] - w[0];
            if self.shift_support >= gap {
                return Err(Error::scenario(
                    "shift_T",
                    format!(
                        "shift length {} must be less than the gap {gap} between jumps at {} and {}",
                        self.shift_support, w[0], w[1]
                    ),
                ));
            }
        }
        Ok(())
    }

    fn build_reference(&self) -> Result<PiecewiseReference> {
        let last = self.reference.len().checked_sub(1).ok_or_else(|| {
            Error::scenario("reference", "at least one segment is required")
        })?;
        let mut segments = Vec::with_capacity(self.reference.len());
        for (k, seg) in self.reference.iter().enumerate() {
            let field = format!("reference[{k}].until");
            let end = match (k == last, seg.until) {
                (true, None) => f64::INFINITY,
                (true, Some(_)) => return Err(Error::scenario(field, "the final segment must omit `until`")),
                (false, None) => return Err(Error::scenario(field, "required on every segment but the last")),
                (false, Some(t)) => t,
            };
            segments.push((end, seg.signal.clone()));
        }
        PiecewiseReference::new(segments).map_err(|e| Error::scenario("reference", e.to_string()))
    }

    pub fn envelope(&self) -> Result<Envelope> {
        Envelope::new(self.predefined_time, self.preset_range).map_err(|e| Error::scenario("c", e.to_string()))
    }

    pub fn shift(&self) -> Result<ShiftFunction> {
        ShiftFunction::new(self.shift_support, self.shift_grid_size).map_err(|e| Error::scenario("shift_T", e.to_string()))
    }

    pub fn reference(&self) -> Result<PiecewiseReference> {
        self.build_reference()
    }

    pub fn build(&self) -> Result<Simulation> {
        self.validate()?;
        let controller = Controller::new(
            ControllerConfig::new(self.gains.clone()).map_err(|e| Error::scenario("gains", e.to_string()))?,
            self.build_reference()?,
            self.shift()?,
            self.envelope()?,
        );
        let config = SimConfig::new(self.dt, self.t_end, self.initial_state())
            .map_err(|e| Error::scenario("dt", e.to_string()))?;
        Simulation::new(controller, Plant::new(self.disturbances.clone()), config)
    }

    /// Runs the scenario, failing on a performance violation.
    pub fn simulate(&self) -> Result<SimulationTrace> {
        self.build()?.simulate()
    }

    /// Runs the scenario to completion or violation and evaluates the compliance clauses.
    pub fn verify(&self) -> Result<(SimulationTrace, ComplianceReport)> {
        let sim = self.build()?;
        let trace = sim.run();
        let c = sim.controller();
        let report = check_compliance(&trace, c.envelope(), c.shift(), c.jumps());
        Ok((trace, report))
    }
}
