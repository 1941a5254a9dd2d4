//! Singularity-free prescribed performance control for strict-feedback
//! systems `x_i' = x_{i+1} + d_i`, `x_n' = u + d_n`.
//!
//! The tracking error is kept inside a shrinking envelope `rho(t)` through the
//! transformation `varsigma = atanh((2/pi) atan(z) h(t))` and the memoryless law
//! `alpha_i = -k_i varsigma_i / (1 - psi_i^2)`. When the reference jumps, the
//! errors are multiplied by a `C^inf` shift function that rises from 0 to 1
//! over a fixed horizon `T`, so the transformed error never meets the
//! singularity and the raw error is back inside the envelope within `T`.
//!
//! Modules, bottom-up: [`signals`], [`shift`], [`envelope`], [`transform`],
//! [`controller`], [`sim`], [`scenario`], [`cli`].

// `!(a < b)` is used on purpose so that NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod controller;
pub mod envelope;
pub mod error;
pub mod scenario;
pub mod selftest;
pub mod shift;
pub mod signals;
pub mod sim;
pub mod transform;

pub use controller::{ControlOutput, Controller, ControllerConfig};
pub use envelope::Envelope;
pub use error::{Error, PerformanceViolation, Result};
pub use scenario::Scenario;
pub use shift::ShiftFunction;
pub use signals::{PiecewiseReference, Side, SignalExpr};
pub use sim::{check_compliance, summarize_metrics, ComplianceReport, Plant, SimConfig, Simulation, SimulationTrace};
pub use transform::ChannelTransform;
