//! Low-complexity backstepping cascade.
//!
//! For `i = 1..=n`: `e_i = x_i - alpha_{i-1}` with `alpha_0 = x_r(t)`, `z_i` the
//! shifted error, and `alpha_i = -k_i varrho_i varsigma_i`; `u = alpha_n`. No
//! derivative of any `alpha_i` or of the reference is ever taken, so the law is
//! defined at jump instants and needs no smoothness from the reference.

use crate::envelope::Envelope;
use crate::error::{Error, PerformanceViolation, Result};
use crate::shift::ShiftFunction;
use crate::signals::{PiecewiseReference, Side};
use crate::transform::{shift_error_at, transform_channel, ChannelTransform};

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    gains: Vec<f64>,
}

impl ControllerConfig {
    pub fn new(gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::param("gains", "system order must be at least 1"));
        }
        if let Some(k) = gains.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::param("gains", format!("every gain must be positive and finite, got {k}")));
        }
        Ok(Self { gains })
    }

    pub fn order(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutput {
    pub u: f64,
    /// `alpha_0 = x_r(t)` through `alpha_n = u`.
    pub alphas: Vec<f64>,
    pub channels: Vec<ChannelTransform>,
    /// `V_i = varsigma_i^2 / 2`.
    pub lyapunov: Vec<f64>,
}

pub fn lyapunov_diagnostics(out: &ControlOutput) -> Vec<f64> {
    out.channels.iter().map(|c| 0.5 * c.varsigma * c.varsigma).collect()
}

#[derive(Debug, Clone)]
pub struct Controller {
    config: ControllerConfig,
    reference: PiecewiseReference,
    jumps: Vec<f64>,
    shift: ShiftFunction,
    envelope: Envelope,
}

impl Controller {
    pub fn new(
        config: ControllerConfig,
        reference: PiecewiseReference,
        shift: ShiftFunction,
        envelope: Envelope,
    ) -> Self {
        let jumps = reference.jump_instants();
        Self {
            config,
            reference,
            jumps,
            shift,
            envelope,
        }
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn reference(&self) -> &PiecewiseReference {
        &self.reference
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn shift(&self) -> &ShiftFunction {
        &self.shift
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    /// Control at `t`, taking pre-jump values at jump instants.
    pub fn compute(&self, x: &[f64], t: f64) -> Result<ControlOutput, PerformanceViolation> {
        self.compute_at(x, t, Side::Left)
    }

    /// Control at `t` using the given one-sided limit for the reference and
    /// the shift selection.
    pub fn compute_at(&self, x: &[f64], t: f64, side: Side) -> Result<ControlOutput, PerformanceViolation> {
        let n = self.config.order();
        assert_eq!(x.len(), n, "state length must equal the system order");
        let h = self.envelope.h(t);

        let mut alphas = Vec::with_capacity(n + 1);
        let mut channels = Vec::with_capacity(n);
        alphas.push(self.reference.eval_at(t, side));
        for (i, (&xi, &k)) in x.iter().zip(self.config.gains()).enumerate() {
            let e = xi - alphas[i];
            let z = shift_error_at(e, t, side, &self.jumps, &self.shift);
            let mut ch = transform_channel(z, h).map_err(|g| PerformanceViolation {
                channel: i + 1,
                t,
                z: g.z,
                h: g.h,
                psi: g.psi,
            })?;
            ch.e = e;
            alphas.push(-k * ch.varrho * ch.varsigma);
            channels.push(ch);
        }
        let mut out = ControlOutput {
            u: alphas[n],
            alphas,
            channels,
            lyapunov: Vec::new(),
        };
        out.lyapunov = lyapunov_diagnostics(&out);
        Ok(out)
    }
}
