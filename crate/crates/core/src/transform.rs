//! Shifted error and the per-channel transformation chain
//! `z -> phi = (2/pi) atan(z) -> psi = phi h -> varsigma = atanh(psi)`, `varrho = 1/(1 - psi^2)`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use thiserror::Error;

use crate::error::{Error, Result};
use crate::shift::ShiftFunction;
use crate::signals::{last_jump, Side};

/// Margin below `|psi| = 1` at which the chain refuses to evaluate.
pub const GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("|psi| = {} reached the singularity guard (z = {z}, h = {h})", psi.abs())]
pub struct GuardTripped {
    pub z: f64,
    pub h: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTransform {
    pub e: f64,
    pub z: f64,
    pub phi: f64,
    pub psi: f64,
    pub varsigma: f64,
    pub varrho: f64,
}

/// `mu(t - t_k) * e` for the most recent jump `t_k < t`, or `e` untouched when
/// there is none.
pub fn shift_error(e: f64, t: f64, jumps: &[f64], sf: &ShiftFunction) -> f64 {
    shift_error_at(e, t, Side::Left, jumps, sf)
}

pub fn shift_error_at(e: f64, t: f64, side: Side, jumps: &[f64], sf: &ShiftFunction) -> f64 {
    match last_jump(jumps, t, side) {
        Some(tk) => sf.eval(t - tk) * e,
        None => e,
    }
}

/// Runs the chain for shifted error `z` under scaling `h >= 1`. The returned
/// record has `e == z`; callers holding the raw error overwrite it.
pub fn transform_channel(z: f64, h: f64) -> Result<ChannelTransform, GuardTripped> {
    let phi = FRAC_2_PI * z.atan();
    let psi = phi * h;
    if !(psi.abs() < 1.0 - GUARD) {
        return Err(GuardTripped { z, h, psi });
    }
    Ok(ChannelTransform {
        e: z,
        z,
        phi,
        psi,
        varsigma: psi.atanh(),
        varrho: 1.0 / (1.0 - psi * psi),
    })
}

/// `z = tan((pi/2) tanh(varsigma) / h)`.
pub fn inverse_transform(varsigma: f64, h: f64) -> Result<f64> {
    let phi = varsigma.tanh() / h;
    if !(phi.abs() < 1.0) || !(h >= 1.0) {
        return Err(Error::param(
            "varsigma",
            format!("tanh(varsigma)/h = {phi} with h = {h} is outside (-1, 1)"),
        ));
    }
    Ok((FRAC_PI_2 * phi).tan())
}

/// Largest `|z|` the guarded chain accepts at scaling `h`.
pub fn guarded_bound(h: f64) -> f64 {
    (FRAC_PI_2 * (1.0 - GUARD) / h).tan()
}
