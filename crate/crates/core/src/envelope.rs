//! Time-varying performance boundary.
//!
//! `1/h(t) = l + (1 - l) cos^2(pi t / (2 T1))` on `[0, T1]` and `l` afterwards,
//! with `l = (2/pi) atan(c)`. The bound is `rho(t) = tan(pi / (2 h(t)))`: unbounded
//! at `t = 0`, shrinking to exactly `c` at the predefined time `T1`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    predefined_time: f64,
    preset_range: f64,
    l: f64,
}

impl Envelope {
    pub fn new(predefined_time: f64, preset_range: f64) -> Result<Self> {
        if !(predefined_time.is_finite() && predefined_time > 0.0) {
            return Err(Error::param("T1", format!("must be positive and finite, got {predefined_time}")));
        }
        if !(preset_range.is_finite() && preset_range > 0.0) {
            return Err(Error::param("c", format!("must be positive and finite, got {preset_range}")));
        }
        let l = FRAC_2_PI * preset_range.atan();
        if l >= 1.0 {
            return Err(Error::param("c", format!("preset range {preset_range} is too large")));
        }
        Ok(Self {
            predefined_time,
            preset_range,
            l,
        })
    }

    pub fn predefined_time(&self) -> f64 {
        self.predefined_time
    }

    pub fn preset_range(&self) -> f64 {
        self.preset_range
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// `1/h(t)`.
    pub fn inv_h(&self, t: f64) -> f64 {
        if t > self.predefined_time {
            self.l
        } else {
            let t = t.max(0.0);
            let c = (FRAC_PI_2 * t / self.predefined_time).cos();
            self.l + (1.0 - self.l) * c * c
        }
    }

    pub fn h(&self, t: f64) -> f64 {
        1.0 / self.inv_h(t)
    }

    pub fn rho(&self, t: f64) -> f64 {
        if t <= 0.0 {
            f64::INFINITY
        } else if t > self.predefined_time {
            self.preset_range
        } else {
            (FRAC_PI_2 * self.inv_h(t)).tan()
        }
    }
}

/// The bound `tan(pi / (2h))` implied by a given `h >= 1`; infinite at `h = 1`.
pub fn rho_for_h(h: f64) -> f64 {
    if h <= 1.0 {
        f64::INFINITY
    } else {
        (FRAC_PI_2 / h).tan()
    }
}

pub fn h_value(env: &Envelope, t: f64) -> f64 {
    env.h(t)
}

pub fn rho_value(env: &Envelope, t: f64) -> f64 {
    env.rho(t)
}
