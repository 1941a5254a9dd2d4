//! The smooth shift function `mu`: rises from 0 at `t = 0` to 1 at `t = T`,
//! flat to all orders at both ends.
//!
//! `mu(t) = (1/C) * int_0^t exp(-1/(s(T-s))) ds` on `(0, T)`. The cumulative
//! integral is tabulated once with per-cell Simpson quadrature; between nodes
//! the table is read with a cubic Hermite interpolant whose node slopes are the
//! exact kernel values. Slopes are limited per cell (Fritsch-Carlson) so the
//! interpolant never decreases, which only ever happens in the far tails where
//! the kernel is below `1e-20`.

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 4096;
pub const MIN_GRID_SIZE: usize = 64;

/// `exp(-1/(s(T-s)))` on `(0, T)`, zero elsewhere (its limit at both ends).
pub fn kernel(support: f64, s: f64) -> f64 {
    if s > 0.0 && s < support {
        (-1.0 / (s * (support - s))).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct ShiftFunction {
    support: f64,
    norm: f64,
    spacing: f64,
    /// Cumulative kernel integral at each node, unnormalized.
    table: Vec<f64>,
    /// Limited Hermite slopes `(left, right)` per cell, normalized by `C`.
    cell_slopes: Vec<(f64, f64)>,
}

impl ShiftFunction {
    pub fn new(support: f64, grid_size: usize) -> Result<Self> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::param("shift_T", format!("support length must be positive and finite, got {support}")));
        }
        if grid_size < MIN_GRID_SIZE {
            return Err(Error::param(
                "shift_grid_size",
                format!("grid needs at least {MIN_GRID_SIZE} nodes, got {grid_size}"),
            ));
        }
        let cells = grid_size - 1;
        let spacing = support / cells as f64;
        let node = |j: usize| if j == cells { support } else { j as f64 * spacing };

        let mut table = Vec::with_capacity(grid_size);
        table.push(0.0);
        let mut acc = 0.0;
        for j in 0..cells {
            let (a, b) = (node(j), node(j + 1));
            let mid = 0.5 * (a + b);
            acc += (b - a) / 6.0 * (kernel(support, a) + 4.0 * kernel(support, mid) + kernel(support, b));
            table.push(acc);
        }
        let norm = acc;

        let cell_slopes = (0..cells)
            .map(|j| {
                let secant = (table[j + 1] - table[j]) / spacing;
                if secant <= 0.0 {
                    return (0.0, 0.0);
                }
                let (m0, m1) = (kernel(support, node(j)), kernel(support, node(j + 1)));
                let (alpha, beta) = (m0 / secant, m1 / secant);
                let r = alpha.hypot(beta);
                // alpha^2 + beta^2 <= 9 keeps the cubic monotone; stay a little inside.
                let (m0, m1) = if r > 2.9 {
                    let scale = 2.9 / r;
                    (scale * m0, scale * m1)
                } else {
                    (m0, m1)
                };
                (m0 / norm, m1 / norm)
            })
            .collect();

        Ok(Self {
            support,
            norm,
            spacing,
            table,
            cell_slopes,
        })
    }

    /// `T`, the length of the rise.
    pub fn support(&self) -> f64 {
        self.support
    }

    /// The normalization constant `C`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn grid_size(&self) -> usize {
        self.table.len()
    }

    /// Unnormalized cumulative integral at the grid nodes.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t.is_nan() || t <= 0.0 {
            return 0.0;
        }
        if t >= self.support {
            return 1.0;
        }
        let cells = self.cell_slopes.len();
        let u = t / self.spacing;
        let j = (u.floor() as usize).min(cells - 1);
        let s = u - j as f64;
        let y0 = self.table[j] / self.norm;
        let y1 = self.table[j + 1] / self.norm;
        let (m0, m1) = self.cell_slopes[j];
        let h = self.spacing;
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1;
        value.clamp(0.0, 1.0)
    }

    /// Closed-form `mu'(t) = kernel(t) / C`.
    pub fn derivative(&self, t: f64) -> f64 {
        kernel(self.support, t) / self.norm
    }

    /// Central finite-difference estimate of `mu^(order)(t)` built on [`Self::eval`].
    pub fn derivative_fd(&self, t: f64, order: u32, spacing: f64) -> Result<f64> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::param("spacing", format!("must be positive, got {spacing}")));
        }
        let f = |k: f64| self.eval(t + k * spacing);
        let h = spacing;
        let value = match order {
            1 => (f(1.0) - f(-1.0)) / (2.0 * h),
            2 => (f(1.0) - 2.0 * f(0.0) + f(-1.0)) / (h * h),
            3 => (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h * h * h),
            4 => (f(2.0) - 4.0 * f(1.0) + 6.0 * f(0.0) - 4.0 * f(-1.0) + f(-2.0)) / (h * h * h * h),
            _ => return Err(Error::param("order", format!("supported orders are 1..=4, got {order}"))),
        };
        Ok(value)
    }
}

pub fn make_shift(support: f64, grid_size: usize) -> Result<ShiftFunction> {
    ShiftFunction::new(support, grid_size)
}

pub fn eval_mu(sf: &ShiftFunction, t: f64) -> f64 {
    sf.eval(t)
}

pub fn eval_mu_dot(sf: &ShiftFunction, t: f64) -> f64 {
    sf.derivative(t)
}

pub fn mu_derivative_fd(sf: &ShiftFunction, t: f64, order: u32, spacing: f64) -> Result<f64> {
    sf.derivative_fd(t, order, spacing)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain composite Simpson over `[0, T]` with `intervals` (even) subintervals.
    fn simpson_norm(support: f64, intervals: usize) -> f64 {
        let h = support / intervals as f64;
        let mut sum = kernel(support, 0.0) + kernel(support, support);
        for i in 1..intervals {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * kernel(support, i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ShiftFunction::new(0.0, 4096).is_err());
        assert!(ShiftFunction::new(-1.0, 4096).is_err());
        assert!(ShiftFunction::new(f64::INFINITY, 4096).is_err());
        assert!(ShiftFunction::new(2.0, 63).is_err());
        assert!(ShiftFunction::new(2.0, 64).is_ok());
    }

    #[test]
    fn norm_matches_refined_simpson() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        let oracle = simpson_norm(2.0, 16384);
        assert!(((sf.norm() - oracle) / oracle).abs() < 1e-8, "{} vs {oracle}", sf.norm());
        let fine = ShiftFunction::new(2.0, 8192).unwrap();
        assert!(((sf.norm() - fine.norm()) / fine.norm()).abs() < 1e-8);
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel(2.0, 1.0), (-1.0f64).exp());
        for support in [0.5, 2.0, 7.0] {
            assert_eq!(kernel(support, 0.0), 0.0);
            assert_eq!(kernel(support, support), 0.0);
            assert!(kernel(support, 1e-4 * support) < 1e-80);
            assert!(kernel(support, support * (1.0 - 1e-4)) < 1e-80);
        }
    }

    #[test]
    fn table_is_nondecreasing_and_ends_at_norm() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        let t = sf.table();
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), sf.norm());
        assert!(sf.norm() > 0.0);
        assert!(t.windows(2).all(|w| w[1] >= w[0]));
        // strictly increasing wherever the kernel is resolvable in f64
        let n = t.len();
        assert!(t[n / 20..n - n / 20].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn mu_examples() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        assert_eq!(sf.eval(-1.0), 0.0);
        assert_eq!(sf.eval(0.0), 0.0);
        assert!((sf.eval(1.0) - 0.5).abs() < 1e-12);
        assert_eq!(sf.eval(7.0), 1.0);
        assert_eq!(sf.eval(2.0), 1.0);
    }

    #[test]
    fn mu_dot_examples() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        assert_eq!(sf.derivative(1.0), (-1.0f64).exp() / sf.norm());
        assert_eq!(sf.derivative(0.0), 0.0);
        assert_eq!(sf.derivative(2.0), 0.0);
        assert_eq!(sf.derivative(-3.0), 0.0);
    }

    #[test]
    fn finite_difference_examples() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        let fd = sf.derivative_fd(1.0, 1, 1e-4).unwrap();
        let exact = sf.derivative(1.0);
        assert!(((fd - exact) / exact).abs() < 1e-5);
        assert!(sf.derivative_fd(2.0 - 1e-2, 2, 1e-3).unwrap().abs() < 1e-6);
        assert_eq!(sf.derivative_fd(-1.0, 1, 1e-3).unwrap(), 0.0);
        assert!(sf.derivative_fd(1.0, 5, 1e-3).is_err());
        assert!(sf.derivative_fd(1.0, 0, 1e-3).is_err());
        assert!(sf.derivative_fd(1.0, 1, 0.0).is_err());
    }

    #[test]
    fn flat_at_both_ends() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        for order in 1..=3 {
            for t in [1e-2, 2.0 - 1e-2] {
                let d = sf.derivative_fd(t, order, 1e-3).unwrap();
                assert!(d.abs() < 1e-6, "order {order} at {t}: {d}");
            }
        }
    }

    #[test]
    fn symmetric_about_midpoint() {
        let sf = ShiftFunction::new(2.0, 4096).unwrap();
        for k in 1..1000 {
            let s = k as f64 * 1e-3;
            let d = sf.eval(1.0 + s) + sf.eval(1.0 - s) - 1.0;
            assert!(d.abs() < 1e-8, "{d} at {s}");
        }
    }

    #[test]
    fn grid_refinement_sup_norm() {
        let coarse = ShiftFunction::new(2.0, 4096).unwrap();
        let fine = ShiftFunction::new(2.0, 8192).unwrap();
        let worst = (1..=10_000)
            .map(|k| 2.0 * k as f64 / 10_001.0)
            .map(|t| (coarse.eval(t) - fine.eval(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "sup-norm gap {worst}");
    }

    #[test]
    fn range_is_unit_interval() {
        let sf = ShiftFunction::new(3.0, 128).unwrap();
        for k in -100..=400 {
            let v = sf.eval(k as f64 * 0.01);
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
