//! Property suites for the shift function, the envelope and the transform
//! chain that need no scenario. Used by `ppc selftest`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::envelope::{rho_for_h, Envelope};
use crate::shift::ShiftFunction;
use crate::transform::{inverse_transform, transform_channel};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub elapsed_s: f64,
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
    started: Instant,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            passed: self.failures.is_empty(),
            checks: self.checks,
            failures: self.failures,
            elapsed_s: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Consecutive values rise strictly, except for ties at 0 or within one ulp
/// of 1, where the rise of `mu` is below f64 resolution.
pub fn strictly_increasing_where_resolved(values: &[f64]) -> bool {
    let saturated = |v: f64| v == 0.0 || 1.0 - v <= f64::EPSILON;
    values
        .windows(2)
        .all(|w| w[1] > w[0] || (w[0] == w[1] && saturated(w[0])))
}

pub fn shift_suite() -> SuiteResult {
    let mut s = Suite::new("shift_function");
    let support = 2.0;
    let sf = match ShiftFunction::new(support, 4096) {
        Ok(sf) => sf,
        Err(e) => {
            s.check(false, || e.to_string());
            return s.finish();
        }
    };

    let mid = sf.eval(support / 2.0);
    s.check((mid - 0.5).abs() < 1e-8, || format!("mu(T/2) = {mid}"));

    let grid: Vec<f64> = (1..=10_000).map(|k| support * k as f64 / 10_001.0).collect();
    let values: Vec<f64> = grid.iter().map(|&t| sf.eval(t)).collect();
    s.check(strictly_increasing_where_resolved(&values), || "mu not increasing on the grid".into());
    s.check(values.iter().all(|v| (0.0..=1.0).contains(v)), || "mu outside [0, 1]".into());

    for order in 1..=3 {
        for t in [0.01, support - 0.01] {
            match sf.derivative_fd(t, order, 1e-3) {
                Ok(d) => s.check(d.abs() < 1e-6, || format!("order-{order} derivative at {t} is {d}")),
                Err(e) => s.check(false, || e.to_string()),
            }
        }
    }

    for k in 0..100 {
        let t = support * (0.1 + 0.8 * k as f64 / 99.0);
        let exact = sf.derivative(t);
        let fd = sf.derivative_fd(t, 1, 1e-4).unwrap_or(f64::NAN);
        let rel = ((fd - exact) / exact).abs();
        s.check(rel < 1e-5, || format!("mu' at {t}: fd {fd} vs closed form {exact}"));
    }

    for k in 1..1000 {
        let d = support / 2.0 * k as f64 / 1000.0;
        let sym = sf.eval(support / 2.0 + d) + sf.eval(support / 2.0 - d) - 1.0;
        s.check(sym.abs() < 1e-8, || format!("symmetry defect {sym} at offset {d}"));
    }
    s.finish()
}

pub fn envelope_suite(seed: u64) -> SuiteResult {
    let mut s = Suite::new("envelope");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let t1: f64 = rng.gen_range(0.1..10.0);
        let c: f64 = rng.gen_range(0.01..1.0);
        let env = match Envelope::new(t1, c) {
            Ok(env) => env,
            Err(e) => {
                s.check(false, || e.to_string());
                continue;
            }
        };
        let at = env.rho(t1);
        s.check((at - c).abs() < 1e-12, || format!("rho(T1) = {at} for c = {c}, T1 = {t1}"));
        let rho: Vec<f64> = (1..=1000).map(|k| env.rho(t1 * k as f64 / 1000.0)).collect();
        s.check(rho.windows(2).all(|w| w[1] <= w[0]), || format!("rho increases somewhere on (0, {t1}]"));
        let h = env.h(rng.gen_range(0.0..2.0 * t1));
        s.check(h >= 1.0 && h <= 1.0 / env.l() * (1.0 + 1e-12), || format!("h = {h} out of range"));
    }
    s.finish()
}

pub fn transform_suite(seed: u64) -> SuiteResult {
    let mut s = Suite::new("transform");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let h: f64 = rng.gen_range(1.0..20.0);
        let psi: f64 = rng.gen_range(-0.99..0.99);
        let z = (std::f64::consts::FRAC_PI_2 * psi / h).tan();
        match transform_channel(z, h) {
            Ok(ch) => {
                let back = inverse_transform(ch.varsigma, h).unwrap_or(f64::NAN);
                let rel = if z == 0.0 { back.abs() } else { ((back - z) / z).abs() };
                s.check(rel < 1e-9, || format!("round trip z = {z}, h = {h}: {back}"));
            }
            Err(e) => s.check(false, || e.to_string()),
        }
        let probe: f64 = rng.gen_range(-3.0..3.0) * rho_for_h(h).min(1e3);
        let inside = (std::f64::consts::FRAC_2_PI * probe.atan() * h).abs() < 1.0;
        s.check(inside == (probe.abs() < rho_for_h(h)), || format!("bound mismatch at z = {probe}, h = {h}"));
    }
    s.finish()
}

pub fn run_all() -> Vec<SuiteResult> {
    vec![shift_suite(), envelope_suite(0x5eed), transform_suite(0x7a5f)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for r in run_all() {
            assert!(r.passed, "{}: {:?}", r.name, r.failures);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn monotone_helper() {
        assert!(strictly_increasing_where_resolved(&[0.0, 0.0, 0.1, 0.5, 1.0 - f64::EPSILON / 2.0, 1.0 - f64::EPSILON / 2.0, 1.0, 1.0]));
        assert!(!strictly_increasing_where_resolved(&[0.0, 0.2, 0.2, 1.0]));
        assert!(!strictly_increasing_where_resolved(&[0.3, 0.2]));
    }
}
