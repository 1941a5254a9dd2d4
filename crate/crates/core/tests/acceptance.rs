//! Acceptance criteria, one line per criterion. Exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use ppc_core::selftest::strictly_increasing_where_resolved;
use ppc_core::transform::{inverse_transform, transform_channel};
use ppc_core::{Envelope, Scenario, ShiftFunction, SimulationTrace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn scenario(name: &str) -> Scenario {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "scenarios", name].iter().collect();
    Scenario::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(started: Instant, budget: Duration) -> Result<f64, String> {
    let elapsed = started.elapsed();
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))?;
    Ok(elapsed.as_secs_f64())
}

/// Runs a scenario to completion; an aborted run is a failure.
fn run(s: &Scenario) -> Result<SimulationTrace, String> {
    let sim = s.build().map_err(|e| e.to_string())?;
    let trace = sim.run();
    match trace.aborted {
        Some(v) => Err(format!("run aborted: {v}")),
        None => Ok(trace),
    }
}

fn c1_shift_smoothness() -> Outcome {
    let started = Instant::now();
    let support = 2.0;
    let sf = ShiftFunction::new(support, 4096).map_err(|e| e.to_string())?;

    let mid = sf.eval(1.0);
    ensure((mid - 0.5).abs() < 1e-8, || format!("mu(T/2) = {mid}"))?;

    let grid: Vec<f64> = (1..=10_000).map(|k| support * k as f64 / 10_001.0).collect();
    let values: Vec<f64> = grid.iter().map(|&t| sf.eval(t)).collect();
    ensure(strictly_increasing_where_resolved(&values), || "mu not strictly increasing".into())?;
    let saturated = values.iter().filter(|&&v| v == 0.0 || 1.0 - v <= f64::EPSILON).count();

    let mut worst_flat: f64 = 0.0;
    for order in 1..=3 {
        for t in [0.01, 1.99] {
            let d = sf.derivative_fd(t, order, 1e-3).map_err(|e| e.to_string())?;
            ensure(d.abs() < 1e-6, || format!("order-{order} derivative at {t} = {d}"))?;
            worst_flat = worst_flat.max(d.abs());
        }
    }

    let mut worst_rel: f64 = 0.0;
    for k in 0..100 {
        let t = support * (0.1 + 0.8 * k as f64 / 99.0);
        let exact = (-1.0 / (t * (support - t))).exp() / sf.norm();
        let fd = sf.derivative_fd(t, 1, 1e-4).map_err(|e| e.to_string())?;
        let rel = ((fd - exact) / exact).abs();
        ensure(rel < 1e-5, || format!("mu'({t}): fd {fd} vs {exact}, rel {rel:e}"))?;
        worst_rel = worst_rel.max(rel);
    }
    let secs = within_budget(started, Duration::from_secs(5))?;
    Ok(format!(
        "mu(T/2)-0.5 = {:.1e}, {saturated} saturated grid points, max flat |d| = {worst_flat:.1e}, max mu' rel err = {worst_rel:.1e}, {secs:.3} s",
        mid - 0.5
    ))
}

fn c2_envelope_continuity() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t1: f64 = rng.gen_range(0.1..10.0);
        let c: f64 = rng.gen_range(0.01..1.0);
        let env = Envelope::new(t1, c).map_err(|e| e.to_string())?;
        let gap = (env.rho(t1) - c).abs();
        ensure(gap < 1e-12, || format!("|rho(T1) - c| = {gap:e} at T1 = {t1}, c = {c}"))?;
        worst = worst.max(gap);
        let mut prev = f64::INFINITY;
        for k in 1..=10_000 {
            let r = env.rho(t1 * k as f64 / 10_000.0);
            ensure(r <= prev, || format!("rho increases at t = {} (T1 = {t1})", t1 * k as f64 / 1e4))?;
            prev = r;
        }
    }
    let secs = within_budget(started, Duration::from_secs(1))?;
    Ok(format!("max |rho(T1) - c| = {worst:.1e} over 100 pairs, {secs:.3} s"))
}

fn c3_transform_round_trip() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let h: f64 = rng.gen_range(1.0..20.0);
        let z = rng.gen_range(-1.0..1.0) * (0.99 * FRAC_PI_2 / h).tan();
        let ch = transform_channel(z, h).map_err(|e| e.to_string())?;
        ensure(ch.psi.abs() < 0.99, || format!("|psi| = {} for z = {z}", ch.psi))?;
        let back = inverse_transform(ch.varsigma, h).map_err(|e| e.to_string())?;
        let rel = if z == 0.0 { back.abs() } else { ((back - z) / z).abs() };
        ensure(rel < 1e-9, || format!("z = {z}, h = {h} came back as {back}"))?;
        worst = worst.max(rel);

        let rho = if h == 1.0 { f64::INFINITY } else { (FRAC_PI_2 / h).tan() };
        let probe = rng.gen_range(-3.0..3.0) * rho.min(1e3);
        let psi_inside = (FRAC_2_PI * probe.atan() * h).abs() < 1.0;
        ensure(psi_inside == (probe.abs() < rho), || format!("equivalence fails at z = {probe}, h = {h}"))?;
    }
    let secs = within_budget(started, Duration::from_secs(1))?;
    Ok(format!("max round-trip rel err = {worst:.1e} over 10^4 samples, {secs:.3} s"))
}

fn c4_smooth_window() -> Outcome {
    let started = Instant::now();
    let s = scenario("reproduction.json");
    ensure(
        s.gains == [50.0, 50.0]
            && s.predefined_time == 1.0
            && s.preset_range == 0.1
            && s.shift_support == 2.0
            && s.dt == 1e-4
            && s.t_end == 10.0
            && s.initial_state() == [0.0, 0.0],
        || "bundled scenario does not match the reproduction setup".into(),
    )?;
    let trace = run(&s)?;
    let env = s.envelope().map_err(|e| e.to_string())?;

    let smooth: Vec<_> = trace.rows.iter().filter(|r| r.t >= 1.0 && r.t < 3.0).collect();
    ensure(!smooth.is_empty(), || "no samples in [1, 3)".into())?;
    let max_e1 = smooth.iter().map(|r| r.e[0].abs()).fold(0.0, f64::max);
    ensure(max_e1 < 0.1, || format!("max |e_1| on [1, 3) = {max_e1}"))?;

    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for r in trace.rows.iter().filter(|r| r.t > 0.0 && r.t <= 10.0) {
        let rho = env.rho(r.t);
        for z in &r.z {
            if !(z.abs() < rho) {
                violations += 1;
            }
            worst = worst.max(z.abs() / rho);
        }
    }
    ensure(violations == 0, || format!("{violations} samples with |z_i| >= rho"))?;
    let secs = within_budget(started, Duration::from_secs(60))?;
    Ok(format!(
        "max |e_1| on [1,3) = {max_e1:.3e}, max |z_i|/rho = {worst:.3}, {} samples, {secs:.2} s",
        trace.rows.len()
    ))
}

fn c5_recovery() -> Outcome {
    let s = scenario("reproduction.json");
    let (trace, report) = s.verify().map_err(|e| e.to_string())?;
    ensure(report.completed, || "run aborted".into())?;
    let env = s.envelope().map_err(|e| e.to_string())?;
    let windows = [(5.0, 6.0, false), (8.0, 10.0, true)];
    let mut notes = Vec::new();
    for (a, b, closed) in windows {
        let rows: Vec<_> = trace
            .rows
            .iter()
            .filter(|r| r.t >= a && (r.t < b || (closed && r.t <= b)))
            .collect();
        ensure(!rows.is_empty(), || format!("no samples in [{a}, {b}]"))?;
        let max_e1 = rows.iter().map(|r| r.e[0].abs()).fold(0.0, f64::max);
        ensure(max_e1 < 0.1, || format!("max |e_1| on [{a}, {b}) = {max_e1}"))?;
        let bad_e2 = rows.iter().filter(|r| !(r.e[1].abs() < env.rho(r.t))).count();
        ensure(bad_e2 == 0, || format!("{bad_e2} samples with |e_2| >= rho on [{a}, {b}]"))?;
        let max_e2 = rows.iter().map(|r| r.e[1].abs()).fold(0.0, f64::max);
        notes.push(format!("[{a},{b}]: |e_1| <= {max_e1:.2e}, |e_2| <= {max_e2:.2e}"));
    }
    ensure(report.recoveries.len() == 2, || format!("expected 2 recoveries, got {}", report.recoveries.len()))?;
    for r in &report.recoveries {
        let t = r.time().ok_or_else(|| format!("no recovery after jump at {}", r.jump))?;
        ensure(t <= 2.0, || format!("recovery after {} took {t} s", r.jump))?;
        notes.push(format!("jump {} recovered after {t:.4} s", r.jump));
    }
    Ok(notes.join("; "))
}

fn c6_no_jump_equivalence() -> Outcome {
    let s = scenario("no_jump.json");
    ensure(
        s.reference().map_err(|e| e.to_string())?.jump_instants().is_empty(),
        || "reference has jumps".into(),
    )?;
    let trace = run(&s)?;
    for r in &trace.rows {
        for (z, e) in r.z.iter().zip(&r.e) {
            ensure(z.to_bits() == e.to_bits(), || format!("z != e at t = {}", r.t))?;
        }
        if r.t > 0.0 {
            ensure(r.e[0].abs() < r.rho, || format!("|e_1| = {} >= rho = {} at t = {}", r.e[0], r.rho, r.t))?;
        }
    }
    Ok(format!("z == e bitwise on {} samples, |e_1| < rho throughout", trace.rows.len()))
}

fn c7_integrator_order() -> Outcome {
    let base = scenario("reproduction.json");
    let final_state = |dt: f64| -> Result<Vec<f64>, String> {
        let mut s = base.clone();
        s.t_end = 2.9;
        s.dt = dt;
        let trace = run(&s)?;
        ensure(trace.final_time() == Some(2.9), || "trace does not end at 2.9".into())?;
        Ok(trace.final_state().unwrap().to_vec())
    };
    let coarse = final_state(1e-4)?;
    let mid = final_state(5e-5)?;
    let fine = final_state(2.5e-5)?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let d1 = dist(&coarse, &mid);
    let d2 = dist(&mid, &fine);
    let order = (d1 / d2).log2();
    ensure(order >= 3.5, || format!("observed order {order:.2} (|dx| {d1:e} then {d2:e})"))?;
    Ok(format!("observed order {order:.2}: |x(1e-4) - x(5e-5)| = {d1:.2e}, |x(5e-5) - x(2.5e-5)| = {d2:.2e}"))
}

fn c8_disturbance_stress() -> Outcome {
    let s = scenario("stress.json");
    ensure(
        s.disturbances[0].eval(1.0) == 2.0 * 1f64.sin() && s.disturbances[1].eval(1.0) == 4.0 * 1f64.sin(),
        || "stress disturbances are not [2 sin t, 4 sin t]".into(),
    )?;
    let (_, report) = s.verify().map_err(|e| e.to_string())?;
    ensure(report.completed, || format!("run aborted: {:?}", report.violation))?;
    let a = &report.shifted_within_envelope;
    ensure(a.passed(), || format!("{} samples with |z_i| >= rho, first at {:?}", a.violations, a.first_violation))?;
    Ok(format!("clause (a) holds on {} samples, max |z_i|/rho = {:.3}", a.checked, a.worst_ratio))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("C1 shift-function smoothness", c1_shift_smoothness),
        ("C2 envelope continuity", c2_envelope_continuity),
        ("C3 transform round trip", c3_transform_round_trip),
        ("C4 smooth-window tracking", c4_smooth_window),
        ("C5 recovery after jumps", c5_recovery),
        ("C6 no-jump equivalence", c6_no_jump_equivalence),
        ("C7 integrator order", c7_integrator_order),
        ("C8 disturbance stress", c8_disturbance_stress),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
