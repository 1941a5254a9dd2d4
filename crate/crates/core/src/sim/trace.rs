use std::io::Write;

use serde::Serialize;

use crate::error::{PerformanceViolation, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: Vec<f64>,
    pub x_r: f64,
    pub u: f64,
    pub e: Vec<f64>,
    pub z: Vec<f64>,
    pub rho: f64,
    pub varsigma: Vec<f64>,
    pub lyapunov: Vec<f64>,
    /// Virtual controls `alpha_1..alpha_{n-1}`.
    pub alpha: Vec<f64>,
}

/// Time-indexed record of a run, one row per step boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub order: usize,
    pub predefined_time: f64,
    pub preset_range: f64,
    pub shift_support: f64,
    pub jumps: Vec<f64>,
    pub rows: Vec<TraceRow>,
    /// Set when the run stopped on a performance violation.
    pub aborted: Option<PerformanceViolation>,
}

fn fmt(v: f64) -> String {
    // 17 significant digits
    format!("{v:.16e}")
}

impl SimulationTrace {
    pub fn header(&self) -> Vec<String> {
        let n = self.order;
        fn idx(p: &'static str, m: usize) -> impl Iterator<Item = String> {
            (1..=m).map(move |i| format!("{p}_{i}"))
        }
        std::iter::once("t".to_string())
            .chain(idx("x", n))
            .chain(["x_r".to_string(), "u".to_string()])
            .chain(idx("e", n))
            .chain(idx("z", n))
            .chain(std::iter::once("rho".to_string()))
            .chain(idx("varsigma", n))
            .chain(idx("V", n))
            .chain(idx("alpha", n.saturating_sub(1)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.header())?;
        for r in &self.rows {
            let fields = std::iter::once(r.t)
                .chain(r.x.iter().copied())
                .chain([r.x_r, r.u])
                .chain(r.e.iter().copied())
                .chain(r.z.iter().copied())
                .chain(std::iter::once(r.rho))
                .chain(r.varsigma.iter().copied())
                .chain(r.lyapunov.iter().copied())
                .chain(r.alpha.iter().copied())
                .map(fmt);
            out.write_record(fields)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn final_time(&self) -> Option<f64> {
        self.rows.last().map(|r| r.t)
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.rows.last().map(|r| r.x.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let t = SimulationTrace {
            order: 2,
            predefined_time: 1.0,
            preset_range: 0.1,
            shift_support: 2.0,
            jumps: vec![],
            rows: vec![],
            aborted: None,
        };
        assert_eq!(
            t.header().join(","),
            "t,x_1,x_2,x_r,u,e_1,e_2,z_1,z_2,rho,varsigma_1,varsigma_2,V_1,V_2,alpha_1"
        );
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt(3.0), "3.0000000000000000e0");
        assert_eq!(fmt(f64::INFINITY), "inf");
        let s = fmt(std::f64::consts::PI);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}
