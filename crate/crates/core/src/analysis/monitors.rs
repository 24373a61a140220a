//! Pointwise checks of the differential inequalities along sampled runs.
//!
//! Derivatives are centred differences on the stored samples. The slack
//! allowed at sample `j` is `1e-6 + 10·h²·|s_j|`, where `h` is the half-width
//! of the centred stencil and `s_j` is the monitored quantity.

use crate::analysis::metrics::hypothesis_holds;
use crate::analysis::{DissipativityConstants, ScalarSeries};
use crate::error::{invalid, Result};
use crate::model::System;

const ABS_TOL: f64 = 1e-6;
const STEP_TOL_FACTOR: f64 = 10.0;

fn tolerance(h: f64, scale: f64) -> f64 {
    ABS_TOL + STEP_TOL_FACTOR * h * h * scale.abs()
}

/// Centred difference at interior sample `j` plus the stencil half-width.
fn centred(times: &[f64], values: &[f64], j: usize) -> (f64, f64) {
    let span = times[j + 1] - times[j - 1];
    ((values[j + 1] - values[j - 1]) / span, 0.5 * span)
}

fn require_interior(series: &ScalarSeries) -> Result<()> {
    if series.len() < 3 {
        return Err(invalid(format!("inequality checks need at least 3 samples, got {}", series.len())));
    }
    if series.records.len() != series.times.len() {
        return Err(invalid("scalar series times and records differ in length"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityViolation {
    pub index: usize,
    pub t: f64,
    /// Estimated left side of the inequality.
    pub lhs: f64,
    /// The bound it should not exceed.
    pub bound: f64,
    pub tol: f64,
}

/// Result of checking `dV/dt + δV ≤ mn(c2 + δβ/b)` at every interior sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovReport {
    pub checked: usize,
    pub forcing: f64,
    pub violations: Vec<InequalityViolation>,
    /// Smallest `bound − lhs` over the checked samples.
    pub worst_margin: f64,
}

impl LyapunovReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn lyapunov_inequality_check(series: &ScalarSeries, system: &System) -> Result<LyapunovReport> {
    require_interior(series)?;
    let k = DissipativityConstants::of(system);
    let forcing = k.lyapunov_forcing(system);
    let delta = system.params.delta;
    let v: Vec<f64> = series.records.iter().map(|r| r.lyapunov_v).collect();
    let mut report =
        LyapunovReport { checked: 0, forcing, violations: Vec::new(), worst_margin: f64::INFINITY };
    for j in 1..series.len() - 1 {
        let (dv, h) = centred(&series.times, &v, j);
        let lhs = dv + delta * v[j];
        let tol = tolerance(h, v[j]);
        report.checked += 1;
        report.worst_margin = report.worst_margin.min(forcing - lhs);
        if !(lhs <= forcing + tol) {
            report.violations.push(InequalityViolation {
                index: j,
                t: series.times[j],
                lhs,
                bound: forcing,
                tol,
            });
        }
    }
    Ok(report)
}

/// Result of the conditional decay check `dE/dt + 2δE < 0` on the samples
/// where the instantaneous threshold hypothesis holds.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncDecayReport {
    pub interior: usize,
    /// Interior sample indices where the hypothesis held.
    pub hypothesis_samples: Vec<usize>,
    pub violations: Vec<InequalityViolation>,
    /// Largest `dE/dt + 2δE` over the hypothesis samples.
    pub max_conclusion: Option<f64>,
}

impl SyncDecayReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fired_fraction(&self) -> f64 {
        if self.interior == 0 {
            0.0
        } else {
            self.hypothesis_samples.len() as f64 / self.interior as f64
        }
    }
}

/// The hypothesis at sample `j` is recomputed from the stored norm and gap:
/// `‖(x, y)‖² < Q` and `4p·G > 4(δ + γ + 2|c − b| + p)·Q`.
pub fn sync_decay_check(series: &ScalarSeries, system: &System) -> Result<SyncDecayReport> {
    require_interior(series)?;
    let k = DissipativityConstants::of(system);
    let two_delta = 2.0 * system.params.delta;
    let e: Vec<f64> = series.records.iter().map(|r| r.sync_error).collect();
    let mut report = SyncDecayReport {
        interior: series.len() - 2,
        hypothesis_samples: Vec::new(),
        violations: Vec::new(),
        max_conclusion: None,
    };
    for j in 1..series.len() - 1 {
        let r = &series.records[j];
        if !hypothesis_holds(r.norm_sq, r.boundary_gap_sq, system, &k) {
            continue;
        }
        report.hypothesis_samples.push(j);
        let (de, h) = centred(&series.times, &e, j);
        let lhs = de + two_delta * e[j];
        let tol = tolerance(h, e[j]);
        report.max_conclusion = Some(report.max_conclusion.map_or(lhs, |m: f64| m.max(lhs)));
        if !(lhs < tol) {
            report.violations.push(InequalityViolation {
                index: j,
                t: series.times[j],
                lhs,
                bound: 0.0,
                tol,
            });
        }
    }
    Ok(report)
}
