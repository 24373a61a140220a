//! The four subcommands, as library functions returning serializable reports.

use std::path::Path;

use fhn_cnn::analysis::fit::DEFAULT_FLOOR;
use fhn_cnn::analysis::{
    absorbing_entry_time, default_fit_window, divergence_identity_residual, fit_exponential_rate_in,
    lyapunov_inequality_check, sync_decay_check,
};
use fhn_cnn::model::verify_assumption;
use fhn_cnn::{
    rk4_step, simulate, DissipativityConstants, Error, GridState, StepperConfig, System, Trajectory,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsReport {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub threshold: f64,
}

impl From<DissipativityConstants> for ConstantsReport {
    fn from(k: DissipativityConstants) -> Self {
        Self { c1: k.c1, c2: k.c2, q: k.q, threshold: k.threshold }
    }
}

#[derive(Debug, Serialize)]
pub struct ConstantsOutput {
    #[serde(flatten)]
    pub constants: ConstantsReport,
    pub m: usize,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub p: f64,
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn constants(cfg: &RunConfig) -> Result<ConstantsOutput, CliError> {
    let sys = cfg.system()?;
    let p = sys.params;
    Ok(ConstantsOutput {
        constants: DissipativityConstants::of(&sys).into(),
        m: sys.dims.m,
        n: sys.dims.n,
        a: p.a,
        b: p.b,
        c: p.c,
        delta: p.delta,
        p: p.p,
        lambda: sys.cert.lambda,
        beta: sys.cert.beta,
        gamma: sys.cert.gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSummary {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorbingSummary {
    /// Initial `‖(x, y)‖²`.
    pub rho: f64,
    /// Entry time guaranteed by the dissipativity estimate for that radius.
    pub guaranteed_entry_time: f64,
    /// First sample time after which every sample has `‖(x, y)‖² < Q`;
    /// `None` if the last sample is outside.
    pub observed_entry_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovSummary {
    pub passed: bool,
    pub checked: usize,
    pub forcing: f64,
    pub worst_margin: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyncDecaySummary {
    pub passed: bool,
    pub interior: usize,
    pub hypothesis_samples: usize,
    pub violations: usize,
    pub max_conclusion: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub samples: usize,
    pub t_final: f64,
    pub final_norm_sq: f64,
    pub final_sync_error: f64,
    /// Share of samples at which the threshold hypothesis held.
    pub fired_fraction: f64,
    pub constants: ConstantsReport,
    /// Exponential fit of the sync error over the default window.
    pub fit: Option<FitSummary>,
    pub absorbing: AbsorbingSummary,
    /// Absent with fewer than three samples.
    pub lyapunov_check: Option<LyapunovSummary>,
    pub sync_decay_check: Option<SyncDecaySummary>,
}

pub fn summarize(traj: &Trajectory, sys: &System) -> RunSummary {
    let k = DissipativityConstants::of(sys);
    let series = &traj.series;
    let times = &series.times;
    let e = series.sync_errors();
    let first = series.records[0];
    let last = *series.records.last().expect("trajectory is non-empty");

    let fit = default_fit_window(times, &e, DEFAULT_FLOOR)
        .and_then(|w| fit_exponential_rate_in(times, &e, DEFAULT_FLOOR, w).ok())
        .map(|f| FitSummary {
            rate: f.rate,
            intercept: f.intercept,
            r_squared: f.r_squared,
            window: f.window,
            samples: f.samples,
        });

    let observed_entry_time = match series.records.iter().rposition(|r| r.norm_sq >= k.q) {
        None => Some(times[0]),
        Some(j) => times.get(j + 1).copied(),
    };

    RunSummary {
        samples: series.len(),
        t_final: *times.last().expect("trajectory is non-empty"),
        final_norm_sq: last.norm_sq,
        final_sync_error: last.sync_error,
        fired_fraction: series.fired_fraction(),
        constants: k.into(),
        fit,
        absorbing: AbsorbingSummary {
            rho: first.norm_sq,
            guaranteed_entry_time: absorbing_entry_time(first.norm_sq, &sys.params),
            observed_entry_time,
        },
        lyapunov_check: lyapunov_inequality_check(series, sys).ok().map(|r| LyapunovSummary {
            passed: r.passed(),
            checked: r.checked,
            forcing: r.forcing,
            worst_margin: r.worst_margin,
            violations: r.violations.len(),
        }),
        sync_decay_check: sync_decay_check(series, sys).ok().map(|r| SyncDecaySummary {
            passed: r.passed(),
            interior: r.interior,
            hypothesis_samples: r.hypothesis_samples.len(),
            violations: r.violations.len(),
            max_conclusion: r.max_conclusion,
        }),
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Runs one simulation and writes the configured outputs.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let sys = cfg.system()?;
    let init = cfg.initial_state()?;
    let traj = simulate(&sys, &init, &cfg.stepper)?;
    let summary = summarize(&traj, &sys);

    let dir = &cfg.outputs.directory;
    create_dir(dir)?;
    output::write_text(&dir.join("scalars.csv"), &output::scalars_csv(&traj.series))?;
    if cfg.outputs.wants(OutputFormat::States) {
        output::write_states_jsonl(&dir.join("states.jsonl"), &traj)?;
    }
    if cfg.outputs.wants(OutputFormat::Summary) {
        output::write_json(&dir.join("summary.json"), &summary)?;
    }
    if cfg.outputs.wants(OutputFormat::Svg) {
        let svg = output::sync_error_svg(&traj.series.times, &traj.series.sync_errors());
        output::write_text(&dir.join("sync_error.svg"), &svg)?;
    }
    Ok(summary)
}

pub const SWEEP_HEADER: &str =
    "a,p,status,last_finite_time,final_sync_error,rate,r_squared,fired_fraction,Q,threshold";

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Finished(Box<RunSummary>),
    Diverged { last_finite_time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub a: f64,
    pub p: f64,
    pub constants: ConstantsReport,
    pub outcome: CellOutcome,
}

impl SweepRow {
    /// Empty fields stand for values that do not exist for this cell.
    pub fn to_csv(&self) -> String {
        let f = output::fmt_f64;
        let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
        let (status, last, e, rate, r2, fired) = match &self.outcome {
            CellOutcome::Finished(s) => (
                "ok",
                None,
                Some(s.final_sync_error),
                s.fit.map(|x| x.rate),
                s.fit.map(|x| x.r_squared),
                Some(s.fired_fraction),
            ),
            CellOutcome::Diverged { last_finite_time } => {
                ("diverged", Some(*last_finite_time), None, None, None, None)
            }
        };
        format!(
            "{},{},{status},{},{},{},{},{},{},{}",
            f(self.a),
            f(self.p),
            opt(last),
            opt(e),
            opt(rate),
            opt(r2),
            opt(fired),
            f(self.constants.q),
            f(self.constants.threshold)
        )
    }
}

/// Runs every `(a, p)` cell of `cfg.sweep` on `jobs` threads. Rows come
/// back in grid order (`a` outer, `p` inner) whatever the scheduling.
pub fn sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    let grid = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep: missing `sweep` section with `a` and `p` grids".into()))?;
    cfg.system()?;
    let init = cfg.initial_state()?;
    let cells: Vec<(f64, f64)> = grid.a.iter().flat_map(|a| grid.p.iter().map(move |p| (*a, *p))).collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("--jobs: {e}")))?;

    let run_cell = |&(a, p): &(f64, f64)| -> Result<SweepRow, CliError> {
        let mut cell = cfg.clone();
        cell.params.a = a;
        cell.params.p = p;
        let sys = cell.system()?;
        let constants = DissipativityConstants::of(&sys).into();
        let outcome = match simulate(&sys, &init, &cell.stepper) {
            Ok(traj) => CellOutcome::Finished(Box::new(summarize(&traj, &sys))),
            Err(Error::Divergence { last_finite_time, .. }) => CellOutcome::Diverged { last_finite_time },
            Err(e) => return Err(e.into()),
        };
        Ok(SweepRow { a, p, constants, outcome })
    };
    let rows = pool.install(|| cells.par_iter().map(run_cell).collect::<Result<Vec<_>, _>>())?;

    let dir = &cfg.outputs.directory;
    create_dir(dir)?;
    output::write_text(&dir.join("sweep.csv"), &sweep_csv(&rows))?;
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    /// Slack of the check; negative on failure.
    pub margin: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

const IDENTITY_FIELDS: u64 = 100;
const IDENTITY_TOL: f64 = 1e-10;
const ASSUMPTION_RANGE: f64 = 50.0;
const ASSUMPTION_SAMPLES: usize = 1_000_001;
const ORDER_TOL: f64 = 0.3;
const MONITOR_SPAN: f64 = 5.0;

fn check(name: &'static str, passed: bool, margin: Option<f64>, detail: String) -> CheckResult {
    let status = if passed { CheckStatus::Pass } else { CheckStatus::Fail };
    CheckResult { name, status, margin, detail }
}

fn diverged(name: &'static str, err: &Error) -> Option<CheckResult> {
    match err {
        Error::Divergence { last_finite_time, .. } => Some(CheckResult {
            name,
            status: CheckStatus::Diverged,
            margin: None,
            detail: format!("state became non-finite after t = {last_finite_time}"),
        }),
        _ => None,
    }
}

fn identity_check(sys: &System, seed: u64) -> Result<CheckResult, CliError> {
    let mut worst: f64 = 0.0;
    for j in 0..IDENTITY_FIELDS {
        let x = GridState::random(&sys.dims, 5.0, seed.wrapping_add(j)).x;
        worst = worst.max(divergence_identity_residual(&x, sys.params.a, &sys.dims)?);
    }
    Ok(check(
        "divergence_identity",
        worst <= IDENTITY_TOL,
        Some(IDENTITY_TOL - worst),
        format!(
            "{IDENTITY_FIELDS} random fields, worst relative residual {worst:.3e} (tol {IDENTITY_TOL:e})"
        ),
    ))
}

fn assumption_check(sys: &System) -> Result<CheckResult, CliError> {
    let r = verify_assumption(&sys.cert, -ASSUMPTION_RANGE, ASSUMPTION_RANGE, ASSUMPTION_SAMPLES)?;
    let mut detail = format!(
        "{} samples on [-{ASSUMPTION_RANGE}, {ASSUMPTION_RANGE}], {} violations, quartic margin {:.3e}, derivative margin {:.3e}",
        r.samples, r.violation_count, r.min_quartic_margin, r.min_derivative_margin
    );
    if let Some(v) = r.violations.first() {
        detail.push_str(&format!(", first at s = {} ({:?})", v.s, v.inequality));
    }
    let margin = r.min_quartic_margin.min(r.min_derivative_margin);
    Ok(check("assumption_certificate", r.passed(), Some(margin), detail))
}

fn max_distance(a: &GridState, b: &GridState) -> f64 {
    a.x.as_slice()
        .iter()
        .zip(b.x.as_slice())
        .chain(a.y.as_slice().iter().zip(b.y.as_slice()))
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

fn integrate_steps(sys: &System, init: &GridState, dt: f64, steps: usize) -> Result<GridState, Error> {
    let mut s = init.clone();
    for step in 0..steps {
        s = rk4_step(sys, &s, dt).map_err(|e| match e {
            Error::Divergence { .. } => {
                Error::Divergence { last_finite_time: step as f64 * dt, step: step as u64 + 1 }
            }
            other => other,
        })?;
    }
    Ok(s)
}

/// Step-halving estimate of the global order over `t ∈ [0, ~1]`.
fn order_check(sys: &System, seed: u64) -> Result<CheckResult, CliError> {
    const NAME: &str = "rk4_order";
    let p = sys.params;
    let stiffness = 8.0 * p.a + 4.0 * p.p + p.delta + sys.cert.gamma + p.b + p.c;
    let dt = (1.0 / stiffness).min(0.025);
    let steps = (1.0 / dt).ceil() as usize;
    let init = GridState::random(&sys.dims, 1.0, seed);
    let run = |h: f64, n: usize| integrate_steps(sys, &init, h, n);
    let result = run(dt / 16.0, steps * 16).and_then(|reference| {
        let coarse = max_distance(&run(dt, steps)?, &reference);
        let fine = max_distance(&run(dt / 2.0, steps * 2)?, &reference);
        Ok((coarse, fine))
    });
    match result {
        Ok((coarse, fine)) => {
            let order = (coarse / fine).log2();
            let margin = ORDER_TOL - (order - 4.0).abs();
            Ok(check(
                NAME,
                margin >= 0.0,
                margin.is_finite().then_some(margin),
                format!(
                    "dt = {dt}, {steps} steps, errors {coarse:.3e} / {fine:.3e}, observed order {order:.3}"
                ),
            ))
        }
        Err(e) => diverged(NAME, &e).ok_or_else(|| e.into()),
    }
}

fn monitor_checks(cfg: &RunConfig, sys: &System) -> Result<[CheckResult; 2], CliError> {
    let dt = cfg.stepper.dt;
    let stepper = StepperConfig::new(dt, cfg.stepper.t_end.min(MONITOR_SPAN).max(3.0 * dt), 1)?;
    let init = cfg.initial_state()?;
    let traj = match simulate(sys, &init, &stepper) {
        Ok(t) => t,
        Err(e) => {
            let lyap = diverged("lyapunov_inequality", &e).ok_or_else(|| CliError::from(e.clone()))?;
            let sync = diverged("sync_decay", &e).expect("divergence");
            return Ok([lyap, sync]);
        }
    };
    let span = format!("t ∈ [0, {}] every step", stepper.time_of(stepper.steps()));
    let lyap = lyapunov_inequality_check(&traj.series, sys)?;
    let lyap_check = check(
        "lyapunov_inequality",
        lyap.passed(),
        Some(lyap.worst_margin),
        format!(
            "{span}: {} samples, {} violations, worst bound − lhs {:.3e}",
            lyap.checked,
            lyap.violations.len(),
            lyap.worst_margin
        ),
    );
    let sync = sync_decay_check(&traj.series, sys)?;
    let sync_check = check(
        "sync_decay",
        sync.passed(),
        sync.max_conclusion.map(|m| -m),
        format!(
            "{span}: hypothesis held at {}/{} samples, {} violations{}",
            sync.hypothesis_samples.len(),
            sync.interior,
            sync.violations.len(),
            sync.max_conclusion.map(|m| format!(", max dE/dt + 2δE = {m:.3e}")).unwrap_or_default()
        ),
    );
    Ok([lyap_check, sync_check])
}

/// Numerical self-checks for the configured lattice.
pub fn verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    let sys = cfg.system()?;
    let seed = cfg.seed();
    let mut checks = vec![identity_check(&sys, seed)?, assumption_check(&sys)?, order_check(&sys, seed)?];
    checks.extend(monitor_checks(cfg, &sys)?);
    let passed = checks.iter().all(|c| c.status == CheckStatus::Pass);
    Ok(VerifyReport { passed, checks })
}
