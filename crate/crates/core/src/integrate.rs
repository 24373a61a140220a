//! Fixed-step classical Runge–Kutta integration and sampled trajectories.
//!
//! The step size is fixed. The scheme is explicit, so `dt` must shrink when
//! `a·max(m, n)²` or the feedback gain `p` grows; a step that produces a
//! non-finite value aborts with [`Error::Divergence`] instead of carrying
//! NaNs forward.

use serde::{Deserialize, Serialize};

use crate::analysis::{DissipativityConstants, ScalarRecord, ScalarSeries};
use crate::error::{invalid, Error, Result};
use crate::model::{Field, GridState, System};

/// Step size, horizon and sampling stride.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Store every `sample_every`-th step; step 0 is always stored.
    pub sample_every: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 50.0, sample_every: 10 }
    }
}

impl StepperConfig {
    pub fn new(dt: f64, t_end: f64, sample_every: usize) -> Result<Self> {
        let cfg = Self { dt, t_end, sample_every };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end must be at least dt, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(invalid("sample_every must be at least 1"));
        }
        Ok(())
    }

    /// Number of whole steps that fit in `[0, t_end]`.
    pub fn steps(&self) -> u64 {
        // Relative fuzz so that e.g. 50 / 0.001 counts as 50000 steps.
        (self.t_end / self.dt * (1.0 + 1e-12)).floor() as u64
    }

    /// Stored samples, including `t = 0`.
    pub fn sample_count(&self) -> usize {
        (self.steps() / self.sample_every as u64) as usize + 1
    }

    /// Time of step `step`, computed from the integer count.
    pub fn time_of(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }
}

/// Sampled solution: states aligned with the derived scalar series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<GridState>,
    pub series: ScalarSeries,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.series.times
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last_state(&self) -> &GridState {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

/// Scratch buffers for one RK4 step.
struct Rk4Workspace {
    k1: GridState,
    k2: GridState,
    k3: GridState,
    k4: GridState,
    stage: GridState,
}

impl Rk4Workspace {
    fn new(system: &System) -> Self {
        let z = GridState::zeros(&system.dims);
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), stage: z }
    }

    fn step(&mut self, system: &System, state: &mut GridState, dt: f64) {
        let half = 0.5 * dt;
        system.rhs_into(state, &mut self.k1);
        axpy_into(&mut self.stage, state, half, &self.k1);
        system.rhs_into(&self.stage, &mut self.k2);
        axpy_into(&mut self.stage, state, half, &self.k2);
        system.rhs_into(&self.stage, &mut self.k3);
        axpy_into(&mut self.stage, state, dt, &self.k3);
        system.rhs_into(&self.stage, &mut self.k4);

        let sixth = dt / 6.0;
        rk4_combine(&mut state.x, sixth, [&self.k1.x, &self.k2.x, &self.k3.x, &self.k4.x]);
        rk4_combine(&mut state.y, sixth, [&self.k1.y, &self.k2.y, &self.k3.y, &self.k4.y]);
    }
}

fn rk4_combine(target: &mut Field, sixth: f64, k: [&Field; 4]) {
    let [k1, k2, k3, k4] = k.map(Field::as_slice);
    for (j, v) in target.as_mut_slice().iter_mut().enumerate() {
        *v += sixth * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
}

/// `out = base + h·dir`, entrywise over both fields.
fn axpy_into(out: &mut GridState, base: &GridState, h: f64, dir: &GridState) {
    let pairs = [
        (out.x.as_mut_slice(), base.x.as_slice(), dir.x.as_slice()),
        (out.y.as_mut_slice(), base.y.as_slice(), dir.y.as_slice()),
    ];
    for (o, b, d) in pairs {
        for ((o, b), d) in o.iter_mut().zip(b).zip(d) {
            *o = b + h * d;
        }
    }
}

/// One classical RK4 step of size `dt`.
pub fn rk4_step(system: &System, state: &GridState, dt: f64) -> Result<GridState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    state.check_shape(&system.dims)?;
    let mut next = state.clone();
    Rk4Workspace::new(system).step(system, &mut next, dt);
    if !next.is_finite() {
        return Err(Error::Divergence { last_finite_time: 0.0, step: 1 });
    }
    Ok(next)
}

/// Integrates from `initial` over `[0, cfg.t_end]`, storing every
/// `cfg.sample_every`-th state together with its scalar diagnostics.
pub fn simulate(system: &System, initial: &GridState, cfg: &StepperConfig) -> Result<Trajectory> {
    cfg.validate()?;
    initial.check_shape(&system.dims)?;
    if !initial.is_finite() {
        return Err(invalid("initial state contains non-finite entries"));
    }
    let constants = DissipativityConstants::of(system);
    let capacity = cfg.sample_count();
    let mut states = Vec::with_capacity(capacity);
    let mut series = ScalarSeries::with_capacity(capacity);

    let mut record = |states: &mut Vec<GridState>, state: &GridState, step: u64| {
        series.push(cfg.time_of(step), ScalarRecord::measure(state, system, &constants));
        states.push(state.clone());
    };

    let mut state = initial.clone();
    record(&mut states, &state, 0);
    let mut ws = Rk4Workspace::new(system);
    let steps = cfg.steps();
    let stride = cfg.sample_every as u64;
    for step in 1..=steps {
        ws.step(system, &mut state, cfg.dt);
        if !state.is_finite() {
            return Err(Error::Divergence { last_finite_time: cfg.time_of(step - 1), step });
        }
        if step % stride == 0 {
            record(&mut states, &state, step);
        }
    }
    Ok(Trajectory { states, series })
}
