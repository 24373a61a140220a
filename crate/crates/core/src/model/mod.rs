//! Lattice, parameters, coupling operators and the right-hand side.

mod grid;
pub mod nonlinearity;

use serde::{Deserialize, Serialize};

pub use grid::{Field, GridDims, GridState, MIN_SIDE};
pub use nonlinearity::{
    assumption_constants, cubic_fhn, cubic_fhn_prime, verify_assumption, AssumptionReport, CustomFn,
    Inequality, Nonlinearity, NonlinearityCert, Violation,
};

use crate::error::{invalid, Result};

/// Structural parameters of the lattice equations. All strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnnParams {
    /// Nearest-neighbour coupling strength.
    pub a: f64,
    /// Recovery feedback into `x`.
    pub b: f64,
    /// Drive of `x` into `y`.
    pub c: f64,
    /// Decay rate of `y`.
    pub delta: f64,
    /// Boundary feedback gain.
    pub p: f64,
}

impl CnnParams {
    pub fn new(a: f64, b: f64, c: f64, delta: f64, p: f64) -> Result<Self> {
        let params = Self { a, b, c, delta, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("delta", self.delta), ("p", self.p)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("parameter {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for CnnParams {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0, c: 1.0, delta: 1.0, p: 1.0 }
    }
}

/// Boundary feedback signal, kept as its row part and column part.
///
/// The row part lives on rows 1 and `m` and pulls each pair of opposite
/// boundary cells toward each other; the column part does the same for
/// columns 1 and `n`. The signal seen by a cell is their sum, so a corner
/// cell receives both.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    pub row: Field,
    pub column: Field,
}

impl ControlField {
    /// `u_{ik}` = row part + column part.
    pub fn total(&self) -> Field {
        let mut u = self.row.clone();
        for (t, c) in u.as_mut_slice().iter_mut().zip(self.column.as_slice()) {
            *t += c;
        }
        u
    }
}

/// The 4-neighbour sum minus four times the centre, with periodic wrap.
/// The coupling strength is not applied.
pub fn discrete_laplacian(x: &Field, dims: &GridDims) -> Result<Field> {
    x.check_shape(dims)?;
    let mut out = Field::zeros(dims);
    laplacian_into(x.as_slice(), dims, out.as_mut_slice());
    Ok(out)
}

/// Row and column feedback parts for the potential field `x`.
pub fn boundary_feedback(x: &Field, dims: &GridDims) -> Result<ControlField> {
    x.check_shape(dims)?;
    let (m, n) = (dims.m, dims.n);
    let mut row = Field::zeros(dims);
    let mut column = Field::zeros(dims);
    for k in 1..=n {
        let gap = x.get(m, k) - x.get(1, k);
        row.set(1, k, gap);
        row.set(m, k, -gap);
    }
    for i in 1..=m {
        let gap = x.get(i, n) - x.get(i, 1);
        column.set(i, 1, gap);
        column.set(i, n, -gap);
    }
    Ok(ControlField { row, column })
}

#[inline]
fn laplacian_at(x: &[f64], dims: &GridDims, i: isize, k: isize) -> f64 {
    x[dims.offset(i - 1, k)] + x[dims.offset(i + 1, k)] + x[dims.offset(i, k - 1)] + x[dims.offset(i, k + 1)]
        - 4.0 * x[dims.offset(i, k)]
}

fn laplacian_into(x: &[f64], dims: &GridDims, out: &mut [f64]) {
    for i in 1..=dims.m as isize {
        for k in 1..=dims.n as isize {
            out[dims.offset(i, k)] = laplacian_at(x, dims, i, k);
        }
    }
}

/// Total feedback `u_{ik}` at one cell, zero off the boundary.
#[inline]
fn feedback_at(x: &[f64], dims: &GridDims, i: usize, k: usize) -> f64 {
    let (m, n) = (dims.m, dims.n);
    let at = |r: usize, c: usize| x[(r - 1) * n + (c - 1)];
    let mut u = 0.0;
    if i == 1 {
        u += at(m, k) - at(1, k);
    }
    if i == m {
        u += at(1, k) - at(m, k);
    }
    if k == 1 {
        u += at(i, n) - at(i, 1);
    }
    if k == n {
        u += at(i, 1) - at(i, n);
    }
    u
}

/// A fully specified lattice: geometry, parameters and certified nonlinearity.
#[derive(Debug, Clone)]
pub struct System {
    pub dims: GridDims,
    pub params: CnnParams,
    pub cert: NonlinearityCert,
}

impl System {
    pub fn new(dims: GridDims, params: CnnParams, cert: NonlinearityCert) -> Result<Self> {
        dims.validate()?;
        params.validate()?;
        cert.validate()?;
        Ok(Self { dims, params, cert })
    }

    /// Time derivative of `state`.
    pub fn rhs(&self, state: &GridState) -> Result<GridState> {
        state.check_shape(&self.dims)?;
        let mut out = GridState::zeros(&self.dims);
        self.rhs_into(state, &mut out);
        Ok(out)
    }

    /// Writes the time derivative of `state` into `out`; shapes must
    /// already agree with `self.dims`.
    pub(crate) fn rhs_into(&self, state: &GridState, out: &mut GridState) {
        let CnnParams { a, b, c, delta, p } = self.params;
        let dims = &self.dims;
        let x = state.x.as_slice();
        let y = state.y.as_slice();
        let dx = out.x.as_mut_slice();
        for i in 1..=dims.m {
            for k in 1..=dims.n {
                let idx = (i - 1) * dims.n + (k - 1);
                let lap = laplacian_at(x, dims, i as isize, k as isize);
                let u = feedback_at(x, dims, i, k);
                dx[idx] = a * lap + self.cert.f(x[idx]) - b * y[idx] + p * u;
            }
        }
        for ((dy, xv), yv) in out.y.as_mut_slice().iter_mut().zip(x).zip(y) {
            *dy = c * xv - delta * yv;
        }
    }
}
