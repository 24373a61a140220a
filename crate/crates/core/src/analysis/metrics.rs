use crate::analysis::DissipativityConstants;
use crate::error::Result;
use crate::model::{discrete_laplacian, Field, GridDims, GridState, System};

/// `‖(x, y)‖² = Σ (x² + y²)`.
pub fn state_norm_sq(state: &GridState) -> f64 {
    state.x.sum_sq() + state.y.sum_sq()
}

/// Lyapunov sum `Σ (c1·x² + y²)`.
pub fn lyapunov_v(state: &GridState, c1: f64) -> f64 {
    c1 * state.x.sum_sq() + state.y.sum_sq()
}

/// Periodic backward differences between adjacent cells.
///
/// `gamma`/`v` difference `x`/`y` along rows (`(i, k)` minus `(i − 1, k)`),
/// `pi`/`w` along columns (`(i, k)` minus `(i, k − 1)`). Index 0 wraps to
/// the last row or column.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceFields {
    pub gamma: Field,
    pub v: Field,
    pub pi: Field,
    pub w: Field,
}

fn row_difference(f: &Field, dims: &GridDims) -> Field {
    let s = f.as_slice();
    Field::from_fn(dims, |i, k| {
        let (i, k) = (i as isize, k as isize);
        s[dims.offset(i, k)] - s[dims.offset(i - 1, k)]
    })
}

fn column_difference(f: &Field, dims: &GridDims) -> Field {
    let s = f.as_slice();
    Field::from_fn(dims, |i, k| {
        let (i, k) = (i as isize, k as isize);
        s[dims.offset(i, k)] - s[dims.offset(i, k - 1)]
    })
}

fn dims_of(state: &GridState) -> GridDims {
    GridDims { m: state.x.rows(), n: state.x.cols(), h_x: 1.0, h_y: 1.0 }
}

pub fn difference_fields(state: &GridState) -> DifferenceFields {
    let dims = dims_of(state);
    DifferenceFields {
        gamma: row_difference(&state.x, &dims),
        v: row_difference(&state.y, &dims),
        pi: column_difference(&state.x, &dims),
        w: column_difference(&state.y, &dims),
    }
}

/// Synchronization error `E = Σ (Γ² + V² + Π² + W²)`.
pub fn sync_error(state: &GridState) -> f64 {
    let d = difference_fields(state);
    d.gamma.sum_sq() + d.v.sum_sq() + d.pi.sum_sq() + d.w.sum_sq()
}

/// Boundary gap signal `G = Σ_k (x_{m,k} − x_{1,k})² + Σ_i (x_{i,n} − x_{i,1})²`.
pub fn boundary_gap_sq(state: &GridState) -> f64 {
    let x = &state.x;
    let (m, n) = (x.rows(), x.cols());
    let rows: f64 = (1..=n).map(|k| (x.get(m, k) - x.get(1, k)).powi(2)).sum();
    let cols: f64 = (1..=m).map(|i| (x.get(i, n) - x.get(i, 1)).powi(2)).sum();
    rows + cols
}

/// Relative mismatch `|lhs − rhs| / (1 + |rhs|)` in the summation-by-parts
/// identity `Σ a·Δx·x = −a Σ (x_{ik} − x_{i−1,k})² − a Σ (x_{ik} − x_{i,k−1})²`.
pub fn divergence_identity_residual(x: &Field, a: f64, dims: &GridDims) -> Result<f64> {
    let lap = discrete_laplacian(x, dims)?;
    let lhs = a * lap.dot(x);
    let rhs = -a * row_difference(x, dims).sum_sq() - a * column_difference(x, dims).sum_sq();
    Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
}

/// Scalar diagnostics of one sampled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarRecord {
    pub norm_sq: f64,
    pub lyapunov_v: f64,
    pub sync_error: f64,
    pub boundary_gap_sq: f64,
    /// Instantaneous threshold hypothesis: inside the absorbing ball and
    /// `4p·G > 4(δ + γ + 2|c − b| + p)·Q`.
    pub threshold_fired: bool,
}

impl ScalarRecord {
    pub fn measure(state: &GridState, system: &System, k: &DissipativityConstants) -> Self {
        let norm_sq = state_norm_sq(state);
        let boundary_gap_sq = boundary_gap_sq(state);
        Self {
            norm_sq,
            lyapunov_v: lyapunov_v(state, k.c1),
            sync_error: sync_error(state),
            boundary_gap_sq,
            threshold_fired: hypothesis_holds(norm_sq, boundary_gap_sq, system, k),
        }
    }
}

pub(crate) fn hypothesis_holds(norm_sq: f64, gap: f64, system: &System, k: &DissipativityConstants) -> bool {
    norm_sq < k.q && 4.0 * system.params.p * gap > k.gap_bound(system)
}

/// Time-aligned scalar diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarSeries {
    pub times: Vec<f64>,
    pub records: Vec<ScalarRecord>,
}

impl ScalarSeries {
    pub fn with_capacity(n: usize) -> Self {
        Self { times: Vec::with_capacity(n), records: Vec::with_capacity(n) }
    }

    pub fn push(&mut self, t: f64, record: ScalarRecord) {
        self.times.push(t);
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sync_errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sync_error).collect()
    }

    pub fn fired_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.threshold_fired).count() as f64 / self.len() as f64
    }
}
