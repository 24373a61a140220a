use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Smallest admissible number of rows or columns.
pub const MIN_SIDE: usize = 4;

/// Lattice shape: `m` rows by `n` columns.
///
/// `h_x` and `h_y` locate the cells at `(i·h_x, k·h_y)` but never enter the
/// dynamics; they are carried as metadata for output files only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDims {
    pub m: usize,
    pub n: usize,
    #[serde(default = "unit_spacing")]
    pub h_x: f64,
    #[serde(default = "unit_spacing")]
    pub h_y: f64,
}

fn unit_spacing() -> f64 {
    1.0
}

impl GridDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Self::with_spacing(m, n, 1.0, 1.0)
    }

    pub fn with_spacing(m: usize, n: usize, h_x: f64, h_y: f64) -> Result<Self> {
        let dims = Self { m, n, h_x, h_y };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < MIN_SIDE || self.n < MIN_SIDE {
            return Err(invalid(format!("m, n must be ≥ {MIN_SIDE} (got m = {}, n = {})", self.m, self.n)));
        }
        if !(self.h_x > 0.0 && self.h_x.is_finite()) || !(self.h_y > 0.0 && self.h_y.is_finite()) {
            return Err(invalid(format!(
                "h_x, h_y must be positive (got h_x = {}, h_y = {})",
                self.h_x, self.h_y
            )));
        }
        Ok(())
    }

    /// Number of cells `m·n`.
    pub fn cells(&self) -> usize {
        self.m * self.n
    }

    /// Storage offset of the logical 1-based cell `(i, k)`.
    ///
    /// This is the single place where periodic wrap is resolved: row 0 is
    /// row `m`, row `m + 1` is row 1, and likewise for columns. Any integer
    /// index is accepted and reduced modulo the side length.
    #[inline]
    pub fn offset(&self, i: isize, k: isize) -> usize {
        let r = (i - 1).rem_euclid(self.m as isize) as usize;
        let c = (k - 1).rem_euclid(self.n as isize) as usize;
        r * self.n + c
    }
}

/// A real scalar field over the lattice, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(dims: &GridDims) -> Self {
        Self::constant(dims, 0.0)
    }

    pub fn constant(dims: &GridDims, value: f64) -> Self {
        Self { m: dims.m, n: dims.n, data: vec![value; dims.cells()] }
    }

    /// Builds a field from row-major data.
    pub fn from_vec(dims: &GridDims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.cells() {
            return Err(invalid(format!(
                "field has {} entries, expected {}×{} = {}",
                data.len(),
                dims.m,
                dims.n,
                dims.cells()
            )));
        }
        Ok(Self { m: dims.m, n: dims.n, data })
    }

    /// Builds a field by evaluating `value(i, k)` at 1-based indices.
    pub fn from_fn(dims: &GridDims, mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims.cells());
        for i in 1..=dims.m {
            for k in 1..=dims.n {
                data.push(value(i, k));
            }
        }
        Self { m: dims.m, n: dims.n, data }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Value at the logical 1-based cell `(i, k)`, no wrap.
    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        debug_assert!((1..=self.m).contains(&i) && (1..=self.n).contains(&k));
        self.data[(i - 1) * self.n + (k - 1)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, value: f64) {
        debug_assert!((1..=self.m).contains(&i) && (1..=self.n).contains(&k));
        self.data[(i - 1) * self.n + (k - 1)] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Euclidean inner product with another field of the same shape.
    pub fn dot(&self, other: &Field) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// True when every entry equals the first one bit for bit.
    pub fn is_uniform(&self) -> bool {
        self.data.iter().all(|v| *v == self.data[0])
    }

    pub fn check_shape(&self, dims: &GridDims) -> Result<()> {
        if self.m != dims.m || self.n != dims.n {
            return Err(invalid(format!(
                "field shape {}×{} does not match grid {}×{}",
                self.m, self.n, dims.m, dims.n
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field { m: self.m, n: self.n, data: self.data.iter().map(|v| v * factor).collect() }
    }
}

/// The system state at one instant: potentials `x` and recovery variables `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub x: Field,
    pub y: Field,
}

impl GridState {
    pub fn new(x: Field, y: Field) -> Result<Self> {
        if x.m != y.m || x.n != y.n {
            return Err(invalid("x and y fields differ in shape"));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(invalid("state contains non-finite entries"));
        }
        Ok(Self { x, y })
    }

    pub fn zeros(dims: &GridDims) -> Self {
        Self::uniform(dims, 0.0, 0.0)
    }

    pub fn uniform(dims: &GridDims, x: f64, y: f64) -> Self {
        Self { x: Field::constant(dims, x), y: Field::constant(dims, y) }
    }

    /// Independent uniform draws in `[−amplitude, amplitude]` for every entry
    /// of `x` then `y`, reproducible from `seed`.
    pub fn random(dims: &GridDims, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |_: usize, _: usize| {
            if amplitude > 0.0 {
                rng.gen_range(-amplitude..=amplitude)
            } else {
                0.0
            }
        };
        let x = Field::from_fn(dims, &mut draw);
        let y = Field::from_fn(dims, &mut draw);
        Self { x, y }
    }

    pub fn check_shape(&self, dims: &GridDims) -> Result<()> {
        self.x.check_shape(dims)?;
        self.y.check_shape(dims)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}
