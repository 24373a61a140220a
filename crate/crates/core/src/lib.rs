//! Lattice FitzHugh–Nagumo cellular neural network on an `m × n` torus with
//! boundary feedback control.
//!
//! Each cell `(i, k)` carries a potential `x` and a recovery variable `y`:
//!
//! ```text
//! dx/dt = a·Δx + f(x) − b·y + p·u
//! dy/dt = c·x − δ·y
//! ```
//!
//! where `Δ` is the periodic five-point Laplacian and `u` injects the gap
//! between opposite boundary rows and columns. The crate is split into
//!
//! * [`model`]: lattice geometry, parameters, the nonlinearity and its
//!   certificate `(λ, β, γ)`, and the right-hand side;
//! * [`integrate`]: fixed-step RK4 and sampled trajectories;
//! * [`analysis`]: the closed-form dissipativity constants, synchronization
//!   metrics, differential-inequality monitors and decay-rate fitting.

pub mod analysis;
mod error;
pub mod integrate;
pub mod model;

pub use analysis::{DissipativityConstants, ScalarRecord, ScalarSeries};
pub use error::{Error, Result};
pub use integrate::{rk4_step, simulate, StepperConfig, Trajectory};
pub use model::{
    CnnParams, ControlField, Field, GridDims, GridState, Nonlinearity, NonlinearityCert, System,
};
