//! Dissipativity constants, synchronization metrics and the monitors that
//! check the differential inequalities along simulated runs.

mod constants;
pub mod fit;
mod metrics;
pub mod monitors;

pub use constants::{absorbing_entry_time, lyapunov_weight, transient_bound, DissipativityConstants};
pub use fit::{default_fit_window, fit_exponential_rate, fit_exponential_rate_in, RateFit};
pub use metrics::{
    boundary_gap_sq, difference_fields, divergence_identity_residual, lyapunov_v, state_norm_sq, sync_error,
    DifferenceFields, ScalarRecord, ScalarSeries,
};
pub use monitors::{
    lyapunov_inequality_check, sync_decay_check, InequalityViolation, LyapunovReport, SyncDecayReport,
};
