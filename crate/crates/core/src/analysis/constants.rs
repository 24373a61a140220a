use crate::model::{CnnParams, System};

/// Closed-form constants of the dissipativity and synchronization estimates.
///
/// * `c1 = δ/(2b)` weights `|x|²` in the Lyapunov sum `V = Σ(c1·x² + y²)`,
///   chosen so that `c1·b − 3δ/2 = −δ`.
/// * `c2 = b/(4δλ)·(δ²/(2b) + δ/2 + 2c²/δ)²` bounds the per-cell quadratic
///   minus quartic term after completing the square.
/// * `q = [1 + (mn/δ)(c2 + δβ/b)] / min{c1, 1}` is the squared radius of
///   the absorbing ball.
/// * `threshold = q·[1 + (δ + γ + 2|c − b|)/p]` is the level the boundary
///   gap signal must exceed for the synchronization estimate to apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipativityConstants {
    pub c1: f64,
    pub c2: f64,
    pub q: f64,
    pub threshold: f64,
}

impl DissipativityConstants {
    pub fn of(system: &System) -> Self {
        let CnnParams { b, c, delta, p, .. } = system.params;
        let cert = &system.cert;
        let c1 = lyapunov_weight(&system.params);
        let inner = delta * delta / (2.0 * b) + delta / 2.0 + 2.0 * c * c / delta;
        let c2 = b / (4.0 * delta * cert.lambda) * inner * inner;
        let cells = system.dims.cells() as f64;
        let q = (1.0 + cells / delta * (c2 + delta * cert.beta / b)) / c1.min(1.0);
        let threshold = q * (1.0 + (delta + cert.gamma + 2.0 * (c - b).abs()) / p);
        Self { c1, c2, q, threshold }
    }

    /// Right side `mn·(c2 + δβ/b)` of the Lyapunov differential inequality.
    pub fn lyapunov_forcing(&self, system: &System) -> f64 {
        let CnnParams { b, delta, .. } = system.params;
        system.dims.cells() as f64 * (self.c2 + delta * system.cert.beta / b)
    }

    /// Right side `4(δ + γ + 2|c − b| + p)·q` of the gap-signal estimate.
    pub fn gap_bound(&self, system: &System) -> f64 {
        let CnnParams { b, c, delta, p, .. } = system.params;
        4.0 * (delta + system.cert.gamma + 2.0 * (c - b).abs() + p) * self.q
    }
}

/// `c1 = δ/(2b)`.
pub fn lyapunov_weight(params: &CnnParams) -> f64 {
    params.delta / (2.0 * params.b)
}

/// Upper bound on `‖(x, y)‖²` at time `t` for a trajectory whose initial
/// weighted sum `Σ(c1·x⁰² + y⁰²)` is `v0`:
/// `[e^{−δt}·v0 + (mn/δ)(c2 + δβ/b)] / min{c1, 1}`.
pub fn transient_bound(t: f64, v0: f64, system: &System) -> f64 {
    let k = DissipativityConstants::of(system);
    let delta = system.params.delta;
    let forcing = k.lyapunov_forcing(system) / delta;
    ((-delta * t).exp() * v0 + forcing) / k.c1.min(1.0)
}

/// Time after which every trajectory starting in `{‖g‖² ≤ rho}` stays in the
/// absorbing ball: `(1/δ)·log⁺(rho·max{c1, 1})`.
pub fn absorbing_entry_time(rho: f64, params: &CnnParams) -> f64 {
    let c1 = lyapunov_weight(params);
    (rho * c1.max(1.0)).ln().max(0.0) / params.delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GridDims, NonlinearityCert};

    fn system(m: usize, n: usize, params: CnnParams) -> System {
        let dims = GridDims::new(m, n).unwrap();
        System::new(dims, params, NonlinearityCert::cubic(0.5).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_values() {
        // Hand evaluation: c1 = 1/2, c2 = ½·(½ + ½ + 2)² = 4.5,
        // q = 2·[1 + 16·(4.5 + 40.5)] = 1442, threshold = 1442·(1 + 2.75).
        let k = DissipativityConstants::of(&system(4, 4, CnnParams::default()));
        assert!(rel(k.c1, 0.5) < 1e-15);
        assert!(rel(k.c2, 4.5) < 1e-15);
        assert!(rel(k.q, 1442.0) < 1e-15);
        assert!(rel(k.threshold, 5407.5) < 1e-15);
    }

    #[test]
    fn c1_branch_boundary() {
        let params = CnnParams::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        let k = DissipativityConstants::of(&system(4, 4, params));
        assert_eq!(k.c1, 1.0);
        assert_eq!(k.c1.min(1.0), 1.0);
    }

    #[test]
    fn q_linear_in_cells() {
        let params = CnnParams::new(0.3, 1.7, 0.4, 2.2, 0.9).unwrap();
        let a = DissipativityConstants::of(&system(4, 5, params));
        let b = DissipativityConstants::of(&system(8, 5, params));
        let ca = a.c1.min(1.0);
        assert!(rel(b.q * ca - 1.0, 2.0 * (a.q * ca - 1.0)) < 1e-13);
    }

    #[test]
    fn transient_bound_limits() {
        let sys = system(4, 4, CnnParams::default());
        let k = DissipativityConstants::of(&sys);
        let v0 = 12.5;
        let tail = k.lyapunov_forcing(&sys) / sys.params.delta / k.c1.min(1.0);
        assert!(rel(transient_bound(0.0, v0, &sys), (v0 + 16.0 * 45.0) / 0.5) < 1e-15);
        assert!(rel(transient_bound(1e4, v0, &sys), tail) < 1e-15);
        assert!(tail < k.q);
    }

    #[test]
    fn entry_time_cases() {
        let params = CnnParams::default();
        assert_eq!(absorbing_entry_time(0.5, &params), 0.0);
        assert_eq!(absorbing_entry_time(1.0, &params), 0.0);
        assert!((absorbing_entry_time(std::f64::consts::E, &params) - 1.0).abs() < 1e-15);
        let slow = CnnParams { delta: 0.5, ..params };
        assert!((absorbing_entry_time(std::f64::consts::E, &slow) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entry_time_kills_initial_term() {
        // For t ≥ T(ρ), e^{−δt}·V0 ≤ 1 whenever V0 ≤ ρ·max{c1, 1}.
        let params = CnnParams::new(1.0, 0.2, 1.0, 0.8, 1.0).unwrap();
        let c1 = lyapunov_weight(&params);
        assert!(c1 > 1.0);
        for rho in [2.0, 40.0, 1e5] {
            let t = absorbing_entry_time(rho, &params);
            let v0 = rho * c1.max(1.0);
            assert!((-params.delta * t).exp() * v0 <= 1.0 + 1e-12);
        }
    }
}
