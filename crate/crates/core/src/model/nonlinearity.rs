//! The cell nonlinearity `f` and its dissipativity certificate.
//!
//! Every nonlinearity used by the lattice must come with constants
//! `λ, β, γ > 0` such that
//!
//! ```text
//! f(s)·s ≤ −λ·s⁴ + β   and   f′(s) ≤ γ   for all real s.
//! ```
//!
//! For the FitzHugh–Nagumo cubic `f(s) = s(s − α)(1 − s)` these are known in
//! closed form (see [`assumption_constants`]). For anything else the caller
//! supplies them; [`verify_assumption`] can only spot-check by sampling.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// `s(s − α)(1 − s)`.
#[inline]
pub fn cubic_fhn(s: f64, alpha: f64) -> f64 {
    s * (s - alpha) * (1.0 - s)
}

/// Exact derivative of [`cubic_fhn`]: `−α + 2(α + 1)s − 3s²`.
#[inline]
pub fn cubic_fhn_prime(s: f64, alpha: f64) -> f64 {
    -alpha + 2.0 * (alpha + 1.0) * s - 3.0 * s * s
}

/// Certificate constants `(λ, β, γ)` for the cubic with parameter `alpha`:
/// `(1/2, 8(α + 1)⁴, 1 + α + α²)`.
pub fn assumption_constants(alpha: f64) -> Result<(f64, f64, f64)> {
    check_alpha(alpha)?;
    let lambda = 0.5;
    let beta = 8.0 * (alpha + 1.0).powi(4);
    let gamma = 1.0 + alpha + alpha * alpha;
    Ok((lambda, beta, gamma))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied scalar function together with its derivative.
#[derive(Clone)]
pub struct CustomFn {
    pub label: String,
    f: ScalarFn,
    df: ScalarFn,
}

impl CustomFn {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), f: Arc::new(f), df: Arc::new(df) }
    }

    /// Polynomial `Σ c_j s^j` with coefficients in ascending degree.
    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        let label = format!("polynomial{coefficients:?}");
        let dcoef: Vec<f64> = coefficients.iter().enumerate().skip(1).map(|(j, c)| j as f64 * c).collect();
        Self::new(label, move |s| horner(&coefficients, s), move |s| horner(&dcoef, s))
    }
}

fn horner(coefficients: &[f64], s: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn").field("label", &self.label).finish_non_exhaustive()
    }
}

/// Which scalar function drives each cell.
#[derive(Debug, Clone)]
pub enum Nonlinearity {
    Cubic { alpha: f64 },
    Custom(CustomFn),
}

impl Nonlinearity {
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Cubic { alpha } => cubic_fhn(s, *alpha),
            Nonlinearity::Custom(c) => (c.f)(s),
        }
    }

    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Cubic { alpha } => cubic_fhn_prime(s, *alpha),
            Nonlinearity::Custom(c) => (c.df)(s),
        }
    }
}

/// A nonlinearity with its certificate constants.
#[derive(Debug, Clone)]
pub struct NonlinearityCert {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub function: Nonlinearity,
}

impl NonlinearityCert {
    /// The cubic with its closed-form certificate.
    pub fn cubic(alpha: f64) -> Result<Self> {
        let (lambda, beta, gamma) = assumption_constants(alpha)?;
        Ok(Self { lambda, beta, gamma, function: Nonlinearity::Cubic { alpha } })
    }

    /// Any nonlinearity with caller-provided constants. The constants are
    /// only checked for positivity, never derived.
    pub fn new(function: Nonlinearity, lambda: f64, beta: f64, gamma: f64) -> Result<Self> {
        if let Nonlinearity::Cubic { alpha } = function {
            check_alpha(alpha)?;
        }
        let cert = Self { lambda, beta, gamma, function };
        cert.validate()?;
        Ok(cert)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        self.function.eval(s)
    }

    #[inline]
    pub fn df(&self, s: f64) -> f64 {
        self.function.derivative(s)
    }
}

/// Which certificate inequality a sample broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `f(s)·s ≤ −λs⁴ + β`
    Quartic,
    /// `f′(s) ≤ γ`
    Derivative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub s: f64,
    pub inequality: Inequality,
    /// Signed slack of the inequality; negative for a violation.
    pub margin: f64,
}

/// Outcome of sampling a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub samples: usize,
    pub violation_count: usize,
    /// The first [`AssumptionReport::MAX_LISTED`] violations in scan order.
    pub violations: Vec<Violation>,
    /// Smallest `β − λs⁴ − f(s)s` seen.
    pub min_quartic_margin: f64,
    /// Smallest `γ − f′(s)` seen.
    pub min_derivative_margin: f64,
}

impl AssumptionReport {
    pub const MAX_LISTED: usize = 64;

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks both certificate inequalities at `count` evenly spaced points of
/// `[sample_min, sample_max]`, endpoints included.
pub fn verify_assumption(
    cert: &NonlinearityCert,
    sample_min: f64,
    sample_max: f64,
    count: usize,
) -> Result<AssumptionReport> {
    if !(sample_min < sample_max) || !sample_min.is_finite() || !sample_max.is_finite() {
        return Err(invalid(format!("need sample_min < sample_max, got [{sample_min}, {sample_max}]")));
    }
    if count < 2 {
        return Err(invalid(format!("need at least 2 sample points, got {count}")));
    }
    let step = (sample_max - sample_min) / (count - 1) as f64;
    let mut report = AssumptionReport {
        samples: count,
        violation_count: 0,
        violations: Vec::new(),
        min_quartic_margin: f64::INFINITY,
        min_derivative_margin: f64::INFINITY,
    };
    let record = |report: &mut AssumptionReport, s: f64, inequality, margin: f64| {
        if margin < 0.0 || margin.is_nan() {
            report.violation_count += 1;
            if report.violations.len() < AssumptionReport::MAX_LISTED {
                report.violations.push(Violation { s, inequality, margin });
            }
        }
    };
    for j in 0..count {
        let s = if j == count - 1 { sample_max } else { sample_min + j as f64 * step };
        let s2 = s * s;
        let quartic = cert.beta - cert.lambda * s2 * s2 - cert.f(s) * s;
        let derivative = cert.gamma - cert.df(s);
        report.min_quartic_margin = report.min_quartic_margin.min(quartic);
        report.min_derivative_margin = report.min_derivative_margin.min(derivative);
        record(&mut report, s, Inequality::Quartic, quartic);
        record(&mut report, s, Inequality::Derivative, derivative);
    }
    Ok(report)
}
