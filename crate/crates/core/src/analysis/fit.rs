use crate::error::{invalid, Error, Result};

/// Samples at or below this level are excluded from rate fits.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// Least-squares fit of `ln E = intercept − rate·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    /// Coefficient of determination; 0 when `ln E` has no spread.
    pub r_squared: f64,
    /// First and last time actually used.
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fits an exponential decay rate to every sample with `value > floor`.
pub fn fit_exponential_rate(times: &[f64], values: &[f64], floor: f64) -> Result<RateFit> {
    fit_exponential_rate_in(times, values, floor, (f64::NEG_INFINITY, f64::INFINITY))
}

/// As [`fit_exponential_rate`], restricted to samples with `t` in `window`.
pub fn fit_exponential_rate_in(
    times: &[f64],
    values: &[f64],
    floor: f64,
    window: (f64, f64),
) -> Result<RateFit> {
    if times.len() != values.len() {
        return Err(invalid("times and values differ in length"));
    }
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= window.0 && **t <= window.1 && **v > floor && v.is_finite())
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData { usable: points.len(), needed: 2 });
    }
    let n = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let l_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut stl, mut sll) = (0.0, 0.0, 0.0);
    for (t, l) in &points {
        let (dt, dl) = (t - t_mean, l - l_mean);
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    if stt == 0.0 {
        return Err(invalid("all usable samples share one time value"));
    }
    let slope = stl / stt;
    let intercept = l_mean - slope * t_mean;
    let r_squared = if sll > 0.0 {
        let ss_res: f64 = points.iter().map(|(t, l)| (l - intercept - slope * t).powi(2)).sum();
        (1.0 - ss_res / sll).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(RateFit {
        // `+ 0.0` turns a −0.0 slope into 0.0.
        rate: -slope + 0.0,
        intercept,
        r_squared,
        window: (points[0].0, points[points.len() - 1].0),
        samples: points.len(),
    })
}

/// Post-transient window: the second half of the span over which `values`
/// is still above `floor`. `None` if no sample after the first is above it.
pub fn default_fit_window(times: &[f64], values: &[f64], floor: f64) -> Option<(f64, f64)> {
    let start = *times.first()?;
    let last = times.iter().zip(values).rev().find(|(_, v)| **v > floor && v.is_finite())?.0;
    if *last <= start {
        return None;
    }
    Some((start + 0.5 * (last - start), *last))
}
