//! Sequence extrapolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Extrapolation {
    /// Accelerated sequence `A_k`, one shorter by two than the input.
    pub accelerated: Vec<f64>,
    pub limit: f64,
    /// Magnitude of the last correction `|A_last − x_last|`.
    pub error: f64,
}

/// Aitken's Δ² process: `A_k = x_{k+2} − (Δx_{k+1})² / Δ²x_k`.
///
/// A vanishing second difference means the last three terms are in
/// arithmetic progression; the term itself is kept and the correction is 0
/// for a constant tail, `|Δx|` otherwise.
pub fn aitken(sequence: &[f64]) -> Result<Extrapolation> {
    if sequence.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: sequence.len() });
    }
    let mut accelerated = Vec::with_capacity(sequence.len() - 2);
    let mut error = 0.0;
    for w in sequence.windows(3) {
        let (d0, d1) = (w[1] - w[0], w[2] - w[1]);
        let den = d1 - d0;
        let (value, correction) = if den != 0.0 && den.is_finite() {
            let c = d1 * d1 / den;
            (w[2] - c, c.abs())
        } else {
            (w[2], d1.abs())
        };
        accelerated.push(value);
        error = correction;
    }
    let limit = *accelerated.last().unwrap();
    Ok(Extrapolation { accelerated, limit, error })
}

/// `|x_{k+1} − x_k| / max(|x_{k+1}|, tiny)` for consecutive terms.
pub fn relative_increments(sequence: &[f64]) -> Vec<f64> {
    sequence.windows(2).map(|w| (w[1] - w[0]).abs() / w[1].abs().max(f64::MIN_POSITIVE)).collect()
}

/// Geometric schedule `a · 2^{−k}`, `k = 0..=count`.
pub fn geometric_schedule(a: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|k| a * 0.5f64.powi(k as i32)).collect()
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
