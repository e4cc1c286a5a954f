use std::f64::consts::PI;

use super::curvature_at;
use crate::error::{Error, Result};
use crate::geometry::metric::MetricField;

/// `max_β |∇_α G^α_β|`, with `∂_α G^α_β` from second-order central
/// differences of the exactly computed `G^α_β` and exact Christoffel terms.
///
/// The stencil needs `4h` of room in the time direction (when the metric has
/// a time domain) and, for angular coordinates named `theta*`, away from the
/// poles of the chart.
pub fn einstein_divergence_residual(metric: &dyn MetricField, event: &[f64], h: f64) -> Result<f64> {
    let d = metric.dim();
    let outside = || Error::StencilOutsideDomain { event: event.to_vec(), step: h };
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    if let Some((lo, hi)) = metric.time_domain() {
        if event[0] - 4.0 * h < lo || event[0] + 4.0 * h >= hi {
            return Err(outside());
        }
    }
    let names = metric.coordinate_names();
    for (i, name) in names.iter().enumerate().skip(1) {
        let last_angle = i + 1 == d;
        if name.starts_with("theta") && !last_angle && (event[i] - 4.0 * h <= 0.0 || event[i] + 4.0 * h >= PI) {
            return Err(outside());
        }
    }
    let center = curvature_at(metric, event)?;
    let mixed = center.einstein_mixed();
    let gamma = &center.christoffel;
    let mut worst: f64 = 0.0;
    let mut derivative = vec![vec![0.0; d]; d];
    for a in 0..d {
        let mut plus = event.to_vec();
        let mut minus = event.to_vec();
        plus[a] += h;
        minus[a] -= h;
        let gp = curvature_at(metric, &plus)?.einstein_mixed();
        let gm = curvature_at(metric, &minus)?.einstein_mixed();
        for b in 0..d {
            derivative[a][b] = (gp[(a, b)] - gm[(a, b)]) / (2.0 * h);
        }
    }
    for b in 0..d {
        let mut div = 0.0;
        for a in 0..d {
            div += derivative[a][b];
            for e in 0..d {
                div += gamma[[a, a, e]] * mixed[(e, b)] - gamma[[e, a, b]] * mixed[(a, e)];
            }
        }
        worst = worst.max(div.abs());
    }
    Ok(worst)
}
