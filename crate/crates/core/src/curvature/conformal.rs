use nalgebra::DMatrix;

use super::curvature_at;
use crate::error::Result;
use crate::geometry::arw::ARWSpec;
use crate::geometry::connection::ConnectionJets;
use crate::geometry::metric::{MetricField, SpacetimeMetric};

/// Residuals of the conformal transformation laws for Ricci and scalar
/// curvature between `ḡ = e^{2ψ̃}g̃` and `g̃`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConformalResiduals {
    /// max-abs over components of `R̄_{αβ} − [R̃_{αβ} − (n−1)(ψ̃_{αβ} − ψ̃_αψ̃_β) − g̃_{αβ}(Δψ̃ + (n−1)|Dψ̃|²)]`.
    pub ricci: f64,
    /// `|R̄ − e^{−2ψ̃}[R̃ − 2nΔψ̃ − n(n−1)|Dψ̃|²]|`.
    pub scalar: f64,
    /// `max |R̄_{αβ}|`, for relative comparisons.
    pub ricci_scale: f64,
    /// `Σ_α |R̄^α_α|`, the size of the terms whose sum is `R̄`.
    pub scalar_scale: f64,
}

pub fn conformal_residuals(spec: &ARWSpec, event: &[f64]) -> Result<ConformalResiduals> {
    conformal_residuals_for(&spec.metric()?, event)
}

pub fn conformal_residuals_for(metric: &SpacetimeMetric, event: &[f64]) -> Result<ConformalResiduals> {
    let n = metric.n() as f64;
    let full = curvature_at(metric, event)?;
    let tilde_metric = metric.without_conformal_factor();
    let tilde = curvature_at(&tilde_metric, event)?;
    let conn = ConnectionJets::at(&tilde_metric, event, 1)?;
    let d = metric.dim();

    let psi = metric.conformal_factor().jet(event, 2)?;
    let grad: Vec<f64> = (0..d).map(|a| psi.d1(a)).collect();
    let hessian = DMatrix::from_fn(d, d, |a, b| {
        psi.d2(a, b) - (0..d).map(|c| conn.gamma(c, a, b).value() * grad[c]).sum::<f64>()
    });
    let gi = &tilde.g_inv;
    let mut laplacian = 0.0;
    let mut grad_sq = 0.0;
    for a in 0..d {
        for b in 0..d {
            laplacian += gi[(a, b)] * hessian[(a, b)];
            grad_sq += gi[(a, b)] * grad[a] * grad[b];
        }
    }
    let predicted = DMatrix::from_fn(d, d, |a, b| {
        tilde.ricci[(a, b)]
            - (n - 1.0) * (hessian[(a, b)] - grad[a] * grad[b])
            - tilde.g[(a, b)] * (laplacian + (n - 1.0) * grad_sq)
    });
    let ricci = (&full.ricci - &predicted).abs().max();
    let predicted_scalar =
        (-2.0 * psi.value()).exp() * (tilde.scalar - 2.0 * n * laplacian - n * (n - 1.0) * grad_sq);
    Ok(ConformalResiduals {
        ricci,
        scalar: (full.scalar - predicted_scalar).abs(),
        ricci_scale: full.ricci.abs().max(),
        scalar_scale: (&full.g_inv * &full.ricci).diagonal().abs().sum(),
    })
}
