//! Riemann, Ricci, scalar and Einstein tensors at an event.
//!
//! Conventions: `R^α_{βγδ} = ∂_γΓ^α_{βδ} − ∂_δΓ^α_{βγ} + Γ^α_{γλ}Γ^λ_{βδ} −
//! Γ^α_{δλ}Γ^λ_{βγ}`, `R_{αβγδ} = g_{αμ}R^μ_{βγδ}`, `R_{βδ} = R^α_{βαδ}`.
//! The round unit sphere has positive scalar curvature `n(n−1)`.

mod conformal;
mod divergence;

pub use conformal::{conformal_residuals, conformal_residuals_for, ConformalResiduals};
pub use divergence::einstein_divergence_residual;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::geometry::connection::ConnectionJets;
use crate::geometry::metric::{values, MetricField};
use crate::jet::Jet;
use crate::tensor::{Tensor3, Tensor4};

#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `Γ^α_{βγ}` indexed `[[α, β, γ]]`.
    pub christoffel: Tensor3,
    /// `R^α_{βγδ}` indexed `[[α, β, γ, δ]]`.
    pub riemann: Tensor4,
    pub riemann_lower: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// `G_{αβ} = R_{αβ} − ½R g_{αβ}`.
    pub einstein: DMatrix<f64>,
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `G^α_β`, row α, column β.
    pub fn einstein_mixed(&self) -> DMatrix<f64> {
        &self.g_inv * &self.einstein
    }

    /// `G^{αβ}`.
    pub fn einstein_upper(&self) -> DMatrix<f64> {
        &self.g_inv * &self.einstein * &self.g_inv
    }

    /// `G_{αβ}v^α w^β`.
    pub fn einstein_pair(&self, v: &[f64], w: &[f64]) -> f64 {
        bilinear(&self.einstein, v, w)
    }

    /// `R_{αβ}v^α v^β`.
    pub fn ricci_quadratic(&self, v: &[f64]) -> f64 {
        bilinear(&self.ricci, v, v)
    }
}

pub(crate) fn bilinear(m: &DMatrix<f64>, v: &[f64], w: &[f64]) -> f64 {
    let (v, w) = (DVector::from_column_slice(v), DVector::from_column_slice(w));
    (v.transpose() * m * w)[(0, 0)]
}

/// Curvature from metric jets of order ≥ 2 in any dimension.
pub fn curvature_from_jets(g: Vec<Vec<Jet>>, event: &[f64]) -> Result<CurvatureBundle> {
    assert!(g[0][0].order() >= 2, "curvature needs second derivatives of the metric");
    let conn = ConnectionJets::from_metric(g, event)?;
    Ok(curvature_from_connection(&conn))
}

pub(crate) fn curvature_from_connection(conn: &ConnectionJets) -> CurvatureBundle {
    let d = conn.dim;
    let gv = values(&conn.g);
    let g_inv = values(&conn.g_inv);
    let christoffel = conn.christoffel();
    let riemann = Tensor4::from_fn(d, |a, b, c, e| {
        let mut r = conn.gamma(a, b, e).d1(c) - conn.gamma(a, b, c).d1(e);
        for l in 0..d {
            r += christoffel[[a, c, l]] * christoffel[[l, b, e]] - christoffel[[a, e, l]] * christoffel[[l, b, c]];
        }
        r
    });
    let riemann_lower =
        Tensor4::from_fn(d, |a, b, c, e| (0..d).map(|m| gv[(a, m)] * riemann[[m, b, c, e]]).sum());
    let ricci = DMatrix::from_fn(d, d, |b, e| (0..d).map(|a| riemann[[a, b, a, e]]).sum());
    let scalar = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| g_inv[(a, b)] * ricci[(a, b)]).sum();
    let einstein = &ricci - &gv * (0.5 * scalar);
    CurvatureBundle { g: gv, g_inv, christoffel, riemann, riemann_lower, ricci, scalar, einstein }
}

pub fn curvature_at(metric: &dyn MetricField, event: &[f64]) -> Result<CurvatureBundle> {
    curvature_from_jets(metric.metric_jets(event, 2)?, event)
}

/// Largest violation of the algebraic Riemann symmetries and the first
/// Bianchi identity, relative to `max |R_{αβγδ}|` (or 1).
pub fn symmetry_defect(bundle: &CurvatureBundle) -> f64 {
    let r = &bundle.riemann_lower;
    let d = bundle.dim();
    let scale = r.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let v = r[[a, b, c, e]];
                    worst = worst
                        .max((v + r[[b, a, c, e]]).abs())
                        .max((v + r[[a, b, e, c]]).abs())
                        .max((v - r[[c, e, a, b]]).abs())
                        .max((v + r[[a, c, e, b]] + r[[a, e, b, c]]).abs());
                }
            }
        }
    }
    worst / scale
}
