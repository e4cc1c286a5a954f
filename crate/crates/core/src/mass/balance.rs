use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::Serialize;

use super::slice_mass_integral_in;
use crate::curvature::curvature_at;
use crate::error::{Error, Result};
use crate::geometry::arw::ARWSpec;
use crate::geometry::quadrature::QuadratureGrid;
use crate::hypersurface::coordinate_slice_curvature;

/// Divergence-theorem balance over the slab `[τ₁, τ₂] × S^n`.
///
/// `B_i = ∫_{M_{τ_i}} G(ν, η) e^{ωf}e^{ψ}` with `ν` taken future-directed on
/// both slices (so `ν = η`), and
/// `V = ∫_Ω [G^{ij}h̄_ij + G^{00}(ωf′ + ψ′)e^{ψ̃}] e^{ωf}e^{ψ}`.
/// The identity is `B₂ − B₁ = V`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlabBalance {
    pub tau1: f64,
    pub tau2: f64,
    pub b1: f64,
    pub b2: f64,
    pub volume: f64,
    /// `|B₂ − B₁ − V|`.
    pub absolute_residual: f64,
    /// `|B₂ − B₁ − V| / max(|B₁|, |B₂|, |V|, 1)`.
    pub residual: f64,
}

/// Gauss–Legendre nodes in `τ` for the volume term.
pub const SLAB_TIME_NODES: usize = 32;

pub fn slab_balance(spec: &ARWSpec, tau1: f64, tau2: f64, grid: &QuadratureGrid) -> Result<SlabBalance> {
    slab_balance_with(spec, tau1, tau2, grid, SLAB_TIME_NODES)
}

pub fn slab_balance_with(
    spec: &ARWSpec,
    tau1: f64,
    tau2: f64,
    grid: &QuadratureGrid,
    time_nodes: usize,
) -> Result<SlabBalance> {
    if !(spec.domain_start() <= tau1 && tau1 < tau2 && tau2 < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need {} <= tau1 < tau2 < 0, got [{tau1}, {tau2}]",
            spec.domain_start()
        )));
    }
    let metric = spec.metric()?;
    let b1 = slice_mass_integral_in(spec, &metric, tau1, grid)?;
    let b2 = slice_mass_integral_in(spec, &metric, tau2, grid)?;
    let n = spec.n();
    let rule = GaussLegendre::new(NonZeroUsize::new(time_nodes.max(1)).unwrap());
    let half = 0.5 * (tau2 - tau1);
    let mut volume = 0.0;
    for &(x, w) in rule.as_node_weight_pairs() {
        let tau = tau1 + half * (x + 1.0);
        let d = spec.f().derivatives(tau)?;
        let layer = grid.integrate_density(|angles| {
            let mut event = vec![tau];
            event.extend_from_slice(angles);
            let bundle = curvature_at(&metric, &event)?;
            let upper = bundle.einstein_upper();
            let hbar = coordinate_slice_curvature(&metric, tau, angles)?;
            let (psi, psi_rate) = spec.psi_and_rate(tau, angles[0])?;
            let psi_tilde = d[0] + psi;
            let mut spatial = 0.0;
            for i in 0..n {
                for j in 0..n {
                    spatial += upper[(i + 1, j + 1)] * hbar[(i, j)];
                }
            }
            let temporal = upper[(0, 0)] * (spec.omega() * d[1] + psi_rate) * psi_tilde.exp();
            let weight = (spec.omega() * d[0] + psi).exp();
            let volume_element = bundle.g.determinant().abs().sqrt();
            Ok((spatial + temporal) * weight * volume_element)
        })?;
        volume += w * half * layer;
    }
    let absolute_residual = (b2 - b1 - volume).abs();
    let scale = b1.abs().max(b2.abs()).max(volume.abs()).max(1.0);
    Ok(SlabBalance { tau1, tau2, b1, b2, volume, absolute_residual, residual: absolute_residual / scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn rw_slab() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        let b = slab_balance(&spec, -0.5, -0.25, &QuadratureGrid::axisymmetric(3, 16).unwrap()).unwrap();
        assert!(b.residual <= 1e-6, "{b:?}");
        assert!(b.volume < 0.0);
    }

    #[test]
    fn perturbed_slab() {
        let spec = ARWSpec::new(
            2,
            1.0,
            parse("log(-tau)").unwrap(),
            parse("0.2*tau^2*cos(theta)").unwrap(),
            parse("0.1*tau*cos(theta)").unwrap(),
            -1.0,
        )
        .unwrap();
        let b = slab_balance(&spec, -0.6, -0.3, &QuadratureGrid::axisymmetric(2, 32).unwrap()).unwrap();
        assert!(b.residual <= 1e-8, "{b:?}");
    }
}
