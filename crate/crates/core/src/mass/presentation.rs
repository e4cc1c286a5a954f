use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expression, Function};
use crate::geometry::arw::ARWSpec;
use crate::geometry::field::{ExprProfile, RescaledProfile, ReparametrizedProfile, TimeProfile};
use crate::geometry::quadrature::{round_sphere_metric, sphere_volume, QuadratureGrid};

use super::DEFAULT_NODES;

fn tau() -> Expression {
    Expression::var("tau")
}

/// The same spacetime with `σ̄ ↦ c·σ̄`. The time coordinate is rescaled by
/// `τ′ = √c·τ` and `f ↦ f − ½ log c` so the metric keeps its Gaussian form.
pub fn rescale_presentation(spec: &ARWSpec, c: f64) -> Result<ARWSpec> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale factor {c} must be positive")));
    }
    let root = c.sqrt();
    let shift = -0.5 * c.ln();
    let back = Expression::div(tau(), Expression::num(root));
    let f: Arc<dyn TimeProfile> = match spec.f().expression() {
        Some(e) => Arc::new(ExprProfile::new(Expression::add(e.substitute("tau", &back), Expression::num(shift)))?),
        None => Arc::new(RescaledProfile::new(spec.f().clone(), root, shift)),
    };
    spec.with_sphere_scale(spec.sphere_scale() * c)?
        .with_profile(f, spec.domain_start() * root)?
        .with_effective_perturbations(spec.psi().substitute("tau", &back), spec.lambda().substitute("tau", &back))
}

/// Volume of the limit sphere `∫ sqrt(det σ)` as `τ → 0`.
fn limit_volume(spec: &ARWSpec) -> Result<f64> {
    let n = spec.n();
    let tau0 = spec.domain_start() * 1e-12;
    let grid = QuadratureGrid::axisymmetric(n, DEFAULT_NODES)?;
    grid.integrate_density(|angles| {
        let lambda = spec.lambda().eval_slots(&["tau", "theta1"], &[tau0, angles[0]])?;
        let det = round_sphere_metric(angles).determinant() * (spec.sphere_scale() * (2.0 * lambda).exp()).powi(n as i32);
        Ok(det.abs().sqrt())
    })
}

/// Rescales so the limit sphere has the volume of the unit `S^n`.
/// Returns the normalized spec and `λ = (|S^n|/Vol)^{2/n}`.
pub fn normalize(spec: &ARWSpec) -> Result<(ARWSpec, f64)> {
    let vol = limit_volume(spec)?;
    let lambda = (sphere_volume(spec.n()) / vol).powf(2.0 / spec.n() as f64);
    Ok((rescale_presentation(spec, lambda)?, lambda))
}

/// Changes time by `τ = φ(s) = s + εs²`, with `λ̃ = λ∘φ − log φ′`. The
/// conformal factor becomes `f∘φ + log φ′ + ψ∘φ`.
///
/// When `f` has an expression the profile is kept as `f` and the smooth
/// remainder `f∘φ − f + log φ′` joins `ψ̃`, so `f̃″ + γ̃|f̃′|²` keeps its limit.
/// Otherwise `f̃ = f∘φ + log φ′`.
pub fn reparametrize_time(spec: &ARWSpec, epsilon: f64) -> Result<ARWSpec> {
    if epsilon == 0.0 {
        return Ok(spec.clone());
    }
    let a = spec.domain_start();
    let disc = 1.0 + 4.0 * epsilon * a;
    if !(disc > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "s + {epsilon}s^2 is not increasing on the domain starting at {a}"
        )));
    }
    let start = (disc.sqrt() - 1.0) / (2.0 * epsilon);
    let phi = Expression::add(tau(), Expression::mul(Expression::num(epsilon), Expression::pow(tau(), Expression::num(2.0))));
    let log_dphi = Expression::call(
        Function::Log,
        Expression::add(Expression::num(1.0), Expression::mul(Expression::num(2.0 * epsilon), tau())),
    );
    let psi = spec.psi().substitute("tau", &phi);
    let lambda = Expression::sub(spec.lambda().substitute("tau", &phi), log_dphi.clone());
    match spec.f().expression() {
        Some(e) => {
            let remainder = Expression::add(Expression::sub(e.substitute("tau", &phi), e.clone()), log_dphi);
            spec.with_profile(spec.f().clone(), start)?
                .with_effective_perturbations(Expression::add(remainder, psi), lambda)
        }
        None => {
            let f: Arc<dyn TimeProfile> = Arc::new(ReparametrizedProfile::new(spec.f().clone(), epsilon));
            spec.with_profile(f, start)?.with_effective_perturbations(psi, lambda)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::MetricField;
    use crate::sads::{as_arw_spec, SAdSParams};

    fn metric_at(spec: &ARWSpec, event: &[f64]) -> Vec<f64> {
        let m = spec.metric().unwrap();
        let jets = m.metric_jets(event, 0).unwrap();
        jets.iter().flat_map(|row| row.iter().map(|j| j.value()).collect::<Vec<_>>()).collect()
    }

    #[test]
    fn normalized_spec_is_identity() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        let (s, l) = normalize(&spec).unwrap();
        assert!((l - 1.0).abs() < 1e-13);
        assert!((s.domain_start() + 1.0).abs() < 1e-13);
    }

    #[test]
    fn scaled_sphere_normalizes_to_quarter() {
        let spec = ARWSpec::rw_family(2, 1.0, 1.0, -1.0).unwrap().with_sphere_scale(4.0).unwrap();
        let (s, l) = normalize(&spec).unwrap();
        assert!((l - 0.25).abs() < 1e-13);
        assert!((s.sphere_scale() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rescale_preserves_the_tensor() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        let c: f64 = 1.21;
        let s = rescale_presentation(&spec, c).unwrap();
        let x = [-0.4, 0.7, 1.1, 2.0];
        let y = [-0.4 * c.sqrt(), 0.7, 1.1, 2.0];
        let (g, h) = (metric_at(&spec, &x), metric_at(&s, &y));
        // dτ′ = √c dτ on the time-time entry
        for (i, (p, q)) in g.iter().zip(&h).enumerate() {
            let q = if i == 0 { q * c } else { *q };
            assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0), "{i}: {p} {q}");
        }
    }

    #[test]
    fn reparametrization_preserves_the_tensor() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        for eps in [0.1, -0.1] {
            let s = reparametrize_time(&spec, eps).unwrap();
            assert!((s.domain_start() + eps * s.domain_start().powi(2) + 1.0).abs() < 1e-14);
            let sv = -0.3;
            let dphi = 1.0 + 2.0 * eps * sv;
            let g = metric_at(&spec, &[sv + eps * sv * sv, 0.7, 1.1, 2.0]);
            let h = metric_at(&s, &[sv, 0.7, 1.1, 2.0]);
            for (i, (p, q)) in g.iter().zip(&h).enumerate() {
                let p = if i == 0 { p * dphi * dphi } else { *p };
                assert!((p - q).abs() <= 1e-10 * p.abs().max(1.0), "{eps} {i}: {p} {q}");
            }
        }
    }

    #[test]
    fn reparametrize_profile_without_expression() {
        let p = SAdSParams::new(3, 0.0, 1.0).unwrap();
        let spec = as_arw_spec(&p).unwrap();
        let s = reparametrize_time(&spec, 0.05).unwrap();
        assert!(s.f().expression().is_none());
        assert!(s.f().derivatives(-0.2).unwrap()[1] < 0.0);
    }

    #[test]
    fn rejects_non_monotone_map() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        assert!(matches!(reparametrize_time(&spec, 0.3), Err(Error::InvalidArgument(_))));
    }
}
