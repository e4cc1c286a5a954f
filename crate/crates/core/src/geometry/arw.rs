//! Asymptotically Robertson–Walker presentations and their validator.

use std::sync::Arc;

use serde::Serialize;

use super::field::{ExprField, ExprProfile, TimeProfile};
use super::metric::{coordinate_names, ConformalFactor, SpacetimeMetric, SpatialMetric};
use crate::error::{Error, Result};
use crate::expr::{parse, Expression, Function};
use crate::limits::{aitken, relative_increments};

/// An ARW spacetime `e^{2(f+ψ)}(−dτ² + scale·e^{2λ}σ̄)` on `[a, 0) × S^n`.
///
/// `psi` and `lambda` are stored exactly as used in the metric. User input
/// that depends on the polar angle is multiplied by `sin²θ₁` on the way in so
/// that it vanishes to second order at the poles.
#[derive(Debug, Clone)]
pub struct ARWSpec {
    n: usize,
    omega: f64,
    f: Arc<dyn TimeProfile>,
    psi: Expression,
    lambda: Expression,
    a: f64,
    scale: f64,
}

fn regularize(expr: Expression, what: &str) -> Result<Expression> {
    let expr = expr.substitute("theta", &Expression::var("theta1")).fold_constants();
    if let Some(v) = expr.free_variables().into_iter().find(|v| v != "tau" && v != "theta1") {
        return Err(Error::InvalidSpec(format!("{what} may depend on `tau` and `theta` only, found `{v}`")));
    }
    if expr.depends_on("theta1") {
        let s2 = Expression::pow(Expression::call(Function::Sin, Expression::var("theta1")), Expression::num(2.0));
        Ok(Expression::mul(s2, expr))
    } else {
        Ok(expr)
    }
}

impl ARWSpec {
    /// Builds a spec from user expressions: `f` in `tau`; `psi`, `lambda` in
    /// `tau` and `theta` (or `theta1`).
    pub fn new(
        n: usize,
        omega: f64,
        f: Expression,
        psi: Expression,
        lambda: Expression,
        a: f64,
    ) -> Result<ARWSpec> {
        let profile: Arc<dyn TimeProfile> = Arc::new(ExprProfile::new(f)?);
        let psi = regularize(psi, "psi")?;
        let lambda = regularize(lambda, "lambda")?;
        let spec = ARWSpec { n, omega, f: profile, psi, lambda, a, scale: 1.0 };
        spec.check()?;
        Ok(spec)
    }

    /// A spec with `ψ = λ = 0` and the given time profile.
    pub fn from_profile(n: usize, omega: f64, f: Arc<dyn TimeProfile>, a: f64) -> Result<ARWSpec> {
        let zero = Expression::num(0.0);
        let spec = ARWSpec { n, omega, f, psi: zero.clone(), lambda: zero, a, scale: 1.0 };
        spec.check()?;
        Ok(spec)
    }

    /// The family `f = (1/γ̃)·log(−kτ)` with `ψ = λ = 0`.
    pub fn rw_family(n: usize, omega: f64, k: f64, a: f64) -> Result<ARWSpec> {
        let gamma = (n as f64 + omega - 2.0) / 2.0;
        if gamma <= 0.0 {
            return Err(Error::InvalidSpec(format!("n + omega - 2 = {} must be positive", 2.0 * gamma)));
        }
        if k <= 0.0 {
            return Err(Error::InvalidSpec(format!("k = {k} must be positive")));
        }
        let f = parse("(1/g)*log(-k*tau)")?
            .substitute("g", &Expression::num(gamma))
            .substitute("k", &Expression::num(k));
        ARWSpec::new(n, omega, f, Expression::num(0.0), Expression::num(0.0), a)
    }

    fn check(&self) -> Result<()> {
        if !(2..=3).contains(&self.n) {
            return Err(Error::Unsupported(format!("spatial dimension {} (supported: 2, 3)", self.n)));
        }
        if !(self.a < 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidSpec(format!("domain start a = {} must be negative", self.a)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidSpec(format!("sphere scale {} must be positive", self.scale)));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidSpec("omega must be finite".into()));
        }
        let near = self.a * 1e-10;
        for (name, e) in [("psi", &self.psi), ("lambda", &self.lambda)] {
            for theta in [0.3, 1.2, 2.5] {
                let v = e.eval_slots(&["tau", "theta1"], &[near, theta])?;
                if v.abs() > 1e-6 {
                    return Err(Error::InvalidSpec(format!("{name} must vanish as tau -> 0 (value {v} near 0)")));
                }
            }
        }
        Ok(())
    }

    /// Replaces the perturbations with expressions used verbatim.
    pub(crate) fn with_effective_perturbations(&self, psi: Expression, lambda: Expression) -> Result<ARWSpec> {
        let spec = ARWSpec { psi: psi.fold_constants(), lambda: lambda.fold_constants(), ..self.clone() };
        spec.check()?;
        Ok(spec)
    }

    pub(crate) fn with_profile(&self, f: Arc<dyn TimeProfile>, a: f64) -> Result<ARWSpec> {
        let spec = ARWSpec { f, a, ..self.clone() };
        spec.check()?;
        Ok(spec)
    }

    /// Same spec with `σ̄` replaced by `scale·σ̄`.
    pub fn with_sphere_scale(&self, scale: f64) -> Result<ARWSpec> {
        let spec = ARWSpec { scale, ..self.clone() };
        spec.check()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `γ̃ = (n + ω − 2)/2`.
    pub fn gamma_tilde(&self) -> f64 {
        (self.n as f64 + self.omega - 2.0) / 2.0
    }

    pub fn f(&self) -> &Arc<dyn TimeProfile> {
        &self.f
    }

    pub fn psi(&self) -> &Expression {
        &self.psi
    }

    pub fn lambda(&self) -> &Expression {
        &self.lambda
    }

    pub fn domain_start(&self) -> f64 {
        self.a
    }

    pub fn sphere_scale(&self) -> f64 {
        self.scale
    }

    /// Whether `ψ` or `λ` depend on the polar angle.
    pub fn is_angular(&self) -> bool {
        self.psi.depends_on("theta1") || self.lambda.depends_on("theta1")
    }

    pub fn psi_field(&self) -> Result<ExprField> {
        ExprField::new(self.psi.clone(), coordinate_names(self.n))
    }

    /// `ψ̃ = f + ψ` as an expression, when `f` has one.
    pub fn conformal_factor_expression(&self) -> Option<Expression> {
        self.f.expression().map(|f| Expression::add(f.clone(), self.psi.clone()))
    }

    pub fn metric(&self) -> Result<SpacetimeMetric> {
        let names = coordinate_names(self.n);
        let psi = ExprField::new(self.psi.clone(), names)?;
        let lambda = ExprField::new(self.lambda.clone(), names)?;
        let conformal = ConformalFactor { f: Some(self.f.clone()), psi: (!psi.is_zero()).then_some(psi) };
        let spatial = SpatialMetric::RoundSphere { scale: self.scale, lambda: (!lambda.is_zero()).then_some(lambda) };
        SpacetimeMetric::new(self.n, conformal, spatial, Some((self.a, 0.0)))
    }

    /// `ψ(τ, θ₁)` and its τ-derivative.
    pub fn psi_and_rate(&self, tau: f64, theta1: f64) -> Result<(f64, f64)> {
        let v = self.psi.eval_slots(&["tau", "theta1"], &[tau, theta1])?;
        let d = self.psi.derivative("tau").eval_slots(&["tau", "theta1"], &[tau, theta1])?;
        Ok((v, d))
    }
}

/// Outcome of [`arw_validate`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub sample_times: Vec<f64>,
    pub gamma_tilde: f64,
    /// `n + ω − 2 > 0`.
    pub exponent_positive: bool,
    pub f_prime: Vec<f64>,
    /// (i) `−f′ > 0` at every sample.
    pub time_orientation: bool,
    /// (ii) `|f′|² e^{(n+ω−2)f}` at the samples.
    pub mass_sequence: Vec<f64>,
    pub mass_increments: Vec<f64>,
    pub mass_limit: f64,
    pub mass_limit_error: f64,
    pub mass_converges: bool,
    /// (iii) `f″ + γ̃|f′|²` at the samples.
    pub curvature_sequence: Vec<f64>,
    pub curvature_growth: f64,
    pub curvature_divergent: bool,
    /// (iv) `|D^m f| / |f′|^m` for m = 2, 3.
    pub ratio2: Vec<f64>,
    pub ratio3: Vec<f64>,
    pub ratio_sup: [f64; 2],
    pub ratios_bounded: bool,
    /// Limit of `2 − n − 2f″/|f′|²`.
    pub omega_estimate: f64,
    pub passed: bool,
}

/// Relative tolerance on the last Cauchy increment of condition (ii).
pub const MASS_INCREMENT_TOLERANCE: f64 = 1e-3;

/// Index of the last sample at least a decade (in |τ|) before the final one.
fn decade_reference(times: &[f64]) -> usize {
    let last = times.last().unwrap().abs();
    times.iter().rposition(|t| t.abs() >= 10.0 * last).unwrap_or(0)
}

pub fn arw_validate(spec: &ARWSpec, sample_times: &[f64]) -> Result<ValidationReport> {
    arw_validate_with(spec, sample_times, MASS_INCREMENT_TOLERANCE)
}

pub fn arw_validate_with(spec: &ARWSpec, sample_times: &[f64], tolerance: f64) -> Result<ValidationReport> {
    if sample_times.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if sample_times.iter().any(|&t| !(t >= spec.a && t < 0.0)) {
        return Err(Error::InvalidArgument(format!("sample times must lie in [{}, 0)", spec.a)));
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sample times must increase toward 0".into()));
    }
    let gamma = spec.gamma_tilde();
    let derivs: Vec<[f64; 4]> = sample_times.iter().map(|&t| spec.f.derivatives(t)).collect::<Result<_>>()?;
    let f_prime: Vec<f64> = derivs.iter().map(|d| d[1]).collect();
    let time_orientation = f_prime.iter().all(|&d| d < 0.0);

    let mass_sequence: Vec<f64> = derivs.iter().map(|d| d[1] * d[1] * (2.0 * gamma * d[0]).exp()).collect();
    let mass_increments = relative_increments(&mass_sequence);
    let (mass_limit, mass_limit_error) = if mass_sequence.len() >= 3 {
        let e = aitken(&mass_sequence)?;
        (e.limit, e.error)
    } else {
        (*mass_sequence.last().unwrap(), f64::NAN)
    };
    let last_increment = mass_increments.last().copied().unwrap_or(f64::INFINITY);
    let mass_converges =
        mass_limit.is_finite() && mass_limit > 0.0 && last_increment <= tolerance;

    let reference = decade_reference(sample_times);
    let last = sample_times.len() - 1;
    let curvature_sequence: Vec<f64> = derivs.iter().map(|d| d[2] + gamma * d[1] * d[1]).collect();
    let floor = 1e-8 * derivs[last][1].powi(2);
    let curvature_growth = curvature_sequence[last].abs() / curvature_sequence[reference].abs().max(floor);
    let curvature_divergent = !curvature_sequence.iter().all(|v| v.is_finite()) || curvature_growth > 10.0;

    let ratio2: Vec<f64> = derivs.iter().map(|d| d[2].abs() / d[1].abs().powi(2)).collect();
    let ratio3: Vec<f64> = derivs.iter().map(|d| d[3].abs() / d[1].abs().powi(3)).collect();
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let ratio_sup = [sup(&ratio2), sup(&ratio3)];
    let bounded = |v: &[f64]| v.iter().all(|x| x.is_finite()) && v[last] <= 10.0 * v[reference] + 1e-12;
    let ratios_bounded = bounded(&ratio2) && bounded(&ratio3);

    let omega_estimate = {
        let d = derivs[last];
        2.0 - spec.n as f64 - 2.0 * d[2] / (d[1] * d[1])
    };
    let exponent_positive = gamma > 0.0;
    let passed = exponent_positive && time_orientation && mass_converges && !curvature_divergent && ratios_bounded;
    Ok(ValidationReport {
        sample_times: sample_times.to_vec(),
        gamma_tilde: gamma,
        exponent_positive,
        f_prime,
        time_orientation,
        mass_sequence,
        mass_increments,
        mass_limit,
        mass_limit_error,
        mass_converges,
        curvature_sequence,
        curvature_growth,
        curvature_divergent,
        ratio2,
        ratio3,
        ratio_sup,
        ratios_bounded,
        omega_estimate,
        passed,
    })
}
