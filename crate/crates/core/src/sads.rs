//! The Schwarzschild–anti-de Sitter brane inside the black-hole region.
//!
//! `h = 1 − 2Λr²/(n(n+1)) − m r^{−(n−1)}`, `h̃ = −h`, brane metric
//! `−h̃^{−1}dr² + r²σ̄ = e^{2f}(−(dx⁰)² + σ̄)` with `f = log r` and
//! `x⁰ = −∫₀^r s^{−1}h̃^{−1/2} ds`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse, Expression};
use crate::geometry::arw::ARWSpec;
use crate::geometry::field::TimeProfile;
use crate::geometry::metric::ExprMetric;
use crate::geometry::quadrature::sphere_volume;

/// The domain of the ARW presentation ends at this fraction of the horizon.
pub const HORIZON_CLIP: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SAdSParams {
    pub n: usize,
    pub lambda: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Profile {
    pub h: f64,
    pub h_tilde: f64,
    pub dh_dr: f64,
}

impl SAdSParams {
    pub fn new(n: usize, lambda: f64, mass: f64) -> Result<SAdSParams> {
        if !(2..=3).contains(&n) {
            return Err(Error::Unsupported(format!("spatial dimension {n} (supported: 2, 3)")));
        }
        if !(lambda <= 0.0) {
            return Err(Error::InvalidSpec(format!("Lambda = {lambda} must be <= 0")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidSpec(format!("mass = {mass} must be positive")));
        }
        Ok(SAdSParams { n, lambda, mass })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `2/(n(n+1))`.
    fn c(&self) -> f64 {
        2.0 / (self.nf() * (self.nf() + 1.0))
    }

    /// `q(s) = s^{n−1}h̃(s) = m − s^{n−1} + 2Λs^{n+1}/(n(n+1))`.
    fn q(&self, s: f64) -> f64 {
        let k = self.n as i32;
        self.mass - s.powi(k - 1) + self.c() * self.lambda * s.powi(k + 1)
    }

    /// `h̃`, `dh̃/dr`, `d²h̃/dr²`.
    fn h_tilde_derivatives(&self, r: f64) -> [f64; 3] {
        let (n, k, m, l, c) = (self.nf(), self.n as i32, self.mass, self.lambda, self.c());
        [
            -1.0 + c * l * r * r + m * r.powi(1 - k),
            2.0 * c * l * r - (n - 1.0) * m * r.powi(-k),
            2.0 * c * l + n * (n - 1.0) * m * r.powi(-k - 1),
        ]
    }
}

pub fn profile(params: &SAdSParams, r: f64) -> Result<Profile> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    let [ht, dht, _] = params.h_tilde_derivatives(r);
    Ok(Profile { h: -ht, h_tilde: ht, dh_dr: -dht })
}

/// The unique zero of `h` on `(0, ∞)`.
pub fn horizon(params: &SAdSParams) -> Result<f64> {
    let h = |r: f64| -params.h_tilde_derivatives(r)[0];
    let mut lo = 0.0;
    let mut hi = params.mass.powf(1.0 / (params.nf() - 1.0));
    if !(h(hi) >= 0.0) {
        return Err(Error::Bracketing(format!("h({hi}) = {} is negative", h(hi))));
    }
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `x⁰(r) = −∫₀^{√r} 2t^{n−2} q(t²)^{−1/2} dt` (the substitution `s = t²`
/// removes the endpoint behavior at 0).
pub fn x0_of_r(params: &SAdSParams, r: f64) -> Result<f64> {
    let r0 = horizon(params)?;
    if !(r > 0.0 && r < r0) {
        return Err(Error::InvalidArgument(format!("radius {r} outside (0, {r0})")));
    }
    Ok(x0_unchecked(params, r))
}

fn x0_unchecked(params: &SAdSParams, r: f64) -> f64 {
    let k = params.n as i32;
    let integrand = |t: f64| 2.0 * t.powi(k - 2) / params.q(t * t).max(f64::MIN_POSITIVE).sqrt();
    -quadrature::double_exponential::integrate(integrand, 0.0, r.sqrt(), 1e-15).integral
}

/// Inverse of [`x0_of_r`] by safeguarded Newton iteration.
pub fn r_of_x0(params: &SAdSParams, x0: f64) -> Result<f64> {
    let r0 = horizon(params)?;
    let limit = x0_unchecked(params, r0);
    if !(x0 < 0.0 && x0 > limit) {
        return Err(Error::InvalidArgument(format!("time {x0} outside ({limit}, 0)")));
    }
    let (mut lo, mut hi) = (0.0, r0);
    // leading behavior x⁰ ≈ −∫ s^{(n−3)/2}/√m ds
    let mut r = match params.n {
        2 => (0.5 * x0).powi(2) * params.mass,
        _ => -x0 * params.mass.sqrt(),
    }
    .clamp(1e-3 * r0 * f64::EPSILON, 0.5 * r0);
    for _ in 0..200 {
        let residual = x0_unchecked(params, r) - x0;
        if residual > 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let ht = params.h_tilde_derivatives(r)[0];
        let slope = -1.0 / (r * ht.sqrt());
        let mut next = r - residual / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 4.0 * f64::EPSILON * r || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        r = next;
    }
    Ok(r)
}

/// `∫_{M_r} G(ν,ν) e^{f}` in closed form: `½n(n−1)|S^n|(m + 2Λr^{n+1}/(n(n+1)))`.
pub fn oracle_mass_integral(params: &SAdSParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    let n = params.nf();
    Ok(0.5 * n * (n - 1.0) * sphere_volume(params.n) * (params.mass + params.c() * params.lambda * r.powi(params.n as i32 + 1)))
}

/// `f = log r` carried parametrically through `r(x⁰)`.
#[derive(Debug, Clone)]
pub struct SAdSProfile {
    params: SAdSParams,
}

impl SAdSProfile {
    pub fn new(params: SAdSParams) -> SAdSProfile {
        SAdSProfile { params }
    }

    /// `[f, f′, f″, f‴]` at radius `r`; primes are `x⁰`-derivatives.
    pub fn derivatives_at_radius(&self, r: f64) -> [f64; 4] {
        let [ht, dht, ddht] = self.params.h_tilde_derivatives(r);
        let dr = -r * ht.sqrt();
        [r.ln(), -ht.sqrt(), 0.5 * r * dht, 0.5 * (dht + r * ddht) * dr]
    }
}

impl TimeProfile for SAdSProfile {
    fn derivatives(&self, tau: f64) -> Result<[f64; 4]> {
        Ok(self.derivatives_at_radius(r_of_x0(&self.params, tau)?))
    }

    fn describe(&self) -> String {
        let p = &self.params;
        format!("sads(n={}, Lambda={}, m={})", p.n, p.lambda, p.mass)
    }
}

/// ARW presentation with `ω = 1`, `ψ = λ = 0`, on `[x⁰(0.99 r₀), 0)`.
pub fn as_arw_spec(params: &SAdSParams) -> Result<ARWSpec> {
    let a = x0_of_r(params, HORIZON_CLIP * horizon(params)?)?;
    ARWSpec::from_profile(params.n, 1.0, Arc::new(SAdSProfile::new(*params)), a)
}

/// `h̃` as an expression in `r`.
pub fn h_tilde_expression(params: &SAdSParams) -> Expression {
    parse("-1 + c*L*r^2 + m*r^(1 - n)")
        .unwrap()
        .substitute("c", &params.c().into())
        .substitute("L", &params.lambda.into())
        .substitute("m", &params.mass.into())
        .substitute("n", &params.nf().into())
        .fold_constants()
}

/// The brane metric `−h̃^{−1}dr² + r²σ̄` in coordinates `(r, θ₁, …, θ_n)`.
pub fn brane_metric(params: &SAdSParams) -> Result<ExprMetric> {
    let n = params.n;
    let names = ["r", "theta1", "theta2", "theta3"];
    let mut rows = vec![vec![Expression::num(0.0); n + 1]; n + 1];
    rows[0][0] = Expression::div(Expression::num(-1.0), h_tilde_expression(params));
    let mut factor = parse("r^2").unwrap();
    for i in 1..=n {
        rows[i][i] = factor.clone();
        factor = Expression::mul(factor, parse(&format!("sin(theta{i})^2")).unwrap());
    }
    Ok(ExprMetric::new(&names[..=n], rows)?.with_time_domain(0.0, horizon(params)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, l: f64, m: f64) -> SAdSParams {
        SAdSParams::new(n, l, m).unwrap()
    }

    #[test]
    fn profile_values() {
        let pr = profile(&p(3, 0.0, 1.0), 0.5).unwrap();
        assert!((pr.h + 3.0).abs() < 1e-15 && (pr.h_tilde - 3.0).abs() < 1e-15);
        assert!(profile(&p(3, 0.0, 1.0), 1.0).unwrap().h.abs() < 1e-15);
        assert!(profile(&p(2, 0.0, 1.0), 1.0).unwrap().h.abs() < 1e-15);
        assert!(profile(&p(3, 0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn horizons() {
        assert!((horizon(&p(3, 0.0, 1.0)).unwrap() - 1.0).abs() < 1e-12);
        let expected = (15f64.sqrt() - 3.0).sqrt();
        assert!((horizon(&p(3, -1.0, 1.0)).unwrap() - expected).abs() < 1e-10);
        assert!((horizon(&p(3, 0.0, 4.0)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn time_function_is_arcsine() {
        let q = p(3, 0.0, 1.0);
        assert!((x0_of_r(&q, 0.5).unwrap() + std::f64::consts::FRAC_PI_6).abs() < 1e-13);
        assert!(x0_of_r(&q, 1e-12).unwrap().abs() < 1e-11);
        assert!((x0_of_r(&q, 1.0 - 1e-12).unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-5);
        assert!(x0_of_r(&q, 1.5).is_err());
    }

    #[test]
    fn round_trip() {
        for q in [p(3, 0.0, 1.0), p(3, -1.0, 1.0), p(2, 0.0, 1.0), p(3, 0.0, 4.0), p(2, -2.0, 0.5)] {
            let r0 = horizon(&q).unwrap();
            for frac in [1e-6, 1e-3, 0.1, 0.5, 0.9, 0.99] {
                let r = frac * r0;
                let back = r_of_x0(&q, x0_of_r(&q, r).unwrap()).unwrap();
                assert!((back - r).abs() <= 1e-10, "{q:?} {r} {back}");
            }
        }
    }

    #[test]
    fn closed_form_combinations() {
        for q in [p(3, 0.0, 1.0), p(3, -1.0, 1.0), p(2, -0.5, 2.0)] {
            let prof = SAdSProfile::new(q);
            let g = (q.nf() - 1.0) / 2.0;
            for r in [0.05, 0.3, 0.6] {
                let d = prof.derivatives_at_radius(r);
                let combo = d[2] + g * d[1] * d[1];
                assert!((combo - (q.lambda * r * r / q.nf() - g)).abs() < 1e-12);
                let mass = d[1] * d[1] * (2.0 * g * d[0]).exp();
                let expected = q.mass + q.c() * q.lambda * r.powi(q.n as i32 + 1) - r.powi(q.n as i32 - 1);
                assert!((mass - expected).abs() < 1e-12);
            }
        }
        let d = SAdSProfile::new(p(3, 0.0, 1.0)).derivatives_at_radius(0.5);
        assert!((d[1] * d[1] * 0.25 - 0.75).abs() < 1e-14);
    }

    #[test]
    fn third_derivative_matches_finite_differences() {
        let q = p(3, -1.0, 1.0);
        let prof = SAdSProfile::new(q);
        let tau = x0_of_r(&q, 0.4).unwrap();
        let h = 1e-4;
        let d2 = |t: f64| prof.derivatives(t).unwrap()[2];
        let fd = (d2(tau + h) - d2(tau - h)) / (2.0 * h);
        let exact = prof.derivatives(tau).unwrap()[3];
        assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "{fd} {exact}");
    }

    #[test]
    fn oracle_values() {
        let six_pi2 = 6.0 * std::f64::consts::PI.powi(2);
        assert!((oracle_mass_integral(&p(3, 0.0, 1.0), 0.3).unwrap() - six_pi2).abs() < 1e-12);
        let v = oracle_mass_integral(&p(3, -1.0, 1.0), 0.5).unwrap();
        assert!((v - six_pi2 * (1.0 - 0.5f64.powi(4) / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(SAdSParams::new(3, 1.0, 1.0).is_err());
        assert!(SAdSParams::new(3, 0.0, 0.0).is_err());
        assert!(SAdSParams::new(4, 0.0, 1.0).is_err());
    }
}
