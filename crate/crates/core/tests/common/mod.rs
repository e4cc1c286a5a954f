//! Shared fixtures for the integration tests.
#![allow(dead_code)]

pub mod properties;

use std::f64::consts::PI;

use arwmass::expr::parse;
use arwmass::geometry::ARWSpec;
use arwmass::sads::{as_arw_spec, SAdSParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rw(n: usize, omega: f64, k: f64) -> ARWSpec {
    ARWSpec::rw_family(n, omega, k, -1.0).unwrap()
}

pub fn custom(n: usize, f: &str, psi: &str, lambda: &str, a: f64) -> ARWSpec {
    ARWSpec::new(n, 1.0, parse(f).unwrap(), parse(psi).unwrap(), parse(lambda).unwrap(), a).unwrap()
}

pub fn sads(n: usize, lambda: f64, mass: f64) -> (SAdSParams, ARWSpec) {
    let p = SAdSParams::new(n, lambda, mass).unwrap();
    (p, as_arw_spec(&p).unwrap())
}

/// Every spec the library ships or the examples exercise.
pub fn builtin_specs() -> Vec<(String, ARWSpec)> {
    vec![
        ("rw n=3 omega=1 k=1".into(), rw(3, 1.0, 1.0)),
        ("rw n=3 omega=0 k=2".into(), rw(3, 0.0, 2.0)),
        ("rw n=2 omega=2 k=1".into(), rw(2, 2.0, 1.0)),
        ("perturbed n=2".into(), custom(2, "log(-tau)", "0.1*sin(tau)", "0", -1.0)),
        (
            "perturbed n=3".into(),
            custom(3, "log(-tau)", "0.1*tau*cos(theta)", "0.2*tau^2*(1 + 0.5*cos(theta))", -1.0),
        ),
        ("sads n=3 Lambda=0".into(), sads(3, 0.0, 1.0).1),
        ("sads n=3 Lambda=-1".into(), sads(3, -1.0, 1.0).1),
        ("sads n=2 Lambda=0".into(), sads(2, 0.0, 1.0).1),
    ]
}

/// A time log-uniform in `[a, a/100]`.
pub fn random_time(rng: &mut ChaCha8Rng, a: f64) -> f64 {
    a * 10f64.powf(-2.0 * rng.gen::<f64>())
}

/// Chart angles away from the poles; the last one is periodic.
pub fn random_angles(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { rng.gen_range(0.0..2.0 * PI) } else { rng.gen_range(0.05..PI - 0.05) }).collect()
}

pub fn random_event(rng: &mut ChaCha8Rng, spec: &ARWSpec) -> Vec<f64> {
    let mut e = vec![random_time(rng, spec.domain_start())];
    e.extend(random_angles(rng, spec.n()));
    e
}
