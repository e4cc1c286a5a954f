//! Randomized property suites, each run for a fixed number of cases from a
//! fixed seed.

use std::f64::consts::PI;

use arwmass::curvature::{curvature_at, symmetry_defect};
use arwmass::expr::{parse, Expression};
use arwmass::geometry::{christoffel_at, metric_at, ARWSpec, QuadratureGrid};
use arwmass::hypersurface::{graph_geometry, GraphFunction, GraphHypersurface};
use arwmass::mass::{graph_integrand, slice_mass_integral, slice_mass_integral_with_error};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

pub const CASES: u32 = 100;
const SEED: [u8; 32] = *b"arwmass property suite seed 0001";

fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn report<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

#[derive(Debug, Clone)]
pub struct SpecCase {
    n: usize,
    k: f64,
    psi: f64,
    lambda: f64,
}

impl SpecCase {
    fn build(&self) -> ARWSpec {
        ARWSpec::new(
            self.n,
            1.0,
            parse(&format!("log(-{}*tau)", self.k)).unwrap(),
            parse(&format!("{}*tau*cos(theta)", self.psi)).unwrap(),
            parse(&format!("{}*tau^2*(1 + sin(theta))", self.lambda)).unwrap(),
            -1.0,
        )
        .unwrap()
    }
}

fn spec_case() -> impl Strategy<Value = SpecCase> {
    (2usize..=3, 0.5f64..2.0, -0.3f64..0.3, -0.3f64..0.3).prop_map(|(n, k, psi, lambda)| SpecCase { n, k, psi, lambda })
}

/// `(spec, event)` with `τ` log-uniform in `[−1, −0.01]`.
fn spec_and_event() -> impl Strategy<Value = (SpecCase, Vec<f64>)> {
    (spec_case(), 0.0f64..2.0, 0.05f64..PI - 0.05, 0.05f64..PI - 0.05, 0.0f64..2.0 * PI).prop_map(
        |(s, e, t1, t2, phi)| {
            let mut event = vec![-(10f64.powf(-e)), t1];
            if s.n == 3 {
                event.push(t2);
            }
            event.push(phi);
            (s, event)
        },
    )
}

/// Riemann pair symmetries, first Bianchi identity, and the Einstein trace.
pub fn tensor_symmetries() -> Result<(), String> {
    report(runner().run(&spec_and_event(), |(case, event)| {
        let spec = case.build();
        let b = curvature_at(&spec.metric().unwrap(), &event).unwrap();
        let defect = symmetry_defect(&b);
        prop_assert!(defect <= 1e-9, "symmetry defect {defect:e}");
        let d = b.dim() as f64;
        let trace = (&b.g_inv * &b.einstein).trace();
        let expected = (1.0 - d / 2.0) * b.scalar;
        prop_assert!((trace - expected).abs() <= 1e-9 * expected.abs().max(1.0), "trace {trace} vs {expected}");
        Ok(())
    }))
}

fn tilted(case: &SpecCase, tau: f64, c: f64) -> GraphHypersurface {
    let u = parse(&format!("{tau}*(1 + {c}*cos(theta))")).unwrap();
    GraphHypersurface::new(case.build().metric().unwrap(), GraphFunction::polar(u).unwrap())
}

fn tilted_case() -> impl Strategy<Value = (SpecCase, Vec<f64>, f64)> {
    // the 0.8 keeps `τ₀(1 ± 0.1)` inside the domain `[−1, 0)`
    (spec_and_event(), -0.1f64..0.1).prop_map(|((s, mut e), c)| {
        e[0] *= 0.8;
        (s, e, c)
    })
}

/// `g(ν,ν) = −1`, `g(ν, x_i) = 0`, `g(x_i, x_j) = g_ij`, `g^{ik}g_kj = δ`.
pub fn unit_normal_identities() -> Result<(), String> {
    report(runner().run(&tilted_case(), |(case, event, c)| {
        let surface = tilted(&case, event[0], c);
        let angles = &event[1..];
        let first = graph_geometry(&surface, angles).unwrap();
        let g = metric_at(surface.ambient(), &first.event).unwrap().g;
        let pair = |a: &[f64], b: &[f64]| (DVector::from_column_slice(a).transpose() * &g * DVector::from_column_slice(b))[(0, 0)];
        let nu = &first.past_normal;
        prop_assert!(nu[0] < 0.0);
        prop_assert!((pair(nu, nu) + 1.0).abs() <= 1e-10, "g(nu,nu) = {}", pair(nu, nu));
        let scale = g.amax().max(1.0);
        for (i, xi) in first.tangents.iter().enumerate() {
            prop_assert!(pair(nu, xi).abs() <= 1e-10 * scale.sqrt(), "g(nu, x_{i}) = {}", pair(nu, xi));
            for (j, xj) in first.tangents.iter().enumerate() {
                let diff = (pair(xi, xj) - first.induced_metric[(i, j)]).abs();
                prop_assert!(diff <= 1e-10 * scale);
            }
        }
        let m = angles.len();
        let id = &first.induced_inverse * &first.induced_metric - DMatrix::identity(m, m);
        prop_assert!(id.amax() <= 1e-10);
        Ok(())
    }))
}

/// `G(ν,ν)` is unchanged by `ν ↦ −ν`.
pub fn integrand_evenness() -> Result<(), String> {
    report(runner().run(&tilted_case(), |(case, event, c)| {
        let spec = case.build();
        let surface = tilted(&case, event[0], c);
        let a = graph_integrand(&spec, &surface, &event[1..], false).unwrap();
        let b = graph_integrand(&spec, &surface, &event[1..], true).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        Ok(())
    }))
}

/// Doubling nodes per axis moves `I(τ)` by less than the reported error.
pub fn grid_refinement() -> Result<(), String> {
    let strategy = (spec_case(), 0.0f64..2.0, prop::sample::select(vec![8usize, 12, 16]));
    report(runner().run(&strategy, |(case, e, nodes)| {
        let spec = case.build();
        let tau = -(10f64.powf(-e));
        let grid = QuadratureGrid::axisymmetric(case.n, nodes).unwrap();
        let (coarse, error) = slice_mass_integral_with_error(&spec, tau, &grid).unwrap();
        let fine = slice_mass_integral(&spec, tau, &grid.with_nodes(2 * nodes).unwrap()).unwrap();
        prop_assert!((fine - coarse).abs() <= error, "|{fine} - {coarse}| > {error:e}");
        Ok(())
    }))
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![Just("x".to_string()), (-2.0f64..2.0).prop_map(|c| format!("{c:.3}"))]
}

/// Smooth expressions in `x` that stay finite on `[−1, 1]`.
fn expression() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(2 + sin({b}))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("log(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.prop_map(|a| format!("({a})^3")),
        ]
    })
}

fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Symbolic derivatives of random expressions against central differences,
/// and exact Christoffel symbols against differences of the metric.
pub fn symbolic_derivatives() -> Result<(), String> {
    report(runner().run(&(expression(), -0.9f64..0.9), |(source, x)| {
        let e = parse(&source).unwrap();
        let d = e.derivative("x");
        let at = |e: &Expression, x: f64| e.eval_slots(&["x"], &[x]).unwrap();
        let exact = at(&d, x);
        let fd = richardson(|x| at(&e, x), x, 1e-3);
        prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "{source}: {exact} vs {fd}");
        Ok(())
    }))?;
    report(runner().run(&spec_and_event(), |(case, event)| {
        let metric = case.build().metric().unwrap();
        let exact = christoffel_at(&metric, &event).unwrap();
        let d = event.len();
        let h = 1e-4 * event[0].abs().min(1.0);
        let g = metric_at(&metric, &event).unwrap();
        let shifted = |c: usize, s: f64| {
            let mut e = event.clone();
            e[c] += s;
            metric_at(&metric, &e).unwrap().g
        };
        let dg: Vec<DMatrix<f64>> = (0..d).map(|c| (shifted(c, h) - shifted(c, -h)) / (2.0 * h)).collect();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let v: f64 = (0..d)
                        .map(|l| 0.5 * g.g_inv[(a, l)] * (dg[b][(l, c)] + dg[c][(l, b)] - dg[l][(b, c)]))
                        .sum();
                    let x = exact[[a, b, c]];
                    prop_assert!((x - v).abs() <= 1e-6 * x.abs().max(1.0), "Gamma^{a}_{b}{c}: {x} vs {v}");
                }
            }
        }
        Ok(())
    }))
}

pub fn all() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("tensor symmetries", tensor_symmetries()),
        ("unit-normal identities", unit_normal_identities()),
        ("integrand evenness", integrand_evenness()),
        ("grid refinement", grid_refinement()),
        ("symbolic derivatives", symbolic_derivatives()),
    ]
}
