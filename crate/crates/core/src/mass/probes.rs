use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::slice_mass_integral_in;
use crate::curvature::{bilinear, curvature_at};
use crate::error::{Error, Result};
use crate::geometry::arw::ARWSpec;
use crate::geometry::quadrature::QuadratureGrid;
use crate::hypersurface::coordinate_slice_curvature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicitySample {
    pub tau: f64,
    pub integral: f64,
    pub f_prime: f64,
    /// Minimum of `G^{00}` over the grid nodes.
    pub g00_min: f64,
    /// Minimum eigenvalue of `G^{ij}` in an orthonormal spatial frame.
    pub spatial_einstein_min: f64,
    /// Minimum principal curvature of the slice.
    pub convexity_min: f64,
    /// Largest frame component of `G` seen, the scale for sign tolerances.
    pub einstein_scale: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub samples: Vec<MonotonicitySample>,
    /// Direction of `I(τ_k)` as `τ_k → 0`.
    pub direction: Direction,
    /// Nondecreasing toward 0 up to round-off.
    pub monotone: bool,
    pub strictly_increasing: bool,
    pub strictly_decreasing: bool,
    pub f_prime_negative: bool,
    pub g00_nonnegative: bool,
    pub spatial_einstein_psd: bool,
    pub slices_convex: bool,
    pub omega_zero: bool,
    pub psi_zero: bool,
}

/// Round-off allowance on probe signs and on increments, relative to scale.
const PROBE_TOLERANCE: f64 = 1e-10;

/// Eigenvalues of the form `m` relative to the metric `g` (`g` positive definite).
fn frame_eigenvalues(m: &DMatrix<f64>, g: &DMatrix<f64>, upper: bool) -> Result<DVector<f64>> {
    let chol = nalgebra::Cholesky::new(g.clone())
        .ok_or_else(|| Error::InvalidArgument("spatial metric is not positive definite".into()))?;
    let l = chol.l();
    let framed = if upper {
        l.transpose() * m * &l
    } else {
        let inv = l.clone().try_inverse().expect("Cholesky factor is invertible");
        &inv * m * inv.transpose()
    };
    let sym = (&framed + framed.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues)
}

fn min_of(v: &DVector<f64>) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn classify(values: &[f64]) -> Direction {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = super::MONOTONE_TOLERANCE * scale;
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if d.iter().all(|x| x.abs() <= tol) {
        Direction::Constant
    } else if d.iter().all(|&x| x >= -tol) {
        Direction::Increasing
    } else if d.iter().all(|&x| x <= tol) {
        Direction::Decreasing
    } else {
        Direction::Mixed
    }
}

/// Evaluates `I(τ_k)` and the sufficient-condition probes for monotonicity.
/// The probes are diagnostics only.
pub fn monotonicity_scan(spec: &ARWSpec, schedule: &[f64], grid: &QuadratureGrid) -> Result<MonotonicityReport> {
    if schedule.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: schedule.len() });
    }
    let metric = spec.metric()?;
    let n = spec.n();
    let mut samples = Vec::with_capacity(schedule.len());
    for &tau in schedule {
        let integral = slice_mass_integral_in(spec, &metric, tau, grid)?;
        let (mut g00_min, mut spatial_min, mut convex_min) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut scale: f64 = 0.0;
        for p in grid.points() {
            let mut event = vec![tau];
            event.extend_from_slice(&p.angles);
            let bundle = curvature_at(&metric, &event)?;
            let upper = bundle.einstein_upper();
            let gs = bundle.g.view((1, 1), (n, n)).into_owned();
            let spatial = frame_eigenvalues(&upper.view((1, 1), (n, n)).into_owned(), &gs, true)?;
            let hbar = coordinate_slice_curvature(&metric, tau, &p.angles)?;
            g00_min = g00_min.min(upper[(0, 0)]);
            spatial_min = spatial_min.min(min_of(&spatial));
            convex_min = convex_min.min(min_of(&frame_eigenvalues(&hbar, &gs, false)?));
            let timelike = (upper[(0, 0)] * bundle.g[(0, 0)] * bundle.g[(0, 0)]).abs();
            scale = scale.max(timelike).max(spatial.amax());
        }
        samples.push(MonotonicitySample {
            tau,
            integral,
            f_prime: spec.f().derivatives(tau)?[1],
            g00_min,
            spatial_einstein_min: spatial_min,
            convexity_min: convex_min,
            einstein_scale: scale,
        });
    }
    let integrals: Vec<f64> = samples.iter().map(|s| s.integral).collect();
    let direction = classify(&integrals);
    let nonneg = |v: f64, scale: f64| v >= -PROBE_TOLERANCE * scale.max(1.0);
    Ok(MonotonicityReport {
        direction,
        monotone: super::nondecreasing(&integrals),
        strictly_increasing: integrals.windows(2).all(|w| w[1] > w[0]),
        strictly_decreasing: integrals.windows(2).all(|w| w[1] < w[0]),
        f_prime_negative: samples.iter().all(|s| s.f_prime < 0.0),
        g00_nonnegative: samples.iter().all(|s| nonneg(s.g00_min, s.g00_min.abs())),
        spatial_einstein_psd: samples.iter().all(|s| nonneg(s.spatial_einstein_min, s.einstein_scale)),
        slices_convex: samples.iter().all(|s| s.convexity_min >= 0.0),
        omega_zero: spec.omega() == 0.0,
        psi_zero: spec.psi().is_zero(),
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TccViolation {
    pub event: Vec<f64>,
    pub direction: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TccReport {
    pub events: usize,
    pub directions_per_event: usize,
    /// Minimum of `R_{αβ}ν^αν^β` over all samples.
    pub minimum: f64,
    pub violations: Vec<TccViolation>,
}

/// Fewest directions sampled per event.
pub const MIN_TCC_DIRECTIONS: usize = 32;
/// Largest boost rapidity sampled.
pub const MAX_RAPIDITY: f64 = 3.0;

/// Orthonormal frame at an event: `e_0` future timelike along `∂_τ`, the rest
/// spacelike, by Gram–Schmidt in the Lorentzian inner product.
fn orthonormal_frame(g: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let dim = g.nrows();
    let dot = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut v = DVector::from_fn(dim, |i, _| if i == k { 1.0 } else { 0.0 });
        for (j, e) in frame.iter().enumerate() {
            let sign = if j == 0 { -1.0 } else { 1.0 };
            v -= e * (sign * dot(&v, e));
        }
        let norm = dot(&v, &v).abs().sqrt();
        frame.push(v / norm);
    }
    frame
}

/// Samples `R_{αβ}ν^αν^β` over random events and boosted unit timelike
/// directions `ν = cosh β e_0 + sinh β n̂`.
pub fn tcc_check(spec: &ARWSpec, events: usize, directions: usize, seed: u64) -> Result<TccReport> {
    if directions < MIN_TCC_DIRECTIONS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_TCC_DIRECTIONS} directions per event")));
    }
    let metric = spec.metric()?;
    let n = spec.n();
    let a = spec.domain_start();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut minimum = f64::INFINITY;
    let mut violations = Vec::new();
    for _ in 0..events {
        // log-uniform in |τ| over three decades
        let tau = a * 10f64.powf(-3.0 * rng.gen::<f64>());
        let mut event = vec![tau];
        for i in 0..n {
            let top = if i + 1 == n { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI - 0.05 };
            event.push(rng.gen_range(0.05..top));
        }
        let bundle = curvature_at(&metric, &event)?;
        let frame = orthonormal_frame(&bundle.g);
        let scale = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .map(|(i, j)| bilinear(&bundle.ricci, frame[i].as_slice(), frame[j].as_slice()).abs())
            .fold(0.0, f64::max);
        for _ in 0..directions {
            let beta = MAX_RAPIDITY * rng.gen::<f64>();
            let mut unit: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = unit.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            unit.iter_mut().for_each(|x| *x /= norm);
            let mut nu = &frame[0] * beta.cosh();
            for (i, u) in unit.iter().enumerate() {
                nu += &frame[i + 1] * (beta.sinh() * u);
            }
            let value = bilinear(&bundle.ricci, nu.as_slice(), nu.as_slice());
            minimum = minimum.min(value);
            if value < -1e-9 * (scale * beta.cosh().powi(2)).max(1.0) {
                violations.push(TccViolation { event: event.clone(), direction: nu.as_slice().to_vec(), value });
            }
        }
    }
    Ok(TccReport { events, directions_per_event: directions, minimum, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::limits::geometric_schedule;
    use crate::sads::{as_arw_spec, SAdSParams};

    #[test]
    fn frame_is_orthonormal() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        let b = curvature_at(&spec.metric().unwrap(), &[-0.3, 0.5, 1.0, 2.0]).unwrap();
        let f = orthonormal_frame(&b.g);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i != j { 0.0 } else if i == 0 { -1.0 } else { 1.0 };
                assert!((bilinear(&b.g, f[i].as_slice(), f[j].as_slice()) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rw_satisfies_tcc() {
        let spec = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        let r = tcc_check(&spec, 100, 32, 7).unwrap();
        assert!(r.minimum >= -1e-9, "{}", r.minimum);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn bump_violates_tcc() {
        let spec = ARWSpec::new(
            3,
            1.0,
            parse("log(-tau)").unwrap(),
            parse("0.3*exp(-((tau + 0.5)/0.1)^2)").unwrap(),
            0.0.into(),
            -1.0,
        )
        .unwrap();
        let r = tcc_check(&spec, 200, 32, 11).unwrap();
        assert!(!r.violations.is_empty(), "minimum {}", r.minimum);
    }

    #[test]
    fn scan_reports_direction() {
        let grid = QuadratureGrid::axisymmetric(3, 16).unwrap();
        let rw = ARWSpec::rw_family(3, 1.0, 1.0, -1.0).unwrap();
        let r = monotonicity_scan(&rw, &geometric_schedule(-1.0, 6), &grid).unwrap();
        assert_eq!(r.direction, Direction::Decreasing);
        assert!(r.strictly_decreasing && !r.monotone);
        assert!(r.f_prime_negative && r.slices_convex && r.g00_nonnegative);

        let p = SAdSParams::new(3, -1.0, 1.0).unwrap();
        let s = as_arw_spec(&p).unwrap();
        let r = monotonicity_scan(&s, &geometric_schedule(s.domain_start(), 10), &grid).unwrap();
        assert!(r.strictly_increasing && r.monotone, "{:?}", r.samples.iter().map(|s| s.integral).collect::<Vec<_>>());
        assert_eq!(r.direction, Direction::Increasing);
    }
}
