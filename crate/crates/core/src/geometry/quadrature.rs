//! Gauss–Legendre product rules on the spherical chart of `S^n`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// `|S^n| = 2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    assert!(n >= 1, "sphere dimension must be positive");
    2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_half(n + 1)
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!)
        let m = (k - 1) / 2;
        (1..=m).map(|i| (2 * i - 1) as f64 / 2.0).product::<f64>() * PI.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// Full tensor product over all angles.
    Full,
    /// Nodes in `θ₁` only; exact for integrands and densities that depend on
    /// `θ₁` alone up to the round-sphere angular factor.
    Axisymmetric,
}

#[derive(Debug, Clone)]
pub struct GridPoint {
    pub angles: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    n: usize,
    nodes_per_axis: usize,
    mode: GridMode,
    axes: Vec<Vec<(f64, f64)>>,
    points: Vec<GridPoint>,
}

fn axis_rule(nodes: usize, length: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("node count must be positive"));
    let half = 0.5 * length;
    let mut out: Vec<(f64, f64)> =
        rule.as_node_weight_pairs().iter().map(|&(x, w)| (half * (x + 1.0), half * w)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

impl QuadratureGrid {
    pub fn new(n: usize, nodes_per_axis: usize, mode: GridMode) -> Result<QuadratureGrid> {
        if !(1..=3).contains(&n) {
            return Err(Error::Unsupported(format!("quadrature on S^{n}")));
        }
        if nodes_per_axis < 2 {
            return Err(Error::InvalidArgument("at least 2 nodes per axis".into()));
        }
        let axes: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|i| axis_rule(nodes_per_axis, if i + 1 == n { 2.0 * PI } else { PI }))
            .collect();
        let mode = if n == 1 { GridMode::Full } else { mode };
        let points = match mode {
            GridMode::Full => {
                let mut points = vec![GridPoint { angles: Vec::new(), weight: 1.0 }];
                for axis in &axes {
                    points = points
                        .iter()
                        .flat_map(|p| {
                            axis.iter().map(move |&(x, w)| {
                                let mut angles = p.angles.clone();
                                angles.push(x);
                                GridPoint { angles, weight: p.weight * w }
                            })
                        })
                        .collect();
                }
                points
            }
            GridMode::Axisymmetric => {
                let rest = sphere_volume(n - 1);
                axes[0]
                    .iter()
                    .map(|&(x, w)| {
                        let mut angles = vec![x];
                        // sin θ_k = 1 for the middle angles, so the remaining
                        // angular density is 1 here
                        angles.extend(std::iter::repeat_n(PI / 2.0, n - 2));
                        angles.push(PI);
                        GridPoint { angles, weight: w * rest }
                    })
                    .collect()
            }
        };
        Ok(QuadratureGrid { n, nodes_per_axis, mode, axes, points })
    }

    pub fn full(n: usize, nodes_per_axis: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::new(n, nodes_per_axis, GridMode::Full)
    }

    pub fn axisymmetric(n: usize, nodes_per_axis: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::new(n, nodes_per_axis, GridMode::Axisymmetric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    /// Nodes and weights of axis `i` (nodes increasing).
    pub fn axis(&self, i: usize) -> &[(f64, f64)] {
        &self.axes[i]
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// The same layout with a different node count.
    pub fn with_nodes(&self, nodes_per_axis: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::new(self.n, nodes_per_axis, self.mode)
    }

    /// `Σ w_k · density(θ_k)` with the chart measure `dθ` in the weights.
    /// Nodes are evaluated in parallel and summed in node order.
    pub fn integrate_density<F>(&self, density: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Vec<Result<f64>> = self.points.par_iter().map(|p| density(&p.angles)).collect();
        let mut total = 0.0;
        for (k, (v, p)) in values.into_iter().zip(&self.points).enumerate() {
            let v = v?;
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: k, value: v });
            }
            total += p.weight * v;
        }
        Ok(total)
    }

    /// Like [`integrate_density`](Self::integrate_density), also returning
    /// `Σ |w_k · density(θ_k)|` for round-off estimates.
    pub fn integrate_density_with_magnitude<F>(&self, density: F) -> Result<(f64, f64)>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Vec<Result<f64>> = self.points.par_iter().map(|p| density(&p.angles)).collect();
        let (mut total, mut magnitude) = (0.0, 0.0);
        for (k, (v, p)) in values.into_iter().zip(&self.points).enumerate() {
            let v = v?;
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: k, value: v });
            }
            total += p.weight * v;
            magnitude += (p.weight * v).abs();
        }
        Ok((total, magnitude))
    }
}

/// `Σ w · integrand · sqrt(det volume_metric)` over the grid.
pub fn integrate_slice<F, G>(grid: &QuadratureGrid, integrand: F, volume_metric: G) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    G: Fn(&[f64]) -> Result<DMatrix<f64>> + Sync,
{
    grid.integrate_density(|x| {
        let det = volume_metric(x)?.determinant();
        Ok(integrand(x)? * det.max(0.0).sqrt())
    })
}

/// The round unit-sphere metric `σ̄` in spherical angles.
pub fn round_sphere_metric(angles: &[f64]) -> DMatrix<f64> {
    let n = angles.len();
    let mut m = DMatrix::zeros(n, n);
    let mut factor = 1.0;
    for i in 0..n {
        m[(i, i)] = factor;
        factor *= angles[i].sin().powi(2);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn axis_weights_sum_to_length_and_nodes_are_interior() {
        let grid = QuadratureGrid::full(3, 12).unwrap();
        for i in 0..3 {
            let axis = grid.axis(i);
            let length = if i == 2 { 2.0 * PI } else { PI };
            let sum: f64 = axis.iter().map(|p| p.1).sum();
            assert!((sum - length).abs() < 1e-13);
            assert!(axis.iter().all(|&(x, w)| x > 0.0 && x < length && w > 0.0));
        }
    }

    #[test]
    fn unit_sphere_areas() {
        let one = |_: &[f64]| Ok(1.0);
        let s3 = integrate_slice(&QuadratureGrid::full(3, 48).unwrap(), one, |x| Ok(round_sphere_metric(x))).unwrap();
        assert!((s3 - 19.7392088021787).abs() < 1e-8);
        let s2 = integrate_slice(&QuadratureGrid::full(2, 48).unwrap(), one, |x| Ok(round_sphere_metric(x))).unwrap();
        assert!((s2 - 4.0 * PI).abs() < 1e-10);
        let odd = integrate_slice(&QuadratureGrid::full(2, 48).unwrap(), |x| Ok(x[0].cos()), |x| Ok(round_sphere_metric(x)))
            .unwrap();
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn axisymmetric_matches_full_for_polar_integrands() {
        let f = |x: &[f64]| Ok((2.0 * x[0]).cos().powi(2) + x[0]);
        for n in [2, 3] {
            let full = integrate_slice(&QuadratureGrid::full(n, 24).unwrap(), f, |x| Ok(round_sphere_metric(x))).unwrap();
            let axi =
                integrate_slice(&QuadratureGrid::axisymmetric(n, 24).unwrap(), f, |x| Ok(round_sphere_metric(x))).unwrap();
            assert!((full - axi).abs() < 1e-11 * full.abs());
        }
    }

    #[test]
    fn non_finite_node_is_reported() {
        let grid = QuadratureGrid::axisymmetric(2, 4).unwrap();
        let err = grid.integrate_density(|x| Ok(if x[0] > 2.0 { f64::NAN } else { 1.0 })).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { node: 2, .. }));
    }
}
