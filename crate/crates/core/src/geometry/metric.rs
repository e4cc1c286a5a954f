//! Spacetime metrics in Gaussian form and general expression charts.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::field::{ExprField, TimeProfile};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::jet::Jet;
use crate::tensor::Tensor3;

pub const COORDINATES: [&str; 4] = ["tau", "theta1", "theta2", "theta3"];

/// Names of the Gaussian chart coordinates for spatial dimension `n`.
pub fn coordinate_names(n: usize) -> &'static [&'static str] {
    &COORDINATES[..=n]
}

/// A Lorentzian metric on a chart, delivered as Taylor jets of its components.
pub trait MetricField: Send + Sync {
    /// Spacetime dimension.
    fn dim(&self) -> usize;

    fn coordinate_names(&self) -> Vec<String>;

    /// Components `g_ab` as jets of the given order at `event`.
    fn metric_jets(&self, event: &[f64], order: usize) -> Result<Vec<Vec<Jet>>>;

    /// Admissible range of coordinate 0, if restricted.
    fn time_domain(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Conformal factor `ψ̃ = f(τ) + ψ(τ, x)`; either part may be absent.
#[derive(Debug, Clone)]
pub struct ConformalFactor {
    pub f: Option<Arc<dyn TimeProfile>>,
    pub psi: Option<ExprField>,
}

impl ConformalFactor {
    pub fn none() -> ConformalFactor {
        ConformalFactor { f: None, psi: None }
    }

    pub fn jet(&self, event: &[f64], order: usize) -> Result<Jet> {
        let vars = event.len();
        let mut total = Jet::zero(vars, order);
        if let Some(f) = &self.f {
            total = total + f.jet(event[0], vars, order)?;
        }
        if let Some(psi) = &self.psi {
            total = total + psi.jet(event, order)?;
        }
        Ok(total)
    }

    pub fn is_trivial(&self) -> bool {
        self.f.is_none() && self.psi.as_ref().is_none_or(ExprField::is_zero)
    }
}

/// The spatial tensor `σ_ij(τ, x)`.
#[derive(Debug, Clone)]
pub enum SpatialMetric {
    /// `δ_ij`: a flat torus-like chart.
    Euclidean,
    /// `scale · e^{2λ} σ̄_ij` with `σ̄` the round unit sphere in spherical angles.
    RoundSphere { scale: f64, lambda: Option<ExprField> },
    /// Arbitrary symmetric components (upper triangle read).
    General(Vec<Vec<ExprField>>),
}

/// `ds̄² = e^{2ψ̃}(−dτ² + σ_ij dx^i dx^j)`.
#[derive(Debug, Clone)]
pub struct SpacetimeMetric {
    n: usize,
    conformal: ConformalFactor,
    spatial: SpatialMetric,
    time_domain: Option<(f64, f64)>,
}

impl SpacetimeMetric {
    pub fn new(
        n: usize,
        conformal: ConformalFactor,
        spatial: SpatialMetric,
        time_domain: Option<(f64, f64)>,
    ) -> Result<SpacetimeMetric> {
        if !(1..=3).contains(&n) {
            return Err(Error::Unsupported(format!("spatial dimension {n}")));
        }
        if let SpatialMetric::General(rows) = &spatial {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidSpec(format!("spatial metric must be {n}x{n}")));
            }
        }
        Ok(SpacetimeMetric { n, conformal, spatial, time_domain })
    }

    /// Minkowski space `−dτ² + δ` on a flat chart.
    pub fn flat(n: usize) -> SpacetimeMetric {
        SpacetimeMetric::new(n, ConformalFactor::none(), SpatialMetric::Euclidean, None).unwrap()
    }

    /// `e^{2ψ̃}(−dτ² + σ)` with `ψ̃` and `σ` given as expressions in the
    /// Gaussian chart coordinates.
    pub fn from_expressions(
        n: usize,
        psi_tilde: Expression,
        sigma: Vec<Vec<Expression>>,
    ) -> Result<SpacetimeMetric> {
        let names = coordinate_names(n);
        let psi = ExprField::new(psi_tilde, names)?;
        let rows = sigma
            .into_iter()
            .map(|row| row.into_iter().map(|e| ExprField::new(e, names)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let conformal = ConformalFactor { f: None, psi: Some(psi) };
        SpacetimeMetric::new(n, conformal, SpatialMetric::General(rows), None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn conformal_factor(&self) -> &ConformalFactor {
        &self.conformal
    }

    pub fn spatial(&self) -> &SpatialMetric {
        &self.spatial
    }

    /// The conformal metric `g̃ = −dτ² + σ`.
    pub fn without_conformal_factor(&self) -> SpacetimeMetric {
        SpacetimeMetric { conformal: ConformalFactor::none(), ..self.clone() }
    }

    /// `σ_ij` as jets.
    pub fn spatial_jets(&self, event: &[f64], order: usize) -> Result<Vec<Vec<Jet>>> {
        let vars = self.n + 1;
        let zero = Jet::zero(vars, order);
        let mut sigma = vec![vec![zero; self.n]; self.n];
        match &self.spatial {
            SpatialMetric::Euclidean => {
                for (i, row) in sigma.iter_mut().enumerate() {
                    row[i] = Jet::constant(vars, order, 1.0);
                }
            }
            SpatialMetric::RoundSphere { scale, lambda } => {
                let mut factor = Jet::constant(vars, order, *scale);
                if let Some(l) = lambda {
                    if !l.is_zero() {
                        factor = factor * l.jet(event, order)?.scale(2.0).exp();
                    }
                }
                for (i, row) in sigma.iter_mut().enumerate() {
                    row[i] = factor;
                    let s = Jet::variable(vars, order, i + 1, event[i + 1]).sin();
                    factor = factor * s * s;
                }
            }
            SpatialMetric::General(rows) => {
                for i in 0..self.n {
                    for j in i..self.n {
                        let v = rows[i][j].jet(event, order)?;
                        sigma[i][j] = v;
                        sigma[j][i] = v;
                    }
                }
            }
        }
        Ok(sigma)
    }
}

impl MetricField for SpacetimeMetric {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn coordinate_names(&self) -> Vec<String> {
        coordinate_names(self.n).iter().map(|s| s.to_string()).collect()
    }

    fn metric_jets(&self, event: &[f64], order: usize) -> Result<Vec<Vec<Jet>>> {
        let d = self.n + 1;
        if event.len() != d {
            return Err(Error::InvalidArgument(format!("event needs {d} coordinates")));
        }
        let sigma = self.spatial_jets(event, order)?;
        let weight = if self.conformal.is_trivial() {
            Jet::constant(d, order, 1.0)
        } else {
            self.conformal.jet(event, order)?.scale(2.0).exp()
        };
        let mut g = vec![vec![Jet::zero(d, order); d]; d];
        g[0][0] = -weight;
        for i in 0..self.n {
            for j in 0..self.n {
                g[i + 1][j + 1] = weight * sigma[i][j];
            }
        }
        Ok(g)
    }

    fn time_domain(&self) -> Option<(f64, f64)> {
        self.time_domain
    }
}

/// A metric whose every component is an expression in named coordinates.
#[derive(Debug, Clone)]
pub struct ExprMetric {
    names: Vec<String>,
    components: Vec<Vec<ExprField>>,
    time_domain: Option<(f64, f64)>,
}

impl ExprMetric {
    /// `components` must be symmetric; only the upper triangle is read.
    pub fn new(names: &[&str], components: Vec<Vec<Expression>>) -> Result<ExprMetric> {
        let d = names.len();
        if !(2..=4).contains(&d) || components.len() != d || components.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidSpec(format!("metric must be a square matrix of size 2..=4, got {d}")));
        }
        let components = components
            .into_iter()
            .map(|row| row.into_iter().map(|e| ExprField::new(e, names)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ExprMetric { names: names.iter().map(|s| s.to_string()).collect(), components, time_domain: None })
    }

    pub fn with_time_domain(mut self, lo: f64, hi: f64) -> ExprMetric {
        self.time_domain = Some((lo, hi));
        self
    }
}

impl MetricField for ExprMetric {
    fn dim(&self) -> usize {
        self.names.len()
    }

    fn coordinate_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn metric_jets(&self, event: &[f64], order: usize) -> Result<Vec<Vec<Jet>>> {
        let d = self.dim();
        if event.len() != d {
            return Err(Error::InvalidArgument(format!("event needs {d} coordinates")));
        }
        let mut g = vec![vec![Jet::zero(d, order); d]; d];
        for i in 0..d {
            for j in i..d {
                let v = self.components[i][j].jet(event, order)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }

    fn time_domain(&self) -> Option<(f64, f64)> {
        self.time_domain
    }
}

/// Metric, inverse and first partials at one event.
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `dg[[a, b, c]] = ∂_c g_ab`.
    pub dg: Tensor3,
}

pub(crate) fn values(jets: &[Vec<Jet>]) -> DMatrix<f64> {
    let d = jets.len();
    DMatrix::from_fn(d, d, |i, j| jets[i][j].value())
}

/// Inverts `g`, rejecting determinants below `1e-14` times the Hadamard bound.
pub(crate) fn checked_inverse(g: &DMatrix<f64>, event: &[f64]) -> Result<DMatrix<f64>> {
    let det = g.determinant();
    // relative to the Hadamard bound, so conformal scaling does not matter
    let bound: f64 = g.row_iter().map(|r| r.norm()).product();
    if !det.is_finite() || !(det.abs() > 1e-14 * bound) {
        return Err(Error::DegenerateMetric { event: event.to_vec(), determinant: det });
    }
    g.clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric { event: event.to_vec(), determinant: det })
}

pub fn metric_at(metric: &dyn MetricField, event: &[f64]) -> Result<MetricSample> {
    let jets = metric.metric_jets(event, 1)?;
    let g = values(&jets);
    let g_inv = checked_inverse(&g, event)?;
    let d = metric.dim();
    let dg = Tensor3::from_fn(d, |a, b, c| jets[a][b].d1(c));
    Ok(MetricSample { g, g_inv, dg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::field::ExprProfile;

    #[test]
    fn flat_chart() {
        let s = metric_at(&SpacetimeMetric::flat(3), &[0.3, 0.1, 0.2, 0.4]).unwrap();
        assert_eq!(s.g, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0])));
        assert_eq!(s.dg.max_abs(), 0.0);
    }

    #[test]
    fn arw_log_profile_at_minus_two() {
        let f: Arc<dyn TimeProfile> = Arc::new(ExprProfile::new(parse("log(-tau)").unwrap()).unwrap());
        let conformal = ConformalFactor { f: Some(f), psi: None };
        let sphere = SpatialMetric::RoundSphere { scale: 1.0, lambda: None };
        let metric = SpacetimeMetric::new(2, conformal, sphere, Some((-3.0, 0.0))).unwrap();
        let theta = 1.1f64;
        let s = metric_at(&metric, &[-2.0, theta, 0.4]).unwrap();
        assert!((s.g[(0, 0)] + 4.0).abs() < 1e-14);
        assert!((s.g[(1, 1)] - 4.0).abs() < 1e-14);
        assert!((s.g[(2, 2)] - 4.0 * theta.sin().powi(2)).abs() < 1e-14);
        let id = &s.g_inv * &s.g;
        assert!((id - DMatrix::identity(3, 3)).abs().max() < 1e-12);
        // ∂_τ g_00 = −2τ·... = −2e^{2f}f' = −2·4·(−1/2)
        assert!((s.dg[[0, 0, 0]] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let zero = parse("0").unwrap();
        let m = SpacetimeMetric::from_expressions(1, parse("0").unwrap(), vec![vec![zero]]).unwrap();
        assert!(matches!(metric_at(&m, &[0.0, 0.0]), Err(Error::DegenerateMetric { .. })));
    }
}
