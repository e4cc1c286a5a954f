//! Levi-Civita connection from metric jets.

use super::metric::{checked_inverse, values, MetricField};
use crate::error::{Error, Result};
use crate::jet::{self, Jet};
use crate::tensor::Tensor3;

/// Metric, inverse metric and Christoffel symbols as jets. Christoffel jets
/// have one order less than the metric jets they came from.
#[derive(Debug, Clone)]
pub struct ConnectionJets {
    pub dim: usize,
    pub g: Vec<Vec<Jet>>,
    pub g_inv: Vec<Vec<Jet>>,
    gamma: Vec<Jet>,
}

impl ConnectionJets {
    /// `g` must have order ≥ 1.
    pub fn from_metric(g: Vec<Vec<Jet>>, event: &[f64]) -> Result<ConnectionJets> {
        let d = g.len();
        let order = g[0][0].order();
        assert!(order >= 1, "connection needs first derivatives of the metric");
        checked_inverse(&values(&g), event)?;
        let g_inv = jet::invert(&g).ok_or_else(|| Error::DegenerateMetric {
            event: event.to_vec(),
            determinant: values(&g).determinant(),
        })?;
        // dg[c][a][b] = ∂_c g_ab
        let dg: Vec<Vec<Vec<Jet>>> =
            (0..d).map(|c| (0..d).map(|a| (0..d).map(|b| g[a][b].diff(c)).collect()).collect()).collect();
        let lower = Jet::zero(g[0][0].vars(), order - 1);
        let mut gamma = vec![lower; d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in b..d {
                    let mut sum = lower;
                    for e in 0..d {
                        let first = (dg[b][e][c] + dg[c][e][b]) - dg[e][b][c];
                        sum = sum + g_inv[a][e] * first;
                    }
                    let value = sum.scale(0.5);
                    gamma[(a * d + b) * d + c] = value;
                    gamma[(a * d + c) * d + b] = value;
                }
            }
        }
        Ok(ConnectionJets { dim: d, g, g_inv, gamma })
    }

    pub fn at(metric: &dyn MetricField, event: &[f64], order: usize) -> Result<ConnectionJets> {
        ConnectionJets::from_metric(metric.metric_jets(event, order)?, event)
    }

    /// `Γ^a_{bc}` as a jet.
    pub fn gamma(&self, a: usize, b: usize, c: usize) -> &Jet {
        &self.gamma[(a * self.dim + b) * self.dim + c]
    }

    pub fn christoffel(&self) -> Tensor3 {
        Tensor3::from_fn(self.dim, |a, b, c| self.gamma(a, b, c).value())
    }
}

/// `Γ^α_{βγ}` at `event`, indexed `[[α, β, γ]]`.
pub fn christoffel_at(metric: &dyn MetricField, event: &[f64]) -> Result<Tensor3> {
    Ok(ConnectionJets::at(metric, event, 1)?.christoffel())
}
