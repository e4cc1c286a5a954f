//! Spacelike graphs `{τ = u(θ₁)}` in a Gaussian chart: induced metric,
//! past-directed normal, second fundamental form and the Gauss/Codazzi checks.

use nalgebra::DMatrix;

use crate::curvature::{bilinear, curvature_from_connection};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::geometry::connection::ConnectionJets;
use crate::geometry::metric::{values, MetricField, SpacetimeMetric};
use crate::jet::{self, Jet};

/// The height function of a rotationally symmetric graph.
#[derive(Debug, Clone)]
pub enum GraphFunction {
    Constant(f64),
    /// An expression in `theta` (or `theta1`).
    Polar { expr: Expression, derivs: [Expression; 3] },
}

impl GraphFunction {
    pub fn polar(expr: Expression) -> Result<GraphFunction> {
        let expr = expr.substitute("theta", &Expression::var("theta1")).fold_constants();
        if let Some(c) = expr.as_number() {
            return Ok(GraphFunction::Constant(c));
        }
        if let Some(v) = expr.free_variables().into_iter().find(|v| v != "theta1") {
            return Err(Error::InvalidSpec(format!("graph function may depend on `theta` only, found `{v}`")));
        }
        let d1 = expr.derivative("theta1");
        let d2 = d1.derivative("theta1");
        let d3 = d2.derivative("theta1");
        Ok(GraphFunction::Polar { expr, derivs: [d1, d2, d3] })
    }

    /// `[u, u′, u″, u‴]` at `theta1`.
    pub fn derivatives(&self, theta1: f64) -> Result<[f64; 4]> {
        match self {
            GraphFunction::Constant(c) => Ok([*c, 0.0, 0.0, 0.0]),
            GraphFunction::Polar { expr, derivs } => {
                let at = |e: &Expression| -> Result<f64> { Ok(e.eval_slots(&["theta1"], &[theta1])?) };
                Ok([at(expr)?, at(&derivs[0])?, at(&derivs[1])?, at(&derivs[2])?])
            }
        }
    }
}

/// A spacelike graph over the slice carrier, oriented by the past normal.
#[derive(Debug, Clone)]
pub struct GraphHypersurface {
    ambient: SpacetimeMetric,
    u: GraphFunction,
}

impl GraphHypersurface {
    pub fn new(ambient: SpacetimeMetric, u: GraphFunction) -> GraphHypersurface {
        GraphHypersurface { ambient, u }
    }

    /// The coordinate slice `{τ = tau}`.
    pub fn slice(ambient: SpacetimeMetric, tau: f64) -> GraphHypersurface {
        GraphHypersurface::new(ambient, GraphFunction::Constant(tau))
    }

    pub fn ambient(&self) -> &SpacetimeMetric {
        &self.ambient
    }

    pub fn height(&self) -> &GraphFunction {
        &self.u
    }

    /// The same graph in the conformal metric `g̃`.
    pub fn conformal(&self) -> GraphHypersurface {
        GraphHypersurface::new(self.ambient.without_conformal_factor(), self.u.clone())
    }
}

/// First-fundamental data of a graph at a node.
#[derive(Debug, Clone)]
pub struct FirstFundamental {
    /// `(u(x), x)`.
    pub event: Vec<f64>,
    /// `u_i`.
    pub gradient: Vec<f64>,
    /// `|Du|² = σ^{ij}u_iu_j`.
    pub gradient_norm_sq: f64,
    /// `v = sqrt(1 − |Du|²)`.
    pub tilt: f64,
    pub induced_metric: DMatrix<f64>,
    pub induced_inverse: DMatrix<f64>,
    /// `ν^α = −v^{−1}e^{−ψ̃}(1, u^i)`.
    pub past_normal: Vec<f64>,
    /// `x^α_i`, one row per surface coordinate.
    pub tangents: Vec<Vec<f64>>,
    /// `sqrt(det g_ij)`.
    pub area_density: f64,
    /// `ψ̃` at the event.
    pub conformal_factor: f64,
}

#[derive(Debug, Clone)]
pub struct ExtrinsicData {
    pub first: FirstFundamental,
    pub second_fundamental: DMatrix<f64>,
    /// `h^i_j = g^{ik}h_kj`.
    pub weingarten: DMatrix<f64>,
    pub mean_curvature: f64,
    /// `|A|² = h^i_j h^j_i`.
    pub norm_a_sq: f64,
}

pub fn graph_geometry(surface: &GraphHypersurface, angles: &[f64]) -> Result<FirstFundamental> {
    let metric = &surface.ambient;
    let n = metric.n();
    if angles.len() != n {
        return Err(Error::InvalidArgument(format!("node needs {n} angles")));
    }
    let du = surface.u.derivatives(angles[0])?;
    let mut event = vec![du[0]];
    event.extend_from_slice(angles);
    if let Some((lo, hi)) = metric.time_domain() {
        if !(du[0] >= lo && du[0] < hi) {
            return Err(Error::InvalidArgument(format!("graph value {} outside time domain [{lo}, {hi})", du[0])));
        }
    }
    let sigma = values(&metric.spatial_jets(&event, 0)?);
    let sigma_inv = crate::geometry::metric::checked_inverse(&sigma, &event)?;
    let psi = metric.conformal_factor().jet(&event, 0)?.value();
    let mut gradient = vec![0.0; n];
    gradient[0] = du[1];
    let raised: Vec<f64> = (0..n).map(|i| (0..n).map(|j| sigma_inv[(i, j)] * gradient[j]).sum()).collect();
    let gradient_norm_sq: f64 = (0..n).map(|i| raised[i] * gradient[i]).sum();
    if gradient_norm_sq >= 1.0 {
        return Err(Error::NotSpacelike { node: angles.to_vec(), gradient_norm_sq });
    }
    let tilt = (1.0 - gradient_norm_sq).sqrt();
    let weight = (2.0 * psi).exp();
    let induced_metric = DMatrix::from_fn(n, n, |i, j| weight * (sigma[(i, j)] - gradient[i] * gradient[j]));
    let induced_inverse = crate::geometry::metric::checked_inverse(&induced_metric, &event)?;
    let scale = -(-psi).exp() / tilt;
    let mut past_normal = vec![scale];
    past_normal.extend(raised.iter().map(|r| scale * r));
    let tangents = (0..n)
        .map(|i| {
            let mut t = vec![0.0; n + 1];
            t[0] = gradient[i];
            t[i + 1] = 1.0;
            t
        })
        .collect();
    let area_density = induced_metric.determinant().max(0.0).sqrt();
    Ok(FirstFundamental {
        event,
        gradient,
        gradient_norm_sq,
        tilt,
        induced_metric,
        induced_inverse,
        past_normal,
        tangents,
        area_density,
        conformal_factor: psi,
    })
}

/// Jets (in the surface angles) of the induced geometry.
struct GraphJets {
    first: FirstFundamental,
    ambient: ConnectionJets,
    induced: ConnectionJets,
    /// `h_ij`, one order below the induced metric.
    h: Vec<Vec<Jet>>,
}

fn graph_jets(surface: &GraphHypersurface, angles: &[f64], order: usize) -> Result<GraphJets> {
    let first = graph_geometry(surface, angles)?;
    let metric = &surface.ambient;
    let n = metric.n();
    let event = &first.event;
    let derivs = surface.u.derivatives(angles[0])?;
    let u = Jet::univariate(n, order + 1, 0, &derivs);
    let mut inner = vec![u];
    inner.extend((0..n).map(|i| Jet::variable(n, order + 1, i, angles[i])));

    let ambient = ConnectionJets::at(metric, event, order)?;
    let psi = metric.conformal_factor().jet(event, order)?.compose(&inner);
    let sigma: Vec<Vec<Jet>> = metric
        .spatial_jets(event, order)?
        .iter()
        .map(|row| row.iter().map(|s| s.compose(&inner)).collect())
        .collect();
    let du: Vec<Jet> = (0..n).map(|i| u.diff(i)).collect();
    let weight = psi.scale(2.0).exp();
    let g: Vec<Vec<Jet>> =
        (0..n).map(|i| (0..n).map(|j| weight * (sigma[i][j] - du[i] * du[j])).collect()).collect();
    let induced = ConnectionJets::from_metric(g, angles)?;

    let sigma_inv = jet::invert(&sigma)
        .ok_or_else(|| Error::DegenerateMetric { event: event.clone(), determinant: 0.0 })?;
    let mut grad_sq = Jet::zero(n, order);
    for i in 0..n {
        for j in 0..n {
            grad_sq = grad_sq + sigma_inv[i][j] * du[i] * du[j];
        }
    }
    let tilt = (-grad_sq).add_scalar(1.0).sqrt();
    let factor = psi.exp() * tilt;
    let gbar = |a: usize, b: usize, c: usize| ambient.gamma(a, b, c).compose(&inner);
    let g000 = gbar(0, 0, 0);
    let g00: Vec<Jet> = (0..n).map(|i| gbar(0, 0, i + 1)).collect();
    let mut h = vec![vec![Jet::zero(n, order - 1); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut hess = du[i].diff(j);
            for k in 0..n {
                hess = hess - induced.gamma(k, i, j) * du[k];
            }
            let rhs = -hess - g000 * du[i] * du[j] - g00[j] * du[i] - g00[i] * du[j] - gbar(0, i + 1, j + 1);
            let value = factor * rhs;
            h[i][j] = value;
            h[j][i] = value;
        }
    }
    Ok(GraphJets { first, ambient, induced, h })
}

fn extrinsic_from(first: FirstFundamental, h: DMatrix<f64>) -> ExtrinsicData {
    let weingarten = &first.induced_inverse * &h;
    let mean_curvature = weingarten.trace();
    let norm_a_sq = (&weingarten * &weingarten).trace();
    ExtrinsicData { first, second_fundamental: h, weingarten, mean_curvature, norm_a_sq }
}

pub fn second_fundamental(surface: &GraphHypersurface, angles: &[f64]) -> Result<ExtrinsicData> {
    let jets = graph_jets(surface, angles, 1)?;
    let n = angles.len();
    let h = DMatrix::from_fn(n, n, |i, j| jets.h[i][j].value());
    Ok(extrinsic_from(jets.first, h))
}

/// `h̄_ij = e^{ψ̃}(−½σ̇_ij − ψ̃̇σ_ij)` on the slice `{τ = tau}`.
pub fn coordinate_slice_curvature(metric: &SpacetimeMetric, tau: f64, angles: &[f64]) -> Result<DMatrix<f64>> {
    let mut event = vec![tau];
    event.extend_from_slice(angles);
    let n = metric.n();
    let sigma = metric.spatial_jets(&event, 1)?;
    let psi = metric.conformal_factor().jet(&event, 1)?;
    let (e, rate) = (psi.value().exp(), psi.d1(0));
    Ok(DMatrix::from_fn(n, n, |i, j| e * (-0.5 * sigma[i][j].d1(0) - rate * sigma[i][j].value())))
}

/// Extrinsic data of the slice `{τ = tau}` from [`coordinate_slice_curvature`].
pub fn coordinate_slice_extrinsic(metric: &SpacetimeMetric, tau: f64, angles: &[f64]) -> Result<ExtrinsicData> {
    let surface = GraphHypersurface::slice(metric.clone(), tau);
    let first = graph_geometry(&surface, angles)?;
    Ok(extrinsic_from(first, coordinate_slice_curvature(metric, tau, angles)?))
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GaussCodazziResiduals {
    /// `|R + (H² − |A|²) − 2G(ν, ν)|`.
    pub gauss_trace: f64,
    /// max-abs of `R_ijkl + (h_ik h_jl − h_il h_jk) − R̄(x_i, x_j, x_k, x_l)`.
    pub gauss_full: f64,
    /// max-abs of `h_ij;k − h_ik;j − R̄(ν, x_i, x_j, x_k)`.
    pub codazzi: f64,
    /// `2G(ν, ν)` for reference.
    pub einstein_normal: f64,
}

pub fn gauss_codazzi_residuals(surface: &GraphHypersurface, angles: &[f64]) -> Result<GaussCodazziResiduals> {
    let jets = graph_jets(surface, angles, 2)?;
    let n = angles.len();
    let d = n + 1;
    let ambient = curvature_from_connection(&jets.ambient);
    let intrinsic = curvature_from_connection(&jets.induced);
    let h = DMatrix::from_fn(n, n, |i, j| jets.h[i][j].value());
    let data = extrinsic_from(jets.first.clone(), h.clone());
    let x = &jets.first.tangents;
    let nu = &jets.first.past_normal;

    let project = |a: &[f64], b: &[f64], c: &[f64], e: &[f64]| -> f64 {
        let r = &ambient.riemann_lower;
        let mut s = 0.0;
        for p in 0..d {
            for q in 0..d {
                for s2 in 0..d {
                    for t in 0..d {
                        s += r[[p, q, s2, t]] * a[p] * b[q] * c[s2] * e[t];
                    }
                }
            }
        }
        s
    };

    let mut gauss_full: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let lhs = intrinsic.riemann_lower[[i, j, k, l]] + (h[(i, k)] * h[(j, l)] - h[(i, l)] * h[(j, k)]);
                    gauss_full = gauss_full.max((lhs - project(&x[i], &x[j], &x[k], &x[l])).abs());
                }
            }
        }
    }

    let gamma = jets.induced.christoffel();
    let cov = |i: usize, j: usize, k: usize| -> f64 {
        let mut v = jets.h[i][j].d1(k);
        for l in 0..n {
            v -= gamma[[l, k, i]] * h[(l, j)] + gamma[[l, k, j]] * h[(i, l)];
        }
        v
    };
    let mut codazzi: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = cov(i, j, k) - cov(i, k, j);
                codazzi = codazzi.max((lhs - project(nu, &x[i], &x[j], &x[k])).abs());
            }
        }
    }

    let einstein_normal = 2.0 * bilinear(&ambient.einstein, nu, nu);
    let h2 = data.mean_curvature * data.mean_curvature;
    let gauss_trace = (intrinsic.scalar + (h2 - data.norm_a_sq) - einstein_normal).abs();
    Ok(GaussCodazziResiduals { gauss_trace, gauss_full, codazzi, einstein_normal })
}

/// Intrinsic and extrinsic scalars of a graph at a node.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LeafScalars {
    /// Scalar curvature of the induced metric.
    pub scalar: f64,
    pub mean_curvature: f64,
    pub norm_a_sq: f64,
    /// `G(ν, ν)` of the ambient metric.
    pub einstein_normal: f64,
    pub area_density: f64,
}

pub fn leaf_scalars(surface: &GraphHypersurface, angles: &[f64]) -> Result<LeafScalars> {
    let jets = graph_jets(surface, angles, 2)?;
    let n = angles.len();
    let ambient = curvature_from_connection(&jets.ambient);
    let intrinsic = curvature_from_connection(&jets.induced);
    let h = DMatrix::from_fn(n, n, |i, j| jets.h[i][j].value());
    let data = extrinsic_from(jets.first.clone(), h);
    let nu = &jets.first.past_normal;
    Ok(LeafScalars {
        scalar: intrinsic.scalar,
        mean_curvature: data.mean_curvature,
        norm_a_sq: data.norm_a_sq,
        einstein_normal: bilinear(&ambient.einstein, nu, nu),
        area_density: jets.first.area_density,
    })
}

/// max-abs of `e^{ψ̃}h^j_i − h̃^j_i − ψ̃_α ν̃^α δ^j_i`, with the tilde side
/// computed on the same graph in the conformal metric.
pub fn conformal_extrinsic_residual(surface: &GraphHypersurface, angles: &[f64]) -> Result<f64> {
    let full = second_fundamental(surface, angles)?;
    let tilde = second_fundamental(&surface.conformal(), angles)?;
    let psi = surface.ambient.conformal_factor().jet(&full.first.event, 1)?;
    let shift: f64 = tilde.first.past_normal.iter().enumerate().map(|(a, v)| psi.d1(a) * v).sum();
    let n = angles.len();
    let expected = &tilde.weingarten + DMatrix::identity(n, n) * shift;
    Ok((full.weingarten * full.first.conformal_factor.exp() - expected).abs().max())
}
