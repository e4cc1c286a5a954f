//! The mass functional `∫_M G(ν,ν) e^{ωf} e^{ψ}` and its singular limit.

mod balance;
mod presentation;
mod probes;

pub use balance::{slab_balance, slab_balance_with, SlabBalance, SLAB_TIME_NODES};
pub use presentation::{normalize, reparametrize_time, rescale_presentation};
pub use probes::{
    monotonicity_scan, tcc_check, Direction, MonotonicityReport, MonotonicitySample, TccReport, TccViolation, MAX_RAPIDITY,
    MIN_TCC_DIRECTIONS,
};

use serde::Serialize;

use crate::curvature::{bilinear, curvature_at};
use crate::error::{Error, Result};
use crate::geometry::arw::ARWSpec;
use crate::geometry::metric::SpacetimeMetric;
use crate::geometry::quadrature::{sphere_volume, QuadratureGrid};
use crate::hypersurface::{graph_geometry, GraphFunction, GraphHypersurface};
use crate::limits::aitken;

/// Nodes per axis used when no grid is given.
pub const DEFAULT_NODES: usize = 48;

/// `I∞ ↦ m̂ = 2I∞ / (n(n−1)|S^n|)`.
pub fn mass_from_limit(n: usize, limit: f64) -> f64 {
    2.0 * limit / ((n * (n - 1)) as f64 * sphere_volume(n))
}

/// Pointwise integrand `G(ν,ν) e^{ωf} e^{ψ} sqrt(det g_ij)` of a graph at a
/// node. With `flip` the normal is replaced by `−ν`.
pub fn graph_integrand(
    spec: &ARWSpec,
    surface: &GraphHypersurface,
    angles: &[f64],
    flip: bool,
) -> Result<f64> {
    let first = graph_geometry(surface, angles)?;
    let curvature = curvature_at(surface.ambient(), &first.event)?;
    let nu: Vec<f64> = first.past_normal.iter().map(|v| if flip { -v } else { *v }).collect();
    let weight = spec.omega() * spec.f().value(first.event[0])?
        + spec.psi().eval_slots(&["tau", "theta1"], &first.event[..2])?;
    Ok(bilinear(&curvature.einstein, &nu, &nu) * weight.exp() * first.area_density)
}

fn integrate_graph(spec: &ARWSpec, surface: &GraphHypersurface, grid: &QuadratureGrid) -> Result<(f64, f64)> {
    if grid.n() != spec.n() {
        return Err(Error::InvalidArgument(format!("grid is for S^{}, spec has n = {}", grid.n(), spec.n())));
    }
    grid.integrate_density_with_magnitude(|x| graph_integrand(spec, surface, x, false))
}

/// `I(M)` for the graph `{τ = u(θ₁)}`.
pub fn graph_mass_integral(spec: &ARWSpec, u: &GraphFunction, grid: &QuadratureGrid) -> Result<f64> {
    let surface = GraphHypersurface::new(spec.metric()?, u.clone());
    Ok(integrate_graph(spec, &surface, grid)?.0)
}

/// `I(τ)` over the coordinate slice.
pub fn slice_mass_integral(spec: &ARWSpec, tau: f64, grid: &QuadratureGrid) -> Result<f64> {
    slice_mass_integral_in(spec, &spec.metric()?, tau, grid)
}

fn slice_mass_integral_in(spec: &ARWSpec, metric: &SpacetimeMetric, tau: f64, grid: &QuadratureGrid) -> Result<f64> {
    Ok(integrate_graph(spec, &GraphHypersurface::slice(metric.clone(), tau), grid)?.0)
}

/// `I(τ)` with a quadrature error estimate: the change against a grid with
/// half the nodes plus a round-off allowance.
pub fn slice_mass_integral_with_error(spec: &ARWSpec, tau: f64, grid: &QuadratureGrid) -> Result<(f64, f64)> {
    let metric = spec.metric()?;
    let surface = GraphHypersurface::slice(metric, tau);
    let (fine, magnitude) = integrate_graph(spec, &surface, grid)?;
    let coarse = integrate_graph(spec, &surface, &grid.with_nodes((grid.nodes_per_axis() / 2).max(2))?)?.0;
    Ok((fine, (fine - coarse).abs() + 64.0 * f64::EPSILON * magnitude))
}

#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub sample_times: Vec<f64>,
    pub integrals: Vec<f64>,
    pub accelerated: Vec<f64>,
    /// Extrapolated `I∞`.
    pub limit: f64,
    pub m_hat: f64,
    /// `|last Aitken correction|`.
    pub error: f64,
    /// `I(τ_k)` nondecreasing in `k` up to round-off.
    pub monotone: bool,
}

/// Round-off allowance, relative to `max |I|`, when comparing consecutive
/// integrals.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

pub(crate) fn nondecreasing(values: &[f64]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOLERANCE * scale)
}

/// Evaluates `I` on `schedule` (increasing toward 0) and extrapolates.
pub fn mass_limit(spec: &ARWSpec, grid: &QuadratureGrid, schedule: &[f64]) -> Result<MassReport> {
    if schedule.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: schedule.len() });
    }
    let metric = spec.metric()?;
    let integrals: Vec<f64> =
        schedule.iter().map(|&t| slice_mass_integral_in(spec, &metric, t, grid)).collect::<Result<_>>()?;
    let e = aitken(&integrals)?;
    Ok(MassReport {
        sample_times: schedule.to_vec(),
        monotone: nondecreasing(&integrals),
        integrals,
        m_hat: mass_from_limit(spec.n(), e.limit),
        limit: e.limit,
        error: e.error,
        accelerated: e.accelerated,
    })
}
