//! Inverse mean curvature flow of coordinate slices, `du/dt = e^{−ψ̃(u)}/H(u)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::arw::ARWSpec;
use crate::geometry::metric::SpacetimeMetric;
use crate::geometry::quadrature::QuadratureGrid;
use crate::hypersurface::{coordinate_slice_extrinsic, leaf_scalars, GraphHypersurface};
use crate::limits::least_squares_slope;

/// Integration stops once `|u|` drops below this.
pub const SINGULARITY_CUTOFF: f64 = 1e-12;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowState {
    pub t: f64,
    pub u: f64,
    pub mean_curvature: f64,
    pub f_of_u: f64,
    /// `d f(u(t)) / dt`.
    pub dfdt: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
    /// `|u|` fell below [`SINGULARITY_CUTOFF`] before the end time.
    pub reached_singularity: bool,
    pub tolerance: f64,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.states.last().unwrap()
    }

    /// At most `count` states, evenly spaced by index, keeping both ends.
    pub fn thinned(&self, count: usize) -> Vec<FlowState> {
        let len = self.states.len();
        if count >= len || count < 2 {
            return self.states.clone();
        }
        (0..count).map(|k| self.states[k * (len - 1) / (count - 1)]).collect()
    }
}

/// Right-hand side of the symmetric reduction.
struct Flow<'a> {
    spec: &'a ARWSpec,
    metric: SpacetimeMetric,
    angles: Vec<f64>,
}

impl<'a> Flow<'a> {
    fn new(spec: &'a ARWSpec) -> Result<Flow<'a>> {
        if spec.is_angular() {
            return Err(Error::Unsupported("the flow needs psi and lambda independent of the angles".into()));
        }
        let mut angles = vec![std::f64::consts::FRAC_PI_2; spec.n()];
        angles[spec.n() - 1] = 1.0;
        Ok(Flow { spec, metric: spec.metric()?, angles })
    }

    /// `(du/dt, H, f(u), f′(u))`.
    fn eval(&self, t: f64, u: f64) -> Result<(f64, f64, f64, f64)> {
        let data = coordinate_slice_extrinsic(&self.metric, u, &self.angles)?;
        let h = data.mean_curvature;
        if !(h > 0.0) {
            return Err(Error::NonPositiveMeanCurvature { t, u, mean_curvature: h });
        }
        let d = self.spec.f().derivatives(u)?;
        let rate = (-data.first.conformal_factor).exp() / h;
        Ok((rate, h, d[0], d[1]))
    }

    fn state(&self, t: f64, u: f64) -> Result<(FlowState, f64)> {
        let (rate, h, f, fp) = self.eval(t, u)?;
        Ok((FlowState { t, u, mean_curvature: h, f_of_u: f, dfdt: fp * rate }, rate))
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One step from `(t, u)` with first stage `k0`. Returns the fifth-order
/// value, the embedded error and the last stage.
fn dopri_step(flow: &Flow, t: f64, u: f64, k0: f64, h: f64) -> Result<(f64, f64, f64)> {
    let mut k = [0.0; 7];
    k[0] = k0;
    for s in 1..7 {
        let y = u + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
        if y >= 0.0 {
            // stage overshot the singularity; signal a rejected step
            return Ok((f64::NAN, f64::INFINITY, f64::NAN));
        }
        k[s] = flow.eval(t + C[s] * h, y)?.0;
    }
    let y5 = u + h * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
    let y4 = u + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
    Ok((y5, (y5 - y4).abs(), k[6]))
}

fn check_start(spec: &ARWSpec, u0: f64, t_end: f64) -> Result<()> {
    if !(u0 > spec.domain_start() && u0 < 0.0) {
        return Err(Error::InvalidArgument(format!("u0 = {u0} must lie in ({}, 0)", spec.domain_start())));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("end time {t_end} must be positive")));
    }
    Ok(())
}

/// Adaptive integration from the slice `{τ = u0}` up to `t_end`. The local
/// error per step is kept below `tolerance·(|u| + SINGULARITY_CUTOFF)`.
pub fn imcf_run(spec: &ARWSpec, u0: f64, t_end: f64, tolerance: f64) -> Result<Trajectory> {
    check_start(spec, u0, t_end)?;
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} must be positive")));
    }
    let flow = Flow::new(spec)?;
    let (first, mut k0) = flow.state(0.0, u0)?;
    let mut states = vec![first];
    let (mut t, mut u) = (0.0, u0);
    let mut h = 1e-3 * (u0 / k0).abs().min(t_end);
    let mut prev_err: f64 = 1.0;
    let mut rejected_steps = 0;
    let mut reached_singularity = false;
    while t < t_end {
        if u.abs() < SINGULARITY_CUTOFF {
            reached_singularity = true;
            break;
        }
        h = h.min(t_end - t);
        let (y, err, _) = dopri_step(&flow, t, u, k0, h)?;
        let ratio = err / (tolerance * (u.abs() + SINGULARITY_CUTOFF));
        if ratio <= 1.0 && y < 0.0 {
            // PI controller, exponents 0.7/5 and 0.4/5
            let factor = if ratio == 0.0 { 5.0 } else { 0.9 * ratio.powf(-0.14) * prev_err.powf(0.08) };
            prev_err = ratio.max(1e-4);
            t = if t_end - t - h <= 1e-14 * t_end { t_end } else { t + h };
            u = y;
            let (state, rate) = flow.state(t, u)?;
            k0 = rate;
            states.push(state);
            h *= factor.clamp(0.2, 5.0);
        } else {
            rejected_steps += 1;
            let factor = if ratio.is_finite() { (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= factor;
            if h < 1e-14 * t_end.max(1.0) {
                return Err(Error::InvalidArgument(format!("step size underflow at t = {t}, u = {u}")));
            }
        }
    }
    Ok(Trajectory { states, reached_singularity, tolerance, rejected_steps })
}

/// `steps` equal fifth-order steps; final `u`. Used to measure convergence order.
pub fn imcf_fixed_step(spec: &ARWSpec, u0: f64, t_end: f64, steps: usize) -> Result<f64> {
    check_start(spec, u0, t_end)?;
    let flow = Flow::new(spec)?;
    let h = t_end / steps as f64;
    let mut u = u0;
    for i in 0..steps {
        let t = i as f64 * h;
        let (y, _, _) = dopri_step(&flow, t, u, flow.eval(t, u)?.0, h)?;
        if !y.is_finite() {
            return Err(Error::InvalidArgument(format!("step {h} overshoots the singularity")));
        }
        u = y;
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowDiagnostics {
    /// Slope of `f(u(t))` over the final third; tends to `−1/n`.
    pub slope: f64,
    /// Slope of `log|u(t)|` over the final third; tends to `−γ̃/n`.
    pub decay_rate: f64,
}

/// Decades of `|u|` decay a trajectory must span for [`flow_diagnostics`].
pub const MIN_DECADES: f64 = 2.0;

pub fn flow_diagnostics(trajectory: &Trajectory) -> Result<FlowDiagnostics> {
    let s = &trajectory.states;
    let decades = if s.len() >= 2 { (s[0].u / s[s.len() - 1].u).abs().log10() } else { 0.0 };
    if decades < MIN_DECADES {
        return Err(Error::InvalidArgument(format!(
            "trajectory spans {decades:.2} decades of |u| decay, need {MIN_DECADES}"
        )));
    }
    let (t0, t1) = (s[0].t, s[s.len() - 1].t);
    let tail: Vec<&FlowState> = s.iter().filter(|x| x.t >= t0 + 2.0 * (t1 - t0) / 3.0).collect();
    if tail.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: tail.len() });
    }
    let t: Vec<f64> = tail.iter().map(|x| x.t).collect();
    let f: Vec<f64> = tail.iter().map(|x| x.f_of_u).collect();
    let l: Vec<f64> = tail.iter().map(|x| x.u.abs().ln()).collect();
    Ok(FlowDiagnostics { slope: least_squares_slope(&t, &f), decay_rate: least_squares_slope(&t, &l) })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowMass {
    pub t: f64,
    pub u: f64,
    /// `∫ G(ν,ν) e^{ωf}e^{ψ}` over the leaf.
    pub integral: f64,
    /// `∫ (R − (|A|² − H²/n)) e^{ωf}e^{ψ}`, which tends to 0.
    pub lemma: f64,
    /// `(n−1)/(2n) ∫ H² e^{ωf}e^{ψ}`, which has the same limit as `integral`.
    pub mean_curvature_form: f64,
}

/// Mass quantities on each given leaf, evaluated concurrently.
pub fn mass_along_flow(spec: &ARWSpec, states: &[FlowState], grid: &QuadratureGrid) -> Result<Vec<FlowMass>> {
    let metric = spec.metric()?;
    let n = spec.n() as f64;
    states
        .par_iter()
        .map(|s| {
            let surface = GraphHypersurface::slice(metric.clone(), s.u);
            let mut parts = [0.0f64; 3];
            for (k, part) in parts.iter_mut().enumerate() {
                *part = grid.integrate_density(|angles| {
                    let l = leaf_scalars(&surface, angles)?;
                    let w = (spec.omega() * s.f_of_u + spec.psi().eval_slots(&["tau", "theta1"], &[s.u, angles[0]])?)
                        .exp()
                        * l.area_density;
                    let h2 = l.mean_curvature * l.mean_curvature;
                    Ok(w * match k {
                        0 => l.einstein_normal,
                        1 => l.scalar - (l.norm_a_sq - h2 / n),
                        _ => (n - 1.0) / (2.0 * n) * h2,
                    })
                })?;
            }
            Ok(FlowMass { t: s.t, u: s.u, integral: parts[0], lemma: parts[1], mean_curvature_form: parts[2] })
        })
        .collect()
}
