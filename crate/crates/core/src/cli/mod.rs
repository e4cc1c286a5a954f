//! Batch front end: one JSON scenario in, one table out.

mod config;
mod table;

pub use config::{
    Command, Format, GridConfig, ImcfConfig, OutputConfig, ScenarioConfig, ScheduleConfig, SpacetimeConfig, TccConfig,
    Tolerances,
};
pub use table::{format_number, Cell, Table};

use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::curvature::{conformal_residuals, curvature_at, einstein_divergence_residual};
use crate::error::Error;
use crate::expr::Expression;
use crate::geometry::arw::{arw_validate_with, ARWSpec};
use crate::geometry::quadrature::QuadratureGrid;
use crate::hypersurface::{gauss_codazzi_residuals, GraphFunction, GraphHypersurface};
use crate::imcf::{flow_diagnostics, imcf_run, mass_along_flow};
use crate::mass::{mass_from_limit, mass_limit, monotonicity_scan, slab_balance, tcc_check, MassReport};
use crate::sads::{horizon, oracle_mass_integral, profile, r_of_x0};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical abort: {0}")]
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidSpec(_)
            | Error::InvalidArgument(_)
            | Error::Unsupported(_)
            | Error::InsufficientSamples { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output: PathBuf,
    pub exit_code: i32,
    pub table: Table,
}

pub fn config_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads, runs and writes one scenario.
pub fn run_path(config_path: &Path, output_dir: &Path) -> Result<RunOutcome, CliError> {
    let bytes = std::fs::read(config_path).map_err(|source| CliError::Io { path: config_path.into(), source })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Config(format!("config is not UTF-8: {e}")))?;
    let config = ScenarioConfig::from_json(&text).map_err(|e| CliError::Config(e.to_string()))?;
    run(&config, &config_digest(&bytes), output_dir)
}

pub fn run(config: &ScenarioConfig, digest: &str, output_dir: &Path) -> Result<RunOutcome, CliError> {
    let (table, passed) = compute(config)?;
    let name = config
        .output
        .path
        .clone()
        .unwrap_or_else(|| format!("{}.{}", config.command.name(), config.output.format.extension()));
    let output = output_dir.join(name);
    let body = match config.output.format {
        Format::Csv => table.to_csv(digest),
        Format::Json => table.to_json(config.command.name(), digest),
    };
    if let Some(parent) = output.parent() {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.into(), source })?;
    }
    std::fs::write(&output, body).map_err(|source| CliError::Io { path: output.clone(), source })?;
    Ok(RunOutcome { output, exit_code: if passed { EXIT_OK } else { EXIT_VALIDATION }, table })
}

/// The table and whether validation passed.
pub fn compute(config: &ScenarioConfig) -> Result<(Table, bool), CliError> {
    let spec = config.spacetime.build()?;
    let grid = config.grid.build(spec.n())?;
    let schedule = config.schedule.build(&spec)?;
    match config.command {
        Command::Validate => validate(config, &spec, &schedule),
        Command::Mass => mass(config, &spec, &grid, &schedule).map(|t| (t, true)),
        Command::Imcf => imcf(config, &spec, &grid).map(|t| (t, true)),
        Command::Check => check(&spec, &grid, &schedule).map(|t| (t, true)),
        Command::SadsDemo => sads_demo(config, &spec, &grid, &schedule).map(|t| (t, true)),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn validate(config: &ScenarioConfig, spec: &ARWSpec, schedule: &[f64]) -> Result<(Table, bool), CliError> {
    let r = arw_validate_with(spec, schedule, config.tolerances.mass_increment)?;
    let mut t = Table::new(&["tau", "f_prime", "mass_sequence", "curvature_sequence", "ratio2", "ratio3"]);
    for k in 0..schedule.len() {
        t.push(vec![
            schedule[k].into(),
            r.f_prime[k].into(),
            r.mass_sequence[k].into(),
            r.curvature_sequence[k].into(),
            r.ratio2[k].into(),
            r.ratio3[k].into(),
        ]);
    }
    t.note("passed", r.passed);
    t.note("time_orientation", r.time_orientation);
    t.note("mass_converges", r.mass_converges);
    t.note("curvature_divergent", r.curvature_divergent);
    t.note("ratios_bounded", r.ratios_bounded);
    t.note("m_hat", format_number(r.mass_limit));
    t.note("omega_estimate", format_number(r.omega_estimate));
    t.details = to_json(&r);
    Ok((t, r.passed))
}

/// Aitken-accelerated `m̂` per row; the first two rows use the raw integral.
fn running_mass(n: usize, report: &MassReport) -> Vec<f64> {
    (0..report.integrals.len())
        .map(|k| mass_from_limit(n, if k >= 2 { report.accelerated[k - 2] } else { report.integrals[k] }))
        .collect()
}

fn mass(config: &ScenarioConfig, spec: &ARWSpec, grid: &QuadratureGrid, schedule: &[f64]) -> Result<Table, CliError> {
    let report = mass_limit(spec, grid, schedule)?;
    let scan = monotonicity_scan(spec, schedule, grid)?;
    let tcc = tcc_check(spec, config.tcc.events, config.tcc.directions, config.seed)?;
    let m_hat = running_mass(spec.n(), &report);
    let mut t = Table::new(&[
        "tau",
        "integral",
        "m_hat",
        "f_prime",
        "g00_min",
        "spatial_einstein_min",
        "convexity_min",
    ]);
    for (k, s) in scan.samples.iter().enumerate() {
        t.push(vec![
            s.tau.into(),
            report.integrals[k].into(),
            m_hat[k].into(),
            s.f_prime.into(),
            s.g00_min.into(),
            s.spatial_einstein_min.into(),
            s.convexity_min.into(),
        ]);
    }
    t.note("m_hat", format_number(report.m_hat));
    t.note("limit", format_number(report.limit));
    t.note("error", format_number(report.error));
    t.note("monotone", report.monotone);
    t.note("direction", to_json(&scan.direction).as_str().unwrap_or_default());
    t.note("tcc_minimum", format_number(tcc.minimum));
    t.note("tcc_violations", tcc.violations.len());
    t.details = json!({ "mass": report, "monotonicity": scan, "tcc": tcc });
    Ok(t)
}

fn imcf(config: &ScenarioConfig, spec: &ARWSpec, grid: &QuadratureGrid) -> Result<Table, CliError> {
    let u0 = config.imcf.u0.unwrap_or(0.5 * spec.domain_start());
    let trajectory = imcf_run(spec, u0, config.imcf.t_end, config.tolerances.ode)?;
    let leaves = trajectory.thinned(config.imcf.leaves);
    let masses = mass_along_flow(spec, &leaves, grid)?;
    let mut t = Table::new(&["t", "u", "H", "f_u", "dfdt", "integral", "lemma", "mean_curvature_form"]);
    for (s, m) in leaves.iter().zip(&masses) {
        t.push(vec![
            s.t.into(),
            s.u.into(),
            s.mean_curvature.into(),
            s.f_of_u.into(),
            s.dfdt.into(),
            m.integral.into(),
            m.lemma.into(),
            m.mean_curvature_form.into(),
        ]);
    }
    t.note("steps", trajectory.states.len());
    t.note("rejected_steps", trajectory.rejected_steps);
    t.note("reached_singularity", trajectory.reached_singularity);
    let diagnostics = flow_diagnostics(&trajectory);
    match &diagnostics {
        Ok(d) => {
            t.note("slope", format_number(d.slope));
            t.note("decay_rate", format_number(d.decay_rate));
        }
        Err(e) => t.note("diagnostics", format!("unavailable: {e}")),
    }
    t.details = json!({
        "trajectory": trajectory.states,
        "reached_singularity": trajectory.reached_singularity,
        "diagnostics": diagnostics.ok(),
        "leaves": masses,
    });
    Ok(t)
}

fn probe_angles(n: usize) -> Vec<f64> {
    [1.0, 1.2, 2.0][..n].to_vec()
}

fn check(spec: &ARWSpec, grid: &QuadratureGrid, schedule: &[f64]) -> Result<Table, CliError> {
    let metric = spec.metric()?;
    let angles = probe_angles(spec.n());
    let mut t = Table::new(&["check", "tau1", "tau2", "residual"]);
    let mut push = |name: &str, a: f64, b: Option<f64>, v: f64| t.push(vec![name.into(), a.into(), b.into(), v.into()]);
    for (k, &tau) in schedule.iter().enumerate() {
        let mut event = vec![tau];
        event.extend_from_slice(&angles);
        let c = conformal_residuals(spec, &event)?;
        push("conformal_ricci", tau, None, c.ricci);
        push("conformal_scalar", tau, None, c.scalar);
        let slice = GraphHypersurface::slice(metric.clone(), tau);
        let g = gauss_codazzi_residuals(&slice, &angles)?;
        push("gauss_trace_slice", tau, None, g.gauss_trace);
        push("gauss_full_slice", tau, None, g.gauss_full);
        push("codazzi_slice", tau, None, g.codazzi);
        if k > 0 {
            let u = Expression::mul(
                Expression::num(tau),
                crate::expr::parse("1 + 0.05*cos(theta1)").map_err(Error::from)?,
            );
            let tilted = GraphHypersurface::new(metric.clone(), GraphFunction::polar(u)?);
            let g = gauss_codazzi_residuals(&tilted, &angles)?;
            push("gauss_trace_graph", tau, None, g.gauss_trace);
            push("gauss_full_graph", tau, None, g.gauss_full);
            push("codazzi_graph", tau, None, g.codazzi);
        }
        if k > 0 {
            // scaled by max|G^α_β|/|τ|, the size of ∂_τ G near the singularity
            let h = 1e-3 * tau.abs();
            let scale = curvature_at(&metric, &event)?.einstein_mixed().amax() / tau.abs();
            let v = einstein_divergence_residual(&metric, &event, h)? / scale.max(f64::MIN_POSITIVE);
            push("einstein_divergence_relative", tau, None, v);
        }
    }
    for w in schedule.windows(2) {
        let b = slab_balance(spec, w[0], w[1], grid)?;
        push("slab_balance", w[0], Some(w[1]), b.residual);
    }
    Ok(t)
}

fn sads_demo(
    config: &ScenarioConfig,
    spec: &ARWSpec,
    grid: &QuadratureGrid,
    schedule: &[f64],
) -> Result<Table, CliError> {
    let params = config
        .spacetime
        .sads_params()
        .ok_or_else(|| CliError::Config("sads-demo needs spacetime kind \"sads\"".into()))??;
    let report = mass_limit(spec, grid, schedule)?;
    let m_hat = running_mass(spec.n(), &report);
    let gamma = spec.gamma_tilde();
    let n = params.n as f64;
    let mut t = Table::new(&[
        "tau",
        "r",
        "h_tilde",
        "f_prime",
        "curvature_term",
        "curvature_term_closed",
        "mass_sequence",
        "integral",
        "oracle_integral",
        "m_hat",
    ]);
    for (k, &tau) in schedule.iter().enumerate() {
        let r = r_of_x0(&params, tau)?;
        let p = profile(&params, r)?;
        let d = spec.f().derivatives(tau)?;
        t.push(vec![
            tau.into(),
            r.into(),
            p.h_tilde.into(),
            d[1].into(),
            (d[2] + gamma * d[1] * d[1]).into(),
            (params.lambda * r * r / n - 0.5 * (n - 1.0)).into(),
            (d[1] * d[1] * (2.0 * gamma * d[0]).exp()).into(),
            report.integrals[k].into(),
            oracle_mass_integral(&params, r)?.into(),
            m_hat[k].into(),
        ]);
    }
    t.note("horizon", format_number(horizon(&params)?));
    t.note("m_hat", format_number(report.m_hat));
    t.note("error", format_number(report.error));
    t.note("monotone", report.monotone);
    t.details = json!({ "mass": report });
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ScenarioConfig {
        ScenarioConfig::from_json(text).unwrap()
    }

    #[test]
    fn missing_omega_is_named() {
        let e = ScenarioConfig::from_json(r#"{"command":"mass","spacetime":{"kind":"custom","n":3,"f":"log(-tau)","a":-1}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("omega"), "{e}");
    }

    #[test]
    fn unparseable_expression_is_a_config_error() {
        let c = config(r#"{"command":"validate","spacetime":{"kind":"custom","n":3,"omega":1,"f":"log(-tau","a":-1}}"#);
        let e = compute(&c).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn validation_failure_has_its_own_code() {
        let c = config(
            r#"{"command":"validate","spacetime":{"kind":"custom","n":3,"omega":1,"f":"-log(-log(-tau))","a":-0.5}}"#,
        );
        assert!(!compute(&c).unwrap().1);
    }

    #[test]
    fn sads_demo_needs_sads() {
        let c = config(r#"{"command":"sads-demo","spacetime":{"kind":"rw-family","n":3,"omega":1,"k":1,"a":-1}}"#);
        assert!(matches!(compute(&c), Err(CliError::Config(_))));
    }
}
