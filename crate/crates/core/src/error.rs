use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("degenerate metric at event {event:?} (determinant {determinant:e})")]
    DegenerateMetric { event: Vec<f64>, determinant: f64 },
    #[error("graph is not spacelike at node {node:?}: |Du|^2 = {gradient_norm_sq}")]
    NotSpacelike { node: Vec<f64>, gradient_norm_sq: f64 },
    #[error("non-finite integrand value {value} at quadrature node {node}")]
    NonFiniteIntegrand { node: usize, value: f64 },
    #[error("difference stencil of step {step} around {event:?} leaves the domain")]
    StencilOutsideDomain { event: Vec<f64>, step: f64 },
    #[error("mean curvature {mean_curvature} is not positive at t = {t}, u = {u}")]
    NonPositiveMeanCurvature { t: f64, u: f64, mean_curvature: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("invalid spacetime: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("root bracketing failed: {0}")]
    Bracketing(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
