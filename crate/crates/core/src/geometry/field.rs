//! Scalar fields on a coordinate chart with exact partial derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::jet::{self, Jet, MAX_ORDER};

/// An expression over named chart coordinates whose partial derivatives up to
/// third order are precomputed symbolically.
#[derive(Clone)]
pub struct ExprField {
    expr: Expression,
    coords: Arc<[String]>,
    /// Aligned with `jet::multi_indices(coords.len(), MAX_ORDER)`; `None` marks
    /// a partial that vanishes identically.
    partials: Arc<[Option<Expression>]>,
}

impl fmt::Debug for ExprField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExprField({})", self.expr)
    }
}

impl ExprField {
    pub fn new(expr: Expression, coords: &[&str]) -> Result<ExprField> {
        let expr = expr.fold_constants();
        if let Some(v) = expr.free_variables().into_iter().find(|v| !coords.contains(&v.as_str())) {
            return Err(Error::InvalidSpec(format!(
                "expression `{expr}` uses `{v}`, which is not a chart coordinate ({})",
                coords.join(", ")
            )));
        }
        let indices = jet::multi_indices(coords.len(), MAX_ORDER);
        let mut partials: Vec<Option<Expression>> = Vec::with_capacity(indices.len());
        for alpha in indices {
            let entry = match alpha.iter().position(|&a| a > 0) {
                None => Some(expr.clone()),
                Some(i) => {
                    let mut lower = *alpha;
                    lower[i] -= 1;
                    let k = indices.iter().position(|m| *m == lower).unwrap();
                    partials[k].as_ref().and_then(|p| {
                        let d = p.derivative(coords[i]);
                        (!d.is_zero()).then_some(d)
                    })
                }
            };
            partials.push(entry);
        }
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        Ok(ExprField { expr, coords: coords.into(), partials: partials.into() })
    }

    pub fn zero(coords: &[&str]) -> ExprField {
        ExprField::new(Expression::num(0.0), coords).unwrap()
    }

    pub fn expression(&self) -> &Expression {
        &self.expr
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.expr.as_number().is_some()
    }

    fn eval(&self, e: &Expression, point: &[f64]) -> Result<f64> {
        Ok(e.eval_with(&|name| self.coords.iter().position(|c| c == name).map(|i| point[i]))?)
    }

    pub fn value(&self, point: &[f64]) -> Result<f64> {
        self.eval(&self.expr, point)
    }

    /// Taylor jet at `point` in all chart coordinates, up to `order`.
    pub fn jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        let vars = self.coords.len();
        if let Some(c) = self.expr.as_number() {
            return Ok(Jet::constant(vars, order, c));
        }
        let mut values = Vec::with_capacity(jet::multi_indices(vars, order).len());
        for p in &self.partials[..jet::multi_indices(vars, order).len()] {
            values.push(match p {
                Some(e) => self.eval(e, point)?,
                None => 0.0,
            });
        }
        let mut k = 0;
        Ok(Jet::from_partials(vars, order, |_| {
            k += 1;
            values[k - 1]
        }))
    }
}

/// A function of the time coordinate alone, known through its derivatives.
pub trait TimeProfile: Send + Sync + fmt::Debug {
    /// `[f, f', f'', f''']` at `tau`.
    fn derivatives(&self, tau: f64) -> Result<[f64; 4]>;

    /// Closed-form expression in `tau`, when one exists.
    fn expression(&self) -> Option<&Expression> {
        None
    }

    fn describe(&self) -> String;

    fn value(&self, tau: f64) -> Result<f64> {
        Ok(self.derivatives(tau)?[0])
    }

    /// Jet in `vars` chart variables, depending on variable 0 only.
    fn jet(&self, tau: f64, vars: usize, order: usize) -> Result<Jet> {
        Ok(Jet::univariate(vars, order, 0, &self.derivatives(tau)?))
    }
}

/// A time profile given by an expression in `tau`.
#[derive(Debug, Clone)]
pub struct ExprProfile {
    expr: Expression,
    derivs: [Expression; 3],
}

impl ExprProfile {
    pub fn new(expr: Expression) -> Result<ExprProfile> {
        let expr = expr.fold_constants();
        if let Some(v) = expr.free_variables().into_iter().find(|v| v != "tau") {
            return Err(Error::InvalidSpec(format!("f may depend on `tau` only, found `{v}`")));
        }
        let d1 = expr.derivative("tau");
        let d2 = d1.derivative("tau");
        let d3 = d2.derivative("tau");
        Ok(ExprProfile { expr, derivs: [d1, d2, d3] })
    }
}

impl TimeProfile for ExprProfile {
    fn derivatives(&self, tau: f64) -> Result<[f64; 4]> {
        let at = |e: &Expression| -> Result<f64> { Ok(e.eval_slots(&["tau"], &[tau])?) };
        Ok([at(&self.expr)?, at(&self.derivs[0])?, at(&self.derivs[1])?, at(&self.derivs[2])?])
    }

    fn expression(&self) -> Option<&Expression> {
        Some(&self.expr)
    }

    fn describe(&self) -> String {
        self.expr.to_string()
    }
}

/// `g(τ) = f(τ / c) + shift`.
#[derive(Debug, Clone)]
pub struct RescaledProfile {
    inner: Arc<dyn TimeProfile>,
    factor: f64,
    shift: f64,
}

impl RescaledProfile {
    pub fn new(inner: Arc<dyn TimeProfile>, factor: f64, shift: f64) -> RescaledProfile {
        assert!(factor > 0.0);
        RescaledProfile { inner, factor, shift }
    }
}

impl TimeProfile for RescaledProfile {
    fn derivatives(&self, tau: f64) -> Result<[f64; 4]> {
        let d = self.inner.derivatives(tau / self.factor)?;
        let c = self.factor;
        Ok([d[0] + self.shift, d[1] / c, d[2] / (c * c), d[3] / (c * c * c)])
    }

    fn describe(&self) -> String {
        format!("({})(tau/{}) + {}", self.inner.describe(), self.factor, self.shift)
    }
}

/// `g(s) = f(s + εs²) + log(1 + 2εs)`.
#[derive(Debug, Clone)]
pub struct ReparametrizedProfile {
    inner: Arc<dyn TimeProfile>,
    epsilon: f64,
}

impl ReparametrizedProfile {
    pub fn new(inner: Arc<dyn TimeProfile>, epsilon: f64) -> ReparametrizedProfile {
        ReparametrizedProfile { inner, epsilon }
    }
}

impl TimeProfile for ReparametrizedProfile {
    fn derivatives(&self, s: f64) -> Result<[f64; 4]> {
        let e = self.epsilon;
        let phi = Jet::univariate(1, 3, 0, &[s + e * s * s, 1.0 + 2.0 * e * s, 2.0 * e, 0.0]);
        let dphi = Jet::univariate(1, 3, 0, &[1.0 + 2.0 * e * s, 2.0 * e, 0.0, 0.0]);
        let outer = self.inner.derivatives(phi.value())?;
        let g = phi.apply(&outer) + dphi.ln();
        Ok([g.value(), g.d1(0), g.partial(&[2, 0, 0, 0]), g.partial(&[3, 0, 0, 0])])
    }

    fn describe(&self) -> String {
        format!("reparametrized({}, {})", self.inner.describe(), self.epsilon)
    }
}
