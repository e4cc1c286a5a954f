//! Scalar expressions: parsing, evaluation, exact symbolic differentiation and
//! substitution.
//!
//! Every scalar datum of a spacetime (the warping profile `f`, the perturbations
//! `psi` and `lambda`, graph functions `u`) is carried as an [`Expression`], so
//! curvature computations consume exact derivatives instead of difference
//! quotients.
//!
//! Grammar (no implicit multiplication):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?        // right-associative, binds tighter than unary minus
//! primary := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//! func    := exp | log | sin | cos | tan | sqrt | abs
//! ```

mod ast;
mod diff;
mod eval;
mod parse;

pub use ast::{BinaryOp, Expression, Function};
pub use eval::EvalError;
pub use parse::{parse, ParseError};

use std::collections::HashMap;

/// Evaluates `expr` with variables looked up in `bindings`.
pub fn evaluate(expr: &Expression, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
    expr.eval_with(&|name| bindings.get(name).copied())
}

/// `order`-th partial derivative of `expr` with respect to `var`.
///
/// Panics if `order` is zero.
pub fn differentiate(expr: &Expression, var: &str, order: usize) -> Expression {
    assert!(order >= 1, "derivative order must be positive");
    (0..order).fold(expr.clone(), |e, _| e.derivative(var))
}

/// Replaces every occurrence of `var` in `expr` by `replacement`.
pub fn substitute(expr: &Expression, var: &str, replacement: &Expression) -> Expression {
    expr.substitute(var, replacement)
}
