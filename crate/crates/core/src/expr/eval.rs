use std::fmt;

use super::ast::{BinaryOp, Expression, Function};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    UnboundVariable(String),
    /// Argument outside the domain of `operation`.
    Domain { operation: &'static str, argument: f64 },
    /// Finite inputs produced an infinite or NaN result.
    NonFinite { operation: &'static str },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundVariable(name) => write!(f, "unbound variable `{name}`"),
            EvalError::Domain { operation, argument } => {
                write!(f, "domain error: {operation} of {argument}")
            }
            EvalError::NonFinite { operation } => write!(f, "{operation} produced a non-finite value"),
        }
    }
}

impl std::error::Error for EvalError {}

fn finite(operation: &'static str, v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { operation })
    }
}

pub(crate) fn apply_function(func: Function, x: f64) -> Result<f64, EvalError> {
    let name = func.name();
    let v = match func {
        Function::Exp => x.exp(),
        Function::Log => {
            if x <= 0.0 {
                return Err(EvalError::Domain { operation: name, argument: x });
            }
            x.ln()
        }
        Function::Sin => x.sin(),
        Function::Cos => x.cos(),
        Function::Tan => x.tan(),
        Function::Sqrt => {
            if x < 0.0 {
                return Err(EvalError::Domain { operation: name, argument: x });
            }
            x.sqrt()
        }
        Function::Abs => x.abs(),
    };
    finite(name, v)
}

/// Integer-valued exponents use repeated multiplication and accept any base;
/// other exponents are `exp(b log a)` and need `a > 0`.
pub(crate) fn power(a: f64, b: f64) -> Result<f64, EvalError> {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        if a == 0.0 && b < 0.0 {
            return Err(EvalError::Domain { operation: "power", argument: a });
        }
        return finite("power", a.powi(b as i32));
    }
    if a <= 0.0 {
        return Err(EvalError::Domain { operation: "power", argument: a });
    }
    finite("power", (b * a.ln()).exp())
}

pub(crate) fn apply_binary(op: BinaryOp, a: f64, b: f64) -> Result<f64, EvalError> {
    match op {
        BinaryOp::Add => finite("addition", a + b),
        BinaryOp::Sub => finite("subtraction", a - b),
        BinaryOp::Mul => finite("multiplication", a * b),
        BinaryOp::Div => {
            if b == 0.0 {
                return Err(EvalError::Domain { operation: "division", argument: b });
            }
            finite("division", a / b)
        }
        BinaryOp::Pow => power(a, b),
    }
}

impl Expression {
    /// Evaluates with variables resolved by `lookup`.
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, EvalError> {
        match self {
            Expression::Number(v) => Ok(*v),
            Expression::Pi => Ok(std::f64::consts::PI),
            Expression::Variable(name) => {
                lookup(name).ok_or_else(|| EvalError::UnboundVariable(name.to_string()))
            }
            Expression::Neg(a) => Ok(-a.eval_with(lookup)?),
            Expression::Binary(op, a, b) => {
                apply_binary(*op, a.eval_with(lookup)?, b.eval_with(lookup)?)
            }
            Expression::Call(func, a) => apply_function(*func, a.eval_with(lookup)?),
        }
    }

    /// Evaluates an expression whose only free variables are `names`, bound
    /// positionally to `values`.
    pub fn eval_slots(&self, names: &[&str], values: &[f64]) -> Result<f64, EvalError> {
        self.eval_with(&|name| names.iter().position(|n| *n == name).map(|i| values[i]))
    }
}
