use super::ast::{BinaryOp, Expression, Function};

use Expression as E;

impl Expression {
    /// Exact first derivative with respect to `var`, constant-folded.
    pub fn derivative(&self, var: &str) -> Expression {
        if !self.depends_on(var) {
            return E::num(0.0);
        }
        match self {
            E::Variable(_) => E::num(1.0),
            E::Neg(a) => E::neg(a.derivative(var)),
            E::Binary(op, a, b) => {
                let (a, b) = (&**a, &**b);
                match op {
                    BinaryOp::Add => E::add(a.derivative(var), b.derivative(var)),
                    BinaryOp::Sub => E::sub(a.derivative(var), b.derivative(var)),
                    BinaryOp::Mul => E::add(
                        E::mul(a.derivative(var), b.clone()),
                        E::mul(a.clone(), b.derivative(var)),
                    ),
                    BinaryOp::Div => {
                        // (a'b - ab') / b^2
                        let num = E::sub(
                            E::mul(a.derivative(var), b.clone()),
                            E::mul(a.clone(), b.derivative(var)),
                        );
                        E::div(num, E::pow(b.clone(), E::num(2.0)))
                    }
                    BinaryOp::Pow => power_derivative(a, b, var),
                }
            }
            E::Call(func, a) => {
                let inner = a.derivative(var);
                let outer = match func {
                    Function::Exp => self.clone(),
                    Function::Log => E::div(E::num(1.0), (**a).clone()),
                    Function::Sin => E::call(Function::Cos, (**a).clone()),
                    Function::Cos => E::neg(E::call(Function::Sin, (**a).clone())),
                    Function::Tan => E::add(
                        E::num(1.0),
                        E::pow(E::call(Function::Tan, (**a).clone()), E::num(2.0)),
                    ),
                    Function::Sqrt => E::div(E::num(1.0), E::mul(E::num(2.0), self.clone())),
                    // d|a| = a/|a| a', defined away from a = 0
                    Function::Abs => E::div((**a).clone(), self.clone()),
                };
                E::mul(outer, inner)
            }
            E::Number(_) | E::Pi => unreachable!("constants handled above"),
        }
    }
}

fn power_derivative(base: &Expression, exponent: &Expression, var: &str) -> Expression {
    let db = base.derivative(var);
    if !exponent.depends_on(var) {
        // b a^(b-1) a'
        let reduced = E::sub(exponent.clone(), E::num(1.0));
        return E::mul(E::mul(exponent.clone(), E::pow(base.clone(), reduced)), db);
    }
    // a^b (b' log a + b a'/a)
    let de = exponent.derivative(var);
    let log_term = E::mul(de, E::call(Function::Log, base.clone()));
    let ratio_term = E::div(E::mul(exponent.clone(), db), base.clone());
    E::mul(E::pow(base.clone(), exponent.clone()), E::add(log_term, ratio_term))
}
