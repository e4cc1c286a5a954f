use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    Abs,
}

impl Function {
    pub const ALL: [Function; 7] = [
        Function::Exp,
        Function::Log,
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Sqrt,
        Function::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Immutable expression tree. Subtrees are shared, so cloning is cheap.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Number(f64),
    Pi,
    Variable(Arc<str>),
    Neg(Arc<Expression>),
    Binary(BinaryOp, Arc<Expression>, Arc<Expression>),
    Call(Function, Arc<Expression>),
}

#[allow(clippy::should_implement_trait)]
impl Expression {
    pub fn num(value: f64) -> Expression {
        Expression::Number(value)
    }

    pub fn var(name: &str) -> Expression {
        Expression::Variable(Arc::from(name))
    }

    /// Literal value if the tree is a bare number.
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Expression::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_number() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_number() == Some(1.0)
    }

    /// Negation with constant folding.
    pub fn neg(a: Expression) -> Expression {
        match a {
            Expression::Number(v) => Expression::Number(-v),
            Expression::Neg(inner) => (*inner).clone(),
            other => Expression::Neg(Arc::new(other)),
        }
    }

    /// Binary node with constant folding and neutral-element elimination.
    pub fn binary(op: BinaryOp, a: Expression, b: Expression) -> Expression {
        if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
            if let Some(v) = fold_binary(op, x, y) {
                return Expression::Number(v);
            }
        }
        match op {
            BinaryOp::Add if a.is_zero() => b,
            BinaryOp::Add | BinaryOp::Sub if b.is_zero() => a,
            BinaryOp::Sub if a.is_zero() => Expression::neg(b),
            BinaryOp::Mul if a.is_zero() || b.is_zero() => Expression::Number(0.0),
            BinaryOp::Mul if a.is_one() => b,
            BinaryOp::Mul | BinaryOp::Div if b.is_one() => a,
            BinaryOp::Div if a.is_zero() => Expression::Number(0.0),
            BinaryOp::Pow if b.is_one() => a,
            BinaryOp::Pow if b.is_zero() => Expression::Number(1.0),
            _ => Expression::Binary(op, Arc::new(a), Arc::new(b)),
        }
    }

    pub fn add(a: Expression, b: Expression) -> Expression {
        Expression::binary(BinaryOp::Add, a, b)
    }

    pub fn sub(a: Expression, b: Expression) -> Expression {
        Expression::binary(BinaryOp::Sub, a, b)
    }

    pub fn mul(a: Expression, b: Expression) -> Expression {
        Expression::binary(BinaryOp::Mul, a, b)
    }

    pub fn div(a: Expression, b: Expression) -> Expression {
        Expression::binary(BinaryOp::Div, a, b)
    }

    pub fn pow(a: Expression, b: Expression) -> Expression {
        Expression::binary(BinaryOp::Pow, a, b)
    }

    /// Function application; folds only when the result is finite.
    pub fn call(func: Function, a: Expression) -> Expression {
        if let Some(x) = a.as_number() {
            if let Ok(v) = super::eval::apply_function(func, x) {
                return Expression::Number(v);
            }
        }
        Expression::Call(func, Arc::new(a))
    }

    /// Collapses every variable-free subtree to a literal.
    pub fn fold_constants(&self) -> Expression {
        match self {
            Expression::Number(_) | Expression::Variable(_) => self.clone(),
            Expression::Pi => Expression::Number(std::f64::consts::PI),
            Expression::Neg(a) => Expression::neg(a.fold_constants()),
            Expression::Binary(op, a, b) => {
                Expression::binary(*op, a.fold_constants(), b.fold_constants())
            }
            Expression::Call(f, a) => Expression::call(*f, a.fold_constants()),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expression::Number(_) | Expression::Pi => {}
            Expression::Variable(name) => {
                out.insert(name.to_string());
            }
            Expression::Neg(a) | Expression::Call(_, a) => a.collect_variables(out),
            Expression::Binary(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self {
            Expression::Number(_) | Expression::Pi => false,
            Expression::Variable(name) => &**name == var,
            Expression::Neg(a) | Expression::Call(_, a) => a.depends_on(var),
            Expression::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Capture-free substitution (the grammar has no binders).
    pub fn substitute(&self, var: &str, replacement: &Expression) -> Expression {
        if !self.depends_on(var) {
            return self.clone();
        }
        match self {
            Expression::Variable(_) => replacement.clone(),
            Expression::Neg(a) => Expression::neg(a.substitute(var, replacement)),
            Expression::Binary(op, a, b) => Expression::binary(
                *op,
                a.substitute(var, replacement),
                b.substitute(var, replacement),
            ),
            Expression::Call(f, a) => Expression::call(*f, a.substitute(var, replacement)),
            Expression::Number(_) | Expression::Pi => unreachable!(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expression::Number(_) | Expression::Pi | Expression::Variable(_) => 1,
            Expression::Neg(a) | Expression::Call(_, a) => 1 + a.size(),
            Expression::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => 1,
            Expression::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => 2,
            Expression::Neg(_) => 3,
            Expression::Number(v) if v.is_sign_negative() => 3,
            Expression::Binary(BinaryOp::Pow, _, _) => 4,
            _ => 5,
        }
    }
}

fn fold_binary(op: BinaryOp, x: f64, y: f64) -> Option<f64> {
    let v = super::eval::apply_binary(op, x, y).ok()?;
    v.is_finite().then_some(v)
}

impl From<f64> for Expression {
    fn from(v: f64) -> Self {
        Expression::Number(v)
    }
}

impl std::str::FromStr for Expression {
    type Err = super::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse(s)
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        write!(f, "{}", v as i64)
    } else {
        write!(f, "{:?}", v)
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expression, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Prints with the minimal parenthesization that re-parses to the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Number(v) => write_number(f, *v),
            Expression::Pi => f.write_str("pi"),
            Expression::Variable(name) => f.write_str(name),
            Expression::Neg(a) => {
                f.write_str("-")?;
                // a bare literal after '-' would be folded by the parser
                let parens = a.precedence() < 3 || matches!(**a, Expression::Number(_));
                write_child(f, a, parens)
            }
            Expression::Binary(op, a, b) => {
                let (symbol, prec) = match op {
                    BinaryOp::Add => (" + ", 1),
                    BinaryOp::Sub => (" - ", 1),
                    BinaryOp::Mul => ("*", 2),
                    BinaryOp::Div => ("/", 2),
                    BinaryOp::Pow => ("^", 4),
                };
                if *op == BinaryOp::Pow {
                    write_child(f, a, a.precedence() <= 4)?;
                    f.write_str(symbol)?;
                    write_child(f, b, b.precedence() < 3)
                } else {
                    write_child(f, a, a.precedence() < prec)?;
                    f.write_str(symbol)?;
                    write_child(f, b, b.precedence() <= prec)
                }
            }
            Expression::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
