//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α F / α!` of a scalar
//! function at a point, for all multi-indices `|α| ≤ order`. Arithmetic on
//! jets is exact chain-rule propagation, so a metric component assembled from
//! symbolically differentiated leaves carries exact first and second partials.
//!
//! At most four variables and order three are supported; that covers an
//! `(n+1)`-dimensional spacetime chart with `n ≤ 3` and the third derivatives
//! needed for graph Codazzi residuals.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

pub const MAX_VARS: usize = 4;
pub const MAX_ORDER: usize = 3;
const MAX_TERMS: usize = 35;

pub type MultiIndex = [u8; MAX_VARS];

#[derive(Debug)]
pub struct Layout {
    vars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    /// (a, b, c): coefficient a times coefficient b contributes to c.
    products: Vec<(u8, u8, u8)>,
}

impl Layout {
    fn build(vars: usize, order: usize) -> Layout {
        let mut indices: Vec<MultiIndex> = Vec::new();
        for degree in 0..=order {
            enumerate(vars, degree as u8, &mut indices);
        }
        assert!(indices.len() <= MAX_TERMS);
        let mut products = Vec::new();
        for (a, ia) in indices.iter().enumerate() {
            for (b, ib) in indices.iter().enumerate() {
                let mut sum = [0u8; MAX_VARS];
                for k in 0..MAX_VARS {
                    sum[k] = ia[k] + ib[k];
                }
                if degree(&sum) as usize <= order {
                    let c = indices.iter().position(|m| *m == sum).unwrap();
                    products.push((a as u8, b as u8, c as u8));
                }
            }
        }
        Layout { vars, order, indices, products }
    }

    fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|m| m == alpha)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }
}

fn enumerate(vars: usize, degree_wanted: u8, out: &mut Vec<MultiIndex>) {
    let base = degree_wanted as usize + 1;
    for code in 0..base.pow(vars as u32) {
        let mut alpha = [0u8; MAX_VARS];
        let mut rest = code;
        for slot in alpha.iter_mut().take(vars) {
            *slot = (rest % base) as u8;
            rest /= base;
        }
        if degree(&alpha) == degree_wanted {
            out.push(alpha);
        }
    }
}

fn degree(alpha: &MultiIndex) -> u8 {
    alpha.iter().sum()
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).map(f64::from).product()
}

/// Multi-indices of all partials up to `order`, sorted by total degree. The
/// list for a lower order is a prefix of the list for a higher one.
pub fn multi_indices(vars: usize, order: usize) -> &'static [MultiIndex] {
    &layout(vars, order).indices
}

fn layout(vars: usize, order: usize) -> &'static Layout {
    static LAYOUTS: OnceLock<Vec<Layout>> = OnceLock::new();
    assert!((1..=MAX_VARS).contains(&vars) && order <= MAX_ORDER, "unsupported jet shape");
    let table = LAYOUTS.get_or_init(|| {
        let mut all = Vec::new();
        for v in 1..=MAX_VARS {
            for o in 0..=MAX_ORDER {
                all.push(Layout::build(v, o));
            }
        }
        all
    });
    &table[(vars - 1) * (MAX_ORDER + 1) + order]
}

#[derive(Clone, Copy)]
pub struct Jet {
    layout: &'static Layout,
    coeffs: [f64; MAX_TERMS],
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("vars", &self.layout.vars)
            .field("order", &self.layout.order)
            .field("coeffs", &&self.coeffs[..self.layout.len()])
            .finish()
    }
}

impl Jet {
    pub fn constant(vars: usize, order: usize, value: f64) -> Jet {
        let mut coeffs = [0.0; MAX_TERMS];
        coeffs[0] = value;
        Jet { layout: layout(vars, order), coeffs }
    }

    pub fn zero(vars: usize, order: usize) -> Jet {
        Jet::constant(vars, order, 0.0)
    }

    /// The coordinate function `x_i` expanded at `x_i = value`.
    pub fn variable(vars: usize, order: usize, i: usize, value: f64) -> Jet {
        let mut jet = Jet::constant(vars, order, value);
        if order >= 1 {
            let mut alpha = [0; MAX_VARS];
            alpha[i] = 1;
            let pos = jet.layout.position(&alpha).unwrap();
            jet.coeffs[pos] = 1.0;
        }
        jet
    }

    /// Builds a jet from a callback returning the partial derivative `∂^α F`.
    pub fn from_partials(vars: usize, order: usize, mut partial: impl FnMut(&MultiIndex) -> f64) -> Jet {
        let layout = layout(vars, order);
        let mut coeffs = [0.0; MAX_TERMS];
        for (k, alpha) in layout.indices.iter().enumerate() {
            let denom: f64 = alpha.iter().map(|&a| factorial(a)).product();
            coeffs[k] = partial(alpha) / denom;
        }
        Jet { layout, coeffs }
    }

    /// Jet of a univariate function of variable `i`, given its derivatives
    /// `[f, f', f'', f''']` at the expansion point.
    pub fn univariate(vars: usize, order: usize, i: usize, derivs: &[f64]) -> Jet {
        Jet::from_partials(vars, order, |alpha| {
            let d = alpha[i] as usize;
            if degree(alpha) as usize == d {
                derivs.get(d).copied().unwrap_or(0.0)
            } else {
                0.0
            }
        })
    }

    pub fn vars(&self) -> usize {
        self.layout.vars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs[..self.layout.len()]
    }

    /// `∂^α F` at the expansion point; zero beyond the stored order.
    pub fn partial(&self, alpha: &MultiIndex) -> f64 {
        match self.layout.position(alpha) {
            Some(k) => self.coeffs[k] * alpha.iter().map(|&a| factorial(a)).product::<f64>(),
            None => 0.0,
        }
    }

    pub fn d1(&self, i: usize) -> f64 {
        let mut alpha = [0; MAX_VARS];
        alpha[i] += 1;
        self.partial(&alpha)
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut alpha = [0; MAX_VARS];
        alpha[i] += 1;
        alpha[j] += 1;
        self.partial(&alpha)
    }

    pub fn gradient(&self) -> Vec<f64> {
        (0..self.vars()).map(|i| self.d1(i)).collect()
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let target = layout(self.vars(), order.min(self.order()));
        let mut coeffs = [0.0; MAX_TERMS];
        coeffs[..target.len()].copy_from_slice(&self.coeffs[..target.len()]);
        Jet { layout: target, coeffs }
    }

    /// Partial derivative with respect to variable `i`; the order drops by one.
    pub fn diff(&self, i: usize) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let target = layout(self.vars(), self.order() - 1);
        let mut coeffs = [0.0; MAX_TERMS];
        for (k, alpha) in target.indices.iter().enumerate() {
            let mut up = *alpha;
            up[i] += 1;
            let src = self.layout.position(&up).unwrap();
            coeffs[k] = f64::from(up[i]) * self.coeffs[src];
        }
        Jet { layout: target, coeffs }
    }

    fn common(&self, other: &Jet) -> &'static Layout {
        assert_eq!(self.vars(), other.vars(), "jet variable count mismatch");
        if self.order() <= other.order() {
            self.layout
        } else {
            other.layout
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = *self;
        out.coeffs[0] += s;
        out
    }

    /// `g(self)` for a univariate `g` with derivatives `g^{(m)}(value)`, m ≤ order.
    pub fn apply(&self, derivs: &[f64]) -> Jet {
        let order = self.order();
        let mut delta = *self;
        delta.coeffs[0] = 0.0;
        let mut result = Jet { layout: self.layout, coeffs: [0.0; MAX_TERMS] };
        result.coeffs[0] = derivs[0];
        let mut power = Jet::constant(self.vars(), order, 1.0);
        for (m, d) in derivs.iter().enumerate().take(order + 1).skip(1) {
            power = power * delta;
            let term = power.scale(d / factorial(m as u8));
            for k in 0..self.layout.len() {
                result.coeffs[k] += term.coeffs[k];
            }
        }
        result
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.apply(&[e; MAX_ORDER + 1])
    }

    pub fn ln(&self) -> Jet {
        let x = self.value();
        self.apply(&[x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.apply(&[s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.apply(&[c, -s, -c, s])
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let x = self.value();
        self.apply(&[
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn powi(&self, p: i32) -> Jet {
        let x = self.value();
        let pf = f64::from(p);
        let pw = |k: i32| if p - k == 0 { 1.0 } else { x.powi(p - k) };
        self.apply(&[pw(0), pf * pw(1), pf * (pf - 1.0) * pw(2), pf * (pf - 1.0) * (pf - 2.0) * pw(3)])
    }

    pub fn recip(&self) -> Jet {
        let x = self.value();
        let r = 1.0 / x;
        self.apply(&[r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    /// Substitutes `inner` for the variables of `self`. `inner[i]` is a jet (in
    /// new variables) of the i-th coordinate, whose value must equal the
    /// expansion point of `self` in that coordinate.
    pub fn compose(&self, inner: &[Jet]) -> Jet {
        assert_eq!(inner.len(), self.vars(), "one inner jet per outer variable");
        let new_vars = inner[0].vars();
        let order = inner.iter().map(Jet::order).min().unwrap().min(self.order());
        let deltas: Vec<Jet> = inner
            .iter()
            .map(|j| {
                let mut d = j.truncate(order);
                d.coeffs[0] = 0.0;
                d
            })
            .collect();
        // powers[i][p] = delta_i^p
        let powers: Vec<Vec<Jet>> = deltas
            .iter()
            .map(|d| {
                let mut list = vec![Jet::constant(new_vars, order, 1.0)];
                for p in 1..=order {
                    let next = list[p - 1] * d;
                    list.push(next);
                }
                list
            })
            .collect();
        let mut result = Jet::zero(new_vars, order);
        for (k, alpha) in self.layout.indices.iter().enumerate() {
            if degree(alpha) as usize > order || self.coeffs[k] == 0.0 {
                continue;
            }
            let mut term = Jet::constant(new_vars, order, self.coeffs[k]);
            for (i, &a) in alpha.iter().enumerate().take(self.vars()) {
                if a > 0 {
                    term = term * powers[i][a as usize];
                }
            }
            result = result + term;
        }
        result
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let layout = self.common(rhs);
        let mut coeffs = [0.0; MAX_TERMS];
        for (k, c) in coeffs.iter_mut().enumerate().take(layout.len()) {
            *c = self.coeffs[k] + rhs.coeffs[k];
        }
        Jet { layout, coeffs }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let layout = self.common(rhs);
        let mut coeffs = [0.0; MAX_TERMS];
        for (k, c) in coeffs.iter_mut().enumerate().take(layout.len()) {
            *c = self.coeffs[k] - rhs.coeffs[k];
        }
        Jet { layout, coeffs }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let layout = self.common(rhs);
        let mut coeffs = [0.0; MAX_TERMS];
        for &(a, b, c) in &layout.products {
            coeffs[c as usize] += self.coeffs[a as usize] * rhs.coeffs[b as usize];
        }
        Jet { layout, coeffs }
    }
}

impl Div for &Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { (&self).$m(&rhs) }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet { (&self).$m(rhs) }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Inverse of a square matrix of jets by Gauss-Jordan elimination with
/// partial pivoting on the values. Returns `None` if a pivot vanishes.
pub fn invert(matrix: &[Vec<Jet>]) -> Option<Vec<Vec<Jet>>> {
    let n = matrix.len();
    let proto = matrix[0][0];
    let (vars, order) = (proto.vars(), matrix.iter().flatten().map(Jet::order).min()?);
    let mut a: Vec<Vec<Jet>> =
        matrix.iter().map(|row| row.iter().map(|j| j.truncate(order)).collect()).collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(vars, order, if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let scale = matrix.iter().flatten().map(|j| j.value().abs()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))?;
        if a[pivot_row][col].value().abs() <= 1e-300_f64.max(scale * 1e-15) {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot_inv = a[col][col].recip();
        for j in 0..n {
            a[col][j] = a[col][j] * pivot_inv;
            inv[col][j] = inv[col][j] * pivot_inv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col];
            if factor.coefficients().iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..n {
                a[r][j] = a[r][j] - (factor * a[col][j]);
                inv[r][j] = inv[r][j] - (factor * inv[col][j]);
            }
        }
    }
    Some(inv)
}
