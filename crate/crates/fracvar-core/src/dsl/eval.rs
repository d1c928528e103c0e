//! Forward-mode evaluation of `L`, `L_x`, `L_y`, and `L_yy`.
//!
//! Jets carry the value, first derivatives in all of `(x, y)`, and second
//! derivatives in `y` only. Points where a node is not (twice) differentiable
//! taint the affected derivative slots instead of fabricating a number; the
//! value itself stays usable, which the derivative-free checks rely on.

use thiserror::Error;

use super::ast::{BinOp, ExprKind, ExprNode, Func, LagrangianExpr, Span};
use crate::special::{digamma, gamma, trigamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    GammaPole,
    PowNegativeBase,
    PowZeroNegativeExponent,
    NonFinite,
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("evaluation error at bytes {span:?}: {kind:?}")]
pub struct EvalError {
    pub span: (usize, usize),
    pub kind: EvalErrorKind,
}

/// Value and derivatives of a Lagrangian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetValue {
    pub value: f64,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
    /// Row-major `n x n`, symmetric by construction.
    pub hess_yy: Vec<Vec<f64>>,
    pub nonsmooth_grad_x: Vec<bool>,
    pub nonsmooth_grad_y: Vec<bool>,
    pub nonsmooth_hess: bool,
}

impl JetValue {
    pub fn grad_y_is_smooth(&self) -> bool {
        !self.nonsmooth_grad_y.iter().any(|&b| b)
    }

    pub fn grad_x_is_smooth(&self) -> bool {
        !self.nonsmooth_grad_x.iter().any(|&b| b)
    }

    pub fn hess_is_smooth(&self) -> bool {
        !self.nonsmooth_hess
    }

    /// `L - <L_y, y>`, the quantity conserved across corners.
    pub fn hamiltonian_like(&self, y: &[f64]) -> f64 {
        self.value
            - self
                .grad_y
                .iter()
                .zip(y)
                .map(|(g, yi)| g * yi)
                .sum::<f64>()
    }

    /// `mu * self + other` accumulated componentwise; taints merge.
    pub fn scaled_add(&self, mu: f64, other: Option<&JetValue>) -> JetValue {
        let n = self.grad_y.len();
        let mut out = match other {
            Some(o) => o.clone(),
            None => JetValue::zero(n),
        };
        out.value += mu * self.value;
        for i in 0..n {
            out.grad_x[i] += mu * self.grad_x[i];
            out.grad_y[i] += mu * self.grad_y[i];
            out.nonsmooth_grad_x[i] |= self.nonsmooth_grad_x[i];
            out.nonsmooth_grad_y[i] |= self.nonsmooth_grad_y[i];
            for j in 0..n {
                out.hess_yy[i][j] += mu * self.hess_yy[i][j];
            }
        }
        out.nonsmooth_hess |= self.nonsmooth_hess;
        out
    }

    fn zero(n: usize) -> JetValue {
        JetValue {
            value: 0.0,
            grad_x: vec![0.0; n],
            grad_y: vec![0.0; n],
            hess_yy: vec![vec![0.0; n]; n],
            nonsmooth_grad_x: vec![false; n],
            nonsmooth_grad_y: vec![false; n],
            nonsmooth_hess: false,
        }
    }
}

/// Internal dual number: derivatives over the 2n seeds (x then y), second
/// derivatives over the n y-seeds.
#[derive(Clone)]
struct Jet {
    v: f64,
    d1: Vec<f64>,
    dyy: Vec<f64>, // n*n row-major
    taint1: Vec<bool>,
    taint2: bool,
    n: usize,
}

impl Jet {
    fn constant(v: f64, n: usize) -> Jet {
        Jet {
            v,
            d1: vec![0.0; 2 * n],
            dyy: vec![0.0; n * n],
            taint1: vec![false; 2 * n],
            taint2: false,
            n,
        }
    }

    fn seed(v: f64, slot: usize, n: usize) -> Jet {
        let mut j = Jet::constant(v, n);
        j.d1[slot] = 1.0;
        j
    }

    fn dy(&self, i: usize) -> f64 {
        self.d1[self.n + i]
    }

    fn merge_taints(&mut self, other: &Jet) {
        for (a, b) in self.taint1.iter_mut().zip(&other.taint1) {
            *a |= *b;
        }
        self.taint2 |= other.taint2;
    }

    fn has_dy(&self) -> bool {
        (0..self.n).any(|i| self.dy(i) != 0.0)
    }

    fn has_dyy(&self) -> bool {
        self.dyy.iter().any(|&v| v != 0.0)
    }
}

fn add(mut a: Jet, b: &Jet, sign: f64) -> Jet {
    a.v += sign * b.v;
    for (x, y) in a.d1.iter_mut().zip(&b.d1) {
        *x += sign * y;
    }
    for (x, y) in a.dyy.iter_mut().zip(&b.dyy) {
        *x += sign * y;
    }
    a.merge_taints(b);
    a
}

fn mul(a: &Jet, b: &Jet) -> Jet {
    let n = a.n;
    let mut out = Jet::constant(a.v * b.v, n);
    for k in 0..2 * n {
        out.d1[k] = a.d1[k] * b.v + b.d1[k] * a.v;
    }
    for i in 0..n {
        for j in 0..n {
            out.dyy[i * n + j] = a.dyy[i * n + j] * b.v
                + b.dyy[i * n + j] * a.v
                + a.dy(i) * b.dy(j)
                + a.dy(j) * b.dy(i);
        }
    }
    out.taint1 = a.taint1.iter().zip(&b.taint1).map(|(x, y)| x | y).collect();
    out.taint2 = a.taint2 | b.taint2;
    out
}

fn div(a: &Jet, b: &Jet, span: Span) -> Result<Jet, EvalError> {
    if b.v == 0.0 {
        return Err(EvalError {
            span,
            kind: EvalErrorKind::DivisionByZero,
        });
    }
    let n = a.n;
    let q = a.v / b.v;
    let mut out = Jet::constant(q, n);
    for k in 0..2 * n {
        out.d1[k] = (a.d1[k] - q * b.d1[k]) / b.v;
    }
    for i in 0..n {
        for j in 0..n {
            // q'' = (a'' - q' b'_j - q'_j b' - q b'') / b with symmetrization
            let qi = out.d1[n + i];
            let qj = out.d1[n + j];
            out.dyy[i * n + j] = (a.dyy[i * n + j]
                - qi * b.dy(j)
                - qj * b.dy(i)
                - q * b.dyy[i * n + j])
                / b.v;
        }
    }
    out.taint1 = a.taint1.iter().zip(&b.taint1).map(|(x, y)| x | y).collect();
    out.taint2 = a.taint2 | b.taint2;
    Ok(out)
}

/// Smooth scalar chain rule: `g(u)` from `(g, g', g'')` at `u.v`.
fn chain(u: &Jet, v: f64, d: f64, dd: f64) -> Jet {
    let n = u.n;
    let mut out = Jet::constant(v, n);
    for k in 0..2 * n {
        out.d1[k] = d * u.d1[k];
    }
    for i in 0..n {
        for j in 0..n {
            out.dyy[i * n + j] = d * u.dyy[i * n + j] + dd * u.dy(i) * u.dy(j);
        }
    }
    out.taint1 = u.taint1.clone();
    out.taint2 = u.taint2;
    out
}

/// Chain rule at a kink: the value exists but `g'` (and `g''`) do not.
/// Derivative slots actually driven by `u` become tainted.
fn chain_kink(u: &Jet, v: f64) -> Jet {
    let n = u.n;
    let mut out = Jet::constant(v, n);
    out.taint1 = u
        .taint1
        .iter()
        .zip(&u.d1)
        .map(|(t, d)| *t || *d != 0.0)
        .collect();
    out.taint2 = u.taint2 || u.has_dy() || u.has_dyy();
    out
}

fn powi(u: &Jet, k: i32, span: Span) -> Result<Jet, EvalError> {
    if k < 0 && u.v == 0.0 {
        return Err(EvalError {
            span,
            kind: EvalErrorKind::PowZeroNegativeExponent,
        });
    }
    let (v, d, dd) = match k {
        0 => (1.0, 0.0, 0.0),
        1 => (u.v, 1.0, 0.0),
        _ => (
            u.v.powi(k),
            f64::from(k) * u.v.powi(k - 1),
            f64::from(k) * f64::from(k - 1) * u.v.powi(k - 2),
        ),
    };
    Ok(chain(u, v, d, dd))
}

fn powf_const(u: &Jet, p: f64, span: Span) -> Result<Jet, EvalError> {
    if u.v < 0.0 {
        return Err(EvalError {
            span,
            kind: EvalErrorKind::PowNegativeBase,
        });
    }
    if u.v == 0.0 {
        if p <= 0.0 {
            return Err(EvalError {
                span,
                kind: EvalErrorKind::PowZeroNegativeExponent,
            });
        }
        // value 0; the derivative only exists when p is large enough
        return Ok(if p >= 2.0 {
            chain(u, 0.0, 0.0, 0.0)
        } else if p > 1.0 {
            let mut out = chain(u, 0.0, 0.0, 0.0);
            out.taint2 |= u.has_dy();
            out
        } else {
            chain_kink(u, 0.0)
        });
    }
    let v = u.v.powf(p);
    let d = p * u.v.powf(p - 1.0);
    let dd = p * (p - 1.0) * u.v.powf(p - 2.0);
    Ok(chain(u, v, d, dd))
}

fn call(func: Func, u: &Jet, span: Span) -> Result<Jet, EvalError> {
    let out = match func {
        Func::Abs => {
            if u.v == 0.0 {
                chain_kink(u, 0.0)
            } else {
                chain(u, u.v.abs(), u.v.signum(), 0.0)
            }
        }
        Func::Sin => chain(u, u.v.sin(), u.v.cos(), -u.v.sin()),
        Func::Cos => chain(u, u.v.cos(), -u.v.sin(), -u.v.cos()),
        Func::Exp => {
            let e = u.v.exp();
            chain(u, e, e, e)
        }
        Func::Ln => {
            if u.v <= 0.0 {
                return Err(EvalError {
                    span,
                    kind: EvalErrorKind::LogNonPositive,
                });
            }
            chain(u, u.v.ln(), 1.0 / u.v, -1.0 / (u.v * u.v))
        }
        Func::Sqrt => {
            if u.v < 0.0 {
                return Err(EvalError {
                    span,
                    kind: EvalErrorKind::SqrtNegative,
                });
            }
            if u.v == 0.0 {
                chain_kink(u, 0.0)
            } else {
                let s = u.v.sqrt();
                chain(u, s, 0.5 / s, -0.25 / (s * u.v))
            }
        }
        Func::Gamma => {
            if u.v <= 0.0 && u.v == u.v.floor() {
                return Err(EvalError {
                    span,
                    kind: EvalErrorKind::GammaPole,
                });
            }
            let g = gamma(u.v);
            let psi0 = digamma(u.v);
            let psi1 = trigamma(u.v);
            chain(u, g, g * psi0, g * (psi0 * psi0 + psi1))
        }
    };
    Ok(out)
}

fn eval_node(node: &ExprNode, t: f64, x: &[f64], y: &[f64], n: usize) -> Result<Jet, EvalError> {
    let jet = match &node.kind {
        ExprKind::Const(v) => Jet::constant(*v, n),
        ExprKind::Time => Jet::constant(t, n),
        ExprKind::X(i) => Jet::seed(x[*i], *i, n),
        ExprKind::Y(i) => Jet::seed(y[*i], n + *i, n),
        ExprKind::Neg(a) => {
            let ja = eval_node(a, t, x, y, n)?;
            chain(&ja, -ja.v, -1.0, 0.0)
        }
        ExprKind::Bin(op, a, b) => {
            let ja = eval_node(a, t, x, y, n)?;
            match op {
                BinOp::Add => add(ja, &eval_node(b, t, x, y, n)?, 1.0),
                BinOp::Sub => add(ja, &eval_node(b, t, x, y, n)?, -1.0),
                BinOp::Mul => mul(&ja, &eval_node(b, t, x, y, n)?),
                BinOp::Div => div(&ja, &eval_node(b, t, x, y, n)?, node.span)?,
                BinOp::Pow => {
                    // constant exponents get exact power rules; integer ones
                    // stay valid for negative bases
                    if let ExprKind::Const(p) = b.kind {
                        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                            powi(&ja, p as i32, node.span)?
                        } else {
                            powf_const(&ja, p, node.span)?
                        }
                    } else if let ExprKind::Neg(inner) = &b.kind {
                        if let ExprKind::Const(p) = inner.kind {
                            let p = -p;
                            if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                                powi(&ja, p as i32, node.span)?
                            } else {
                                powf_const(&ja, p, node.span)?
                            }
                        } else {
                            pow_general(&ja, &eval_node(b, t, x, y, n)?, node.span)?
                        }
                    } else {
                        pow_general(&ja, &eval_node(b, t, x, y, n)?, node.span)?
                    }
                }
            }
        }
        ExprKind::Call(func, a) => call(*func, &eval_node(a, t, x, y, n)?, node.span)?,
    };
    if !jet.v.is_finite() {
        return Err(EvalError {
            span: node.span,
            kind: EvalErrorKind::NonFinite,
        });
    }
    Ok(jet)
}

/// `u^w` for a non-literal exponent. Constant-valued exponent jets (for
/// example `3^2` in the exponent position) still get the exact power rules;
/// genuinely variable exponents go through `exp(w ln u)` and need `u > 0`.
fn pow_general(u: &Jet, w: &Jet, span: Span) -> Result<Jet, EvalError> {
    let w_is_const =
        w.d1.iter().all(|&d| d == 0.0) && w.dyy.iter().all(|&d| d == 0.0) && !w.taint2;
    if w_is_const {
        let p = w.v;
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            return powi(u, p as i32, span);
        }
        return powf_const(u, p, span);
    }
    if u.v <= 0.0 {
        return Err(EvalError {
            span,
            kind: EvalErrorKind::PowNegativeBase,
        });
    }
    let lnu = chain(u, u.v.ln(), 1.0 / u.v, -1.0 / (u.v * u.v));
    let prod = mul(w, &lnu);
    let e = prod.v.exp();
    Ok(chain(&prod, e, e, e))
}

/// Evaluates a Lagrangian jet at `(t, x, y)`.
pub fn eval_jet(
    expr: &LagrangianExpr,
    t: f64,
    x: &[f64],
    y: &[f64],
) -> Result<JetValue, EvalError> {
    let n = expr.dim();
    assert_eq!(x.len(), n, "x has wrong dimension");
    assert_eq!(y.len(), n, "y has wrong dimension");
    let jet = eval_node(&expr.root, t, x, y, n)?;
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // enforce exact symmetry against rounding asymmetries
            hess[i][j] = 0.5 * (jet.dyy[i * n + j] + jet.dyy[j * n + i]);
        }
    }
    Ok(JetValue {
        value: jet.v,
        grad_x: jet.d1[..n].to_vec(),
        grad_y: jet.d1[n..].to_vec(),
        hess_yy: hess,
        nonsmooth_grad_x: jet.taint1[..n].to_vec(),
        nonsmooth_grad_y: jet.taint1[n..].to_vec(),
        nonsmooth_hess: jet.taint2,
    })
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_lagrangian;
    use super::*;
    use approx::assert_relative_eq;

    fn jet1(src: &str, t: f64, x: f64, y: f64) -> JetValue {
        eval_jet(&parse_lagrangian(src, 1).unwrap(), t, &[x], &[y]).unwrap()
    }

    #[test]
    fn polynomial_jet() {
        let j = jet1("y^2", 0.5, 0.0, 3.0);
        assert_eq!(j.value, 9.0);
        assert_eq!(j.grad_y, vec![6.0]);
        assert_eq!(j.hess_yy, vec![vec![2.0]]);
        assert!(j.grad_y_is_smooth());
    }

    #[test]
    fn cubic_at_gamma_value() {
        let g = gamma(1.5);
        let j = jet1("y^3", 0.0, 0.0, g);
        assert_relative_eq!(j.grad_y[0], 3.0 * g * g, max_relative = 1e-15);
        assert_relative_eq!(j.grad_y[0], 2.3561944901923448, max_relative = 1e-12);
        assert_relative_eq!(j.hess_yy[0][0], 6.0 * g, max_relative = 1e-15);
    }

    #[test]
    fn abs_kink_flags_not_fabricates() {
        let j = jet1("y^5 + abs(y)", 0.0, 0.0, 0.0);
        assert_eq!(j.value, 0.0);
        assert!(!j.grad_y_is_smooth());
        assert!(j.nonsmooth_hess);
        // away from the kink everything is smooth
        let j = jet1("y^5 + abs(y)", 0.0, 0.0, -2.0);
        assert_eq!(j.value, -30.0);
        assert_eq!(j.grad_y, vec![5.0 * 16.0 - 1.0]);
        assert!(j.grad_y_is_smooth());
    }

    #[test]
    fn abs_of_x_does_not_taint_y() {
        let j = jet1("abs(x) + y^2", 0.0, 0.0, 1.0);
        assert!(!j.grad_x_is_smooth());
        assert!(j.grad_y_is_smooth());
        assert_eq!(j.grad_y, vec![2.0]);
    }

    #[test]
    fn negative_bases_with_integer_powers() {
        let j = jet1("y^3", 0.0, 0.0, -2.0);
        assert_eq!(j.value, -8.0);
        assert_eq!(j.grad_y, vec![12.0]);
        let j = jet1("y^-2", 0.0, 0.0, -2.0);
        assert_relative_eq!(j.value, 0.25);
        assert_relative_eq!(j.grad_y[0], -2.0 * (-2.0f64).powi(-3));
    }

    #[test]
    fn precedence_semantics() {
        assert_eq!(jet1("-y^2", 0.0, 0.0, 3.0).value, -9.0);
        assert_eq!(jet1("2^3^2", 0.0, 0.0, 0.0).value, 512.0);
        assert_eq!(jet1("1 - 2 - 3", 0.0, 0.0, 0.0).value, -4.0);
        assert_eq!(jet1("8/4/2", 0.0, 0.0, 0.0).value, 1.0);
        assert_eq!(jet1("2*t^2", 3.0, 0.0, 0.0).value, 18.0);
    }

    #[test]
    fn domain_errors_carry_spans() {
        let e = eval_jet(&parse_lagrangian("ln(y)", 1).unwrap(), 0.0, &[0.0], &[-1.0]).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::LogNonPositive);
        assert_eq!(e.span, (0, 5));
        let e = eval_jet(&parse_lagrangian("1/x", 1).unwrap(), 0.0, &[0.0], &[0.0]).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::DivisionByZero);
        let e = eval_jet(&parse_lagrangian("gamma(y)", 1).unwrap(), 0.0, &[0.0], &[-1.0])
            .unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::GammaPole);
    }

    #[test]
    fn gamma_builtin_matches_special() {
        let j = jet1("gamma(1.5)", 0.0, 0.0, 0.0);
        assert_relative_eq!(j.value, gamma(1.5), max_relative = 1e-15);
        // gamma of a live variable gets exact first/second derivatives
        let j = jet1("gamma(y)", 0.0, 0.0, 2.5);
        let want_d = gamma(2.5) * digamma(2.5);
        assert_relative_eq!(j.grad_y[0], want_d, max_relative = 1e-12);
    }

    #[test]
    fn vector_case_gradients() {
        let expr = parse_lagrangian("y1^2 + 3*y2^2 + x1*y2", 2).unwrap();
        let j = eval_jet(&expr, 0.0, &[2.0, 0.0], &[1.0, -1.0]).unwrap();
        assert_eq!(j.grad_y, vec![2.0, -4.0]);
        assert_eq!(j.grad_x, vec![-1.0, 0.0]);
        assert_eq!(j.hess_yy[0][0], 2.0);
        assert_eq!(j.hess_yy[1][1], 6.0);
        assert_eq!(j.hess_yy[0][1], 0.0);
    }

    #[test]
    fn hamiltonian_like_quantity() {
        // L = y^2: L - y L_y = y^2 - 2y^2 = -y^2
        let j = jet1("y^2", 0.0, 0.0, 3.0);
        assert_eq!(j.hamiltonian_like(&[3.0]), -9.0);
    }

    #[test]
    fn scaled_add_combines_jets() {
        let a = jet1("y^2", 0.0, 0.0, 3.0);
        let b = jet1("x", 0.0, 5.0, 3.0);
        let eff = a.scaled_add(0.5, Some(&b.scaled_add(2.0, None)));
        assert_eq!(eff.value, 0.5 * 9.0 + 2.0 * 5.0);
        assert_eq!(eff.grad_y, vec![3.0]);
        assert_eq!(eff.grad_x, vec![2.0]);
    }
}
