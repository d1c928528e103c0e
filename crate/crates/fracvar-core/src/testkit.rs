//! Deterministic generators and finite-difference oracles used by the test
//! suites. Not part of the numerical surface; kept in the library so the
//! workspace's integration and acceptance tests share one source of random
//! expressions.

use crate::dsl::{eval_jet, LagrangianExpr};

/// SplitMix64: tiny, seedable, stable across platforms.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn pick(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random expression that is smooth everywhere: polynomials, sin, cos, and
/// damped exp over `t`, `x_i`, `y_i`. Returned as source text so parsing is
/// exercised too.
pub fn random_smooth_expr(rng: &mut Rng, n: usize, depth: usize) -> String {
    if depth == 0 {
        return match rng.pick(4) {
            0 => format!("{:.3}", rng.range(-2.0, 2.0)),
            1 => "t".to_string(),
            2 => format!("x{}", 1 + rng.pick(n)),
            _ => format!("y{}", 1 + rng.pick(n)),
        };
    }
    let a = random_smooth_expr(rng, n, depth - 1);
    match rng.pick(7) {
        0 => format!("({a} + {})", random_smooth_expr(rng, n, depth - 1)),
        1 => format!("({a} - {})", random_smooth_expr(rng, n, depth - 1)),
        2 => format!("({a})*({})", random_smooth_expr(rng, n, depth - 1)),
        3 => format!("({a})^{}", 2 + rng.pick(2)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        _ => format!("exp(0.3*({a}))"),
    }
}

/// Random Lagrangian with third y-derivatives of order 0.1: a quadratic form
/// in `y` plus gently weighted smooth perturbations. Suitable for checking
/// second-order Taylor limits at moderate step sizes.
pub fn random_gentle_expr(rng: &mut Rng, n: usize) -> String {
    let mut terms: Vec<String> = Vec::new();
    for i in 1..=n {
        terms.push(format!("{:.3}*y{i}^2", rng.range(0.2, 2.0)));
        terms.push(format!("{:.3}*y{i}", rng.range(-1.0, 1.0)));
        for j in (i + 1)..=n {
            terms.push(format!("{:.3}*y{i}*y{j}", rng.range(-0.5, 0.5)));
        }
        terms.push(format!("0.02*sin(y{i})"));
    }
    terms.push(format!("{:.3}*t", rng.range(-1.0, 1.0)));
    for i in 1..=n {
        terms.push(format!("{:.3}*x{i}", rng.range(-1.0, 1.0)));
    }
    terms.join(" + ")
}

/// Random evaluation point with `t` inside the unit interval.
pub fn random_point(rng: &mut Rng, n: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let t = rng.range(0.05, 0.95);
    let x = (0..n).map(|_| rng.range(-2.0, 2.0)).collect();
    let y = (0..n).map(|_| rng.range(-2.0, 2.0)).collect();
    (t, x, y)
}

/// Central finite difference of `L` in `y_i`.
pub fn fd_grad_y(expr: &LagrangianExpr, t: f64, x: &[f64], y: &[f64], i: usize, h: f64) -> f64 {
    let mut yp = y.to_vec();
    let mut ym = y.to_vec();
    yp[i] += h;
    ym[i] -= h;
    let fp = eval_jet(expr, t, x, &yp).unwrap().value;
    let fm = eval_jet(expr, t, x, &ym).unwrap().value;
    (fp - fm) / (2.0 * h)
}

/// Central finite difference of `L` in `x_i`.
pub fn fd_grad_x(expr: &LagrangianExpr, t: f64, x: &[f64], y: &[f64], i: usize, h: f64) -> f64 {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += h;
    xm[i] -= h;
    let fp = eval_jet(expr, t, &xp, y).unwrap().value;
    let fm = eval_jet(expr, t, &xm, y).unwrap().value;
    (fp - fm) / (2.0 * h)
}

/// Central finite difference of `L_y_i` in `y_j` (a Hessian entry).
pub fn fd_hess_yy(
    expr: &LagrangianExpr,
    t: f64,
    x: &[f64],
    y: &[f64],
    i: usize,
    j: usize,
    h: f64,
) -> f64 {
    let mut yp = y.to_vec();
    let mut ym = y.to_vec();
    yp[j] += h;
    ym[j] -= h;
    let gp = eval_jet(expr, t, x, &yp).unwrap().grad_y[i];
    let gm = eval_jet(expr, t, x, &ym).unwrap().grad_y[i];
    (gp - gm) / (2.0 * h)
}
