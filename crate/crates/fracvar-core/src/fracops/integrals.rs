//! Left Riemann-Liouville integral and the weighted right integral.

use rayon::prelude::*;

use crate::special::gamma;

use super::quadrature::{gauss16, pow_diff};
use super::sample::PiecewiseSample;
use super::{Grid, OpsError};

fn check_alpha(alpha: f64) -> Result<(), OpsError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(OpsError::InvalidAlpha(alpha));
    }
    Ok(())
}

/// `(I^alpha_{t0+} psi)(t)` for each eval point.
///
/// `psi` is piecewise linear between nodes (corners respected) and the kernel
/// `(t-tau)^(alpha-1)` is integrated in closed form per cell, so the rule is
/// exact on the sample's interpolation class. The value at `t0` is zero.
pub fn rl_integral_left(
    psi: &PiecewiseSample,
    alpha: f64,
    eval_points: &[f64],
) -> Result<Vec<Vec<f64>>, OpsError> {
    check_alpha(alpha)?;
    let iv = psi.grid().interval();
    for &t in eval_points {
        if !iv.contains(t) {
            return Err(OpsError::PointOutsideInterval {
                t,
                t0: iv.t0(),
                t1: iv.t1(),
            });
        }
    }
    let out: Vec<Vec<f64>> = eval_points
        .par_iter()
        .map(|&t| left_at(psi, alpha, t))
        .collect();
    Ok(out)
}

fn left_at(psi: &PiecewiseSample, alpha: f64, t: f64) -> Vec<f64> {
    let nodes = psi.grid().nodes();
    let dim = psi.dim();
    let inv_gamma = 1.0 / gamma(alpha);
    let mut acc = vec![0.0; dim];
    if t <= nodes[0] {
        return acc;
    }
    for cell in 0..nodes.len() - 1 {
        let c0 = nodes[cell];
        if c0 >= t {
            break;
        }
        let c1 = nodes[cell + 1];
        let h = c1 - c0;
        // s = t - tau over the covered part of the cell
        let s2 = t - c0;
        let s1 = (t - c1).max(0.0);
        let m0 = pow_diff(s2, s1, alpha) / alpha;
        let m1 = pow_diff(s2, s1, alpha + 1.0) / (alpha + 1.0);
        // psi(tau) = vl + (vr-vl)*(tau-c0)/h and tau-c0 = s2-s
        let wr = (s2 * m0 - m1) / h;
        let wl = m0 - wr;
        let (vl, vr) = psi.cell_values(cell);
        for c in 0..dim {
            acc[c] += inv_gamma * (wl * vl[c] + wr * vr[c]);
        }
    }
    acc
}

/// Dense lower-triangular matrix `A` with `(I^alpha psi)(t_j) = (A psi)_j`
/// for continuous piecewise-linear `psi` on the grid. Row-major.
pub fn integral_matrix(grid: &Grid, alpha: f64) -> Result<Vec<Vec<f64>>, OpsError> {
    check_alpha(alpha)?;
    let nodes = grid.nodes();
    let n = nodes.len();
    let inv_gamma = 1.0 / gamma(alpha);
    let mut rows = vec![vec![0.0; n]; n];
    for (j, row) in rows.iter_mut().enumerate().skip(1) {
        let t = nodes[j];
        for cell in 0..j {
            let c0 = nodes[cell];
            let c1 = nodes[cell + 1];
            let h = c1 - c0;
            let s2 = t - c0;
            let s1 = t - c1;
            let m0 = pow_diff(s2, s1, alpha) / alpha;
            let m1 = pow_diff(s2, s1, alpha + 1.0) / (alpha + 1.0);
            let wr = (s2 * m0 - m1) / h;
            row[cell] += inv_gamma * (m0 - wr);
            row[cell + 1] += inv_gamma * wr;
        }
    }
    Ok(rows)
}

/// `(I^alpha_{t1-} b)(t)` with `b(tau) = (t1-tau)^(beta-1) g(tau)` for each
/// eval point.
///
/// The weight is kept analytic: per cell the dominant singular factor is
/// removed by a power substitution and the regularized integrand goes through
/// a fixed 16-point Gauss rule. Cells touching both singular points split at
/// their midpoint first. A non-finite accumulation is reported as a diverged
/// evaluation.
pub fn rl_integral_right_weighted(
    g: &PiecewiseSample,
    alpha: f64,
    beta: f64,
    eval_points: &[f64],
) -> Result<Vec<Vec<f64>>, OpsError> {
    check_alpha(alpha)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(OpsError::InvalidBeta(beta));
    }
    let iv = g.grid().interval();
    for &t in eval_points {
        if !iv.contains(t) {
            return Err(OpsError::PointOutsideInterval {
                t,
                t0: iv.t0(),
                t1: iv.t1(),
            });
        }
    }
    let results: Vec<Result<Vec<f64>, OpsError>> = eval_points
        .par_iter()
        .map(|&t| right_weighted_at(g, alpha, beta, t))
        .collect();
    results.into_iter().collect()
}

fn right_weighted_at(
    g: &PiecewiseSample,
    alpha: f64,
    beta: f64,
    t: f64,
) -> Result<Vec<f64>, OpsError> {
    let nodes = g.grid().nodes();
    let t1 = g.grid().interval().t1();
    let dim = g.dim();
    let inv_gamma = 1.0 / gamma(alpha);
    let mut acc = vec![0.0; dim];
    if t >= t1 {
        return Ok(acc);
    }
    for cell in 0..nodes.len() - 1 {
        let c1 = nodes[cell + 1];
        if c1 <= t {
            continue;
        }
        let c0_full = nodes[cell];
        let c0 = c0_full.max(t);
        let (vl, vr) = g.cell_values(cell);
        let h = nodes[cell + 1] - c0_full;
        for comp in 0..dim {
            let (gl, gr) = (vl[comp], vr[comp]);
            // linear interpolation over the *full* cell, evaluated on [c0, c1]
            let lin = |tau: f64| gl + (gr - gl) * (tau - c0_full) / h;
            let v = if c0 == t && c1 == t1 {
                let mid = 0.5 * (c0 + c1);
                cell_piece(t, t1, alpha, beta, c0, mid, &lin)
                    + cell_piece(t, t1, alpha, beta, mid, c1, &lin)
            } else {
                cell_piece(t, t1, alpha, beta, c0, c1, &lin)
            };
            acc[comp] += inv_gamma * v;
        }
    }
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(OpsError::Diverged { t });
    }
    Ok(acc)
}

/// `int_{c0}^{c1} (tau-t)^(alpha-1) (t1-tau)^(beta-1) lin(tau) dtau` with the
/// substitution chosen by the nearer singular endpoint.
fn cell_piece(
    t: f64,
    t1: f64,
    alpha: f64,
    beta: f64,
    c0: f64,
    c1: f64,
    lin: &impl Fn(f64) -> f64,
) -> f64 {
    if (c0 - t) <= (t1 - c1) {
        // u = (tau - t)^alpha removes the left singularity
        let u0 = (c0 - t).powf(alpha);
        let u1 = (c1 - t).powf(alpha);
        gauss16(
            |u| {
                let tau = t + u.powf(1.0 / alpha);
                (t1 - tau).powf(beta - 1.0) * lin(tau)
            },
            u0,
            u1,
        ) / alpha
    } else {
        // w = (t1 - tau)^beta removes the right singularity
        let w0 = (t1 - c1).powf(beta);
        let w1 = (t1 - c0).powf(beta);
        gauss16(
            |w| {
                let tau = t1 - w.powf(1.0 / beta);
                (tau - t).powf(alpha - 1.0) * lin(tau)
            },
            w0,
            w1,
        ) / beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{Interval, Orders};
    use crate::special::{beta as beta_fn, gamma};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid(n: usize, a: f64, b: f64) -> Grid {
        Grid::graded(
            Interval::new(0.0, 1.0).unwrap(),
            n,
            &Orders::new(a, b).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn left_integral_of_one_classical() {
        let g = grid(16, 1.0, 1.0);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let v = rl_integral_left(&s, 1.0, &[0.5]).unwrap();
        assert_relative_eq!(v[0][0], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn left_integral_of_one_half_order() {
        let g = grid(16, 0.5, 0.5);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let v = rl_integral_left(&s, 0.5, &[1.0]).unwrap();
        assert_relative_eq!(v[0][0], 2.0 / PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn left_integral_recovers_power_trajectory() {
        // psi = Gamma(1.6) constant, alpha = 0.6: x(1) = 1
        let a = 0.6;
        let g = grid(32, a, a);
        let s = PiecewiseSample::constant(g, vec![gamma(a + 1.0)]).unwrap();
        let v = rl_integral_left(&s, a, &[1.0]).unwrap();
        assert_relative_eq!(v[0][0], 1.0, max_relative = 1e-13);
    }

    #[test]
    fn left_integral_zero_at_t0_exactly() {
        let g = grid(16, 0.5, 0.5);
        let s = PiecewiseSample::from_fn(g, 1, |t| vec![t.cos()]).unwrap();
        let v = rl_integral_left(&s, 0.5, &[0.0]).unwrap();
        assert_eq!(v[0][0], 0.0);
    }

    #[test]
    fn left_integral_power_law_exact_for_linear() {
        // psi = (tau - t0)^1: I^alpha gives G(2)/G(2+alpha) t^(1+alpha)
        for alpha in [0.3, 0.5, 0.9, 1.0] {
            let g = grid(16, alpha, alpha);
            let s = PiecewiseSample::from_fn(g, 1, |t| vec![t]).unwrap();
            let pts = [0.25, 0.5, 0.93];
            let v = rl_integral_left(&s, alpha, &pts).unwrap();
            for (k, &t) in pts.iter().enumerate() {
                let want = gamma(2.0) / gamma(2.0 + alpha) * t.powf(1.0 + alpha);
                assert_relative_eq!(v[k][0], want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn left_integral_respects_corners() {
        // step: 1 on [0, 0.5), 0 after; I^1 at 1.0 = 0.5
        let g = grid(8, 1.0, 1.0);
        let n = g.nodes().len();
        let mut values = vec![vec![1.0]; n];
        for (j, v) in values.iter_mut().enumerate() {
            if g.nodes()[j] >= 0.5 {
                *v = vec![0.0];
            }
        }
        let s = PiecewiseSample::new(g, values, vec![(4, vec![1.0])]).unwrap();
        let v = rl_integral_left(&s, 1.0, &[1.0, 0.75]).unwrap();
        assert_relative_eq!(v[0][0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(v[1][0], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn right_weighted_classical() {
        let g = grid(16, 1.0, 1.0);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let v = rl_integral_right_weighted(&s, 1.0, 1.0, &[0.25]).unwrap();
        assert_relative_eq!(v[0][0], 0.75, max_relative = 1e-13);
    }

    #[test]
    fn right_weighted_reduces_to_left_symmetry() {
        let g = grid(32, 0.5, 1.0);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let v = rl_integral_right_weighted(&s, 0.5, 1.0, &[0.0]).unwrap();
        assert_relative_eq!(v[0][0], 2.0 / PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn right_weighted_beta_oracle() {
        // g = 1: exact value B(alpha,beta) (t1-t)^(alpha+beta-1) / Gamma(alpha)
        for (alpha, beta) in [(0.5, 0.5), (0.75, 0.5), (0.3, 0.9), (0.9, 0.3)] {
            let g = grid(64, alpha, beta);
            let s = PiecewiseSample::constant(g.clone(), vec![1.0]).unwrap();
            let pts: Vec<f64> = g.nodes()[..g.nodes().len() - 1].to_vec();
            let v = rl_integral_right_weighted(&s, alpha, beta, &pts).unwrap();
            for (k, &t) in pts.iter().enumerate() {
                let want =
                    beta_fn(alpha, beta) * (1.0 - t).powf(alpha + beta - 1.0) / gamma(alpha);
                assert_relative_eq!(v[k][0], want, epsilon = 5e-6, max_relative = 5e-6);
            }
        }
        // sqrt(pi) at t = 0 for alpha = beta = 1/2
        let g = grid(64, 0.5, 0.5);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let v = rl_integral_right_weighted(&s, 0.5, 0.5, &[0.0]).unwrap();
        assert_relative_eq!(v[0][0], PI.sqrt(), max_relative = 1e-7);
    }

    #[test]
    fn eval_outside_interval_rejected() {
        let g = grid(16, 0.5, 0.5);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        assert!(rl_integral_left(&s, 0.5, &[1.5]).is_err());
        assert!(rl_integral_right_weighted(&s, 0.5, 0.5, &[-0.1]).is_err());
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        let g = grid(16, 0.5, 0.5);
        let s = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        assert!(rl_integral_left(&s, 1.2, &[0.5]).is_err());
        assert!(rl_integral_left(&s, 0.0, &[0.5]).is_err());
    }

    #[test]
    fn matrix_agrees_with_pointwise() {
        let g = grid(32, 0.7, 0.4);
        let s = PiecewiseSample::from_fn(g.clone(), 1, |t| vec![(2.0 * t).sin() + 0.3])
            .unwrap();
        let a = integral_matrix(&g, 0.7).unwrap();
        let pts = g.nodes().to_vec();
        let direct = rl_integral_left(&s, 0.7, &pts).unwrap();
        for (j, row) in a.iter().enumerate() {
            let via_matrix: f64 = row
                .iter()
                .zip(s.values())
                .map(|(w, v)| w * v[0])
                .sum();
            assert_relative_eq!(via_matrix, direct[j][0], epsilon = 1e-14, max_relative = 1e-12);
        }
    }
}
