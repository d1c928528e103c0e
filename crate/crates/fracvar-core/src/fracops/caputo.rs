//! Left Caputo derivative by product differentiation.
//!
//! The increment `x - x(t0)` is interpolated cellwise, the kernel
//! `(t-tau)^(-alpha)` is integrated exactly against the interpolant, and the
//! result is differentiated analytically. Interpolation is linear on cells
//! whose local mesh is strongly graded and quadratic (three-point, divided
//! differences) where the mesh is quasi-uniform; the quadratic cells push the
//! interior truncation error below the linear scheme's `h^(2-alpha)` while
//! the linear cells stay robust inside the boundary layer.

use super::sample::PiecewiseSample;
use super::OpsError;
use crate::special::gamma;

/// Adjacent-cell width ratio up to which the three-point interpolant is used.
const QUASI_UNIFORM_RATIO: f64 = 1.2;

/// `cD^alpha_{t0+} x` sampled at the grid nodes.
///
/// `x_samples` must be continuous (corners in `x` itself are outside the
/// admissible class; only the derivative may jump). The node-0 value is the
/// scheme's own limit: zero for `alpha < 1`, the first cell slope for
/// `alpha = 1`. Values at nodes inside the initial layer carry the scheme's
/// startup error; accuracy claims hold away from `t0`.
pub fn caputo_left(x_samples: &PiecewiseSample, alpha: f64) -> Result<PiecewiseSample, OpsError> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(OpsError::InvalidAlpha(alpha));
    }
    if !x_samples.is_continuous() {
        return Err(OpsError::CornersNotAllowed);
    }
    let nodes = x_samples.grid().nodes().to_vec();
    let n_cells = nodes.len() - 1;
    let dim = x_samples.dim();
    let vals = x_samples.values();

    // first divided differences per cell, u = x - x(t0)
    let mut dd1 = vec![vec![0.0; dim]; n_cells];
    for i in 0..n_cells {
        let h = nodes[i + 1] - nodes[i];
        for c in 0..dim {
            dd1[i][c] = (vals[i + 1][c] - vals[i][c]) / h;
        }
    }
    // quadratic flag per cell: needs a left neighbor of comparable width
    let mut quad = vec![false; n_cells];
    for i in 1..n_cells {
        let hp = nodes[i] - nodes[i - 1];
        let hc = nodes[i + 1] - nodes[i];
        quad[i] = hp.max(hc) / hp.min(hc) <= QUASI_UNIFORM_RATIO;
    }

    let mut out = vec![vec![0.0; dim]; nodes.len()];
    if alpha == 1.0 {
        // classical limit: derivative of the local quadratic through the
        // three nearest nodes (exact for linear and quadratic trajectories)
        for (j, &t) in nodes.iter().enumerate() {
            let i = j.saturating_sub(1).min(n_cells.saturating_sub(2));
            let (ta, tb, tc) = (nodes[i], nodes[i + 1], nodes[i + 2]);
            for c in 0..dim {
                let d2 = (dd1[i + 1][c] - dd1[i][c]) / (tc - ta);
                out[j][c] = dd1[i][c] + d2 * (2.0 * t - ta - tb);
            }
        }
    } else {
        let inv_g1a = 1.0 / gamma(1.0 - alpha);
        let oma = 1.0 - alpha;
        let tma = 2.0 - alpha;
        for j in 1..nodes.len() {
            let t = nodes[j];
            for i in 0..j {
                let s1 = t - nodes[i + 1];
                let s2 = t - nodes[i];
                let m0 = super::quadrature::pow_diff(s2, s1, oma) / oma;
                if quad[i] && i >= 1 {
                    let ta = nodes[i - 1];
                    let tb = nodes[i];
                    let span = nodes[i + 1] - ta;
                    let ms = super::quadrature::pow_diff(s2, s1, tma) / tma;
                    for c in 0..dim {
                        let d2 = (dd1[i][c] - dd1[i - 1][c]) / span;
                        // u'(tau) = dd1[i-1] + d2 (2 tau - ta - tb), tau = t - s
                        let c0 = dd1[i - 1][c] + d2 * (2.0 * t - ta - tb);
                        out[j][c] += inv_g1a * (c0 * m0 - 2.0 * d2 * ms);
                    }
                } else {
                    for c in 0..dim {
                        out[j][c] += inv_g1a * dd1[i][c] * m0;
                    }
                }
            }
        }
    }
    PiecewiseSample::new(x_samples.grid().clone(), out, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{Grid, Interval, Orders};
    use crate::special::gamma;
    use approx::assert_relative_eq;

    fn grid(n: usize, a: f64) -> Grid {
        Grid::graded(
            Interval::new(0.0, 1.0).unwrap(),
            n,
            &Orders::new(a, a).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn classical_derivative_of_t() {
        let g = grid(16, 1.0);
        let s = PiecewiseSample::from_fn(g, 1, |t| vec![t]).unwrap();
        let d = caputo_left(&s, 1.0).unwrap();
        for v in d.values() {
            assert_relative_eq!(v[0], 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn classical_derivative_of_t_squared() {
        let g = grid(16, 1.0);
        let s = PiecewiseSample::from_fn(g.clone(), 1, |t| vec![t * t]).unwrap();
        let d = caputo_left(&s, 1.0).unwrap();
        for (j, v) in d.values().iter().enumerate() {
            assert_relative_eq!(v[0], 2.0 * g.nodes()[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_maps_to_zero_exactly() {
        for alpha in [0.3f64, 0.5, 1.0] {
            let g = grid(16, alpha.max(0.5));
            let s = PiecewiseSample::constant(g, vec![5.0, -2.0]).unwrap();
            let d = caputo_left(&s, alpha).unwrap();
            for v in d.values() {
                assert_eq!(v, &[0.0, 0.0]);
            }
        }
    }

    #[test]
    fn power_trajectory_recovers_constant_derivative() {
        // x = t^alpha has cD^alpha x = Gamma(1+alpha), away from t0
        let alpha = 0.5;
        let g = grid(256, alpha);
        let s = PiecewiseSample::from_fn(g.clone(), 1, |t| vec![t.powf(alpha)]).unwrap();
        let d = caputo_left(&s, alpha).unwrap();
        let want = gamma(1.0 + alpha);
        for (j, v) in d.values().iter().enumerate() {
            if g.nodes()[j] >= 0.05 {
                assert_relative_eq!(v[0], want, max_relative = 2e-4);
            }
        }
    }

    #[test]
    fn rejects_corner_input() {
        let g = grid(16, 0.5);
        let n = g.nodes().len();
        let s = PiecewiseSample::new(g, vec![vec![0.0]; n], vec![(4, vec![1.0])]).unwrap();
        assert!(caputo_left(&s, 0.5).is_err());
    }
}
