//! Variations from the fundamental-lemma construction.
//!
//! Given `f` in PC, these build an admissible `h` (zero at both endpoints)
//! whose Caputo derivative is the lemma's explicit integrand, with the
//! constant chosen so that the endpoint condition holds exactly in the
//! discrete representation. The constant converges to its closed-form value
//! under grid refinement.

use crate::fracops::{
    norm, rl_integral_left, FracTrajectory, Orders, PiecewiseSample, Regime,
};
use crate::special::gamma;

use super::VariationError;

/// The constructed variation together with its defining data.
#[derive(Debug, Clone)]
pub struct DuBoisReymondVariation {
    pub regime: Regime,
    pub f: PiecewiseSample,
    /// `k0` in the super regime, `k` in the sub regime.
    pub k0_or_k: f64,
    pub h: FracTrajectory,
}

/// Builds the admissible variation for `f` (scalar) in either regime.
///
/// Super regime: `psi_h(t) = Gamma(alpha) (t1-t)^(beta-alpha) f(t) - k0` with
/// `k0 = Gamma(alpha+1)/(t1-t0)^alpha * int (t1-t)^(beta-1) f dt`.
/// Sub regime: `psi_h(t) = f(t) - k/Gamma(alpha) (t1-t)^(alpha-beta)` with
/// `k = (2 alpha - beta) Gamma(alpha)/(t1-t0)^(2 alpha - beta) * int (t1-t)^(alpha-1) f dt`.
pub fn build_dbr_variation(
    f: &PiecewiseSample,
    orders: &Orders,
) -> Result<DuBoisReymondVariation, VariationError> {
    if f.dim() != 1 {
        return Err(VariationError::ScalarOnly(f.dim()));
    }
    let grid = f.grid().clone();
    let nodes = grid.nodes();
    let t1 = grid.interval().t1();
    let alpha = orders.alpha();
    let beta = orders.beta();
    let len = grid.interval().len();
    let regime = orders.regime();

    let scale = |power: f64, v: &[f64], t: f64| vec![gamma(alpha) * (t1 - t).powf(power) * v[0]];

    let psi_h = match regime {
        Regime::Super => {
            // weighted integrand Gamma(alpha) (t1-t)^(beta-alpha) f(t)
            let power = beta - alpha;
            let values = nodes
                .iter()
                .zip(f.values())
                .map(|(&t, v)| scale(power, v, t))
                .collect::<Vec<_>>();
            let corners = f
                .corners()
                .iter()
                .map(|(idx, left)| (*idx, scale(power, left, nodes[*idx])))
                .collect::<Vec<_>>();
            let weighted = PiecewiseSample::new(grid.clone(), values, corners)?;
            // I^alpha of the weighted integrand at t1 equals the lemma's
            // weighted integral of f; dividing by I^alpha(1)(t1) makes the
            // discrete endpoint vanish identically.
            let s = rl_integral_left(&weighted, alpha, &[t1])?[0][0];
            let k0 = gamma(alpha + 1.0) * s / len.powf(alpha);
            let values = weighted
                .values()
                .iter()
                .map(|v| vec![v[0] - k0])
                .collect::<Vec<_>>();
            let corners = weighted
                .corners()
                .iter()
                .map(|(idx, left)| (*idx, vec![left[0] - k0]))
                .collect::<Vec<_>>();
            (PiecewiseSample::new(grid.clone(), values, corners)?, k0)
        }
        Regime::Sub => {
            let power = alpha - beta;
            let phi = PiecewiseSample::from_fn(grid.clone(), 1, |t| {
                vec![(t1 - t).powf(power)]
            })?;
            let int_f = rl_integral_left(f, alpha, &[t1])?[0][0];
            let int_phi = rl_integral_left(&phi, alpha, &[t1])?[0][0];
            let k = gamma(alpha) * int_f / int_phi;
            let values = nodes
                .iter()
                .zip(f.values())
                .map(|(&t, v)| vec![v[0] - k / gamma(alpha) * (t1 - t).powf(power)])
                .collect::<Vec<_>>();
            let corners = f
                .corners()
                .iter()
                .map(|(idx, left)| {
                    let t = nodes[*idx];
                    (*idx, vec![left[0] - k / gamma(alpha) * (t1 - t).powf(power)])
                })
                .collect::<Vec<_>>();
            (PiecewiseSample::new(grid, values, corners)?, k)
        }
    };
    let (psi, constant) = psi_h;
    let h = FracTrajectory::new(vec![0.0], psi, alpha)?;
    let endpoint = norm(&h.x_end()?);
    let tol = 1e-9 * (1.0 + f.sup_norm());
    if endpoint > tol {
        return Err(VariationError::EndpointResidual {
            residual: endpoint,
            tol,
        });
    }
    Ok(DuBoisReymondVariation {
        regime,
        f: f.clone(),
        k0_or_k: constant,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{Grid, Interval, Orders};
    use crate::special::gamma;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn build(f_val: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> DuBoisReymondVariation {
        let orders = Orders::new(a, b).unwrap();
        let grid = Grid::graded(Interval::new(0.0, 1.0).unwrap(), cells, &orders).unwrap();
        let f = PiecewiseSample::from_fn(grid, 1, |t| vec![f_val(t)]).unwrap();
        build_dbr_variation(&f, &orders).unwrap()
    }

    #[test]
    fn super_regime_constant_f() {
        // f = 1, alpha = 0.5, beta = 1: k0 = Gamma(1.5) * int_0^1 1 dt
        let v = build(|_| 1.0, 0.5, 1.0, 128);
        assert_eq!(v.regime, Regime::Super);
        assert_relative_eq!(v.k0_or_k, gamma(1.5), max_relative = 1e-4);
        assert_eq!(v.h.reconstruct(&[0.0]).unwrap()[0][0], 0.0);
        assert!(v.h.x_end().unwrap()[0].abs() <= 1e-12);
    }

    #[test]
    fn sub_regime_constant_f() {
        // f = 1, alpha = beta = 0.5: k = 0.5 * Gamma(0.5) * 2 = sqrt(pi)
        let v = build(|_| 1.0, 0.5, 0.5, 64);
        assert_eq!(v.regime, Regime::Sub);
        assert_relative_eq!(v.k0_or_k, PI.sqrt(), max_relative = 1e-12);
        assert!(v.h.x_end().unwrap()[0].abs() <= 1e-13);
    }

    #[test]
    fn zero_f_gives_zero_variation() {
        for (a, b) in [(0.5, 1.0), (0.5, 0.5)] {
            let v = build(|_| 0.0, a, b, 32);
            assert_eq!(v.k0_or_k, 0.0);
            for x in v.h.x_at_nodes().unwrap() {
                assert_eq!(x[0], 0.0);
            }
        }
    }

    #[test]
    fn endpoint_vanishes_for_smooth_f() {
        for (a, b) in [(0.3, 0.9), (0.75, 0.5), (1.0, 1.0)] {
            for f in [|t: f64| t, |t: f64| t.cos()] {
                let v = build(f, a, b, 64);
                assert!(
                    v.h.x_end().unwrap()[0].abs() <= 1e-12,
                    "endpoint leak at ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn constant_converges_to_closed_form() {
        // f = cos, super regime: k0 -> Gamma(1.5) int_0^1 (1-t)^(beta-1) cos t dt
        // with beta = 1: integral = sin(1)
        let coarse = build(|t| t.cos(), 0.5, 1.0, 32);
        let fine = build(|t| t.cos(), 0.5, 1.0, 256);
        let want = gamma(1.5) * 1.0f64.sin();
        assert!((fine.k0_or_k - want).abs() < (coarse.k0_or_k - want).abs());
        assert_relative_eq!(fine.k0_or_k, want, max_relative = 1e-4);
    }

    #[test]
    fn rejects_vector_samples() {
        let orders = Orders::new(0.5, 0.5).unwrap();
        let grid = Grid::graded(Interval::new(0.0, 1.0).unwrap(), 16, &orders).unwrap();
        let f = PiecewiseSample::constant(grid, vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            build_dbr_variation(&f, &orders),
            Err(VariationError::ScalarOnly(2))
        ));
    }
}
