//! The four-branch special variation with piecewise-constant Caputo
//! derivative.
//!
//! For parameters `(tau, a, b, xi, eps)` the derivative of the variation is
//! `xi (1 - k(eps))` on `[tau, tau + a eps]`, `-xi (a/b + k(eps))` on
//! `[tau + a eps, tau + (a+b) eps]`, and zero elsewhere, where
//! `k(eps) = phi(t1, eps) / psi[0, a+b](t1, eps)` zeroes the endpoint. The
//! same function has a closed form in the increments
//! `psi[l1, l2](t, eps) = (t - tau - l1 eps)^alpha - (t - tau - l2 eps)^alpha`,
//! and both representations are required to agree on every node.

use crate::fracops::{
    norm, quadrature::pow_diff, FracTrajectory, Grid, Interval, Orders, PiecewiseSample,
};
use crate::special::gamma;

use super::VariationError;

/// Cells of the base grid a standalone special variation is built on.
const BASE_CELLS: usize = 64;
/// Node agreement limit between the two constructions.
const AGREEMENT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpecialVariation {
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub xi: Vec<f64>,
    pub eps: f64,
    pub k_eps: f64,
    pub h: FracTrajectory,
    /// Constant `M` with `sup |h| <= M eps^alpha`.
    pub bound_m: f64,
}

impl SpecialVariation {
    /// Closed-form value of `h(t)` (independent of the quadrature route).
    pub fn closed_form_at(&self, t: f64) -> Vec<f64> {
        closed_form(
            t,
            self.tau,
            self.a,
            self.b,
            &self.xi,
            self.eps,
            self.k_eps,
            self.h.alpha(),
        )
    }
}

fn psi_bracket(t: f64, tau: f64, l1: f64, l2: f64, eps: f64, alpha: f64) -> f64 {
    // (t - tau - l1 eps)^alpha - (t - tau - l2 eps)^alpha, l2 > l1
    pow_diff(t - tau - l1 * eps, t - tau - l2 * eps, alpha)
}

fn k_of_eps(t1: f64, tau: f64, a: f64, b: f64, eps: f64, alpha: f64) -> f64 {
    let phi = psi_bracket(t1, tau, 0.0, a, eps, alpha)
        - a / b * psi_bracket(t1, tau, a, a + b, eps, alpha);
    let denom = psi_bracket(t1, tau, 0.0, a + b, eps, alpha);
    phi / denom
}

#[allow(clippy::too_many_arguments)]
fn closed_form(
    t: f64,
    tau: f64,
    a: f64,
    b: f64,
    xi: &[f64],
    eps: f64,
    k: f64,
    alpha: f64,
) -> Vec<f64> {
    let ga1 = gamma(alpha + 1.0);
    let scale: f64 = if t <= tau {
        0.0
    } else if t <= tau + a * eps {
        (1.0 - k) * (t - tau).powf(alpha)
    } else if t <= tau + (a + b) * eps {
        (1.0 - k) * psi_bracket(t, tau, 0.0, a, eps, alpha)
            - (a / b + k) * (t - tau - a * eps).powf(alpha)
    } else {
        let phi = psi_bracket(t, tau, 0.0, a, eps, alpha)
            - a / b * psi_bracket(t, tau, a, a + b, eps, alpha);
        phi - k * psi_bracket(t, tau, 0.0, a + b, eps, alpha)
    };
    xi.iter().map(|&c| c * scale / ga1).collect()
}

/// Largest admissible `eps` for the given geometry: the admissibility
/// condition `|k(eps)| < min(1, a/b)` located by bisection, capped by the
/// support-fits constraint `tau + (a+b) eps < t1`.
pub fn max_admissible_eps(
    tau: f64,
    a: f64,
    b: f64,
    orders: &Orders,
    interval: Interval,
) -> Result<f64, VariationError> {
    validate_geometry(tau, a, b, orders, interval)?;
    let t1 = interval.t1();
    let alpha = orders.alpha();
    let a0 = 1.0f64.min(a / b);
    let eps_geom = (t1 - tau) / (a + b) * (1.0 - 1e-9);
    let admissible = |e: f64| k_of_eps(t1, tau, a, b, e, alpha).abs() < a0;
    if admissible(eps_geom) {
        return Ok(eps_geom);
    }
    let mut lo = 1e-14 * interval.len();
    let mut hi = eps_geom;
    if !admissible(lo) {
        return Err(VariationError::BadParams(
            "no admissible eps found for this geometry".into(),
        ));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn validate_geometry(
    tau: f64,
    a: f64,
    b: f64,
    orders: &Orders,
    interval: Interval,
) -> Result<(), VariationError> {
    let _ = orders;
    if !(a > 0.0 && b > 0.0) {
        return Err(VariationError::BadParams(format!(
            "chord weights must be positive, got a = {a}, b = {b}"
        )));
    }
    if tau < interval.t0() || tau >= interval.t1() {
        return Err(VariationError::BadParams(format!(
            "tau = {tau} must lie in [{}, {})",
            interval.t0(),
            interval.t1()
        )));
    }
    Ok(())
}

/// Builds the special variation on its own graded base grid.
pub fn build_special_variation(
    tau: f64,
    a: f64,
    b: f64,
    xi: &[f64],
    eps: f64,
    orders: &Orders,
    interval: Interval,
) -> Result<SpecialVariation, VariationError> {
    let grid = Grid::graded(interval, BASE_CELLS, orders)?;
    build_special_variation_on(&grid, tau, a, b, xi, eps, orders)
}

/// Builds the special variation on a refinement of the given grid (the three
/// breakpoints are inserted as exact nodes).
pub fn build_special_variation_on(
    grid: &Grid,
    tau: f64,
    a: f64,
    b: f64,
    xi: &[f64],
    eps: f64,
    orders: &Orders,
) -> Result<SpecialVariation, VariationError> {
    let interval = grid.interval();
    validate_geometry(tau, a, b, orders, interval)?;
    if !(eps > 0.0) {
        return Err(VariationError::BadParams(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if xi.is_empty() {
        return Err(VariationError::BadParams("xi must be nonempty".into()));
    }
    let t1 = interval.t1();
    let alpha = orders.alpha();
    if tau + (a + b) * eps >= t1 {
        return Err(VariationError::BadParams(format!(
            "support [tau, tau + (a+b) eps] = [{tau}, {}] must end before t1 = {t1}",
            tau + (a + b) * eps
        )));
    }

    let k = k_of_eps(t1, tau, a, b, eps, alpha);
    let a0 = 1.0f64.min(a / b);
    if k.abs() >= a0 {
        let max_admissible = max_admissible_eps(tau, a, b, orders, interval)?;
        return Err(VariationError::EpsTooLarge {
            eps,
            max_admissible,
        });
    }

    let b1 = tau + a * eps;
    let b2 = tau + (a + b) * eps;
    let (fine, idx) = grid.insert_points(&[tau, b1, b2])?;
    let nodes = fine.nodes();
    let dim = xi.len();

    let lvl1: Vec<f64> = xi.iter().map(|&c| c * (1.0 - k)).collect();
    let lvl2: Vec<f64> = xi.iter().map(|&c| -c * (a / b + k)).collect();
    let zero = vec![0.0; dim];
    let mut values = Vec::with_capacity(nodes.len());
    for &t in nodes {
        let v = if t < tau || t >= b2 {
            &zero
        } else if t < b1 {
            &lvl1
        } else {
            &lvl2
        };
        values.push(v.clone());
    }
    let mut corners = Vec::new();
    if xi.iter().any(|&c| c != 0.0) {
        // a breakpoint at t0 is the stored right limit, not an interior jump
        let interior = 1..nodes.len() - 1;
        for (i, left) in [(idx[0], &zero), (idx[1], &lvl1), (idx[2], &lvl2)] {
            if interior.contains(&i) {
                corners.push((i, left.clone()));
            }
        }
    }
    let psi = PiecewiseSample::new(fine.clone(), values, corners)?;
    let h = FracTrajectory::new(vec![0.0; dim], psi, alpha)?;

    // the product quadrature is exact on step functions, so the reconstructed
    // trajectory must match the closed form at every node
    let xs = h.x_at_nodes()?;
    let mut max_dev = 0.0f64;
    for (j, &t) in nodes.iter().enumerate() {
        let cf = closed_form(t, tau, a, b, xi, eps, k, alpha);
        let d: Vec<f64> = cf.iter().zip(&xs[j]).map(|(p, q)| p - q).collect();
        max_dev = max_dev.max(norm(&d));
    }
    if max_dev > AGREEMENT_LIMIT {
        return Err(VariationError::ConstructionMismatch {
            max_dev,
            limit: AGREEMENT_LIMIT,
        });
    }

    let bound_m = norm(xi) / gamma(alpha + 1.0)
        * (2.0 * a.powf(alpha) + (a / b + 1.0) * b.powf(alpha));

    Ok(SpecialVariation {
        tau,
        a,
        b,
        xi: xi.to_vec(),
        eps,
        k_eps: k,
        h,
        bound_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_interval() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn classical_degeneracy_k_is_zero() {
        let orders = Orders::new(1.0, 1.0).unwrap();
        let sv =
            build_special_variation(0.25, 1.5, 0.7, &[1.0], 0.05, &orders, unit_interval())
                .unwrap();
        assert!(sv.k_eps.abs() < 1e-12);
        // tent shape: endpoint zero, peak inside
        assert!(sv.h.x_end().unwrap()[0].abs() < 1e-12);
        assert!(sv.h.psi().sup_norm() > 0.0);
    }

    #[test]
    fn k_sequence_decreases_dyadically() {
        let orders = Orders::new(0.5, 0.5).unwrap();
        let mut prev: Option<f64> = None;
        for eps in [0.1, 0.05, 0.025] {
            let sv = build_special_variation(0.25, 1.0, 1.0, &[1.0], eps, &orders, unit_interval())
                .unwrap();
            if let Some(p) = prev {
                assert!(sv.k_eps.abs() < p, "|k| must decrease toward 0");
            }
            prev = Some(sv.k_eps.abs());
        }
    }

    #[test]
    fn endpoints_and_bound() {
        let orders = Orders::new(0.5, 0.5).unwrap();
        let sv = build_special_variation(0.25, 1.0, 1.0, &[1.0], 0.05, &orders, unit_interval())
            .unwrap();
        // M = (1/Gamma(1.5)) [2 + 2] = 4 / Gamma(1.5)
        assert_relative_eq!(sv.bound_m, 4.5135166683820503, max_relative = 1e-12);
        let xs = sv.h.x_at_nodes().unwrap();
        let sup = xs.iter().map(|v| v[0].abs()).fold(0.0, f64::max);
        assert!(sup <= sv.bound_m * 0.05f64.powf(0.5));
        assert_eq!(xs[0][0], 0.0);
        assert!(xs.last().unwrap()[0].abs() < 1e-14);
    }

    #[test]
    fn inadmissible_eps_reports_threshold() {
        let orders = Orders::new(0.3, 0.3).unwrap();
        // a/b >> 1 pushes |k| past 1 as eps approaches the geometric cap
        let res = build_special_variation(0.0, 40.0, 1.0, &[1.0], 0.023, &orders, unit_interval());
        match res {
            Err(VariationError::EpsTooLarge { max_admissible, .. }) => {
                assert!(max_admissible > 0.0 && max_admissible < 0.023);
                // the reported threshold itself must be admissible
                build_special_variation(
                    0.0,
                    40.0,
                    1.0,
                    &[1.0],
                    max_admissible * 0.999,
                    &orders,
                    unit_interval(),
                )
                .unwrap();
            }
            other => panic!("expected EpsTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn support_must_fit() {
        let orders = Orders::new(0.5, 0.5).unwrap();
        assert!(matches!(
            build_special_variation(0.9, 1.0, 1.0, &[1.0], 0.2, &orders, unit_interval()),
            Err(VariationError::BadParams(_))
        ));
    }

    #[test]
    fn zero_xi_is_zero_variation() {
        let orders = Orders::new(0.7, 0.7).unwrap();
        let sv = build_special_variation(0.3, 2.0, 1.0, &[0.0], 0.05, &orders, unit_interval())
            .unwrap();
        assert!(sv.h.psi().is_continuous());
        assert_eq!(sv.h.psi().sup_norm(), 0.0);
    }
}
