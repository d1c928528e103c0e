//! Turning a violated pointwise condition into functional descent.

use crate::fracops::FracTrajectory;
use crate::problem::{weighted_functional, Problem};

use super::special_var::build_special_variation_on;
use super::VariationError;

/// For each `eps`, builds the special variation at the witness parameters,
/// forms `x(., eps) = x0(.) + h(., eps)`, and returns `(eps, Delta J)`.
///
/// Along a violated chord witness the increment satisfies
/// `Delta J / eps -> (t1 - tau)^(beta-1) * (chord value) < 0`, so negative
/// values at small admissible `eps` certify non-minimality empirically.
pub fn descent_probe(
    problem: &Problem,
    traj: &FracTrajectory,
    witness: (f64, f64, f64, &[f64]),
    eps_grid: &[f64],
) -> Result<Vec<(f64, f64)>, VariationError> {
    let (tau, a, b, xi) = witness;
    problem.check_trajectory(traj)?;
    if xi.len() != problem.dim() {
        return Err(VariationError::BadParams(format!(
            "xi has dimension {}, problem has {}",
            xi.len(),
            problem.dim()
        )));
    }
    let psi = traj.psi();
    let nodes = psi.grid().nodes();
    let mut out = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let hi = tau + (a + b) * eps;
        // the construction is only specified on corner-free stretches
        for &ci in &psi.corner_indices() {
            let tc = nodes[ci];
            if tc >= tau && tc < hi {
                return Err(VariationError::CornerInSupport {
                    t: tc,
                    lo: tau,
                    hi,
                });
            }
        }
        let sv = build_special_variation_on(psi.grid(), tau, a, b, xi, eps, problem.orders())?;
        let fine = sv.h.psi().grid().clone();
        let base = traj.resample(&fine)?;
        let perturbed_psi = base.psi().add(sv.h.psi())?;
        let perturbed = FracTrajectory::new(base.x0().to_vec(), perturbed_psi, traj.alpha())?;
        let j0 = weighted_functional(problem, &base)?;
        let j1 = weighted_functional(problem, &perturbed)?;
        out.push((eps, j1 - j0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lagrangian;
    use crate::fracops::{Grid, Interval, Orders, PiecewiseSample};
    use approx::assert_relative_eq;

    fn problem(l: &str, a: f64, b: f64, x1: f64) -> Problem {
        Problem::new(
            Orders::new(a, b).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
            parse_lagrangian(l, 1).unwrap(),
            vec![0.0],
            vec![x1],
        )
        .unwrap()
    }

    fn const_traj(p: &Problem, v: f64, cells: usize) -> FracTrajectory {
        let g = Grid::graded(p.interval(), cells, p.orders()).unwrap();
        let psi = PiecewiseSample::constant(g, vec![v]).unwrap();
        FracTrajectory::new(vec![0.0], psi, p.orders().alpha()).unwrap()
    }

    #[test]
    fn quintic_with_kink_descends() {
        // the (2, 1, 1) chord violation: Delta J / eps -> -26 for beta = 1
        let p = problem("y^5 + abs(y)", 0.5, 1.0, 0.0);
        let traj = const_traj(&p, 0.0, 64);
        let probes =
            descent_probe(&p, &traj, (0.25, 2.0, 1.0, &[1.0]), &[0.02, 0.01, 0.005]).unwrap();
        for &(eps, dj) in &probes {
            assert!(dj < 0.0, "expected descent at eps = {eps}, got {dj}");
        }
        // the ratio approaches -26 as eps shrinks
        let last = probes.last().unwrap();
        assert_relative_eq!(last.1 / last.0, -26.0, max_relative = 0.05);
    }

    #[test]
    fn zero_xi_no_change() {
        let p = problem("y^2", 0.5, 1.0, 1.0);
        let traj = const_traj(&p, 1.0, 32);
        let probes = descent_probe(&p, &traj, (0.25, 1.0, 1.0, &[0.0]), &[0.05]).unwrap();
        assert_relative_eq!(probes[0].1, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn convex_problem_never_descends() {
        // L = y^2 with the straight line x = t: global minimizer
        let p = problem("y^2", 1.0, 1.0, 1.0);
        let traj = const_traj(&p, 1.0, 32);
        let probes = descent_probe(
            &p,
            &traj,
            (0.25, 2.0, 1.0, &[1.5]),
            &[0.1, 0.05, 0.025],
        )
        .unwrap();
        for &(_, dj) in &probes {
            assert!(dj >= 0.0);
        }
    }

    #[test]
    fn corner_in_support_rejected() {
        let p = problem("y^2", 0.5, 0.5, 1.0);
        let g = Grid::graded(p.interval(), 16, p.orders()).unwrap();
        let n = g.nodes().len();
        let mut values = vec![vec![1.0]; n];
        for v in values.iter_mut().skip(8) {
            *v = vec![2.0];
        }
        let psi = PiecewiseSample::new(g, values, vec![(8, vec![1.0])]).unwrap();
        let traj = FracTrajectory::new(vec![0.0], psi, 0.5).unwrap();
        // support [0.45, ...] contains the corner at t = 0.5
        let res = descent_probe(&p, &traj, (0.45, 1.0, 1.0, &[1.0]), &[0.1]);
        assert!(matches!(res, Err(VariationError::CornerInSupport { .. })));
    }
}
