//! Outer multiplier loop for the single-constraint isoperimetric problem.
//!
//! The normal multiplier is pinned to `mu0 = 1/2`; the constraint multiplier
//! `mu1` is a scalar root of `J_1(x*(mu1)) - l1`, located by bracketing and
//! either bisection or a secant polish. Inner solves warm-start from the
//! previous iterate.

use crate::fracops::Grid;
use crate::problem::{weighted_functional, Problem};

use super::direct::{penalty_descent, Workspace};
use super::{ConstraintSolver, SolveError, SolveOptions, SolveResult};

const MU0: f64 = 0.5;
const MAX_OUTER: usize = 48;

struct Outer<'a> {
    base: &'a Problem,
    ws: Workspace,
    opts: &'a SolveOptions,
    warm: Vec<f64>,
    inner_iters: usize,
}

impl<'a> Outer<'a> {
    /// Residual `J1(x*(mu1)) - l1` and the solution samples.
    fn residual(&mut self, mu1: f64) -> Result<(f64, Vec<f64>), SolveError> {
        let p = self
            .base
            .clone()
            .with_multipliers(MU0, vec![mu1])
            .map_err(SolveError::Problem)?;
        let (psi, _gn, iters, _conv, _ep) =
            penalty_descent(&self.ws, &p, self.warm.clone(), self.opts, true)?;
        self.inner_iters += iters;
        self.warm = psi.clone();
        let traj = self.ws.trajectory(&p, &psi)?;
        let j1 = p.constraint_functional(0, &traj)?;
        Ok((j1 - p.constraints()[0].target, psi))
    }
}

/// Solves the isoperimetric problem, reporting both multipliers.
pub fn solve_isoperimetric(
    problem: &Problem,
    grid: &Grid,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    if problem.constraints().len() != 1 {
        return Err(SolveError::NeedsOneConstraint(problem.constraints().len()));
    }
    let l1 = problem.constraints()[0].target;
    let ctol = 1e-9 * (1.0 + l1.abs());
    let ws = Workspace::new(problem, grid)?;
    let warm = ws.initial_psi(problem, opts.seed);
    let mut outer = Outer {
        base: problem,
        ws,
        opts,
        warm,
        inner_iters: 0,
    };

    // Bracket the root: start from 0 and expand geometrically in both
    // directions until the residual changes sign.
    let mut lo = 0.0f64;
    let (mut f_lo, mut psi_best) = outer.residual(lo)?;
    let mut hi = lo;
    let mut f_hi = f_lo;
    if f_lo.abs() > ctol {
        let mut found = false;
        let mut mag = 1.0;
        while mag <= 1e6 {
            for cand in [mag, -mag] {
                let (f_c, psi_c) = outer.residual(cand)?;
                if (f_c <= 0.0) != (f_lo <= 0.0) {
                    hi = cand;
                    f_hi = f_c;
                    psi_best = psi_c;
                    found = true;
                    break;
                }
                // keep the better endpoint as the bracket base
                if f_c.abs() < f_lo.abs() {
                    lo = cand;
                    f_lo = f_c;
                    psi_best = psi_c;
                }
            }
            if found {
                break;
            }
            mag *= 10.0;
        }
        if !found {
            return Err(SolveError::BracketFailure {
                lo: -1e6,
                hi: 1e6,
                f_lo,
                f_hi: f_lo,
            });
        }
    }

    let mut mu1 = lo;
    let mut f_cur = f_lo;
    if f_cur.abs() > ctol {
        // a few bisection steps shrink the bracket robustly
        for _ in 0..8 {
            let mid = 0.5 * (lo + hi);
            let (f_mid, psi_mid) = outer.residual(mid)?;
            psi_best = psi_mid;
            mu1 = mid;
            f_cur = f_mid;
            if f_cur.abs() <= ctol {
                break;
            }
            if (f_mid <= 0.0) == (f_lo <= 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
        }
        let mut guard = 0;
        while f_cur.abs() > ctol && guard < MAX_OUTER {
            guard += 1;
            let next = match opts.constraint_solver {
                ConstraintSolver::Bisection => 0.5 * (lo + hi),
                ConstraintSolver::Newton => {
                    // secant through the bracket endpoints, clamped inside
                    let sec = hi - f_hi * (hi - lo) / (f_hi - f_lo);
                    if sec.is_finite() && sec > lo.min(hi) && sec < lo.max(hi) {
                        sec
                    } else {
                        0.5 * (lo + hi)
                    }
                }
            };
            let (f_next, psi_next) = outer.residual(next)?;
            psi_best = psi_next;
            mu1 = next;
            f_cur = f_next;
            if (f_next <= 0.0) == (f_lo <= 0.0) {
                lo = next;
                f_lo = f_next;
            } else {
                hi = next;
                f_hi = f_next;
            }
        }
    }

    let solved = problem
        .clone()
        .with_multipliers(MU0, vec![mu1])
        .map_err(SolveError::Problem)?;
    let traj = outer.ws.trajectory(&solved, &psi_best)?;
    let j_value = weighted_functional(problem, &traj)?;
    let endpoint = {
        let xe = traj.x_end()?;
        let d: Vec<f64> = xe.iter().zip(problem.x1()).map(|(a, b)| a - b).collect();
        crate::fracops::norm(&d)
    };
    let converged = f_cur.abs() <= ctol && endpoint <= opts.endpoint_tol;
    Ok(SolveResult {
        traj,
        j_value,
        multipliers: Some((MU0, vec![mu1])),
        endpoint_residual: endpoint,
        constraint_residuals: vec![f_cur.abs()],
        iterations: outer.inner_iters,
        converged,
    })
}
