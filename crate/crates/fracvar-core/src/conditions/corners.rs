//! Corner conditions: continuity of `L_y` and of `L - <L_y, y>` across
//! derivative jumps.

use crate::fracops::{norm, FracTrajectory};
use crate::problem::Problem;

use super::{CheckError, ConditionKind, ConditionReport, Verdict, Witness, WitnessParams};

/// Checks both corner conditions at every corner of the trajectory.
///
/// At a corner `t` with one-sided derivatives `psi(t-0)` and `psi(t+0)`:
/// `Delta_1 = L_y(t, x, psi(t-0)) - L_y(t, x, psi(t+0))` must vanish, and so
/// must `Delta_2 = [L - <L_y, y>](t-0) - [L - <L_y, y>](t+0)`.
pub fn corner_conditions(
    problem: &Problem,
    traj: &FracTrajectory,
    tol: f64,
) -> Result<ConditionReport, CheckError> {
    problem.check_trajectory(traj)?;
    if !(tol > 0.0) {
        return Err(CheckError::BadParams(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let psi = traj.psi();
    let nodes = psi.grid().nodes();
    let regime = problem.orders().regime();

    if psi.is_continuous() {
        return Ok(ConditionReport {
            condition: ConditionKind::Corners,
            regime,
            verdict: Verdict::Satisfied,
            residual_sup: 0.0,
            fitted_k: None,
            witnesses: Vec::new(),
            notes: vec!["trajectory has no corners; conditions hold trivially".into()],
        });
    }

    let xs = traj.x_at_nodes()?;
    let mut witnesses = Vec::new();
    let mut worst = 0.0f64;
    let mut any_nonsmooth = false;
    for (idx, left_psi) in psi.corners() {
        let t = nodes[*idx];
        let x = &xs[*idx];
        let right_psi = psi.value_right(*idx);
        let jl = problem.effective_jet(t, x, left_psi)?;
        let jr = problem.effective_jet(t, x, right_psi)?;
        if !jl.grad_y_is_smooth() || !jr.grad_y_is_smooth() {
            any_nonsmooth = true;
            witnesses.push(Witness {
                t,
                params: WitnessParams::NonSmooth,
                value: f64::NAN,
            });
            continue;
        }
        let d1_vec: Vec<f64> = jl.grad_y.iter().zip(&jr.grad_y).map(|(a, b)| a - b).collect();
        let delta1 = norm(&d1_vec);
        let delta2 = (jl.hamiltonian_like(left_psi) - jr.hamiltonian_like(right_psi)).abs();
        worst = worst.max(delta1).max(delta2);
        witnesses.push(Witness {
            t,
            params: WitnessParams::Corner { delta1, delta2 },
            value: delta1.max(delta2),
        });
    }

    let verdict = if any_nonsmooth {
        Verdict::Inconclusive
    } else if worst <= tol {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    let notes = if any_nonsmooth {
        vec!["L_y does not exist on one side of some corner".into()]
    } else {
        Vec::new()
    };
    Ok(ConditionReport {
        condition: ConditionKind::Corners,
        regime,
        verdict,
        residual_sup: worst,
        fitted_k: None,
        witnesses,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lagrangian;
    use crate::fracops::{Grid, Interval, Orders, PiecewiseSample};
    use approx::assert_relative_eq;

    fn broken_traj(p: &Problem, left: f64, right: f64) -> FracTrajectory {
        let g = Grid::graded(p.interval(), 16, p.orders()).unwrap();
        let n = g.nodes().len();
        let mut values = vec![vec![left]; n];
        for v in values.iter_mut().skip(8) {
            *v = vec![right];
        }
        let psi = PiecewiseSample::new(g, values, vec![(8, vec![left])]).unwrap();
        FracTrajectory::new(vec![0.0], psi, p.orders().alpha()).unwrap()
    }

    fn problem(l: &str) -> Problem {
        Problem::new(
            Orders::new(1.0, 1.0).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
            parse_lagrangian(l, 1).unwrap(),
            vec![0.0],
            vec![0.0],
        )
        .unwrap()
    }

    #[test]
    fn quadratic_jump_violates_first_condition() {
        let p = problem("y^2");
        let traj = broken_traj(&p, 1.0, -1.0);
        let rep = corner_conditions(&p, &traj, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Violated);
        match rep.witnesses[0].params {
            WitnessParams::Corner { delta1, delta2 } => {
                assert_relative_eq!(delta1, 4.0, epsilon = 1e-12);
                // Delta_2 = (1 - 2) - (1 - 2) = 0
                assert_relative_eq!(delta2, 0.0, epsilon = 1e-12);
            }
            _ => panic!("expected corner witness"),
        }
    }

    #[test]
    fn no_actual_jump_is_satisfied() {
        let p = problem("y^2");
        let traj = broken_traj(&p, 0.7, 0.7);
        let rep = corner_conditions(&p, &traj, 1e-12).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied);
        assert_relative_eq!(rep.residual_sup, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn double_well_broken_extremal_passes_both() {
        // L = (y^2 - 1)^2 with psi jumping 1 -> -1: L_y = 0 and L = 0 on both
        // sides, so both corner conditions hold exactly
        let p = problem("(y^2 - 1)^2");
        let traj = broken_traj(&p, 1.0, -1.0);
        let rep = corner_conditions(&p, &traj, 1e-12).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied);
        assert!(rep.residual_sup <= 1e-12);
    }

    #[test]
    fn continuous_trajectory_trivially_satisfied() {
        let p = problem("y^2");
        let g = Grid::graded(p.interval(), 16, p.orders()).unwrap();
        let psi = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let traj = FracTrajectory::new(vec![0.0], psi, 1.0).unwrap();
        let rep = corner_conditions(&p, &traj, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Satisfied);
        assert!(rep.notes[0].contains("no corners"));
    }

    #[test]
    fn kink_on_one_side_inconclusive() {
        let p = problem("abs(y)");
        let traj = broken_traj(&p, 0.0, 1.0);
        let rep = corner_conditions(&p, &traj, 1e-9).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }
}
