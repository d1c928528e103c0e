//! Legendre condition: `<L_yy(t) mu, mu> >= 0` along the trajectory.

use crate::fracops::FracTrajectory;
use crate::problem::Problem;

use super::{CheckError, ConditionKind, ConditionReport, Verdict, Witness, WitnessParams};

/// Checks positive semidefiniteness of `L_yy` at every non-corner node.
pub fn legendre_check(
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
    let xs = traj.x_at_nodes()?;

    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    let mut worst = 0.0f64;
    let mut any_nonsmooth = false;
    let mut violated = false;

    for (j, &t) in nodes.iter().enumerate() {
        if psi.is_corner(j) {
            continue;
        }
        let jet = problem.effective_jet(t, &xs[j], psi.value_right(j))?;
        if !jet.hess_is_smooth() {
            any_nonsmooth = true;
            witnesses.push(Witness {
                t,
                params: WitnessParams::NonSmooth,
                value: f64::NAN,
            });
            continue;
        }
        let (lambda_min, direction) = sym_eig_min(&jet.hess_yy);
        if lambda_min < -tol {
            violated = true;
            worst = worst.max(-lambda_min);
            witnesses.push(Witness {
                t,
                params: WitnessParams::Direction { mu: direction },
                value: lambda_min,
            });
        }
    }

    if any_nonsmooth {
        notes.push("L_yy does not exist at some nodes; those nodes are inconclusive".into());
    }
    let verdict = if violated {
        Verdict::Violated
    } else if any_nonsmooth {
        Verdict::Inconclusive
    } else {
        Verdict::Satisfied
    };
    witnesses.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.t.total_cmp(&b.t)));
    witnesses.truncate(10);
    Ok(ConditionReport {
        condition: ConditionKind::Legendre,
        regime: problem.orders().regime(),
        verdict,
        residual_sup: worst,
        fitted_k: None,
        witnesses,
        notes,
    })
}

/// Smallest eigenvalue and eigenvector of a small symmetric matrix by cyclic
/// Jacobi rotations.
pub(crate) fn sym_eig_min(mat: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = mat.len();
    if n == 1 {
        return (mat[0][0], vec![1.0]);
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..n {
        if a[i][i] < a[best][best] {
            best = i;
        }
    }
    (a[best][best], v.iter().map(|row| row[best]).collect())
}
