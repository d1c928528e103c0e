//! Strong-minimum checks: the derivative-free chord inequality and the
//! Weierstrass excess function.
//!
//! The chord inequality
//! `a L(t,x,y+xi) + b L(t,x,y-xi a/b) - (a+b) L(t,x,y) >= 0`
//! needs only Lagrangian values, so it applies where `L_y` does not exist;
//! where `L_y` does exist it is equivalent to nonnegativity of the excess
//! `E(t,x,y,z) = L(t,x,z) - L(t,x,y) - <L_y(t,x,y), z-y>`.

use rayon::prelude::*;

use crate::fracops::FracTrajectory;
use crate::problem::Problem;

use super::{
    locate_node, CheckError, ConditionKind, ConditionReport, Verdict, Witness, WitnessParams,
};

/// Scan variant: strong scans cover a trajectory-scaled box, weak scans the
/// ball of radius `delta/2` with chord ratios below one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanMode {
    Strong,
    Weak { delta: f64 },
}

/// Deterministic scan resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    /// Points per half-axis; each xi axis gets `2m + 1` points.
    pub xi_half_points: usize,
    /// Violation threshold: any value below `-tol` is a violation.
    pub tol: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            xi_half_points: 8,
            tol: 1e-9,
        }
    }
}

const STRONG_RATIOS: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
const WEAK_RATIOS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

/// Chord value at one `(tau, a, b, xi)`. Negative certifies that the strong
/// local-minimum necessary condition fails there.
pub fn abxi_inequality(
    problem: &Problem,
    traj: &FracTrajectory,
    tau: f64,
    a: f64,
    b: f64,
    xi: &[f64],
) -> Result<f64, CheckError> {
    problem.check_trajectory(traj)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(CheckError::BadParams(format!(
            "chord weights must be positive, got a = {a}, b = {b}"
        )));
    }
    if xi.len() != problem.dim() {
        return Err(CheckError::BadParams(format!(
            "xi has dimension {}, problem has {}",
            xi.len(),
            problem.dim()
        )));
    }
    let idx = locate_node(traj.psi(), tau)?;
    let t = traj.psi().grid().nodes()[idx];
    let x = &traj.x_at_nodes()?[idx];
    let y = traj.psi().value_right(idx);
    chord_value(problem, t, x, y, a, b, xi)
}

fn chord_value(
    problem: &Problem,
    t: f64,
    x: &[f64],
    y: &[f64],
    a: f64,
    b: f64,
    xi: &[f64],
) -> Result<f64, CheckError> {
    let y_plus: Vec<f64> = y.iter().zip(xi).map(|(yi, xj)| yi + xj).collect();
    let y_minus: Vec<f64> = y.iter().zip(xi).map(|(yi, xj)| yi - xj * a / b).collect();
    let l_plus = problem.effective_jet(t, x, &y_plus)?.value;
    let l_minus = problem.effective_jet(t, x, &y_minus)?.value;
    let l_base = problem.effective_jet(t, x, y)?.value;
    Ok(a * l_plus + b * l_minus - (a + b) * l_base)
}

/// Weierstrass excess `E(tau, x(tau), psi(tau), z)`. Negative certifies a
/// violation; errors if `L_y` does not exist at the base point.
pub fn weierstrass_gap(
    problem: &Problem,
    traj: &FracTrajectory,
    tau: f64,
    z: &[f64],
) -> Result<f64, CheckError> {
    problem.check_trajectory(traj)?;
    if z.len() != problem.dim() {
        return Err(CheckError::BadParams(format!(
            "z has dimension {}, problem has {}",
            z.len(),
            problem.dim()
        )));
    }
    let idx = locate_node(traj.psi(), tau)?;
    let t = traj.psi().grid().nodes()[idx];
    let x = &traj.x_at_nodes()?[idx];
    let y = traj.psi().value_right(idx);
    excess_value(problem, t, x, y, z)
}

fn excess_value(
    problem: &Problem,
    t: f64,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<f64, CheckError> {
    let base = problem.effective_jet(t, x, y)?;
    if !base.grad_y_is_smooth() {
        return Err(CheckError::NonSmoothBase { t });
    }
    let lz = problem.effective_jet(t, x, z)?.value;
    let lin: f64 = base
        .grad_y
        .iter()
        .zip(z.iter().zip(y))
        .map(|(g, (zi, yi))| g * (zi - yi))
        .sum();
    Ok(lz - base.value - lin)
}

/// Scans the excess (or, where `L_y` is flagged non-smooth, the chord
/// inequality) over every non-corner node and a tensor grid of offsets.
pub fn weierstrass_scan(
    problem: &Problem,
    traj: &FracTrajectory,
    mode: ScanMode,
    samples: &ScanSpec,
) -> Result<ConditionReport, CheckError> {
    problem.check_trajectory(traj)?;
    if samples.xi_half_points == 0 {
        return Err(CheckError::BadParams("xi_half_points must be >= 1".into()));
    }
    if let ScanMode::Weak { delta } = mode {
        if !(delta > 0.0) {
            return Err(CheckError::BadParams(format!(
                "weak-mode delta must be positive, got {delta}"
            )));
        }
    }
    let psi = traj.psi();
    let nodes = psi.grid().nodes();
    let dim = problem.dim();
    let xs = traj.x_at_nodes()?;

    let radius = match mode {
        ScanMode::Strong => 2.0 * (1.0 + psi.sup_norm()),
        ScanMode::Weak { delta } => 0.5 * delta,
    };
    let ratios: &[f64] = match mode {
        ScanMode::Strong => &STRONG_RATIOS,
        ScanMode::Weak { .. } => &WEAK_RATIOS,
    };

    let m = samples.xi_half_points as i64;
    let axis: Vec<f64> = (-m..=m).map(|k| radius * k as f64 / m as f64).collect();
    let offsets = tensor_grid(&axis, dim);

    let kept: Vec<usize> = (0..nodes.len())
        .filter(|&j| !psi.is_corner(j))
        .collect();

    // Each node is independent; evaluation order inside a node is fixed so
    // the collected results are deterministic under any parallelism.
    let per_node: Vec<Result<Vec<Witness>, CheckError>> = kept
        .par_iter()
        .map(|&j| {
            let t = nodes[j];
            let x = &xs[j];
            let y = psi.value_right(j);
            let base = problem.effective_jet(t, x, y)?;
            let mut hits = Vec::new();
            for xi in &offsets {
                if xi.iter().all(|&v| v == 0.0) {
                    continue;
                }
                if base.grad_y_is_smooth() {
                    let z: Vec<f64> = y.iter().zip(xi).map(|(a, b)| a + b).collect();
                    let e = excess_value(problem, t, x, y, &z)?;
                    if e < -samples.tol {
                        hits.push(Witness {
                            t,
                            params: WitnessParams::Excess { xi: xi.clone() },
                            value: e,
                        });
                    }
                } else {
                    for &r in ratios {
                        let v = chord_value(problem, t, x, y, r, 1.0, xi)?;
                        if v < -samples.tol {
                            hits.push(Witness {
                                t,
                                params: WitnessParams::AbXi {
                                    a: r,
                                    b: 1.0,
                                    xi: xi.clone(),
                                },
                                value: v,
                            });
                        }
                    }
                }
            }
            Ok(hits)
        })
        .collect();

    let mut all_hits = Vec::new();
    for r in per_node {
        all_hits.extend(r?);
    }
    all_hits.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.t.total_cmp(&b.t)));
    let worst = all_hits.first().map(|w| -w.value).unwrap_or(0.0);
    let verdict = if all_hits.is_empty() {
        Verdict::Satisfied
    } else {
        Verdict::Violated
    };
    let notes = vec![
        match mode {
            ScanMode::Strong => format!(
                "strong mode: scanned xi box [-{radius:.6}, {radius:.6}]^{dim} (radius 2 (1 + sup |psi|)); the condition itself quantifies over all of R^n"
            ),
            ScanMode::Weak { .. } => {
                format!("weak mode: scanned xi ball of radius delta/2 = {radius:.6}, chord ratios < 1")
            }
        },
        format!(
            "grid: {} nodes x {} offsets per axis",
            kept.len(),
            axis.len()
        ),
    ];
    all_hits.truncate(10);
    Ok(ConditionReport {
        condition: ConditionKind::Weierstrass,
        regime: problem.orders().regime(),
        verdict,
        residual_sup: worst,
        fitted_k: None,
        witnesses: all_hits,
        notes,
    })
}

fn tensor_grid(axis: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for stem in &out {
            for &v in axis {
                let mut s = stem.clone();
                s.push(v);
                next.push(s);
            }
        }
        out = next;
    }
    out
}
