//! Necessary-condition checks along candidate trajectories.
//!
//! Every check returns a [`ConditionReport`]: a verdict, the worst residual,
//! and enough witnesses to reproduce any violation by hand. Verdicts certify
//! necessary conditions only; a satisfied report is never a proof of
//! minimality.

mod corners;
mod euler_lagrange;
mod legendre;
mod weierstrass;

pub use corners::corner_conditions;
pub use euler_lagrange::{el_residual, isoperimetric_el_residual};
pub use legendre::legendre_check;
pub use weierstrass::{abxi_inequality, weierstrass_gap, weierstrass_scan, ScanMode, ScanSpec};

use serde::Serialize;
use thiserror::Error;

use crate::fracops::{OpsError, Regime};
use crate::problem::ProblemError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CheckError {
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("tau = {t} is not a grid node (nearest node {nearest} at distance {dist})")]
    NotANode { t: f64, nearest: f64, dist: f64 },
    #[error("tau = {t} is a corner node; the check needs a continuity point")]
    CornerTau { t: f64 },
    #[error("L_y does not exist at the base point t = {t}; use the chord inequality (ab-xi) instead")]
    NonSmoothBase { t: f64 },
    #[error("invalid check parameter: {0}")]
    BadParams(String),
    #[error("isoperimetric check requires constraints and multipliers")]
    MissingMultipliers,
}

/// Which check produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    EulerLagrange,
    IsoperimetricEulerLagrange,
    Weierstrass,
    AbXi,
    Legendre,
    Corners,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

/// Where and how a residual or gap was observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessParams {
    Node,
    AbXi { a: f64, b: f64, xi: Vec<f64> },
    Excess { xi: Vec<f64> },
    Direction { mu: Vec<f64> },
    Corner { delta1: f64, delta2: f64 },
    NonSmooth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    #[serde(flatten)]
    pub params: WitnessParams,
    pub value: f64,
}

/// Outcome of one necessary-condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    pub regime: Regime,
    pub verdict: Verdict,
    pub residual_sup: f64,
    /// Present exactly when the sub-regime Euler-Lagrange form applies.
    pub fitted_k: Option<Vec<f64>>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn is_satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }
}

/// Cell-length weights for node-wise least squares: half the widths of the
/// adjacent cells.
pub(crate) fn node_cell_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = nodes[i + 1] - nodes[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Locates `tau` as a grid node, rejecting corners.
pub(crate) fn locate_node(
    psi: &crate::fracops::PiecewiseSample,
    tau: f64,
) -> Result<usize, CheckError> {
    let (idx, dist) = psi.grid().snap_to_node(tau);
    let tol = 1e-9 * psi.grid().interval().len().max(1.0);
    if dist > tol {
        return Err(CheckError::NotANode {
            t: tau,
            nearest: psi.grid().nodes()[idx],
            dist,
        });
    }
    if psi.is_corner(idx) {
        return Err(CheckError::CornerTau { t: tau });
    }
    Ok(idx)
}
