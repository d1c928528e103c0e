//! Problem statement: functional, boundary values, optional isoperimetric
//! constraints.

use thiserror::Error;

use crate::dsl::{eval_jet, EvalError, JetValue, LagrangianExpr};
use crate::fracops::{
    norm, quadrature::weighted_pair, FracTrajectory, Interval, Orders, OpsError, PiecewiseSample,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error("lagrangian evaluation failed at node t = {t}: {source}")]
    LagrangianEval {
        t: f64,
        #[source]
        source: EvalError,
    },
    #[error("boundary vector has dimension {got}, expected {expected}")]
    BoundaryDimension { expected: usize, got: usize },
    #[error("lagrangian dimension {got} does not match problem dimension {expected}")]
    LagrangianDimension { expected: usize, got: usize },
    #[error("multiplier vector has {got} entries for {expected} constraints")]
    MultiplierCount { expected: usize, got: usize },
    #[error("multipliers must not all be zero")]
    ZeroMultipliers,
    #[error("trajectory has dimension {got}, problem has {expected}")]
    TrajectoryDimension { expected: usize, got: usize },
    #[error("trajectory grid spans a different interval than the problem")]
    IntervalMismatch,
}

/// One isoperimetric constraint `J_i(x) = l_i`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub lagrangian: LagrangianExpr,
    pub target: f64,
}

/// A fractional variational problem.
#[derive(Debug, Clone)]
pub struct Problem {
    orders: Orders,
    interval: Interval,
    n: usize,
    lagrangian: LagrangianExpr,
    x0: Vec<f64>,
    x1: Vec<f64>,
    constraints: Vec<Constraint>,
    multipliers: Option<(f64, Vec<f64>)>,
}

impl Problem {
    pub fn new(
        orders: Orders,
        interval: Interval,
        lagrangian: LagrangianExpr,
        x0: Vec<f64>,
        x1: Vec<f64>,
    ) -> Result<Self, ProblemError> {
        let n = lagrangian.dim();
        if x0.len() != n {
            return Err(ProblemError::BoundaryDimension {
                expected: n,
                got: x0.len(),
            });
        }
        if x1.len() != n {
            return Err(ProblemError::BoundaryDimension {
                expected: n,
                got: x1.len(),
            });
        }
        Ok(Problem {
            orders,
            interval,
            n,
            lagrangian,
            x0,
            x1,
            constraints: Vec::new(),
            multipliers: None,
        })
    }

    pub fn with_constraint(mut self, c: Constraint) -> Result<Self, ProblemError> {
        if c.lagrangian.dim() != self.n {
            return Err(ProblemError::LagrangianDimension {
                expected: self.n,
                got: c.lagrangian.dim(),
            });
        }
        self.constraints.push(c);
        Ok(self)
    }

    pub fn with_multipliers(mut self, mu0: f64, mu: Vec<f64>) -> Result<Self, ProblemError> {
        if mu.len() != self.constraints.len() {
            return Err(ProblemError::MultiplierCount {
                expected: self.constraints.len(),
                got: mu.len(),
            });
        }
        if mu0 == 0.0 && mu.iter().all(|&m| m == 0.0) {
            return Err(ProblemError::ZeroMultipliers);
        }
        self.multipliers = Some((mu0, mu));
        Ok(self)
    }

    pub fn orders(&self) -> &Orders {
        &self.orders
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lagrangian(&self) -> &LagrangianExpr {
        &self.lagrangian
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn multipliers(&self) -> Option<&(f64, Vec<f64>)> {
        self.multipliers.as_ref()
    }

    /// Checks a trajectory is usable with this problem (dimension, interval).
    pub fn check_trajectory(&self, traj: &FracTrajectory) -> Result<(), ProblemError> {
        if traj.dim() != self.n {
            return Err(ProblemError::TrajectoryDimension {
                expected: self.n,
                got: traj.dim(),
            });
        }
        let iv = traj.psi().grid().interval();
        if iv != self.interval {
            return Err(ProblemError::IntervalMismatch);
        }
        Ok(())
    }

    /// Whether a trajectory satisfies the boundary conditions: exact at `t0`
    /// by construction, within `tol` at `t1`.
    pub fn is_admissible(&self, traj: &FracTrajectory, tol: f64) -> Result<bool, ProblemError> {
        self.check_trajectory(traj)?;
        if traj.x0() != self.x0 {
            return Ok(false);
        }
        let xe = traj.x_end()?;
        let d: Vec<f64> = xe.iter().zip(&self.x1).map(|(a, b)| a - b).collect();
        Ok(norm(&d) <= tol)
    }

    /// Jet of the base Lagrangian `L0`.
    pub fn jet(&self, t: f64, x: &[f64], y: &[f64]) -> Result<JetValue, ProblemError> {
        eval_jet(&self.lagrangian, t, x, y)
            .map_err(|source| ProblemError::LagrangianEval { t, source })
    }

    /// Jet of the effective Lagrangian: `mu0 L0 + sum_i mu_i L_i` when
    /// multipliers are set, plain `L0` otherwise.
    pub fn effective_jet(&self, t: f64, x: &[f64], y: &[f64]) -> Result<JetValue, ProblemError> {
        let base = self.jet(t, x, y)?;
        let Some((mu0, mu)) = &self.multipliers else {
            return Ok(base);
        };
        let mut acc = base.scaled_add(*mu0, None);
        for (c, &m) in self.constraints.iter().zip(mu) {
            let jc = eval_jet(&c.lagrangian, t, x, y)
                .map_err(|source| ProblemError::LagrangianEval { t, source })?;
            acc = jc.scaled_add(m, Some(&acc));
        }
        Ok(acc)
    }

    /// `J(x) = int (t1-t)^(beta-1) L(t, x, cD^alpha x) dt` for the base
    /// Lagrangian.
    pub fn functional(&self, traj: &FracTrajectory) -> Result<f64, ProblemError> {
        self.functional_of(&self.lagrangian, traj)
    }

    /// The i-th constraint functional `J_i`.
    pub fn constraint_functional(
        &self,
        i: usize,
        traj: &FracTrajectory,
    ) -> Result<f64, ProblemError> {
        self.functional_of(&self.constraints[i].lagrangian, traj)
    }

    fn functional_of(
        &self,
        lag: &LagrangianExpr,
        traj: &FracTrajectory,
    ) -> Result<f64, ProblemError> {
        self.check_trajectory(traj)?;
        let g = self.integrand_sample(lag, traj)?;
        Ok(weighted_pair(self.orders.beta() - 1.0, &g)[0])
    }

    /// Samples `g(t) = L(t, x(t), psi(t))` on the trajectory's grid,
    /// preserving corners of `psi` as corners of `g`.
    fn integrand_sample(
        &self,
        lag: &LagrangianExpr,
        traj: &FracTrajectory,
    ) -> Result<PiecewiseSample, ProblemError> {
        let psi = traj.psi();
        let nodes = psi.grid().nodes();
        let xs = traj.x_at_nodes()?;
        let mut values = Vec::with_capacity(nodes.len());
        for (j, &t) in nodes.iter().enumerate() {
            let jet = eval_jet(lag, t, &xs[j], psi.value_right(j))
                .map_err(|source| ProblemError::LagrangianEval { t, source })?;
            values.push(vec![jet.value]);
        }
        let mut corners = Vec::new();
        for (idx, left_psi) in psi.corners() {
            let t = nodes[*idx];
            let jet = eval_jet(lag, t, &xs[*idx], left_psi)
                .map_err(|source| ProblemError::LagrangianEval { t, source })?;
            corners.push((*idx, vec![jet.value]));
        }
        Ok(PiecewiseSample::new(psi.grid().clone(), values, corners)?)
    }
}

/// The beta-weighted functional of the problem's base Lagrangian. The
/// integrand is sampled at nodes, interpolated linearly, and the
/// `(t1-t)^(beta-1)` weight is integrated exactly per cell, so the endpoint
/// singularity for `beta < 1` never gets sampled.
pub fn weighted_functional(problem: &Problem, traj: &FracTrajectory) -> Result<f64, ProblemError> {
    problem.functional(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lagrangian;
    use crate::fracops::{Grid, PiecewiseSample};
    use crate::special::gamma;
    use approx::assert_relative_eq;

    fn simple_problem(l: &str, a: f64, b: f64) -> Problem {
        Problem::new(
            Orders::new(a, b).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
            parse_lagrangian(l, 1).unwrap(),
            vec![0.0],
            vec![1.0],
        )
        .unwrap()
    }

    fn const_psi_traj(p: &Problem, n_cells: usize, value: f64) -> FracTrajectory {
        let g = Grid::graded(p.interval(), n_cells, p.orders()).unwrap();
        let psi = PiecewiseSample::constant(g, vec![value]).unwrap();
        FracTrajectory::new(vec![0.0], psi, p.orders().alpha()).unwrap()
    }

    #[test]
    fn classical_energy() {
        let p = simple_problem("y^2", 1.0, 1.0);
        let traj = const_psi_traj(&p, 16, 1.0);
        assert_relative_eq!(weighted_functional(&p, &traj).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn cubic_with_singular_weight() {
        // L = y^3, psi = Gamma(1.5), alpha = beta = 0.5:
        // J = Gamma(1.5)^3 * int (1-t)^(-1/2) dt = 2 Gamma(1.5)^3
        let p = simple_problem("y^3", 0.5, 0.5);
        let traj = const_psi_traj(&p, 32, gamma(1.5));
        let want = 2.0 * gamma(1.5).powi(3);
        assert_relative_eq!(weighted_functional(&p, &traj).unwrap(), want, max_relative = 1e-13);
        assert_relative_eq!(want, 1.3920819992079270, max_relative = 1e-12);
    }

    #[test]
    fn zero_psi_zero_energy() {
        let p = simple_problem("y^2", 0.7, 0.9);
        let traj = const_psi_traj(&p, 16, 0.0);
        assert_eq!(weighted_functional(&p, &traj).unwrap(), 0.0);
    }

    #[test]
    fn eval_failure_reports_node() {
        let p = simple_problem("ln(y)", 0.5, 1.0);
        let traj = const_psi_traj(&p, 16, -1.0);
        let err = weighted_functional(&p, &traj).unwrap_err();
        match err {
            ProblemError::LagrangianEval { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn admissibility_endpoint_tolerance() {
        let p = simple_problem("y^2", 0.5, 0.5);
        // psi = Gamma(1.5) gives x(t) = sqrt(t), x(1) = 1: admissible
        let good = const_psi_traj(&p, 32, gamma(1.5));
        assert!(p.is_admissible(&good, 1e-10).unwrap());
        let bad = const_psi_traj(&p, 32, 2.0 * gamma(1.5));
        assert!(!p.is_admissible(&bad, 1e-3).unwrap());
    }

    #[test]
    fn effective_jet_combines_multipliers() {
        let p = simple_problem("y^2", 1.0, 1.0)
            .with_constraint(Constraint {
                lagrangian: parse_lagrangian("x", 1).unwrap(),
                target: 0.0,
            })
            .unwrap()
            .with_multipliers(0.5, vec![6.0])
            .unwrap();
        let j = p.effective_jet(0.0, &[2.0], &[3.0]).unwrap();
        assert_relative_eq!(j.value, 0.5 * 9.0 + 6.0 * 2.0);
        assert_relative_eq!(j.grad_y[0], 3.0);
        assert_relative_eq!(j.grad_x[0], 6.0);
        assert!(Problem::with_multipliers(
            simple_problem("y^2", 1.0, 1.0)
                .with_constraint(Constraint {
                    lagrangian: parse_lagrangian("x", 1).unwrap(),
                    target: 0.0
                })
                .unwrap(),
            0.0,
            vec![0.0]
        )
        .is_err());
    }
}
