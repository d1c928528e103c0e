//! Time grids and fractional orders.
//!
//! Grids are two-sided graded meshes: node spacing follows a power law toward
//! both interval endpoints so that the `t^alpha` layer at the left end and the
//! `(t1-t)^(beta-1)` weight at the right end are both resolved.

use serde::Serialize;

use super::OpsError;

/// Differentiation order `alpha` and weight order `beta` of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Orders {
    alpha: f64,
    beta: f64,
}

/// The two branches of the Euler-Lagrange dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `beta > alpha`
    Super,
    /// `beta <= alpha`
    Sub,
}

impl Orders {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, OpsError> {
        if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
            return Err(OpsError::InvalidAlpha(alpha));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(OpsError::InvalidBeta(beta));
        }
        Ok(Orders { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Ties go to `Sub`, matching the case split `0 < beta <= alpha <= 1`.
    pub fn regime(&self) -> Regime {
        if self.beta > self.alpha {
            Regime::Super
        } else {
            Regime::Sub
        }
    }

    /// Grading exponent that compensates both boundary layers.
    pub fn grading_exponent(&self) -> f64 {
        (2.0 / self.alpha.min(self.beta).min(1.0)).min(4.0)
    }
}

/// A fixed finite segment `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    t0: f64,
    t1: f64,
}

impl Interval {
    pub fn new(t0: f64, t1: f64) -> Result<Self, OpsError> {
        if !t0.is_finite() || !t1.is_finite() || t0 >= t1 {
            return Err(OpsError::InvalidInterval { t0, t1 });
        }
        Ok(Interval { t0, t1 })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.t1
    }
}

/// Strictly increasing node set on an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    interval: Interval,
    nodes: Vec<f64>,
    grading_exponent: f64,
}

impl Grid {
    /// Two-sided graded mesh with the exponent taken from `orders`.
    ///
    /// Left-half nodes follow `t0 + (len/2) * (j / (n/2))^r`; the right half
    /// mirrors them, so `t0`, the midpoint, and `t1` are hit exactly.
    pub fn graded(interval: Interval, n_cells: usize, orders: &Orders) -> Result<Self, OpsError> {
        Self::graded_with_exponent(interval, n_cells, orders.grading_exponent())
    }

    /// Same mesh construction with an explicit grading exponent.
    pub fn graded_with_exponent(
        interval: Interval,
        n_cells: usize,
        r: f64,
    ) -> Result<Self, OpsError> {
        if n_cells < 8 || n_cells % 2 != 0 {
            return Err(OpsError::BadCellCount(n_cells));
        }
        if !(r >= 1.0) || !r.is_finite() {
            return Err(OpsError::BadGradingExponent(r));
        }
        let half = n_cells / 2;
        let scale = interval.len() / 2.0;
        let mut nodes = Vec::with_capacity(n_cells + 1);
        for j in 0..=half {
            nodes.push(interval.t0() + scale * (j as f64 / half as f64).powf(r));
        }
        for j in (0..half).rev() {
            nodes.push(interval.t1() - scale * (j as f64 / half as f64).powf(r));
        }
        // Pin the midpoint and endpoints against rounding in powf.
        nodes[half] = interval.t0() + scale;
        nodes[n_cells] = interval.t1();
        Ok(Grid {
            interval,
            nodes,
            grading_exponent: r,
        })
    }

    /// Builds a grid from explicit nodes (must be strictly increasing and
    /// span the interval exactly).
    pub fn from_nodes(interval: Interval, nodes: Vec<f64>) -> Result<Self, OpsError> {
        if nodes.len() < 9 {
            return Err(OpsError::BadCellCount(nodes.len().saturating_sub(1)));
        }
        if nodes[0] != interval.t0() || *nodes.last().unwrap() != interval.t1() {
            return Err(OpsError::NodesDontSpanInterval);
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(OpsError::NodesNotIncreasing);
        }
        Ok(Grid {
            interval,
            nodes,
            grading_exponent: 1.0,
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn grading_exponent(&self) -> f64 {
        self.grading_exponent
    }

    /// Width of the widest cell.
    pub fn max_cell_width(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the node nearest to `t` and the snap distance.
    pub fn snap_to_node(&self, t: f64) -> (usize, f64) {
        let mut best = 0;
        let mut dist = (self.nodes[0] - t).abs();
        // nodes are sorted; binary search for the insertion point
        let idx = self
            .nodes
            .partition_point(|&x| x < t)
            .min(self.nodes.len() - 1);
        for j in idx.saturating_sub(1)..=idx {
            let d = (self.nodes[j] - t).abs();
            if d < dist {
                best = j;
                dist = d;
            }
        }
        (best, dist)
    }

    /// Returns a refined grid containing the given points as exact nodes,
    /// together with the node index of each requested point.
    ///
    /// Points closer than a relative snap tolerance to an existing node reuse
    /// that node instead of creating a sliver cell.
    pub fn insert_points(&self, points: &[f64]) -> Result<(Grid, Vec<usize>), OpsError> {
        let tol = 1e-12 * self.interval.len();
        let mut nodes = self.nodes.clone();
        for &p in points {
            if !self.interval.contains(p) {
                return Err(OpsError::PointOutsideInterval {
                    t: p,
                    t0: self.interval.t0(),
                    t1: self.interval.t1(),
                });
            }
            let pos = nodes.partition_point(|&x| x < p);
            let near_existing = (pos < nodes.len() && (nodes[pos] - p).abs() <= tol)
                || (pos > 0 && (nodes[pos - 1] - p).abs() <= tol);
            if !near_existing {
                nodes.insert(pos, p);
            }
        }
        let grid = Grid {
            interval: self.interval,
            nodes,
            grading_exponent: self.grading_exponent,
        };
        let indices = points
            .iter()
            .map(|&p| grid.snap_to_node(p).0)
            .collect::<Vec<_>>();
        Ok((grid, indices))
    }
}
