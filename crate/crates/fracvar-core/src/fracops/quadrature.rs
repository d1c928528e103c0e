//! Kernel-exact product rules and fixed Gauss quadrature.
//!
//! The smooth factor of every singular integral in this crate is piecewise
//! linear on grid cells, so the singular kernels are integrated in closed
//! form per cell and only genuinely smooth regularized integrands ever see a
//! numeric rule.

use super::sample::PiecewiseSample;

/// 16-point Gauss-Legendre rule on [-1, 1].
pub(crate) const GAUSS16: [(f64, f64); 16] = [
    (-0.9894009349916499, 0.027152459411754037),
    (-0.9445750230732326, 0.062253523938647706),
    (-0.8656312023878318, 0.09515851168249259),
    (-0.755404408355003, 0.12462897125553403),
    (-0.6178762444026438, 0.14959598881657676),
    (-0.45801677765722737, 0.16915651939500262),
    (-0.2816035507792589, 0.1826034150449236),
    (-0.09501250983763745, 0.18945061045506859),
    (0.09501250983763745, 0.18945061045506859),
    (0.2816035507792589, 0.1826034150449236),
    (0.45801677765722737, 0.16915651939500262),
    (0.6178762444026438, 0.14959598881657676),
    (0.755404408355003, 0.12462897125553403),
    (0.8656312023878318, 0.09515851168249259),
    (0.9445750230732326, 0.062253523938647706),
    (0.9894009349916499, 0.027152459411754037),
];

pub(crate) fn gauss16(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GAUSS16 {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// `a^p - b^p` for `a >= b >= 0`, computed without catastrophic cancellation
/// when `a` and `b` are close.
pub(crate) fn pow_diff(a: f64, b: f64, p: f64) -> f64 {
    debug_assert!(a >= b && b >= 0.0);
    if b == 0.0 {
        return a.powf(p);
    }
    if a == b {
        return 0.0;
    }
    // a^p - b^p = b^p * expm1(p * log1p((a-b)/b))
    b.powf(p) * (p * ((a - b) / b).ln_1p()).exp_m1()
}

/// Weights `w_j` such that `sum_j w_j g_j = int_{t0}^{t1} (t1-t)^gamma g(t) dt`
/// exactly for piecewise-linear `g`; requires `gamma > -1`.
///
/// Returned per cell as `(left_node_weight, right_node_weight)` so callers can
/// respect corners when accumulating.
pub(crate) fn right_power_cell_weights(nodes: &[f64], t1: f64, gamma: f64) -> Vec<(f64, f64)> {
    let p0 = gamma + 1.0;
    let p1 = gamma + 2.0;
    nodes
        .windows(2)
        .map(|w| {
            let (c0, c1) = (w[0], w[1]);
            let h = c1 - c0;
            // s = t1 - t decreases across the cell: s in [s1, s2]
            let s1 = t1 - c1;
            let s2 = t1 - c0;
            let m0 = pow_diff(s2, s1, p0) / p0;
            let m1 = pow_diff(s2, s1, p1) / p1;
            // g(t) = gl + (gr-gl)*(t-c0)/h and t-c0 = s2-s
            let right = (s2 * m0 - m1) / h;
            (m0 - right, right)
        })
        .collect()
}

/// `int_{t0}^{t1} (t1-t)^gamma g(t) dt` for a piecewise-linear sample with
/// corners, one value per component.
pub(crate) fn weighted_pair(gamma: f64, g: &PiecewiseSample) -> Vec<f64> {
    let nodes = g.grid().nodes();
    let t1 = g.grid().interval().t1();
    let cw = right_power_cell_weights(nodes, t1, gamma);
    let mut acc = vec![0.0; g.dim()];
    for (i, (wl, wr)) in cw.iter().enumerate() {
        let (vl, vr) = g.cell_values(i);
        for c in 0..g.dim() {
            acc[c] += wl * vl[c] + wr * vr[c];
        }
    }
    acc
}

/// Per-node weights of the `(t1-t)^gamma` pairing for continuous samples,
/// used where the quadrature must be expressed as a linear functional.
pub(crate) fn right_power_node_weights(nodes: &[f64], t1: f64, gamma: f64) -> Vec<f64> {
    let cw = right_power_cell_weights(nodes, t1, gamma);
    let mut w = vec![0.0; nodes.len()];
    for (i, (wl, wr)) in cw.iter().enumerate() {
        w[i] += wl;
        w[i + 1] += wr;
    }
    w
}
