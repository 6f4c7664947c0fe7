//! Local cubic (4-point Lagrange) interpolation of grid functions sampled at
//! `x_k = k/N`.

/// Nodes and weights of the cubic through the four grid points around `x`,
/// together with the weights of its derivative.
#[derive(Debug, Clone, Copy)]
pub struct CubicWeights {
    pub start: usize,
    pub value: [f64; 4],
    pub slope: [f64; 4],
}

/// Weights at `x ∈ [0,1]` on a grid with `intervals` intervals. The stencil
/// is the one attached to the interval containing `x`, shifted inward at the
/// ends, so the interpolant is continuous and piecewise cubic.
pub fn cubic_weights(intervals: usize, x: f64) -> CubicWeights {
    assert!(intervals >= 3);
    let n = intervals as f64;
    let u = (x * n).clamp(0.0, n);
    let j = (u.floor() as usize).min(intervals - 1);
    let start = j.saturating_sub(1).min(intervals - 3);
    let t = u - start as f64;
    let nodes = [0.0, 1.0, 2.0, 3.0];
    let mut value = [0.0; 4];
    let mut slope = [0.0; 4];
    for i in 0..4 {
        let mut denom = 1.0;
        let mut prod = 1.0;
        for m in 0..4 {
            if m != i {
                denom *= nodes[i] - nodes[m];
                prod *= t - nodes[m];
            }
        }
        value[i] = prod / denom;
        let mut d = 0.0;
        for l in 0..4 {
            if l == i {
                continue;
            }
            let mut p = 1.0;
            for m in 0..4 {
                if m != i && m != l {
                    p *= t - nodes[m];
                }
            }
            d += p;
        }
        slope[i] = d / denom * n;
    }
    CubicWeights { start, value, slope }
}

/// Interpolated value of a node-major vector grid function.
pub fn eval(values: &[f64], dim: usize, x: f64) -> Vec<f64> {
    let w = cubic_weights(values.len() / dim - 1, x);
    combine(values, dim, w.start, &w.value)
}

/// Derivative in `x` of the interpolant.
pub fn eval_slope(values: &[f64], dim: usize, x: f64) -> Vec<f64> {
    let w = cubic_weights(values.len() / dim - 1, x);
    combine(values, dim, w.start, &w.slope)
}

pub fn eval_scalar(values: &[f64], x: f64) -> f64 {
    eval(values, 1, x)[0]
}

fn combine(values: &[f64], dim: usize, start: usize, w: &[f64; 4]) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (i, wi) in w.iter().enumerate() {
        let p = &values[(start + i) * dim..(start + i + 1) * dim];
        for c in 0..dim {
            out[c] += wi * p[c];
        }
    }
    out
}

/// Solves `σ(x) = target` for the interpolant `σ` of nondecreasing node
/// values, restricted to the bracketing interval `[x_k, x_{k+1}]`. Uses
/// Newton steps safeguarded by bisection.
pub fn invert_monotone(values: &[f64], target: f64) -> f64 {
    let intervals = values.len() - 1;
    let n = intervals as f64;
    if target <= values[0] {
        return 0.0;
    }
    if target >= values[intervals] {
        return 1.0;
    }
    let k = values.partition_point(|v| *v <= target).saturating_sub(1).min(intervals - 1);
    let (mut lo, mut hi) = (k as f64 / n, (k + 1) as f64 / n);
    let span = values[k + 1] - values[k];
    let mut x = if span > 0.0 {
        lo + (target - values[k]) / span * (hi - lo)
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..100 {
        let w = cubic_weights(intervals, x);
        let f: f64 = (0..4).map(|i| w.value[i] * values[w.start + i]).sum::<f64>() - target;
        let df: f64 = (0..4).map(|i| w.slope[i] * values[w.start + i]).sum();
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = if df > 0.0 { x - f / df } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) || hi - lo <= 1e-16 {
            return next;
        }
        x = next;
    }
    x
}
