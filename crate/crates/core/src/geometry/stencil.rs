//! Second-order finite-difference stencils on the uniform grid `x_k = k/N`.
//!
//! Interior nodes use centered stencils (3 points for ∂ₓ, ∂ₓ², 5 points for
//! ∂ₓ³, ∂ₓ⁴). Nodes too close to an end use one-sided or shifted stencils
//! with `m + 2` points, which keeps second order for the `m`-th derivative.
//! The exception is `∂ₓ²` at an end, which takes 5 points: the 4-point
//! formula carries an error term large enough to spoil grid-refinement
//! studies of the clamped condition `∂ₓ²f = 0` below `N ≈ 256`.
//!
//! Weights are stored as integers over a common denominator and applied in
//! that order, so data lying exactly on a line with dyadic coordinates
//! differentiates to exact zeros.

/// Weights for unit spacing together with the first node they apply to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub start: usize,
    len: usize,
    weights: [f64; 6],
    numerators: [f64; 6],
    denominator: f64,
}

impl Stencil {
    pub fn weights(&self) -> &[f64] {
        &self.weights[..self.len]
    }

    /// Integer weights; `weights = numerators / denominator`.
    pub fn numerators(&self) -> &[f64] {
        &self.numerators[..self.len]
    }

    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }

    /// Sum of absolute weights (unit spacing).
    pub fn abs_sum(&self) -> f64 {
        self.weights().iter().map(|w| w.abs()).sum()
    }
}

type Table = (&'static [f64], f64);

const CENTERED: [Table; 4] = [
    (&[-1.0, 0.0, 1.0], 2.0),
    (&[1.0, -2.0, 1.0], 1.0),
    (&[-1.0, 2.0, 0.0, -2.0, 1.0], 2.0),
    (&[1.0, -4.0, 6.0, -4.0, 1.0], 1.0),
];

// Left-end stencils indexed by [order - 1][node]; every one starts at node 0.
const LEFT: [[Option<Table>; 2]; 4] = [
    [Some((&[-3.0, 4.0, -1.0], 2.0)), None],
    [Some((&[35.0, -104.0, 114.0, -56.0, 11.0], 12.0)), None],
    [
        Some((&[-5.0, 18.0, -24.0, 14.0, -3.0], 2.0)),
        Some((&[-3.0, 10.0, -12.0, 6.0, -1.0], 2.0)),
    ],
    [
        Some((&[3.0, -14.0, 26.0, -24.0, 11.0, -2.0], 1.0)),
        Some((&[2.0, -9.0, 16.0, -14.0, 6.0, -1.0], 1.0)),
    ],
];

/// Smallest interval count the stencils support.
pub const MIN_INTERVALS: usize = 8;

fn half_width(order: usize) -> usize {
    if order <= 2 {
        1
    } else {
        2
    }
}

fn from_table(start: usize, (w, denominator): Table, reverse: bool, sign: f64) -> Stencil {
    let mut weights = [0.0; 6];
    let mut numerators = [0.0; 6];
    for (i, &v) in w.iter().enumerate() {
        let idx = if reverse { w.len() - 1 - i } else { i };
        numerators[idx] = sign * v;
        weights[idx] = sign * v / denominator;
    }
    Stencil {
        start,
        len: w.len(),
        weights,
        numerators,
        denominator,
    }
}

/// Stencil for the `order`-th derivative (1..=4) at `node` on a grid with
/// `intervals` intervals. Weights are for unit spacing; multiply the result
/// by `intervals^order`.
pub fn stencil(order: usize, node: usize, intervals: usize) -> Stencil {
    assert!((1..=4).contains(&order), "derivative order {order} unsupported");
    assert!(intervals >= MIN_INTERVALS && node <= intervals);
    let r = half_width(order);
    if node >= r && node + r <= intervals {
        return from_table(node - r, CENTERED[order - 1], false, 1.0);
    }
    if node < r {
        let w = LEFT[order - 1][node].expect("left stencil table");
        return from_table(0, w, false, 1.0);
    }
    // mirror of the left table
    let j = intervals - node;
    let w = LEFT[order - 1][j].expect("left stencil table");
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    from_table(intervals + 1 - w.0.len(), w, true, sign)
}

/// Applies the `order`-th derivative stencil at `node` to flat coordinates
/// with `dim` components per node, writing into `out`.
pub fn apply_into(coords: &[f64], dim: usize, order: usize, node: usize, out: &mut [f64]) {
    let intervals = coords.len() / dim - 1;
    let st = stencil(order, node, intervals);
    let scale = (intervals as f64).powi(order as i32) / st.denominator();
    out.iter_mut().for_each(|o| *o = 0.0);
    for (w, k) in st.numerators().iter().zip(st.nodes()) {
        if *w == 0.0 {
            continue;
        }
        let p = &coords[k * dim..(k + 1) * dim];
        for c in 0..dim {
            out[c] += w * p[c];
        }
    }
    for o in out.iter_mut() {
        *o *= scale;
    }
}

pub fn apply(coords: &[f64], dim: usize, order: usize, node: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    apply_into(coords, dim, order, node, &mut out);
    out
}

/// Rounding-noise floor of a stencil evaluation on data of magnitude
/// `scale`: a few ulps of every sample, amplified by the weights.
pub fn noise_floor(order: usize, node: usize, intervals: usize, scale: f64) -> f64 {
    let st = stencil(order, node, intervals);
    8.0 * f64::EPSILON * scale.max(1.0) * st.abs_sum() * (intervals as f64).powi(order as i32)
}
