//! Compressed sparse rows and a banded LU factorization with partial
//! pivoting, enough for the step systems whose couplings stay within a few
//! grid nodes.

use crate::error::{Error, Result};

/// Pivots below this (after row equilibration) mark the matrix singular.
pub const PIVOT_TOL: f64 = 1e-13;

/// Largest accepted relative residual `‖Ax − b‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsrMatrix {
    pub size: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(size: usize) -> Self {
        Self { size, row_ptr: vec![0], cols: Vec::new(), vals: Vec::new() }
    }

    /// Appends a row given as `(column, value)` pairs; repeated columns are
    /// summed.
    pub fn push_row(&mut self, mut entries: Vec<(usize, f64)>) {
        entries.sort_by_key(|e| e.0);
        for (c, v) in entries {
            let start = *self.row_ptr.last().unwrap();
            if self.cols.len() > start && *self.cols.last().unwrap() == c {
                *self.vals.last_mut().unwrap() += v;
            } else {
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::new(size);
        for i in 0..size {
            m.push_row(vec![(i, 1.0)]);
        }
        m
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().cloned().zip(self.vals[r].iter().cloned())
    }

    pub fn rows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows()).map(|i| self.row(i).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows())
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for i in 0..self.rows() {
            for (c, _) in self.row(i) {
                if c < i {
                    kl = kl.max(i - c);
                } else {
                    ku = ku.max(c - i);
                }
            }
        }
        (kl, ku)
    }
}

/// LU factors of a row-equilibrated banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    // row r holds columns r - kl .. r - kl + width
    data: Vec<f64>,
    // multipliers of elimination step i for rows i+1 ..= i+kl
    lower: Vec<f64>,
    pivots: Vec<usize>,
    row_scale: Vec<f64>,
    matrix: CsrMatrix,
}

impl BandedLu {
    fn at(&self, r: usize, c: usize) -> f64 {
        if c + self.kl < r || c + self.kl >= r + self.width {
            return 0.0;
        }
        self.data[r * self.width + c + self.kl - r]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        debug_assert!(c + self.kl >= r && c + self.kl < r + self.width);
        &mut self.data[r * self.width + c + self.kl - r]
    }

    fn swap_rows(&mut self, a: usize, b: usize, from_col: usize) {
        let hi = (a.min(b) + self.width - self.kl).min(self.n);
        for c in from_col..hi {
            let va = self.at(a, c);
            let vb = self.at(b, c);
            if va != 0.0 || vb != 0.0 {
                *self.at_mut(a, c) = vb;
                *self.at_mut(b, c) = va;
            }
        }
    }

    pub fn factor(matrix: &CsrMatrix) -> Result<Self> {
        let n = matrix.size;
        if matrix.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows for size {n}",
                matrix.rows()
            )));
        }
        let (kl, ku) = matrix.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut row_scale = vec![1.0; n];
        let mut lu = Self {
            n,
            kl,
            width,
            data: vec![0.0; n * width],
            lower: vec![0.0; n * kl],
            pivots: (0..n).collect(),
            row_scale: Vec::new(),
            matrix: matrix.clone(),
        };
        for (i, scale) in row_scale.iter_mut().enumerate() {
            let max = matrix.row(i).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            if max == 0.0 {
                return Err(Error::SingularMatrix { row: i, pivot: 0.0 });
            }
            *scale = 1.0 / max;
            for (c, v) in matrix.row(i) {
                *lu.at_mut(i, c) += v / max;
            }
        }
        lu.row_scale = row_scale;
        for i in 0..n {
            let last = (i + kl).min(n - 1);
            let mut p = i;
            let mut best = lu.at(i, i).abs();
            for r in i + 1..=last {
                let v = lu.at(r, i).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < PIVOT_TOL {
                return Err(Error::SingularMatrix { row: i, pivot: best });
            }
            if p != i {
                lu.swap_rows(i, p, i);
                lu.pivots[i] = p;
            }
            let pivot = lu.at(i, i);
            let col_end = (i + kl + ku + 1).min(n);
            for r in i + 1..=last {
                let f = lu.at(r, i) / pivot;
                *lu.at_mut(r, i) = 0.0;
                lu.lower[i * kl + (r - i - 1)] = f;
                if f == 0.0 {
                    continue;
                }
                for c in i + 1..col_end {
                    let u = lu.at(i, c);
                    if u != 0.0 {
                        *lu.at_mut(r, c) -= f * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    /// Solves `A x = rhs` and verifies the relative residual.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs length {} for size {n}", rhs.len())));
        }
        let scaled: Vec<f64> = rhs.iter().zip(&self.row_scale).map(|(b, s)| b * s).collect();
        let mut y = scaled;
        for i in 0..n {
            y.swap(i, self.pivots[i]);
            let yi = y[i];
            for r in i + 1..=(i + self.kl).min(n - 1) {
                y[r] -= self.lower[i * self.kl + (r - i - 1)] * yi;
            }
        }
        for i in (0..n).rev() {
            let hi = (i + self.width - self.kl).min(n);
            let mut acc = y[i];
            for c in i + 1..hi {
                acc -= self.at(i, c) * y[c];
            }
            y[i] = acc / self.at(i, i);
        }
        let ax = self.matrix.mul_vec(&y);
        let mut res = 0.0f64;
        let mut bnorm = 0.0f64;
        for i in 0..n {
            res = res.max((ax[i] - rhs[i]).abs() * self.row_scale[i]);
            bnorm = bnorm.max(rhs[i].abs() * self.row_scale[i]);
        }
        let xnorm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let anorm = (0..n)
            .map(|i| self.matrix.row(i).map(|(_, v)| v.abs()).sum::<f64>() * self.row_scale[i])
            .fold(0.0, f64::max);
        let denom = anorm * xnorm + bnorm;
        let rel = if denom > 0.0 { res / denom } else { res };
        if !rel.is_finite() || rel > RESIDUAL_TOL {
            return Err(Error::IllConditioned { residual: rel });
        }
        Ok(y)
    }
}
