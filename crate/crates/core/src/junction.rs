//! Algebra at the movable junction `x = 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, DerivativeBundle, NodeJet};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Unit tangents `Tᵢ = ∂ₛfᵢ(0)` and `Aᵢ = ∇ₛ²κ⃗ᵢ(0)` of the curves meeting at
/// the junction.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionFrame {
    pub tangents: Vec<Vec<f64>>,
    pub a_vectors: Vec<Vec<f64>>,
}

impl JunctionFrame {
    pub fn new(tangents: Vec<Vec<f64>>, a_vectors: Vec<Vec<f64>>) -> Result<Self> {
        if tangents.len() != a_vectors.len() || tangents.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} tangents but {} junction vectors",
                tangents.len(),
                a_vectors.len()
            )));
        }
        let n = tangents[0].len();
        for (i, (t, a)) in tangents.iter().zip(&a_vectors).enumerate() {
            if t.len() != n || a.len() != n {
                return Err(Error::DimensionMismatch(format!("curve {i} has wrong dimension")));
            }
            if (norm(t) - 1.0).abs() > 1e-10 {
                return Err(Error::Domain(format!("tangent {i} is not a unit vector")));
            }
        }
        Ok(Self { tangents, a_vectors })
    }

    /// Frame read off node 0 of each curve's derivatives.
    pub fn from_bundles(bundles: &[DerivativeBundle]) -> Result<Self> {
        let tangents = bundles.iter().map(|b| b.jet(0).tangent()).collect();
        let a_vectors = bundles.iter().map(|b| b.jet(0).nabla_s2_kappa()).collect();
        Self::new(tangents, a_vectors)
    }

    pub fn q(&self) -> usize {
        self.tangents.len()
    }

    pub fn dim(&self) -> usize {
        self.tangents[0].len()
    }
}

/// `1 − ∏_{i<j} |⟨Tᵢ, Tⱼ⟩|`.
pub fn nc_value(tangents: &[Vec<f64>]) -> f64 {
    let mut prod = 1.0;
    for i in 0..tangents.len() {
        for j in i + 1..tangents.len() {
            prod *= dot(&tangents[i], &tangents[j]).abs();
        }
    }
    (1.0 - prod).clamp(0.0, 1.0)
}

fn column_matrix(vectors: &[Vec<f64>]) -> DMatrix<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    DMatrix::from_fn(n, vectors.len(), |r, c| vectors[c][r])
}

/// Dimension of the span of `tangents`: singular values above `tol` times
/// the largest one.
pub fn span_dimension(tangents: &[Vec<f64>], tol: f64) -> usize {
    if tangents.is_empty() {
        return 0;
    }
    let sv = column_matrix(tangents).singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max).count()
}

/// `Q` with diagonal `q − 1` and off-diagonal entries `−⟨Tᵢ, Tⱼ⟩`.
pub fn build_q(tangents: &[Vec<f64>]) -> DMatrix<f64> {
    let q = tangents.len();
    DMatrix::from_fn(q, q, |i, j| {
        if i == j {
            (q - 1) as f64
        } else {
            -dot(&tangents[i], &tangents[j])
        }
    })
}

/// Right-hand side `−⟨Σ_{j≠i} Aⱼ, Tᵢ⟩` of the junction speed system.
pub fn junction_rhs(frame: &JunctionFrame) -> DVector<f64> {
    let q = frame.q();
    DVector::from_fn(q, |i, _| {
        -(0..q)
            .filter(|&j| j != i)
            .map(|j| dot(&frame.a_vectors[j], &frame.tangents[i]))
            .sum::<f64>()
    })
}

/// Tangential speeds `φᵢ(0)` at the junction from `Qφ = rhs`. Requires the
/// tangents to span at least two dimensions.
pub fn junction_phi(frame: &JunctionFrame, rank_tol: f64) -> Result<Vec<f64>> {
    let span = span_dimension(&frame.tangents, rank_tol);
    if span < 2 {
        return Err(Error::NonCollinear { span });
    }
    let q = build_q(&frame.tangents);
    let rhs = junction_rhs(frame);
    let phi = q
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::NonCollinear { span })?;
    let residual = (&q * &phi - &rhs).amax();
    let scale = q.amax() * phi.amax() + rhs.amax();
    if residual > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::IllConditioned { residual: residual / scale });
    }
    Ok(phi.iter().cloned().collect())
}

/// Frozen-coefficient form of the third-order junction condition
/// `Σᵢ Eᵢ ∂ₓ³fᵢ(0) = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionLinearization {
    pub e_matrices: Vec<DMatrix<f64>>,
    pub d_vectors: Vec<Vec<f64>>,
    /// `Dᵢ(0) = 1/|∂ₓf_{0,i}(0)|`.
    pub coefficients: Vec<f64>,
    pub b: Vec<f64>,
}

/// `|∂ₓf|⁻³ (Id − T⊗T)` for the tangent of `d1`.
pub fn normal_projector_scaled(d1: &[f64]) -> DMatrix<f64> {
    let s = norm(d1);
    let n = d1.len();
    DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        (id - d1[r] * d1[c] / (s * s)) / s.powi(3)
    })
}

/// `Eᵢ`, `dᵢ`, `Dᵢ` from the frozen jets at `x = 0` and `b` from the frozen
/// and current ones.
pub fn linearize_boundary(
    frozen: &[NodeJet<'_>],
    current: &[NodeJet<'_>],
    lambda: &[f64],
) -> Result<JunctionLinearization> {
    if frozen.len() != current.len() || frozen.len() != lambda.len() {
        return Err(Error::DimensionMismatch("junction jets and weights differ in count".into()));
    }
    let n = frozen.first().map_or(0, |j| j.d1.len());
    let mut e_matrices = Vec::with_capacity(frozen.len());
    let mut d_vectors = Vec::with_capacity(frozen.len());
    let mut coefficients = Vec::with_capacity(frozen.len());
    let mut b = DVector::zeros(n);
    for (i, (fj, cj)) in frozen.iter().zip(current).enumerate() {
        for (jet, _) in [(fj, 0), (cj, 1)] {
            let s = jet.speed();
            if !(s >= crate::geometry::MIN_SPEED) {
                return Err(Error::Regularity { curve: i, node: 0, speed: s });
            }
        }
        let e = normal_projector_scaled(fj.d1);
        let e_bar = normal_projector_scaled(cj.d1);
        let d3 = DVector::from_column_slice(cj.d3);
        b += (&e - &e_bar) * d3;
        let t = cj.tangent();
        for c in 0..n {
            b[c] += lambda[i] * t[c];
        }
        coefficients.push(1.0 / fj.speed());
        d_vectors.push(fj.tangent());
        e_matrices.push(e);
    }
    Ok(JunctionLinearization { e_matrices, d_vectors, coefficients, b: b.iter().cloned().collect() })
}
