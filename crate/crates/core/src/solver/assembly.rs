//! The linear system of one implicit step.
//!
//! Unknowns are ordered node-major: `(k·q + i)·n + c` for node `k`, curve
//! `i`, component `c`, so every row couples only nearby nodes and the matrix
//! is banded. Rows at the two nodes nearest each end are replaced by the
//! boundary conditions:
//!
//! - node `N`: `fᵢ(1) = Pᵢ`;
//! - node `N − 1`: `∂ₓ²fᵢ(1) = 0`;
//! - node `1`: `∂ₓ²fᵢ(0) = 0`;
//! - node `0`: `fᵢ(0) = f₀(0)` for `i ≥ 1`, and for curve 0 the frozen
//!   third-order condition `Σₗ Eₗ ∂ₓ³fₗ(0) = b`. A single curve pins
//!   `f(0)` instead.

use nalgebra::DMatrix;

use super::banded::{BandedLu, CsrMatrix};
use super::{FlowParams, NetworkState};
use crate::error::{Error, Result};
use crate::geometry::{stencil, CurveSamples, DerivativeBundle, NodeJet};
use crate::junction::{linearize_boundary, normal_projector_scaled};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub q: usize,
    pub n: usize,
    pub intervals: usize,
}

impl Layout {
    pub fn of(state: &NetworkState) -> Self {
        Self { q: state.q(), n: state.dim(), intervals: state.intervals() }
    }

    pub fn index(&self, curve: usize, node: usize, comp: usize) -> usize {
        (node * self.q + curve) * self.n + comp
    }

    pub fn size(&self) -> usize {
        self.q * self.n * (self.intervals + 1)
    }

    pub fn pack(&self, state: &NetworkState) -> Vec<f64> {
        let mut x = vec![0.0; self.size()];
        for (i, c) in state.curves.iter().enumerate() {
            for k in 0..=self.intervals {
                for (j, v) in c.node(k).iter().enumerate() {
                    x[self.index(i, k, j)] = *v;
                }
            }
        }
        x
    }

    pub fn unpack(&self, x: &[f64], time: f64) -> Result<NetworkState> {
        let curves = (0..self.q)
            .map(|i| {
                let mut coords = Vec::with_capacity(self.n * (self.intervals + 1));
                for k in 0..=self.intervals {
                    for c in 0..self.n {
                        coords.push(x[self.index(i, k, c)]);
                    }
                }
                CurveSamples::new(self.n, coords)
            })
            .collect::<Result<Vec<_>>>()?;
        NetworkState::new(time, curves)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Junction,
    Fixed,
}

/// What a row of the step system enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Pde { curve: usize, node: usize, comp: usize },
    EndpointPin { curve: usize, comp: usize },
    SecondDerivative { curve: usize, end: End, comp: usize },
    Concurrency { curve: usize, comp: usize },
    JunctionSum { comp: usize },
    StartPin { comp: usize },
}

impl RowKind {
    pub fn label(&self) -> &'static str {
        match self {
            RowKind::Pde { .. } => "pde",
            RowKind::EndpointPin { .. } => "endpoint",
            RowKind::SecondDerivative { .. } => "second_derivative",
            RowKind::Concurrency { .. } => "concurrency",
            RowKind::JunctionSum { .. } => "junction_sum",
            RowKind::StartPin { .. } => "start",
        }
    }
}

/// Matrix, right-hand side and row map of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearStepSystem {
    pub layout: Layout,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub rows: Vec<RowKind>,
}

impl LinearStepSystem {
    pub fn solve(&self) -> Result<Vec<f64>> {
        BandedLu::factor(&self.matrix)?.solve(&self.rhs)
    }
}

/// Coefficients frozen for a step: `Dᵢ(x_k)⁴` and the junction matrices
/// `Eᵢ`.
#[derive(Debug, Clone)]
pub struct StepOperator {
    pub layout: Layout,
    pub dt: f64,
    d4: Vec<Vec<f64>>,
    frozen: Vec<DerivativeBundle>,
    e_matrices: Vec<DMatrix<f64>>,
    pub matrix: CsrMatrix,
    pub rows: Vec<RowKind>,
    lu: Option<BandedLu>,
}

fn stencil_entries(layout: &Layout, curve: usize, comp: usize, order: usize, node: usize, scale: f64) -> Vec<(usize, f64)> {
    let st = stencil::stencil(order, node, layout.intervals);
    st.weights()
        .iter()
        .zip(st.nodes())
        .filter(|(w, _)| **w != 0.0)
        .map(|(w, k)| (layout.index(curve, k, comp), w * scale))
        .collect()
}

impl StepOperator {
    /// Builds and factors the matrix for coefficients frozen at `frozen`.
    pub fn new(frozen: &NetworkState, params: &FlowParams, dt: f64) -> Result<Self> {
        let mut op = Self::unfactored(frozen, params, dt)?;
        op.lu = Some(BandedLu::factor(&op.matrix)?);
        Ok(op)
    }

    fn unfactored(frozen: &NetworkState, params: &FlowParams, dt: f64) -> Result<Self> {
        params.check_state(frozen)?;
        let layout = Layout::of(frozen);
        let bundles = frozen.bundles()?;
        let d4: Vec<Vec<f64>> = bundles.iter().map(|b| b.speed.iter().map(|s| s.powi(-4)).collect()).collect();
        let e_matrices: Vec<DMatrix<f64>> = bundles.iter().map(|b| normal_projector_scaled(b.jet(0).d1)).collect();
        let Layout { q, n, intervals } = layout;
        let nn = intervals as f64;
        let mut matrix = CsrMatrix::new(layout.size());
        let mut rows = Vec::with_capacity(layout.size());
        for k in 0..=intervals {
            for i in 0..q {
                for c in 0..n {
                    let (kind, entries) = if k == intervals {
                        (RowKind::EndpointPin { curve: i, comp: c }, vec![(layout.index(i, k, c), 1.0)])
                    } else if k == intervals - 1 {
                        (
                            RowKind::SecondDerivative { curve: i, end: End::Fixed, comp: c },
                            stencil_entries(&layout, i, c, 2, intervals, 1.0),
                        )
                    } else if k == 1 {
                        (
                            RowKind::SecondDerivative { curve: i, end: End::Junction, comp: c },
                            stencil_entries(&layout, i, c, 2, 0, 1.0),
                        )
                    } else if k == 0 && q == 1 {
                        (RowKind::StartPin { comp: c }, vec![(layout.index(i, 0, c), 1.0)])
                    } else if k == 0 && i > 0 {
                        (
                            RowKind::Concurrency { curve: i, comp: c },
                            vec![(layout.index(i, 0, c), 1.0), (layout.index(0, 0, c), -1.0)],
                        )
                    } else if k == 0 {
                        let mut entries = Vec::new();
                        for (l, e) in e_matrices.iter().enumerate() {
                            for c2 in 0..n {
                                let coef = e[(c, c2)];
                                if coef != 0.0 {
                                    entries.extend(stencil_entries(&layout, l, c2, 3, 0, coef * nn.powi(3)));
                                }
                            }
                        }
                        (RowKind::JunctionSum { comp: c }, entries)
                    } else {
                        let mut entries = stencil_entries(&layout, i, c, 4, k, dt * d4[i][k] * nn.powi(4));
                        entries.push((layout.index(i, k, c), 1.0));
                        (RowKind::Pde { curve: i, node: k, comp: c }, entries)
                    };
                    matrix.push_row(entries);
                    rows.push(kind);
                }
            }
        }
        Ok(Self { layout, dt, d4, frozen: bundles, e_matrices, matrix, rows, lu: None })
    }

    /// Right-hand side for the step from `start` with lower-order terms
    /// evaluated on the iterate `current`.
    pub fn rhs(&self, start: &NetworkState, current: &NetworkState, params: &FlowParams) -> Result<Vec<f64>> {
        let layout = self.layout;
        if Layout::of(start) != layout || Layout::of(current) != layout {
            return Err(Error::DimensionMismatch("state grid differs from the frozen grid".into()));
        }
        let bundles = current.bundles()?;
        let lin = if layout.q > 1 {
            let frozen_jets: Vec<NodeJet<'_>> = self.frozen.iter().map(|b| b.jet(0)).collect();
            let current_jets: Vec<NodeJet<'_>> = bundles.iter().map(|b| b.jet(0)).collect();
            Some(linearize_boundary(&frozen_jets, &current_jets, &params.lambda)?)
        } else {
            None
        };
        let mut rhs = vec![0.0; layout.size()];
        for (r, kind) in self.rows.iter().enumerate() {
            rhs[r] = match *kind {
                RowKind::Pde { curve, node, comp } => {
                    let jet = bundles[curve].jet(node);
                    let s4 = bundles[curve].speed[node].powi(4);
                    let remainder = (self.d4[curve][node] - 1.0 / s4) * jet.d4[comp];
                    let h = jet.h_lower(params.lambda[curve])[comp];
                    start.curves[curve].node(node)[comp] + self.dt * (remainder + h)
                }
                RowKind::EndpointPin { curve, comp } => params.endpoints[curve][comp],
                RowKind::SecondDerivative { .. } | RowKind::Concurrency { .. } => 0.0,
                RowKind::JunctionSum { comp } => lin.as_ref().map_or(0.0, |l| l.b[comp]),
                RowKind::StartPin { comp } => params.start.as_ref().map_or(0.0, |s| s[comp]),
            };
        }
        Ok(rhs)
    }

    pub fn system(&self, rhs: Vec<f64>) -> LinearStepSystem {
        LinearStepSystem { layout: self.layout, matrix: self.matrix.clone(), rhs, rows: self.rows.clone() }
    }

    pub fn e_matrices(&self) -> &[DMatrix<f64>] {
        &self.e_matrices
    }

    /// Solves with the stored factorization.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.lu {
            Some(lu) => lu.solve(rhs),
            None => BandedLu::factor(&self.matrix)?.solve(rhs),
        }
    }
}

/// Assembles the step from `start` with coefficients frozen at `frozen` and
/// lower-order terms evaluated on the iterate `current`.
pub fn assemble_step(
    frozen: &NetworkState,
    start: &NetworkState,
    current: &NetworkState,
    params: &FlowParams,
    dt: f64,
) -> Result<LinearStepSystem> {
    let op = StepOperator::unfactored(frozen, params, dt)?;
    let rhs = op.rhs(start, current, params)?;
    Ok(op.system(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::finite_differences;

    fn bent_curve(n: usize) -> CurveSamples {
        CurveSamples::from_fn(2, n, |x| vec![x, 0.1 * (std::f64::consts::PI * x).sin().powi(3)]).unwrap()
    }

    fn single(curve: CurveSamples) -> (NetworkState, FlowParams) {
        let n = curve.intervals();
        let params = FlowParams {
            n: 2,
            q: 1,
            lambda: vec![0.3],
            endpoints: vec![curve.node(n).to_vec()],
            start: Some(curve.node(0).to_vec()),
        };
        (NetworkState::new(0.0, vec![curve]).unwrap(), params)
    }

    #[test]
    fn row_counts_match_layout() {
        let spokes = (0..3)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                CurveSamples::from_fn(2, 16, |x| vec![x * a.cos(), x * a.sin()]).unwrap()
            })
            .collect();
        let state = NetworkState::new(0.0, spokes).unwrap();
        let params = FlowParams {
            n: 2,
            q: 3,
            lambda: vec![0.0; 3],
            endpoints: state.curves.iter().map(|c| c.node(16).to_vec()).collect(),
            start: None,
        };
        let sys = assemble_step(&state, &state, &state, &params, 1e-5).unwrap();
        let count = |label: &str| sys.rows.iter().filter(|r| r.label() == label).count();
        assert_eq!(count("endpoint"), 3 * 2);
        assert_eq!(count("second_derivative"), 2 * 3 * 2);
        assert_eq!(count("concurrency"), 2 * 2);
        assert_eq!(count("junction_sum"), 2);
        assert_eq!(count("pde"), sys.layout.size() - 6 - 12 - 4 - 2);
        // equilibrium: the solution reproduces the state
        let x = sys.solve().unwrap();
        let back = sys.layout.unpack(&x, 0.0).unwrap();
        assert!(back.max_distance(&state) <= 1e-10);
    }

    #[test]
    fn interior_rows_match_direct_stencil_application() {
        let (state, params) = single(bent_curve(32));
        let dt = 1e-4;
        let sys = assemble_step(&state, &state, &state, &params, dt).unwrap();
        let x = sys.layout.pack(&state);
        let ax = sys.matrix.mul_vec(&x);
        let b = finite_differences(&state.curves[0]).unwrap();
        for (r, kind) in sys.rows.iter().enumerate() {
            if let RowKind::Pde { node, comp, .. } = *kind {
                let d4 = b.jet(node).d4[comp];
                let want = state.curves[0].node(node)[comp] + dt * d4 / b.speed[node].powi(4);
                assert!((ax[r] - want).abs() < 1e-12 * (1.0 + want.abs()), "row {r}");
                // frozen = current: remainder vanishes, so the rhs is f + dt·h
                let h = b.jet(node).h_lower(0.3)[comp];
                let want_rhs = state.curves[0].node(node)[comp] + dt * h;
                assert_eq!(sys.rhs[r], want_rhs);
            }
        }
    }

    #[test]
    fn remainder_appears_when_current_differs() {
        let (state, params) = single(bent_curve(32));
        let mut moved = state.clone();
        for v in moved.curves[0].coords_mut().iter_mut() {
            *v *= 1.1;
        }
        let a = assemble_step(&state, &state, &moved, &params, 1e-4).unwrap();
        let b = assemble_step(&moved, &state, &moved, &params, 1e-4).unwrap();
        assert_ne!(a.rhs, b.rhs);
        assert_ne!(a.matrix, b.matrix);
    }
}
