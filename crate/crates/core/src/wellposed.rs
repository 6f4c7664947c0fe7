//! Compatibility conditions of the initial data, the parabolicity margin and
//! the complementing-condition algebra of the frozen linear problem.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{norm, stencil, CurveSamples, DerivativeBundle};
use crate::junction::{normal_projector_scaled, span_dimension, RANK_TOL};
use crate::solver::{FlowParams, NetworkState};

/// Default absolute tolerance of the compatibility residuals on unit-scale
/// data.
pub const COMPAT_TOL: f64 = 1e-8;

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Junction,
    Fixed,
}

/// One evaluated condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatRecord {
    pub condition: String,
    pub curve: Option<usize>,
    /// Second curve for pairwise conditions.
    pub other: Option<usize>,
    pub endpoint: Option<Endpoint>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct CompatReport {
    pub records: Vec<CompatRecord>,
    pub pass: bool,
}

impl CompatReport {
    fn push(&mut self, condition: &str, curve: Option<usize>, other: Option<usize>, endpoint: Option<Endpoint>, residual: f64, tolerance: f64) {
        self.records.push(CompatRecord {
            condition: condition.to_string(),
            curve,
            other,
            endpoint,
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    fn finish(mut self) -> Self {
        self.pass = self.records.iter().all(|r| r.pass);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &CompatRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Human-readable list of the failed conditions.
    pub fn summary(&self) -> String {
        self.failures().map(describe).collect::<Vec<_>>().join("; ")
    }
}

fn describe(r: &CompatRecord) -> String {
    let mut s = r.condition.clone();
    match (r.curve, r.other) {
        (Some(i), Some(j)) => s.push_str(&format!(" (curves {i}, {j})")),
        (Some(i), None) => s.push_str(&format!(" (curve {i})")),
        _ => {}
    }
    if let Some(e) = r.endpoint {
        s.push_str(match e {
            Endpoint::Junction => " at x = 0",
            Endpoint::Fixed => " at x = 1",
        });
    }
    format!("{s}: residual {:e} > {:e}", r.residual, r.tolerance)
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `Σᵢ (∇ₛκ⃗ᵢ(0) − λᵢ ∂ₛfᵢ(0))` for derivatives at the junction.
fn junction_sum(bundles: &[DerivativeBundle], lambda: &[f64]) -> Vec<f64> {
    let n = bundles[0].dim;
    let mut sum = vec![0.0; n];
    for (b, l) in bundles.iter().zip(lambda) {
        let jet = b.jet(0);
        let t = jet.tangent();
        for (c, v) in jet.nabla_s_kappa().iter().enumerate() {
            sum[c] += v - l * t[c];
        }
    }
    sum
}

/// Order-zero compatibility: pins, `∂ₓ²f = 0` at both ends, concurrency,
/// the third-order junction sum, `∂ₓ⁴f = 0` at the fixed ends and equal
/// `∂ₓ⁴fᵢ/|∂ₓfᵢ|⁴` across curves at the junction.
pub fn check_compat_order0(state: &NetworkState, params: &FlowParams, tol: f64) -> Result<CompatReport> {
    params.check_state(state)?;
    let bundles = state.bundles()?;
    let nn = state.intervals();
    let scale = state.curves.iter().map(CurveSamples::max_abs).fold(1.0, f64::max);
    let floor = |order: usize, node: usize| stencil::noise_floor(order, node, nn, scale);
    let mut rep = CompatReport::default();
    for (i, (c, b)) in state.curves.iter().zip(&bundles).enumerate() {
        let p = &params.endpoints[i];
        rep.push("endpoint_pin", Some(i), None, Some(Endpoint::Fixed), diff_norm(c.node(nn), p), tol * norm(p).max(1.0));
        for (end, node) in [(Endpoint::Junction, 0), (Endpoint::Fixed, nn)] {
            let s = b.speed[node];
            rep.push("second_derivative", Some(i), None, Some(end), norm(b.jet(node).d2), tol * s * s + floor(2, node));
        }
        let s = b.speed[nn];
        rep.push(
            "fourth_derivative_fixed",
            Some(i),
            None,
            Some(Endpoint::Fixed),
            norm(b.jet(nn).d4) / s.powi(4),
            tol + floor(4, nn) / s.powi(4),
        );
    }
    if let Some(start) = &params.start {
        let p = state.curves[0].node(0);
        rep.push("start_pin", Some(0), None, Some(Endpoint::Junction), diff_norm(p, start), tol * norm(start).max(1.0));
        return Ok(rep.finish());
    }
    let f0 = state.curves[0].node(0);
    for (i, c) in state.curves.iter().enumerate().skip(1) {
        rep.push("concurrency", Some(i), Some(0), Some(Endpoint::Junction), diff_norm(c.node(0), f0), tol * norm(f0).max(1.0));
    }
    let sum = junction_sum(&bundles, &params.lambda);
    let sum_floor: f64 = bundles.iter().map(|b| floor(3, 0) / b.speed[0].powi(3)).sum();
    rep.push("junction_third_order", None, None, Some(Endpoint::Junction), norm(&sum), tol + sum_floor);
    let fourth: Vec<Vec<f64>> = bundles
        .iter()
        .map(|b| b.jet(0).d4.iter().map(|v| v / b.speed[0].powi(4)).collect())
        .collect();
    for i in 0..bundles.len() {
        for j in i + 1..bundles.len() {
            let allowance = floor(4, 0) * (bundles[i].speed[0].powi(-4) + bundles[j].speed[0].powi(-4));
            rep.push(
                "fourth_derivative_junction",
                Some(i),
                Some(j),
                Some(Endpoint::Junction),
                diff_norm(&fourth[i], &fourth[j]),
                tol + allowance,
            );
        }
    }
    Ok(rep.finish())
}

/// Coordinate velocity `L*f` at every node, node-major.
fn operator_field(curve: &CurveSamples, b: &DerivativeBundle, lambda: f64) -> Vec<f64> {
    (0..curve.node_count()).flat_map(|k| b.jet(k).velocity(lambda)).collect()
}

/// First time-derivative layer of the higher compatibility conditions:
/// `∂ₓ²(L*fᵢ) = 0` at both ends and `∂ₜ` of the junction sum with `∂ₜfᵢ`
/// replaced by `L*fᵢ`. An `order0_prerequisite` record states whether the order-zero
/// conditions, on which these depend, hold.
pub fn check_compat_order1(state: &NetworkState, params: &FlowParams, tol: f64) -> Result<CompatReport> {
    let base = check_compat_order0(state, params, tol)?;
    let bundles = state.bundles()?;
    let nn = state.intervals();
    let dim = state.dim();
    let scale = state.curves.iter().map(CurveSamples::max_abs).fold(1.0, f64::max);
    let mut rep = CompatReport::default();
    rep.push("order0_prerequisite", None, None, None, if base.pass { 0.0 } else { 1.0 }, 0.5);
    let fields: Vec<Vec<f64>> = state
        .curves
        .iter()
        .zip(&bundles)
        .zip(&params.lambda)
        .map(|((c, b), l)| operator_field(c, b, *l))
        .collect();
    for (i, (field, b)) in fields.iter().zip(&bundles).enumerate() {
        for (end, node) in [(Endpoint::Junction, 0), (Endpoint::Fixed, nn)] {
            let d2 = stencil::apply(field, dim, 2, node);
            let s = b.speed[node];
            // velocity noise amplified once more by the second-derivative stencil
            let v_floor = stencil::noise_floor(4, node, nn, scale) / s.powi(4);
            let allowance = v_floor * stencil::stencil(2, node, nn).abs_sum() * (nn as f64).powi(2);
            rep.push("second_derivative_of_velocity", Some(i), None, Some(end), norm(&d2), tol * s * s + allowance);
        }
    }
    if params.start.is_none() {
        let vmax = fields.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut deriv = vec![0.0; dim];
        if vmax > 0.0 {
            let eps = 1e-6 * scale / vmax;
            let shifted = |sign: f64| -> Result<Vec<f64>> {
                let curves = state
                    .curves
                    .iter()
                    .zip(&fields)
                    .map(|(c, v)| {
                        CurveSamples::new(dim, c.coords().iter().zip(v).map(|(x, y)| x + sign * eps * y).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                let bundles = NetworkState::new(state.time, curves)?.bundles()?;
                Ok(junction_sum(&bundles, &params.lambda))
            };
            let (plus, minus) = (shifted(1.0)?, shifted(-1.0)?);
            for c in 0..dim {
                deriv[c] = (plus[c] - minus[c]) / (2.0 * eps);
            }
        }
        let floor: f64 = bundles
            .iter()
            .map(|b| stencil::noise_floor(3, 0, nn, scale) / b.speed[0].powi(3))
            .sum::<f64>()
            * vmax.max(1.0)
            / (1e-6 * scale);
        rep.push("time_derivative_junction_third_order", None, None, Some(Endpoint::Junction), norm(&deriv), tol * vmax.max(1.0) + floor);
    }
    Ok(rep.finish())
}

/// `δ̃⁴` with `δ̃` the smallest `1/|∂ₓf|` over the given speeds.
pub fn parabolicity_margin(speeds: &[Vec<f64>]) -> Result<f64> {
    let mut delta = f64::INFINITY;
    for (i, curve) in speeds.iter().enumerate() {
        for (k, s) in curve.iter().enumerate() {
            if !(*s > 0.0) || !s.is_finite() {
                return Err(Error::Regularity { curve: i, node: k, speed: *s });
            }
            delta = delta.min(1.0 / s);
        }
    }
    Ok(delta.powi(4))
}

/// Roots of `p + Dᵢ⁴τ⁴` per curve: `[τ₁, τ₂]` with positive and `[τ₃, τ₄]`
/// with negative imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub p: C64,
    pub theta: f64,
    pub radii: Vec<f64>,
    pub roots: Vec<[C64; 4]>,
}

fn check_p(p: C64) -> Result<()> {
    if p.re < 0.0 || (p.re == 0.0 && p.im == 0.0) || !p.re.is_finite() || !p.im.is_finite() {
        return Err(Error::Domain(format!("p = {p} must satisfy Re p >= 0 and p != 0")));
    }
    Ok(())
}

pub fn positive_roots(p: C64, d: &[f64]) -> Result<RootSet> {
    check_p(p)?;
    if let Some(i) = d.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::Domain(format!("coefficient D[{i}] must be positive")));
    }
    let theta = p.arg();
    let pi = std::f64::consts::PI;
    let radii: Vec<f64> = d.iter().map(|di| p.norm().powf(0.25) / di).collect();
    let roots = radii
        .iter()
        .map(|r| {
            let root = |m: f64| C64::from_polar(*r, (theta + (2.0 * m - 1.0) * pi) / 4.0);
            [root(1.0), root(2.0), root(3.0), root(4.0)]
        })
        .collect();
    Ok(RootSet { p, theta, radii, roots })
}

/// Smallest over largest singular value after scaling columns to unit size.
fn relative_min_singular(mut m: DMatrix<C64>) -> f64 {
    for mut col in m.column_iter_mut() {
        let s = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s > 0.0 {
            col.iter_mut().for_each(|z| *z /= s);
        }
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max > 0.0 {
        min / max
    } else {
        0.0
    }
}

/// The `2qn × 2qn` system for `ω` obtained by requiring, for each curve and
/// component, `a − b x² + c x³` to vanish at both roots of positive
/// imaginary part, in the reduced form `b = βc`, `a = αc`.
pub fn junction_omega_system(tangents: &[Vec<f64>], d: &[f64], p: C64) -> Result<DMatrix<C64>> {
    let q = tangents.len();
    if q < 2 || d.len() != q {
        return Err(Error::DimensionMismatch("need q >= 2 tangents with matching coefficients".into()));
    }
    let n = tangents[0].len();
    let roots = positive_roots(p, d)?;
    let size = 2 * q * n;
    let mut m = DMatrix::<C64>::zeros(size, size);
    let i_unit = C64::new(0.0, 1.0);
    let v_index = |j: usize| (2 * q - 1) * n + j;
    for i in 0..q {
        let e = normal_projector_scaled(&tangents[i].iter().map(|t| t / d[i]).collect::<Vec<_>>());
        let [x1, x2, _, _] = roots.roots[i];
        let beta = (x1 * x1 + x1 * x2 + x2 * x2) / (x1 + x2);
        let alpha = x1 * x1 * x2 * x2 / (x1 + x2);
        for k in 0..n {
            let row_b = i * n + k;
            let row_a = q * n + i * n + k;
            // b − βc = 0
            let b_index = (q - 1 + i) * n + k;
            m[(row_b, b_index)] += C64::new(1.0, 0.0);
            // a − αc = 0
            if i == 0 {
                for l in 0..q - 1 {
                    m[(row_a, l * n + k)] += C64::new(1.0, 0.0);
                }
            } else {
                m[(row_a, (i - 1) * n + k)] += C64::new(-1.0, 0.0);
            }
            for j in 0..n {
                let c = -i_unit * e[(j, k)];
                m[(row_b, v_index(j))] -= beta * c;
                m[(row_a, v_index(j))] -= alpha * c;
            }
        }
    }
    Ok(m)
}

/// Whether the junction rows are independent modulo `M⁺`, i.e. the reduced
/// `ω`-system has only the trivial solution.
pub fn junction_complementary(tangents: &[Vec<f64>], d: &[f64], p: C64, tol: f64) -> Result<bool> {
    let m = junction_omega_system(tangents, d, p)?;
    Ok(relative_min_singular(m) > tol)
}

/// The fixed-end `2×2` system `ω¹ ∓ ω^{n+1} i r² e^{iθ/2} = 0`.
pub fn fixed_end_complementary(d: f64, p: C64) -> Result<bool> {
    let roots = positive_roots(p, &[d])?;
    let w = C64::new(0.0, 1.0) * roots.radii[0].powi(2) * C64::from_polar(1.0, roots.theta / 2.0);
    let m = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), -w, C64::new(1.0, 0.0), w]);
    Ok(relative_min_singular(m) > 1e-12)
}

/// Conditions checked before a run. Returns the violated ones as errors,
/// non-collinearity first; fails outright only when the state cannot be
/// evaluated.
pub fn preflight(state: &NetworkState, params: &FlowParams) -> Result<Vec<Error>> {
    params.check_state(state)?;
    let mut out = Vec::new();
    if state.q() > 1 {
        let bundles = state.bundles()?;
        let tangents: Vec<Vec<f64>> = bundles.iter().map(|b| b.jet(0).tangent()).collect();
        let span = span_dimension(&tangents, RANK_TOL);
        if span < 2 {
            out.push(Error::NonCollinear { span });
        }
    }
    let rep = check_compat_order0(state, params, COMPAT_TOL)?;
    if !rep.pass {
        out.push(Error::Compatibility(rep.summary()));
    }
    Ok(out)
}
