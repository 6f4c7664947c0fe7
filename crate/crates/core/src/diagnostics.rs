//! Energies, boundary residuals, first variations and Hölder seminorms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, finite_differences, norm, stencil, CurveSamples, DerivativeBundle};
use crate::junction::nc_value;
use crate::solver::{FlowParams, NetworkState};

fn trapezoid(values: &[f64]) -> f64 {
    let m = values.len() - 1;
    let inner: f64 = values[1..m].iter().sum();
    (inner + 0.5 * (values[0] + values[m])) / m as f64
}

fn bundle_energy(b: &DerivativeBundle, lambda: f64) -> f64 {
    let density: Vec<f64> = (0..b.node_count())
        .map(|k| {
            let k2 = {
                let v = b.jet(k).kappa();
                dot(&v, &v)
            };
            (0.5 * k2 + lambda) * b.speed[k]
        })
        .collect();
    trapezoid(&density)
}

/// `½∫|κ⃗|² ds + λ·length` by the trapezoidal rule.
pub fn elastic_energy(curve: &CurveSamples, lambda: f64) -> Result<f64> {
    Ok(bundle_energy(&finite_differences(curve)?, lambda))
}

pub fn curve_length(curve: &CurveSamples) -> Result<f64> {
    Ok(trapezoid(&finite_differences(curve)?.speed))
}

/// Total energy and the per-curve terms.
pub fn network_energy(state: &NetworkState, params: &FlowParams) -> Result<(f64, Vec<f64>)> {
    let per: Vec<f64> = state
        .curves
        .iter()
        .zip(&params.lambda)
        .enumerate()
        .map(|(i, (c, l))| elastic_energy(c, *l).map_err(|e| e.for_curve(i)))
        .collect::<Result<_>>()?;
    Ok((per.iter().sum(), per))
}

/// Labeled boundary-condition residuals, each the largest Euclidean norm
/// over curves.
pub fn boundary_residuals(state: &NetworkState, params: &FlowParams) -> Result<Vec<(String, f64)>> {
    params.check_state(state)?;
    let bundles = state.bundles()?;
    let n = state.dim();
    let last = state.intervals();
    let mut endpoint = 0.0f64;
    let mut d2_junction = 0.0f64;
    let mut d2_fixed = 0.0f64;
    let mut concurrency = 0.0f64;
    let mut sum = vec![0.0; n];
    for (i, (c, b)) in state.curves.iter().zip(&bundles).enumerate() {
        let diff: Vec<f64> = c.node(last).iter().zip(&params.endpoints[i]).map(|(a, p)| a - p).collect();
        endpoint = endpoint.max(norm(&diff));
        d2_junction = d2_junction.max(norm(b.jet(0).d2));
        d2_fixed = d2_fixed.max(norm(b.jet(last).d2));
        let diff: Vec<f64> = c.node(0).iter().zip(state.curves[0].node(0)).map(|(a, p)| a - p).collect();
        concurrency = concurrency.max(norm(&diff));
        let jet = b.jet(0);
        let t = jet.tangent();
        for (s, (v, tc)) in sum.iter_mut().zip(jet.nabla_s_kappa().iter().zip(&t)) {
            *s += v - params.lambda[i] * tc;
        }
    }
    let mut out = vec![
        ("endpoint".to_string(), endpoint),
        ("d2_junction".to_string(), d2_junction),
        ("d2_fixed".to_string(), d2_fixed),
    ];
    match &params.start {
        Some(p) => {
            let diff: Vec<f64> = state.curves[0].node(0).iter().zip(p).map(|(a, b)| a - b).collect();
            out.push(("start".to_string(), norm(&diff)));
        }
        None => {
            out.push(("concurrency".to_string(), concurrency));
            out.push(("junction_sum".to_string(), norm(&sum)));
        }
    }
    Ok(out)
}

/// Monitored quantities of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub energy_total: f64,
    pub energy_per_curve: Vec<f64>,
    pub length_per_curve: Vec<f64>,
    pub nc_at_junction: f64,
    pub residuals: Vec<(String, f64)>,
    pub min_speed: f64,
}

impl DiagnosticsRecord {
    pub fn compute(state: &NetworkState, params: &FlowParams) -> Result<Self> {
        let bundles = state.bundles()?;
        let energy_per_curve: Vec<f64> =
            bundles.iter().zip(&params.lambda).map(|(b, l)| bundle_energy(b, *l)).collect();
        let length_per_curve = bundles.iter().map(|b| trapezoid(&b.speed)).collect();
        let tangents: Vec<Vec<f64>> = bundles.iter().map(|b| b.jet(0).tangent()).collect();
        let nc_at_junction = if tangents.len() > 1 { nc_value(&tangents) } else { 1.0 };
        Ok(Self {
            time: state.time,
            energy_total: energy_per_curve.iter().sum(),
            energy_per_curve,
            length_per_curve,
            nc_at_junction,
            residuals: boundary_residuals(state, params)?,
            min_speed: bundles.iter().map(|b| b.min_speed()).fold(f64::INFINITY, f64::min),
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["time".to_string(), "energy_total".to_string()];
        cols.extend((0..self.energy_per_curve.len()).map(|i| format!("energy_{i}")));
        cols.push("nc".to_string());
        cols.extend(self.residuals.iter().map(|(l, _)| format!("res_{l}")));
        cols.push("min_speed".to_string());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![fmt(self.time), fmt(self.energy_total)];
        cols.extend(self.energy_per_curve.iter().map(|v| fmt(*v)));
        cols.push(fmt(self.nc_at_junction));
        cols.extend(self.residuals.iter().map(|(_, v)| fmt(*v)));
        cols.push(fmt(self.min_speed));
        cols.join(",")
    }
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Analytic and central-difference first variation of a functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationCheck {
    pub analytic: f64,
    pub finite_difference: f64,
}

impl VariationCheck {
    pub fn agrees(&self) -> bool {
        (self.analytic - self.finite_difference).abs() <= 1e-6f64.max(1e-4 * self.analytic.abs())
    }
}

/// Step of the central differences in the variation checks.
pub const VARIATION_EPS: f64 = 1e-5;

fn perturbed(curve: &CurveSamples, dir: &[f64], eps: f64) -> Result<CurveSamples> {
    let coords = curve.coords().iter().zip(dir).map(|(f, p)| f + eps * p).collect();
    CurveSamples::new(curve.dim(), coords)
}

fn check_direction(curve: &CurveSamples, dir: &[f64]) -> Result<()> {
    if dir.len() != curve.coords().len() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} entries, curve has {}",
            dir.len(),
            curve.coords().len()
        )));
    }
    Ok(())
}

/// Length variation `⟨∂ₛf, φ⟩|₀¹ − ∫⟨κ⃗, φ⟩ ds` against central differences.
pub fn length_variation(curve: &CurveSamples, dir: &[f64]) -> Result<VariationCheck> {
    check_direction(curve, dir)?;
    let b = finite_differences(curve)?;
    let n = curve.dim();
    let last = curve.intervals();
    let phi = |k: usize| &dir[k * n..(k + 1) * n];
    let boundary = dot(&b.jet(last).tangent(), phi(last)) - dot(&b.jet(0).tangent(), phi(0));
    let density: Vec<f64> = (0..=last).map(|k| dot(&b.jet(k).kappa(), phi(k)) * b.speed[k]).collect();
    let analytic = boundary - trapezoid(&density);
    let plus = curve_length(&perturbed(curve, dir, VARIATION_EPS)?)?;
    let minus = curve_length(&perturbed(curve, dir, -VARIATION_EPS)?)?;
    Ok(VariationCheck { analytic, finite_difference: (plus - minus) / (2.0 * VARIATION_EPS) })
}

/// Bending-energy variation
/// `⟨∂ₛφ, κ⃗⟩|₀¹ − ⟨φ, ∇ₛκ⃗ + ½|κ⃗|²∂ₛf⟩|₀¹ + ∫⟨∇ₛ²κ⃗ + ½|κ⃗|²κ⃗, φ⟩ ds`
/// for `½∫|κ⃗|² ds`, against central differences.
pub fn energy_variation(curve: &CurveSamples, dir: &[f64]) -> Result<VariationCheck> {
    check_direction(curve, dir)?;
    let b = finite_differences(curve)?;
    let n = curve.dim();
    let last = curve.intervals();
    let phi = |k: usize| &dir[k * n..(k + 1) * n];
    let boundary_at = |k: usize| {
        let jet = b.jet(k);
        let kap = jet.kappa();
        let k2 = dot(&kap, &kap);
        let dphi = stencil::apply(dir, n, 1, k);
        let ds_phi: Vec<f64> = dphi.iter().map(|v| v / b.speed[k]).collect();
        let t = jet.tangent();
        let third: Vec<f64> = jet.nabla_s_kappa().iter().zip(&t).map(|(v, tc)| v + 0.5 * k2 * tc).collect();
        dot(&ds_phi, &kap) - dot(phi(k), &third)
    };
    let boundary = boundary_at(last) - boundary_at(0);
    let density: Vec<f64> = (0..=last)
        .map(|k| {
            let jet = b.jet(k);
            let kap = jet.kappa();
            let k2 = dot(&kap, &kap);
            let v: Vec<f64> = jet.nabla_s2_kappa().iter().zip(&kap).map(|(a, kc)| a + 0.5 * k2 * kc).collect();
            dot(&v, phi(k)) * b.speed[k]
        })
        .collect();
    let analytic = boundary + trapezoid(&density);
    let plus = elastic_energy(&perturbed(curve, dir, VARIATION_EPS)?, 0.0)?;
    let minus = elastic_energy(&perturbed(curve, dir, -VARIATION_EPS)?, 0.0)?;
    Ok(VariationCheck { analytic, finite_difference: (plus - minus) / (2.0 * VARIATION_EPS) })
}

/// A vector field sampled on a time × space grid: `values[t][x]` has `dim`
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeField {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    pub values: Vec<Vec<Vec<f64>>>,
}

impl TimeField {
    pub fn new(times: Vec<f64>, xs: Vec<f64>, values: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if values.len() != times.len() || values.iter().any(|row| row.len() != xs.len()) {
            return Err(Error::DimensionMismatch("field shape does not match its grids".into()));
        }
        let dim = values.first().and_then(|r| r.first()).map_or(0, |v| v.len());
        if values.iter().flatten().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch("field components differ between samples".into()));
        }
        Ok(Self { times, xs, values })
    }

    pub fn dim(&self) -> usize {
        self.values.first().and_then(|r| r.first()).map_or(0, |v| v.len())
    }

    /// Keeps at most `max_slices` evenly spread time slices, always including
    /// the first and last.
    pub fn decimate(&self, max_slices: usize) -> Self {
        let m = self.times.len();
        if m <= max_slices || max_slices < 2 {
            return self.clone();
        }
        let mut idx: Vec<usize> = (0..max_slices).map(|j| j * (m - 1) / (max_slices - 1)).collect();
        idx.dedup();
        Self {
            times: idx.iter().map(|&j| self.times[j]).collect(),
            xs: self.xs.clone(),
            values: idx.iter().map(|&j| self.values[j].clone()).collect(),
        }
    }

    /// Centered/one-sided second-order `∂ₓ` on a uniform spatial grid.
    pub fn dx(&self) -> Result<Self> {
        let m = self.xs.len();
        if m < 3 {
            return Err(Error::Config("spatial derivative needs at least three nodes".into()));
        }
        let h = self.xs[1] - self.xs[0];
        let values = self
            .values
            .iter()
            .map(|row| {
                (0..m)
                    .map(|k| {
                        let (w, nodes): ([f64; 3], [usize; 3]) = if k == 0 {
                            ([-1.5, 2.0, -0.5], [0, 1, 2])
                        } else if k == m - 1 {
                            ([0.5, -2.0, 1.5], [m - 3, m - 2, m - 1])
                        } else {
                            ([-0.5, 0.0, 0.5], [k - 1, k, k + 1])
                        };
                        (0..row[k].len())
                            .map(|c| w.iter().zip(nodes).map(|(wi, j)| wi * row[j][c]).sum::<f64>() / h)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { times: self.times.clone(), xs: self.xs.clone(), values })
    }

    fn sup(&self) -> f64 {
        (0..self.dim())
            .map(|c| self.values.iter().flatten().map(|v| v[c].abs()).fold(0.0, f64::max))
            .sum()
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("Hölder exponent {rho} must lie in (0, 1)")));
    }
    Ok(())
}

/// `[v]_{ρ,x}`: sum over components of the largest spatial difference
/// quotient over all time slices and node pairs.
pub fn holder_x(field: &TimeField, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let mut total = 0.0;
    for c in 0..field.dim() {
        let mut best = 0.0f64;
        for row in &field.values {
            for a in 0..field.xs.len() {
                for b in a + 1..field.xs.len() {
                    let d = (field.xs[b] - field.xs[a]).abs().powf(rho);
                    best = best.max((row[b][c] - row[a][c]).abs() / d);
                }
            }
        }
        total += best;
    }
    Ok(total)
}

/// `[v]_{ρ,t}`: as [`holder_x`] with the roles of time and space swapped.
pub fn holder_t(field: &TimeField, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let mut total = 0.0;
    for c in 0..field.dim() {
        let mut best = 0.0f64;
        for k in 0..field.xs.len() {
            for a in 0..field.times.len() {
                for b in a + 1..field.times.len() {
                    let d = (field.times[b] - field.times[a]).abs().powf(rho);
                    best = best.max((field.values[b][k][c] - field.values[a][k][c]).abs() / d);
                }
            }
        }
        total += best;
    }
    Ok(total)
}

/// Seminorms at one exponent plus the parabolic norm of order `k + α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub rho: f64,
    pub value_x: f64,
    pub value_t: f64,
    pub norm_parabolic: f64,
}

/// Time slices kept before the quadratic pair sweeps.
pub const MAX_TIME_SLICES: usize = 200;

/// Parabolic Hölder norm of `C^{(k+α)/4, k+α}` for `k ∈ {0, 1}`.
pub fn parabolic_norm(field: &TimeField, k: usize, alpha: f64) -> Result<f64> {
    check_rho(alpha)?;
    let f = field.decimate(MAX_TIME_SLICES);
    match k {
        0 => Ok(f.sup() + holder_x(&f, alpha)? + holder_t(&f, alpha / 4.0)?),
        1 => {
            let d = f.dx()?;
            Ok(f.sup()
                + d.sup()
                + holder_x(&d, alpha)?
                + holder_t(&f, (1.0 + alpha) / 4.0)?
                + holder_t(&d, alpha / 4.0)?)
        }
        _ => Err(Error::Config(format!("parabolic norm of order {k} is not available; use 0 or 1"))),
    }
}

pub fn holder_seminorms(field: &TimeField, rho: f64, k: usize, alpha: f64) -> Result<SeminormReport> {
    let f = field.decimate(MAX_TIME_SLICES);
    Ok(SeminormReport {
        rho,
        value_x: holder_x(&f, rho)?,
        value_t: holder_t(&f, rho)?,
        norm_parabolic: parabolic_norm(field, k, alpha)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn segment(len: f64) -> CurveSamples {
        CurveSamples::from_fn(2, 32, |x| vec![len * x, 0.0]).unwrap()
    }

    fn circle(r: f64, n: usize) -> CurveSamples {
        CurveSamples::from_fn(2, n, |x| vec![r * (2.0 * PI * x).cos(), r * (2.0 * PI * x).sin()]).unwrap()
    }

    #[test]
    fn segment_energies() {
        assert_eq!(elastic_energy(&segment(1.5), 0.0).unwrap(), 0.0);
        assert!((elastic_energy(&segment(1.5), 2.0).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn circle_energy_converges_to_pi_over_r() {
        for r in [0.5, 1.0, 2.0] {
            let err = |n| (elastic_energy(&circle(r, n), 0.0).unwrap() - PI / r).abs();
            assert!(err(256) < 1e-3 / r);
            assert!((err(128) / err(256)).log2() > 1.8);
        }
    }

    fn spokes(angles: &[f64], bump: f64) -> (NetworkState, FlowParams) {
        let curves: Vec<CurveSamples> = angles
            .iter()
            .map(|a| {
                let (c, s) = (a.cos(), a.sin());
                CurveSamples::from_fn(2, 32, |x| {
                    let y = bump * (PI * x).sin().powi(4);
                    vec![x * c - y * s, x * s + y * c]
                })
                .unwrap()
            })
            .collect();
        let params = FlowParams {
            n: 2,
            q: angles.len(),
            lambda: vec![1.0; angles.len()],
            endpoints: curves.iter().map(|c| c.node(32).to_vec()).collect(),
            start: None,
        };
        (NetworkState::new(0.0, curves).unwrap(), params)
    }

    #[test]
    fn network_energy_examples() {
        let third = 2.0 * PI / 3.0;
        let (s, mut p) = spokes(&[0.0, third, 2.0 * third], 0.0);
        assert!((network_energy(&s, &p).unwrap().0 - 3.0).abs() < 1e-13);
        p.lambda = vec![0.0; 3];
        assert!(network_energy(&s, &p).unwrap().0 < 1e-20);
        let (s, p) = spokes(&[0.0, third, 2.0 * third], 0.05);
        let (total, per) = network_energy(&s, &p).unwrap();
        let independent: f64 = s.curves.iter().map(|c| elastic_energy(c, 1.0).unwrap()).sum();
        assert!((total - independent).abs() < 1e-14);
        assert_eq!(per.len(), 3);
    }

    fn residual(list: &[(String, f64)], label: &str) -> f64 {
        list.iter().find(|r| r.0 == label).unwrap().1
    }

    #[test]
    fn residual_examples() {
        let third = 2.0 * PI / 3.0;
        let (s, p) = spokes(&[0.0, third, 2.0 * third], 0.0);
        let r = boundary_residuals(&s, &p).unwrap();
        assert!(residual(&r, "endpoint") <= 1e-12);
        assert!(residual(&r, "junction_sum") <= 1e-12);

        let mut moved = p.clone();
        moved.endpoints[1][0] += 0.3;
        moved.endpoints[1][1] -= 0.4;
        let r = boundary_residuals(&s, &moved).unwrap();
        assert!((residual(&r, "endpoint") - 0.5).abs() < 1e-12);

        let angles = [0.0, 0.5 * PI, 1.25 * PI];
        let (s, p) = spokes(&angles, 0.0);
        let r = boundary_residuals(&s, &p).unwrap();
        let sum: Vec<f64> = (0..2)
            .map(|c| angles.iter().map(|a| if c == 0 { a.cos() } else { a.sin() }).sum())
            .collect();
        assert!((residual(&r, "junction_sum") - norm(&sum)).abs() < 1e-10);
    }

    #[test]
    fn zero_direction_has_zero_variation() {
        let c = circle(1.0, 64);
        let zero = vec![0.0; c.coords().len()];
        let l = length_variation(&c, &zero).unwrap();
        let e = energy_variation(&c, &zero).unwrap();
        assert_eq!((l.analytic, l.finite_difference), (0.0, 0.0));
        assert_eq!((e.analytic, e.finite_difference), (0.0, 0.0));
    }

    #[test]
    fn tangential_direction_on_segment() {
        let c = segment(1.0);
        let dir: Vec<f64> = (0..=32)
            .flat_map(|k| {
                let x = k as f64 / 32.0;
                vec![(PI * x).sin(), 0.0]
            })
            .collect();
        let l = length_variation(&c, &dir).unwrap();
        assert!(l.analytic.abs() < 1e-12 && l.agrees());
    }

    #[test]
    fn bent_arc_normal_direction() {
        let arc = CurveSamples::from_fn(2, 512, |x| vec![(x).cos(), (x).sin()]).unwrap();
        let dir: Vec<f64> = (0..=512)
            .flat_map(|k| {
                let x = k as f64 / 512.0;
                let m = (PI * x).sin() * 0.3;
                vec![m * x.cos(), m * x.sin()]
            })
            .collect();
        let l = length_variation(&arc, &dir).unwrap();
        let e = energy_variation(&arc, &dir).unwrap();
        assert!(l.agrees(), "{l:?}");
        assert!(e.agrees(), "{e:?}");
    }

    fn grid_field(f: impl Fn(f64, f64) -> f64) -> TimeField {
        let times: Vec<f64> = (0..=10).map(|j| j as f64 / 10.0).collect();
        let xs: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let values = times.iter().map(|t| xs.iter().map(|x| vec![f(*t, *x)]).collect()).collect();
        TimeField::new(times, xs, values).unwrap()
    }

    #[test]
    fn seminorm_examples() {
        let c = grid_field(|_, _| 3.0);
        assert_eq!(holder_x(&c, 0.5).unwrap(), 0.0);
        assert_eq!(holder_t(&c, 0.5).unwrap(), 0.0);
        for rho in [0.25, 0.5, 0.9] {
            assert!((holder_x(&grid_field(|_, x| x), rho).unwrap() - 1.0).abs() < 1e-14);
            assert!((holder_t(&grid_field(|t, _| t), rho).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(matches!(holder_x(&c, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn vector_seminorm_sums_components() {
        let times = vec![0.0, 1.0];
        let xs = vec![0.0, 0.5, 1.0];
        let values = times.iter().map(|_| xs.iter().map(|x| vec![*x, -2.0 * x]).collect()).collect();
        let f = TimeField::new(times, xs, values).unwrap();
        assert!((holder_x(&f, 0.5).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn parabolic_norm_orders() {
        let f = grid_field(|t, x| t * x);
        let n0 = parabolic_norm(&f, 0, 0.5).unwrap();
        let n1 = parabolic_norm(&f, 1, 0.5).unwrap();
        assert!(n0 > 0.0 && n1 > n0);
        assert!(parabolic_norm(&f, 2, 0.5).is_err());
    }

    #[test]
    fn shrinking_window_shrinks_differences() {
        // field vanishing at t = 0
        let f = |tmax: f64| {
            let times: Vec<f64> = (0..=20).map(|j| tmax * j as f64 / 20.0).collect();
            let xs: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
            let values = times.iter().map(|t| xs.iter().map(|x| vec![t * (3.0 * x).sin()]).collect()).collect();
            TimeField::new(times, xs, values).unwrap()
        };
        let big = f(1.0).dx().unwrap().sup();
        let small = f(0.5).dx().unwrap().sup();
        assert!(small < big);
    }

    proptest! {
        #[test]
        fn seminorm_scales_linearly(c in -5.0f64..5.0, rho in 0.1f64..0.9) {
            let f = grid_field(|t, x| (3.0 * x + t).sin());
            let g = grid_field(|t, x| c * (3.0 * x + t).sin());
            let (a, b) = (holder_x(&f, rho).unwrap(), holder_x(&g, rho).unwrap());
            prop_assert!((b - c.abs() * a).abs() <= 1e-12 * (1.0 + b));
            let (a, b) = (holder_t(&f, rho).unwrap(), holder_t(&g, rho).unwrap());
            prop_assert!((b - c.abs() * a).abs() <= 1e-12 * (1.0 + b));
        }
    }
}
