//! Constant-speed reparametrization and the diffeomorphisms relating two
//! parametrized solutions of the same geometric flow.

use crate::error::{Error, Result};
use crate::geometry::{norm, phi_star, CurveSamples, MIN_SPEED};
use crate::interp;
use crate::solver::NetworkState;

/// Smallest admissible forward difference of a diffeomorphism's node values.
pub const MONOTONE_TOL: f64 = 1e-10;

// 5-point Gauss–Legendre rule on [0, 1].
const GAUSS_NODES: [f64; 5] = [
    0.046_910_077_030_668_00,
    0.230_765_344_947_158_5,
    0.5,
    0.769_234_655_052_841_5,
    0.953_089_922_969_332,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_5,
    0.239_314_335_249_683_2,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_2,
    0.118_463_442_528_094_5,
];

/// Orientation-preserving map of `[0,1]` sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffeomorphism {
    pub values: Vec<f64>,
    pub monotone: bool,
}

impl Diffeomorphism {
    pub fn identity(intervals: usize) -> Self {
        let n = intervals as f64;
        Self { values: (0..=intervals).map(|k| k as f64 / n).collect(), monotone: true }
    }

    /// Pins the ends to 0 and 1 and records whether the node values are
    /// strictly increasing.
    pub fn new(mut values: Vec<f64>) -> Self {
        let last = values.len() - 1;
        values[0] = 0.0;
        values[last] = 1.0;
        let monotone = is_monotone(&values);
        Self { values, monotone }
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        interp::eval_scalar(&self.values, x)
    }

    /// Node values of the inverse map.
    pub fn inverse(&self) -> Result<Self> {
        if !self.monotone {
            return Err(Error::Domain("cannot invert a non-monotone map".into()));
        }
        let n = self.intervals() as f64;
        let values = (0..=self.intervals())
            .map(|k| interp::invert_monotone(&self.values, k as f64 / n))
            .collect();
        Ok(Self::new(values))
    }

    /// Largest deviation from the identity at the nodes.
    pub fn distance_to_identity(&self) -> f64 {
        let n = self.intervals() as f64;
        self.values.iter().enumerate().map(|(k, v)| (v - k as f64 / n).abs()).fold(0.0, f64::max)
    }
}

fn is_monotone(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] - w[0] > MONOTONE_TOL)
}

/// Arclength of the piecewise-cubic interpolant of a curve.
struct Arclength<'a> {
    curve: &'a CurveSamples,
    /// Length from 0 to each node.
    cumulative: Vec<f64>,
}

impl<'a> Arclength<'a> {
    fn new(curve: &'a CurveSamples) -> Result<Self> {
        let nn = curve.intervals();
        let h = 1.0 / nn as f64;
        let mut cumulative = Vec::with_capacity(nn + 1);
        cumulative.push(0.0);
        for j in 0..nn {
            let lo = j as f64 * h;
            let piece = Self::integrate(curve, j, lo, lo + h);
            if !(piece > MIN_SPEED * h) {
                return Err(Error::Regularity { curve: 0, node: j, speed: piece / h });
            }
            cumulative.push(cumulative[j] + piece);
        }
        Ok(Self { curve, cumulative })
    }

    fn speed(curve: &CurveSamples, interval: usize, y: f64) -> f64 {
        // evaluate inside the interval so that the cubic of that interval is used
        let nn = curve.intervals() as f64;
        let lo = interval as f64 / nn;
        let hi = (interval + 1) as f64 / nn;
        let y = y.clamp(lo, hi - 1e-15 * hi.max(1.0)).max(lo);
        norm(&interp::eval_slope(curve.coords(), curve.dim(), y))
    }

    fn integrate(curve: &CurveSamples, interval: usize, a: f64, b: f64) -> f64 {
        let w = b - a;
        GAUSS_NODES
            .iter()
            .zip(GAUSS_WEIGHTS)
            .map(|(t, g)| g * Self::speed(curve, interval, a + t * w))
            .sum::<f64>()
            * w
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn at(&self, y: f64) -> f64 {
        let nn = self.curve.intervals();
        let u = (y * nn as f64).clamp(0.0, nn as f64);
        let j = (u.floor() as usize).min(nn - 1);
        let lo = j as f64 / nn as f64;
        if y <= lo {
            return self.cumulative[j];
        }
        self.cumulative[j] + Self::integrate(self.curve, j, lo, y)
    }

    /// Parameter at which the length from 0 equals `target`.
    fn invert(&self, target: f64) -> f64 {
        let nn = self.curve.intervals();
        if target <= 0.0 {
            return 0.0;
        }
        if target >= self.total() {
            return 1.0;
        }
        let j = self.cumulative.partition_point(|v| *v <= target) - 1;
        let n = nn as f64;
        if self.cumulative[j] == target {
            return j as f64 / n;
        }
        let (mut lo, mut hi) = (j as f64 / n, (j + 1) as f64 / n);
        let mut y = lo + (target - self.cumulative[j]) / (self.cumulative[j + 1] - self.cumulative[j]) / n;
        for _ in 0..100 {
            let f = self.at(y) - target;
            if f > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let mut next = y - f / Self::speed(self.curve, j, y);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 1e-16 || hi - lo <= 1e-16 {
                return next;
            }
            y = next;
        }
        y
    }
}

/// Resamples a curve at equal arclength. Returns the new curve together with
/// `φ(x) = 𝓛⁻¹∫₀ˣ|∂ₓf|`, so that the new curve is `f ∘ φ⁻¹`.
pub fn const_speed_reparam(curve: &CurveSamples) -> Result<(CurveSamples, Diffeomorphism)> {
    let arc = Arclength::new(curve)?;
    let length = arc.total();
    let nn = curve.intervals();
    let n = nn as f64;
    let phi = Diffeomorphism::new(arc.cumulative.iter().map(|s| s / length).collect());
    let mut coords = Vec::with_capacity(curve.coords().len());
    for k in 0..=nn {
        let y = arc.invert(k as f64 / n * length);
        if k == 0 || k == nn {
            coords.extend_from_slice(curve.node(k));
        } else {
            coords.extend(interp::eval(curve.coords(), curve.dim(), y));
        }
    }
    Ok((CurveSamples::new(curve.dim(), coords)?, phi))
}

/// `φ₀` with `b(x) = a(φ₀(x))` for two parametrizations of the same curve,
/// found by matching normalized arclength.
pub fn arclength_matching(a: &CurveSamples, b: &CurveSamples) -> Result<Diffeomorphism> {
    let (arc_a, arc_b) = (Arclength::new(a)?, Arclength::new(b)?);
    let (la, lb) = (arc_a.total(), arc_b.total());
    let values = arc_b.cumulative.iter().map(|s| arc_a.invert(s / lb * la)).collect();
    Ok(Diffeomorphism::new(values))
}

/// Node values of a scalar field on every curve of every snapshot.
pub type FieldSeries = Vec<Vec<Vec<f64>>>;

/// Tangential speeds `φ*` of a trajectory computed by the solver.
pub fn tangential_speeds(trajectory: &[NetworkState], lambda: &[f64]) -> Result<FieldSeries> {
    trajectory
        .iter()
        .map(|s| Ok(s.bundles()?.iter().zip(lambda).map(|(b, l)| phi_star(b, *l)).collect()))
        .collect()
}

fn speeds(trajectory: &[NetworkState]) -> Result<FieldSeries> {
    trajectory
        .iter()
        .map(|s| Ok(s.bundles()?.into_iter().map(|b| b.speed).collect()))
        .collect()
}

/// Integrates `∂ₜφ = (φ_other(t,x) − φ_ref(t,φ)) / |∂ₓf(t,φ)|` for every
/// curve and node with the classical four-stage scheme, one stage set per
/// snapshot interval. Returns one diffeomorphism per curve and snapshot.
///
/// On each interval the fields are held at the later snapshot, the velocity
/// an implicit Euler step actually realizes. Interpolating from the earlier
/// snapshot instead drags in the stiff initial layer: speeds there can be
/// orders of magnitude above those one step later.
pub fn tangential_ode(
    reference: &[NetworkState],
    phi_ref: &FieldSeries,
    phi_other: &FieldSeries,
    initial: &[Diffeomorphism],
) -> Result<Vec<Vec<Diffeomorphism>>> {
    if reference.is_empty() || phi_ref.len() != reference.len() || phi_other.len() != reference.len() {
        return Err(Error::DimensionMismatch("trajectory and speed fields differ in length".into()));
    }
    let q = reference[0].q();
    if initial.len() != q {
        return Err(Error::DimensionMismatch(format!("{} initial maps for {q} curves", initial.len())));
    }
    let speed = speeds(reference)?;
    let nn = reference[0].intervals();
    let mut out = vec![initial.to_vec()];
    let mut current: Vec<Vec<f64>> = initial.iter().map(|d| d.values.clone()).collect();
    for k in 0..reference.len() - 1 {
        let h = reference[k + 1].time - reference[k].time;
        for i in 0..q {
            let rhs = |x_node: usize, y: f64| {
                let at = |f: &FieldSeries| interp::eval_scalar(&f[k + 1][i], y);
                (phi_other[k + 1][i][x_node] - at(phi_ref)) / at(&speed)
            };
            let phi = &mut current[i];
            for (x, y) in phi.iter_mut().enumerate().take(nn).skip(1) {
                let y0 = *y;
                let k1 = rhs(x, y0.clamp(0.0, 1.0));
                let k2 = rhs(x, (y0 + 0.5 * h * k1).clamp(0.0, 1.0));
                let k3 = rhs(x, (y0 + 0.5 * h * k2).clamp(0.0, 1.0));
                let k4 = rhs(x, (y0 + h * k3).clamp(0.0, 1.0));
                *y = y0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            if !is_monotone(phi) {
                return Err(Error::DiffeoBreakdown { curve: i, time: reference[k + 1].time });
            }
        }
        out.push(current.iter().map(|v| Diffeomorphism::new(v.clone())).collect());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub pass: bool,
    /// `sup |b(t,x) − a(t,φ(t,x))|` over snapshots, curves and nodes.
    pub deviation: f64,
    pub diffeomorphisms: Vec<Vec<Diffeomorphism>>,
}

/// Certifies that two solver trajectories started from the same geometric
/// network trace the same sets. Snapshots must share their times and grid.
pub fn geometric_equivalence(a: &[NetworkState], b: &[NetworkState], lambda: &[f64], tol: f64) -> Result<EquivalenceReport> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!("trajectories have {} and {} snapshots", a.len(), b.len())));
    }
    for (k, (sa, sb)) in a.iter().zip(b).enumerate() {
        if sa.q() != sb.q() || sa.dim() != sb.dim() || sa.intervals() != sb.intervals() {
            return Err(Error::DimensionMismatch(format!("snapshot {k} differs in shape")));
        }
        if (sa.time - sb.time).abs() > 1e-12 * (1.0 + sa.time.abs()) {
            return Err(Error::DimensionMismatch(format!("snapshot {k} at times {} and {}", sa.time, sb.time)));
        }
    }
    let initial = a[0]
        .curves
        .iter()
        .zip(&b[0].curves)
        .enumerate()
        .map(|(i, (ca, cb))| arclength_matching(ca, cb).map_err(|e| e.for_curve(i)))
        .collect::<Result<Vec<_>>>()?;
    let diffeos = tangential_ode(a, &tangential_speeds(a, lambda)?, &tangential_speeds(b, lambda)?, &initial)?;
    let mut deviation: f64 = 0.0;
    for ((sa, sb), maps) in a.iter().zip(b).zip(&diffeos) {
        for ((ca, cb), phi) in sa.curves.iter().zip(&sb.curves).zip(maps) {
            for (x, y) in phi.values.iter().enumerate() {
                let p = interp::eval(ca.coords(), ca.dim(), *y);
                let d = p.iter().zip(cb.node(x)).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
                deviation = deviation.max(d);
            }
        }
    }
    Ok(EquivalenceReport { pass: deviation <= tol, deviation, diffeomorphisms: diffeos })
}
