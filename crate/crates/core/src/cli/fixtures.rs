//! Bundled scenarios. Spoke directions are snapped to multiples of `2⁻³⁶` so
//! that nodes of straight spokes are exact and their difference quotients
//! vanish without rounding.

use std::f64::consts::PI;

use super::format::NetworkFile;
use crate::error::Result;
use crate::geometry::CurveSamples;
use crate::solver::{FlowParams, NetworkState};

/// Amplitude of the normal bump of the bent triod.
pub const BENT_AMPLITUDE: f64 = 0.02;

/// Grid of the bundled triods.
pub const TRIOD_INTERVALS: usize = 64;

/// Every bundled fixture under its file stem.
pub fn bundled() -> Result<Vec<(&'static str, NetworkFile)>> {
    Ok(vec![
        ("triod_equilibrium", triod_equilibrium(TRIOD_INTERVALS, 0.0)?),
        ("triod_bent", triod_bent(TRIOD_INTERVALS, 0.1, BENT_AMPLITUDE)?),
        ("collinear_bad", collinear_bad(32)?),
        ("q4_spatial", q4_spatial(32)?),
        ("triod_fourth_order_mismatch", triod_fourth_order_mismatch(TRIOD_INTERVALS)?),
        ("clamped_curve", clamped_curve(256)?),
    ])
}

pub fn snap(v: f64) -> f64 {
    let scale = 2f64.powi(36);
    (v * scale).round() / scale
}

fn unit_normal(d: &[f64; 2]) -> [f64; 2] {
    let s = d[0].hypot(d[1]);
    [-d[1] / s, d[0] / s]
}

/// `ε sin⁸(π(x − a)/(b − a))` on `[a, b]`, zero elsewhere.
pub fn bump(x: f64, a: f64, b: f64, amplitude: f64) -> f64 {
    if x <= a || x >= b {
        0.0
    } else {
        amplitude * (PI * (x - a) / (b - a)).sin().powi(8)
    }
}

fn triod_directions() -> Vec<[f64; 2]> {
    (0..3)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 3.0;
            [snap(a.cos()), snap(a.sin())]
        })
        .collect()
}

/// Planar spokes `x ↦ x·Pᵢ + ψᵢ(x)·Nᵢ` with `Nᵢ` the unit normal of `Pᵢ`.
fn planar_spokes(
    directions: &[[f64; 2]],
    intervals: usize,
    lambda: f64,
    offsets: &[&dyn Fn(f64) -> f64],
    reparam: &dyn Fn(f64) -> f64,
) -> Result<(NetworkState, FlowParams)> {
    let curves = directions
        .iter()
        .zip(offsets)
        .map(|(p, psi)| {
            let nrm = unit_normal(p);
            CurveSamples::from_fn(2, intervals, |x| {
                let y = reparam(x);
                let h = psi(y);
                vec![y * p[0] + h * nrm[0], y * p[1] + h * nrm[1]]
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let params = FlowParams {
        n: 2,
        q: directions.len(),
        lambda: vec![lambda; directions.len()],
        endpoints: directions.iter().map(|p| p.to_vec()).collect(),
        start: None,
    };
    Ok((NetworkState::new(0.0, curves)?, params))
}

fn file(name: &str, description: &str, state: &NetworkState, params: &FlowParams) -> NetworkFile {
    let mut f = NetworkFile::from_state(state, params);
    f.name = Some(name.to_string());
    f.description = Some(description.to_string());
    f
}

/// Straight 120° triod; stationary for every `λ`.
pub fn triod_equilibrium(intervals: usize, lambda: f64) -> Result<NetworkFile> {
    let zero = |_: f64| 0.0;
    let (s, p) = planar_spokes(&triod_directions(), intervals, lambda, &[&zero, &zero, &zero], &|x| x)?;
    Ok(file("triod_equilibrium", "straight 120 degree triod", &s, &p))
}

/// 120° triod whose spokes carry a normal bump supported in `[0.2, 0.8]`,
/// so every end is straight and the order-zero conditions hold.
pub fn triod_bent(intervals: usize, lambda: f64, amplitude: f64) -> Result<NetworkFile> {
    let (s, p) = triod_bent_state(intervals, lambda, amplitude, &|x| x)?;
    Ok(file("triod_bent", "120 degree triod with interior normal bumps", &s, &p))
}

/// The bent triod sampled through `reparam`, an increasing map of `[0,1]`
/// equal to the identity near both ends.
pub fn triod_bent_state(
    intervals: usize,
    lambda: f64,
    amplitude: f64,
    reparam: &dyn Fn(f64) -> f64,
) -> Result<(NetworkState, FlowParams)> {
    let b0 = move |x: f64| bump(x, 0.2, 0.8, amplitude);
    let b1 = move |x: f64| bump(x, 0.2, 0.8, -0.6 * amplitude);
    let b2 = move |x: f64| bump(x, 0.3, 0.7, 0.8 * amplitude);
    planar_spokes(&triod_directions(), intervals, lambda, &[&b0, &b1, &b2], reparam)
}

/// Two spokes along `±e₁`: the junction tangents span a line.
pub fn collinear_bad(intervals: usize) -> Result<NetworkFile> {
    let zero = |_: f64| 0.0;
    let (s, p) = planar_spokes(&[[1.0, 0.0], [-1.0, 0.0]], intervals, 0.0, &[&zero, &zero], &|x| x)?;
    Ok(file("collinear_bad", "two opposite spokes, collinear at the junction", &s, &p))
}

/// Four spokes towards the vertices of a regular tetrahedron in `R³`, one of
/// them bent out of its plane.
pub fn q4_spatial(intervals: usize) -> Result<NetworkFile> {
    let s3 = snap(1.0 / 3f64.sqrt());
    let dirs = [[s3, s3, s3], [s3, -s3, -s3], [-s3, s3, -s3], [-s3, -s3, s3]];
    // a unit vector orthogonal to the first direction
    let nrm = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let curves = dirs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            CurveSamples::from_fn(3, intervals, |x| {
                let h = if i == 0 { bump(x, 0.25, 0.75, 0.05) } else { 0.0 };
                (0..3).map(|c| x * d[c] + h * nrm[c]).collect()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let params = FlowParams {
        n: 3,
        q: 4,
        lambda: vec![0.1; 4],
        endpoints: dirs.iter().map(|d| d.to_vec()).collect(),
        start: None,
    };
    let state = NetworkState::new(0.0, curves)?;
    Ok(file("q4_spatial", "four spokes to tetrahedron vertices, one bent", &state, &params))
}

/// Straight triod except that curve 0 is displaced along its normal from
/// node 5 on. Node 5 enters only the fourth-derivative stencil at the
/// junction, so only the equality of `∂ₓ⁴fᵢ/|∂ₓfᵢ|⁴` across curves fails.
pub fn triod_fourth_order_mismatch(intervals: usize) -> Result<NetworkFile> {
    let a = 4.0 / intervals as f64;
    let b0 = move |x: f64| bump(x, a, 0.5, 0.05);
    let zero = |_: f64| 0.0;
    let (s, p) = planar_spokes(&triod_directions(), intervals, 0.0, &[&b0, &zero, &zero], &|x| x)?;
    Ok(file(
        "triod_fourth_order_mismatch",
        "triod whose first curve has a different fourth derivative at the junction",
        &s,
        &p,
    ))
}

/// One curve pinned at both ends with `∂ₓ²f = 0` there, straight near the
/// ends and bent in between.
pub fn clamped_curve(intervals: usize) -> Result<NetworkFile> {
    let curve = CurveSamples::from_fn(2, intervals, |x| vec![x, bump(x, 0.2, 0.8, 0.05)])?;
    let params = FlowParams {
        n: 2,
        q: 1,
        lambda: vec![0.5],
        endpoints: vec![vec![1.0, 0.0]],
        start: Some(vec![0.0, 0.0]),
    };
    let state = NetworkState::new(0.0, vec![curve])?;
    Ok(file("clamped_curve", "single curve with both ends pinned", &state, &params))
}

/// Smooth increasing map of `[0,1]`, the identity on `[0, 0.1]` and
/// `[0.9, 1]`.
pub fn interior_stretch(x: f64) -> f64 {
    x + 0.03 * bump(x, 0.1, 0.9, 1.0)
}
