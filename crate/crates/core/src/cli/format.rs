//! On-disk formats: networks, run configurations and trajectories as JSON.
//!
//! Floats are written in the shortest form that parses back to the same
//! bits, so a written network reads back identically.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CurveSamples;
use crate::solver::{FlowParams, NetworkState, Preflight, SolverConfig};

/// A network with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    pub q: usize,
    pub lambda: Vec<f64>,
    pub endpoints: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    /// `q` lists of `N + 1` points.
    pub curves: Vec<Vec<Vec<f64>>>,
}

impl NetworkFile {
    pub fn from_state(state: &NetworkState, params: &FlowParams) -> Self {
        Self {
            name: None,
            description: None,
            n: params.n,
            q: params.q,
            lambda: params.lambda.clone(),
            endpoints: params.endpoints.clone(),
            start: params.start.clone(),
            curves: state.curves.iter().map(CurveSamples::points).collect(),
        }
    }

    pub fn params(&self) -> FlowParams {
        FlowParams {
            n: self.n,
            q: self.q,
            lambda: self.lambda.clone(),
            endpoints: self.endpoints.clone(),
            start: self.start.clone(),
        }
    }

    /// Checks the shape of every field and builds the state at `t = 0`.
    pub fn to_network(&self) -> Result<(NetworkState, FlowParams)> {
        let params = self.params();
        params.validate()?;
        if self.curves.len() != self.q {
            return Err(Error::Parse(format!("field `curves`: {} curves listed, q = {}", self.curves.len(), self.q)));
        }
        let nodes = self.curves[0].len();
        let mut samples = Vec::with_capacity(self.q);
        for (i, curve) in self.curves.iter().enumerate() {
            if curve.len() != nodes {
                return Err(Error::Parse(format!(
                    "field `curves[{i}]`: {} points, curve 0 has {nodes}",
                    curve.len()
                )));
            }
            if let Some(k) = curve.iter().position(|p| p.len() != self.n) {
                return Err(Error::Parse(format!(
                    "field `curves[{i}][{k}]`: {} components, n = {}",
                    curve[k].len(),
                    self.n
                )));
            }
            samples.push(CurveSamples::from_points(curve).map_err(|e| Error::Parse(format!("field `curves[{i}]`: {e}")))?);
        }
        Ok((NetworkState::new(0.0, samples)?, params))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Keep every `stride`-th state in the trajectory file.
    pub stride: usize,
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
    pub svg_width: u32,
    pub svg_height: u32,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { stride: 1, csv: true, json: true, svg: false, svg_width: 800, svg_height: 800 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub preflight: Preflight,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.output.stride == 0 {
            return Err(Error::Config("output.stride must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub step: usize,
    pub time: f64,
    pub curves: Vec<Vec<Vec<f64>>>,
}

/// Kept states of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub params: FlowParams,
    pub dt: f64,
    pub snapshots: Vec<SnapshotRecord>,
}

impl TrajectoryFile {
    pub fn states(&self) -> Result<Vec<NetworkState>> {
        self.snapshots
            .iter()
            .map(|s| {
                let curves = s.curves.iter().map(|c| CurveSamples::from_points(c)).collect::<Result<Vec<_>>>()?;
                let state = NetworkState::new(s.time, curves)?;
                self.params.check_state(&state)?;
                Ok(state)
            })
            .collect()
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_network(path: &Path) -> Result<(NetworkState, FlowParams)> {
    read_json::<NetworkFile>(path)?
        .to_network()
        .map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => Error::Parse(format!("{}: {other}", path.display())),
        })
}

/// Polyline frame of a planar network.
pub fn svg_frame(state: &NetworkState, width: u32, height: u32) -> Result<String> {
    if state.dim() != 2 {
        return Err(Error::Config(format!("SVG frames need a planar network, got n = {}", state.dim())));
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in &state.curves {
        for p in c.coords().chunks(2) {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let margin = 0.05 * span;
    let scale = (width.min(height) as f64) / (span + 2.0 * margin);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    out.push_str(&format!("<!-- t = {:e} -->\n", state.time));
    for c in &state.curves {
        let pts: Vec<String> = c
            .coords()
            .chunks(2)
            .map(|p| {
                let x = (p[0] - lo[0] + margin) * scale;
                let y = height as f64 - (p[1] - lo[1] + margin) * scale;
                format!("{x:.3},{y:.3}")
            })
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_errors_name_the_field() {
        let mut f = super::super::fixtures::triod_equilibrium(8, 0.0).unwrap();
        f.curves[1].pop();
        let err = f.to_network().unwrap_err().to_string();
        assert!(err.contains("curves[1]"), "{err}");
        let mut f = super::super::fixtures::triod_equilibrium(8, 0.0).unwrap();
        f.curves[2][3].push(0.0);
        let err = f.to_network().unwrap_err().to_string();
        assert!(err.contains("curves[2][3]"), "{err}");
    }

    #[test]
    fn missing_field_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\n  \"n\": 2,\n  \"q\": 3\n}\n").unwrap();
        let err = read_network(&path).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("lambda") && err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn config_defaults_fill_missing_fields() {
        let cfg: RunConfig = serde_json::from_str("{\"solver\": {\"dt\": 1e-6}, \"preflight\": \"warn\"}").unwrap();
        assert_eq!(cfg.solver.dt, 1e-6);
        assert_eq!(cfg.solver.picard_max, SolverConfig::default().picard_max);
        assert_eq!(cfg.preflight, Preflight::Warn);
        assert_eq!(cfg.output, OutputConfig::default());
        assert!(serde_json::from_str::<RunConfig>("{\"solvr\": {}}").is_err());
    }

    #[test]
    fn svg_rejects_spatial_networks() {
        let (s, _) = super::super::fixtures::q4_spatial(8).unwrap().to_network().unwrap();
        assert!(svg_frame(&s, 100, 100).is_err());
        let (s, _) = super::super::fixtures::triod_equilibrium(8, 0.0).unwrap().to_network().unwrap();
        let svg = svg_frame(&s, 100, 100).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
