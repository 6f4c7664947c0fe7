//! Time evolution of a network by implicit Euler steps, each solved as the
//! fixed point of a frozen-coefficient linear problem.

pub mod assembly;
pub mod banded;
pub mod step;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{finite_differences, CurveSamples, DerivativeBundle};

pub use assembly::{assemble_step, Layout, LinearStepSystem, RowKind, StepOperator};
pub use step::{
    evolve, picard_step, regularity_guard, EvolveFailure, EvolveOptions, GuardVerdict, Observer,
    Preflight, Snapshot, StepReport, Stepper, Trajectory,
};

/// Curves of a network at one instant. All curves share dimension and grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub time: f64,
    pub curves: Vec<CurveSamples>,
}

impl NetworkState {
    pub fn new(time: f64, curves: Vec<CurveSamples>) -> Result<Self> {
        let first = curves
            .first()
            .ok_or_else(|| Error::Config("a network needs at least one curve".into()))?;
        let (n, intervals) = (first.dim(), first.intervals());
        for (i, c) in curves.iter().enumerate() {
            if c.dim() != n || c.intervals() != intervals {
                return Err(Error::DimensionMismatch(format!(
                    "curve {i} has dimension {} and {} intervals, expected {n} and {intervals}",
                    c.dim(),
                    c.intervals()
                )));
            }
        }
        Ok(Self { time, curves })
    }

    pub fn q(&self) -> usize {
        self.curves.len()
    }

    pub fn dim(&self) -> usize {
        self.curves[0].dim()
    }

    pub fn intervals(&self) -> usize {
        self.curves[0].intervals()
    }

    pub fn bundles(&self) -> Result<Vec<DerivativeBundle>> {
        self.curves
            .iter()
            .enumerate()
            .map(|(i, c)| finite_differences(c).map_err(|e| e.for_curve(i)))
            .collect()
    }

    /// Smallest speed over all curves and nodes, with its location.
    pub fn min_speed(&self) -> Result<(f64, usize, usize)> {
        let mut best = (f64::INFINITY, 0, 0);
        for (i, b) in self.bundles()?.iter().enumerate() {
            for (k, s) in b.speed.iter().enumerate() {
                if *s < best.0 {
                    best = (*s, i, k);
                }
            }
        }
        Ok(best)
    }

    /// Largest node displacement between two states on the same grid.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.curves
            .iter()
            .zip(&other.curves)
            .flat_map(|(a, b)| a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Physical parameters: penalization weights and fixed far endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub n: usize,
    pub q: usize,
    pub lambda: Vec<f64>,
    pub endpoints: Vec<Vec<f64>>,
    /// For a single curve: pins `f(0)` here instead of a junction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("ambient dimension {} must be at least 2", self.n)));
        }
        if self.q == 0 {
            return Err(Error::Config("curve count must be positive".into()));
        }
        if self.lambda.len() != self.q || self.endpoints.len() != self.q {
            return Err(Error::DimensionMismatch(format!(
                "{} curves but {} weights and {} endpoints",
                self.q,
                self.lambda.len(),
                self.endpoints.len()
            )));
        }
        if let Some(i) = self.lambda.iter().position(|l| !(*l >= 0.0) || !l.is_finite()) {
            return Err(Error::Config(format!("lambda[{i}] must be finite and nonnegative")));
        }
        if let Some(i) = self.endpoints.iter().position(|p| p.len() != self.n) {
            return Err(Error::DimensionMismatch(format!("endpoint {i} must have {} components", self.n)));
        }
        match (&self.start, self.q) {
            (Some(s), 1) if s.len() == self.n => Ok(()),
            (Some(_), 1) => Err(Error::DimensionMismatch(format!("start must have {} components", self.n))),
            (Some(_), _) => Err(Error::Config("a pinned start is only allowed for a single curve".into())),
            (None, 1) => Err(Error::Config("a single curve needs a pinned start point".into())),
            (None, _) => Ok(()),
        }
    }

    pub fn check_state(&self, state: &NetworkState) -> Result<()> {
        self.validate()?;
        if state.q() != self.q || state.dim() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "state has {} curves in R^{}, parameters expect {} in R^{}",
                state.q(),
                state.dim(),
                self.q,
                self.n
            )));
        }
        Ok(())
    }
}

/// Numerical knobs of the time stepper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub delta_guard_factor: f64,
    pub relinearize_every_step: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-5,
            t_end: 0.01,
            picard_tol: 1e-12,
            picard_max: 50,
            delta_guard_factor: 0.5,
            relinearize_every_step: true,
        }
    }
}

impl SolverConfig {
    /// `dt = 0.1 (Δx)²` for a grid with `intervals` intervals.
    pub fn default_dt(intervals: usize) -> f64 {
        0.1 / (intervals as f64).powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        if !(self.delta_guard_factor > 0.0 && self.delta_guard_factor < 1.0) {
            return Err(Error::Config("delta_guard_factor must lie in (0, 1)".into()));
        }
        if self.picard_max < 1 {
            return Err(Error::Config("picard_max must be at least 1".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Config("picard_tol must be positive".into()));
        }
        Ok(())
    }
}
