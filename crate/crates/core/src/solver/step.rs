//! Fixed-point steps and the time loop.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::assembly::{Layout, StepOperator};
use super::{FlowParams, NetworkState, SolverConfig};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::junction::{span_dimension, RANK_TOL};

/// Increments up to this multiple of `picard_tol` are accepted once they
/// stop contracting.
pub const STALL_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuardVerdict {
    Ok,
    Violation { curve: usize, node: usize, speed: f64 },
}

/// Checks `min speed ≥ factor · delta0`.
pub fn regularity_guard(state: &NetworkState, delta0: f64, factor: f64) -> GuardVerdict {
    match state.min_speed() {
        Ok((speed, curve, node)) if speed < factor * delta0 => GuardVerdict::Violation { curve, node, speed },
        Ok(_) => GuardVerdict::Ok,
        Err(Error::Regularity { curve, node, speed }) => GuardVerdict::Violation { curve, node, speed },
        Err(_) => GuardVerdict::Violation { curve: 0, node: 0, speed: f64::NAN },
    }
}

fn check_nc(state: &NetworkState) -> Result<()> {
    if state.q() < 2 {
        return Ok(());
    }
    let tangents: Vec<Vec<f64>> = state
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let d1 = c.derivative(1, 0);
            let s = crate::geometry::norm(&d1);
            if !(s >= crate::geometry::MIN_SPEED) {
                return Err(Error::Regularity { curve: i, node: 0, speed: s });
            }
            Ok(d1.iter().map(|v| v / s).collect())
        })
        .collect::<Result<_>>()?;
    let span = span_dimension(&tangents, RANK_TOL);
    if span < 2 {
        return Err(Error::NonCollinear { span });
    }
    Ok(())
}

/// Inner-iteration statistics of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    pub increment: f64,
}

/// Advances a network step by step with fixed parameters.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: FlowParams,
    cfg: SolverConfig,
    delta0: f64,
    initial_op: Option<StepOperator>,
}

impl Stepper {
    pub fn new(initial: &NetworkState, params: &FlowParams, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        params.check_state(initial)?;
        let (delta0, _, _) = initial.min_speed()?;
        let initial_op = if cfg.relinearize_every_step {
            None
        } else {
            Some(StepOperator::new(initial, params, cfg.dt)?)
        };
        Ok(Self { params: params.clone(), cfg: cfg.clone(), delta0, initial_op })
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    /// One implicit step from `state`, with time set to `time`.
    pub fn step_to(&self, state: &NetworkState, time: f64) -> Result<(NetworkState, StepReport)> {
        check_nc(state)?;
        let fresh;
        let op = match &self.initial_op {
            Some(op) => op,
            None => {
                fresh = StepOperator::new(state, &self.params, self.cfg.dt)?;
                &fresh
            }
        };
        let layout = Layout::of(state);
        let mut iterate = state.clone();
        let mut increment = f64::INFINITY;
        for it in 1..=self.cfg.picard_max {
            let rhs = op.rhs(state, &iterate, &self.params)?;
            let x = op.solve(&rhs)?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NoConvergence { iterations: it, increment: f64::INFINITY });
            }
            let next = layout.unpack(&x, time)?;
            let previous = increment;
            increment = next.max_distance(&iterate);
            iterate = next;
            // below the roundoff floor of large grids the increments stop shrinking
            let stalled = increment < STALL_FACTOR * self.cfg.picard_tol && increment > 0.5 * previous;
            if increment < self.cfg.picard_tol || stalled {
                if let GuardVerdict::Violation { curve, node, speed } =
                    regularity_guard(&iterate, self.delta0, self.cfg.delta_guard_factor)
                {
                    return Err(Error::Regularity { curve, node, speed });
                }
                return Ok((iterate, StepReport { iterations: it, increment }));
            }
        }
        Err(Error::NoConvergence { iterations: self.cfg.picard_max, increment })
    }

    pub fn step(&self, state: &NetworkState) -> Result<(NetworkState, StepReport)> {
        self.step_to(state, state.time + self.cfg.dt)
    }
}

/// One fixed-point step with coefficients frozen at `state` and the
/// regularity guard measured against `state` itself.
pub fn picard_step(state: &NetworkState, params: &FlowParams, cfg: &SolverConfig) -> Result<NetworkState> {
    let mut cfg = cfg.clone();
    cfg.relinearize_every_step = true;
    Ok(Stepper::new(state, params, &cfg)?.step(state)?.0)
}

/// Receives every accepted state, including the initial one as step 0.
pub trait Observer {
    fn observe(&mut self, step: usize, time: f64, state: &NetworkState, record: &DiagnosticsRecord);
}

impl<F: FnMut(usize, f64, &NetworkState, &DiagnosticsRecord)> Observer for F {
    fn observe(&mut self, step: usize, time: f64, state: &NetworkState, record: &DiagnosticsRecord) {
        self(step, time, state, record)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preflight {
    /// Refuse to start unless the order-zero compatibility conditions and
    /// non-collinearity hold.
    #[default]
    Strict,
    /// Record failed conditions as warnings and run anyway.
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveOptions {
    pub preflight: Preflight,
    /// Keep every `stride`-th state (the first and last are always kept).
    pub stride: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { preflight: Preflight::Strict, stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub state: NetworkState,
}

/// States and diagnostics of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    /// One record per accepted step, starting with the initial state.
    pub records: Vec<DiagnosticsRecord>,
    pub reports: Vec<StepReport>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn last_state(&self) -> Option<&NetworkState> {
        self.snapshots.last().map(|s| &s.state)
    }
}

/// A run that stopped early: the error, when it happened and what was
/// computed up to then.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveFailure {
    pub error: Error,
    pub time: f64,
    pub last_good: Option<NetworkState>,
    pub trajectory: Trajectory,
}

impl fmt::Display for EvolveFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at t = {}: {}", self.time, self.error)
    }
}

impl std::error::Error for EvolveFailure {}

/// Evolves `initial` until `cfg.t_end`.
pub fn evolve(
    initial: &NetworkState,
    params: &FlowParams,
    cfg: &SolverConfig,
    options: &EvolveOptions,
    observer: &mut dyn Observer,
) -> std::result::Result<Trajectory, EvolveFailure> {
    let mut traj = Trajectory::default();
    let fail = |error: Error, time: f64, last: Option<NetworkState>, traj: Trajectory| EvolveFailure {
        error,
        time,
        last_good: last,
        trajectory: traj,
    };
    let report = crate::wellposed::preflight(initial, params);
    match report {
        Ok(warnings) if !warnings.is_empty() => match options.preflight {
            Preflight::Strict => {
                let error = warnings.into_iter().next().unwrap();
                return Err(fail(error, initial.time, None, traj));
            }
            Preflight::Warn => traj.warnings.extend(warnings.iter().map(|w| w.to_string())),
        },
        Ok(_) => {}
        Err(error) => return Err(fail(error, initial.time, None, traj)),
    }
    let stepper = match Stepper::new(initial, params, cfg) {
        Ok(s) => s,
        Err(error) => return Err(fail(error, initial.time, None, traj)),
    };
    let record = match DiagnosticsRecord::compute(initial, params) {
        Ok(r) => r,
        Err(error) => return Err(fail(error, initial.time, None, traj)),
    };
    observer.observe(0, initial.time, initial, &record);
    traj.records.push(record);
    traj.snapshots.push(Snapshot { step: 0, state: initial.clone() });
    let steps = ((cfg.t_end - initial.time) / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let stride = options.stride.max(1);
    let mut state = initial.clone();
    for k in 1..=steps {
        let time = initial.time + k as f64 * cfg.dt;
        let outcome = stepper
            .step_to(&state, time)
            .and_then(|(next, rep)| DiagnosticsRecord::compute(&next, params).map(|r| (next, rep, r)));
        let (next, rep, record) = match outcome {
            Ok(v) => v,
            Err(error) => {
                if traj.snapshots.last().map(|s| s.step) != Some(k - 1) {
                    traj.snapshots.push(Snapshot { step: k - 1, state: state.clone() });
                }
                return Err(fail(error, time, Some(state), traj));
            }
        };
        observer.observe(k, time, &next, &record);
        traj.records.push(record);
        traj.reports.push(rep);
        if k % stride == 0 || k == steps {
            traj.snapshots.push(Snapshot { step: k, state: next.clone() });
        }
        state = next;
    }
    Ok(traj)
}
