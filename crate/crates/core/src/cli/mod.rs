//! File formats, bundled fixtures and the `elnet` subcommands. Each command
//! writes its report to the given sink and returns the process exit code.

pub mod fixtures;
pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::Complex;
use serde::Serialize;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::geometry::CurveSamples;
use crate::interp;
use crate::junction::{nc_value, span_dimension, RANK_TOL};
use crate::repar::geometric_equivalence;
use crate::solver::{evolve, EvolveOptions, FlowParams, NetworkState, Preflight, SolverConfig, Trajectory};
use crate::wellposed::{check_compat_order0, check_compat_order1, junction_complementary, parabolicity_margin, CompatReport, COMPAT_TOL};

use format::{read_json, read_network, svg_frame, write_json, NetworkFile, RunConfig, SnapshotRecord, TrajectoryFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Exit code for an error escaping a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse(_) => EXIT_IO,
        Error::LevelFailed { source, .. } => exit_code(source),
        Error::Config(_) | Error::DimensionMismatch(_) | Error::NonCollinear { .. } | Error::Compatibility(_) => {
            EXIT_VALIDATION
        }
        _ => EXIT_SOLVER,
    }
}

fn fail(log: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(log, "error: {e}");
    exit_code(e)
}

/// Everything `check` evaluates on an initial network.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub nc: f64,
    pub span_dimension: usize,
    pub parabolicity_margin: f64,
    /// Complementing condition at the junction, sampled at `p = 1`.
    pub junction_complementary: Option<bool>,
    pub order0: CompatReport,
    pub order1: CompatReport,
    pub pass: bool,
}

pub fn check_network(state: &NetworkState, params: &FlowParams) -> Result<CheckReport> {
    let bundles = state.bundles()?;
    let tangents: Vec<Vec<f64>> = bundles.iter().map(|b| b.jet(0).tangent()).collect();
    let junction = params.start.is_none();
    let span = span_dimension(&tangents, RANK_TOL);
    let nc = if tangents.len() > 1 { nc_value(&tangents) } else { 1.0 };
    let margin = parabolicity_margin(&bundles.iter().map(|b| b.speed.clone()).collect::<Vec<_>>())?;
    let complementary = if junction {
        let d: Vec<f64> = bundles.iter().map(|b| 1.0 / b.speed[0]).collect();
        Some(junction_complementary(&tangents, &d, Complex::new(1.0, 0.0), 1e-8)?)
    } else {
        None
    };
    let order0 = check_compat_order0(state, params, COMPAT_TOL)?;
    let order1 = check_compat_order1(state, params, COMPAT_TOL)?;
    let pass = (!junction || span >= 2) && complementary != Some(false) && order0.pass && order1.pass;
    Ok(CheckReport {
        nc,
        span_dimension: span,
        parabolicity_margin: margin,
        junction_complementary: complementary,
        order0,
        order1,
        pass,
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `elnet check`: compatibility, non-collinearity and well-posedness of
/// the initial network.
pub fn cmd_check(network: &Path, out: Option<&Path>, log: &mut dyn Write) -> i32 {
    let run = || -> Result<CheckReport> {
        let (state, params) = read_network(network)?;
        let report = check_network(&state, &params)?;
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            write_json(&dir.join("check.json"), &report)?;
        }
        Ok(report)
    };
    let report = match run() {
        Ok(r) => r,
        Err(e) => return fail(log, &e),
    };
    let junction = report.junction_complementary.is_some();
    let _ = writeln!(log, "network: {}", network.display());
    if junction {
        let nc_ok = report.span_dimension >= 2;
        let _ = writeln!(
            log,
            "{} non-collinearity (NC): nc = {:.6}, span dimension {}",
            verdict(nc_ok),
            report.nc,
            report.span_dimension
        );
        if let Some(c) = report.junction_complementary {
            let _ = writeln!(log, "{} complementing condition at the junction", verdict(c));
        }
    }
    let _ = writeln!(log, "parabolicity margin: {:e}", report.parabolicity_margin);
    for (title, rep) in [("order 0", &report.order0), ("order 1", &report.order1)] {
        let _ = writeln!(log, "{} compatibility {title}", verdict(rep.pass));
        for f in rep.failures() {
            let _ = writeln!(log, "  {}", describe_record(f));
        }
    }
    let _ = writeln!(log, "{}", verdict(report.pass));
    if report.pass {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

fn describe_record(r: &crate::wellposed::CompatRecord) -> String {
    let mut s = r.condition.clone();
    match (r.curve, r.other) {
        (Some(i), Some(j)) => s.push_str(&format!(" on pair ({i}, {j})")),
        (Some(i), None) => s.push_str(&format!(" on curve {i}")),
        _ => {}
    }
    match r.endpoint {
        Some(crate::wellposed::Endpoint::Junction) => s.push_str(" at x = 0"),
        Some(crate::wellposed::Endpoint::Fixed) => s.push_str(" at x = 1"),
        None => {}
    }
    format!("{s}: residual {:e}, tolerance {:e}", r.residual, r.tolerance)
}

/// Command-line overrides of a run configuration.
#[derive(Debug, Clone, Default)]
pub struct SimulateOverrides {
    pub preflight: Option<Preflight>,
    pub svg: bool,
    pub stride: Option<usize>,
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let cfg = match path {
        Some(p) => read_json(p)?,
        None => RunConfig::default(),
    };
    cfg.validate().map_err(|e| match path {
        Some(p) => Error::Parse(format!("{}: {e}", p.display())),
        None => e,
    })?;
    Ok(cfg)
}

fn trajectory_file(traj: &Trajectory, params: &FlowParams, dt: f64) -> TrajectoryFile {
    TrajectoryFile {
        params: params.clone(),
        dt,
        snapshots: traj
            .snapshots
            .iter()
            .map(|s| SnapshotRecord {
                step: s.step,
                time: s.state.time,
                curves: s.state.curves.iter().map(CurveSamples::points).collect(),
            })
            .collect(),
    }
}

fn csv(records: &[DiagnosticsRecord]) -> String {
    let mut text = String::new();
    if let Some(first) = records.first() {
        text.push_str(&first.csv_header());
        text.push('\n');
    }
    for r in records {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    text
}

fn write_outputs(dir: &Path, cfg: &RunConfig, traj: &Trajectory, params: &FlowParams) -> Result<()> {
    fs::create_dir_all(dir)?;
    if cfg.output.csv {
        fs::write(dir.join("diagnostics.csv"), csv(&traj.records))?;
    }
    if cfg.output.json {
        write_json(&dir.join("trajectory.json"), &trajectory_file(traj, params, cfg.solver.dt))?;
        if let Some(last) = traj.last_state() {
            write_json(&dir.join("final.json"), &NetworkFile::from_state(last, params))?;
        }
    }
    if cfg.output.svg {
        let frames = dir.join("frames");
        fs::create_dir_all(&frames)?;
        for s in &traj.snapshots {
            let svg = svg_frame(&s.state, cfg.output.svg_width, cfg.output.svg_height)?;
            fs::write(frames.join(format!("frame_{:06}.svg", s.step)), svg)?;
        }
    }
    Ok(())
}

/// `elnet simulate`: evolves a network and writes snapshots, diagnostics
/// and optional SVG frames to `out`.
pub fn cmd_simulate(
    network: &Path,
    config: Option<&Path>,
    overrides: &SimulateOverrides,
    out: &Path,
    log: &mut dyn Write,
) -> i32 {
    let setup = || -> Result<(NetworkState, FlowParams, RunConfig)> {
        let (state, params) = read_network(network)?;
        let mut cfg = load_config(config)?;
        if let Some(p) = overrides.preflight {
            cfg.preflight = p;
        }
        if let Some(k) = overrides.stride {
            if k == 0 {
                return Err(Error::Config("--stride must be at least 1".into()));
            }
            cfg.output.stride = k;
        }
        cfg.output.svg |= overrides.svg;
        if cfg.output.svg && params.n != 2 {
            return Err(Error::Config(format!("SVG frames are only available for n = 2, this network has n = {}", params.n)));
        }
        Ok((state, params, cfg))
    };
    let (state, params, cfg) = match setup() {
        Ok(v) => v,
        Err(e) => return fail(log, &e),
    };
    let options = EvolveOptions { preflight: cfg.preflight, stride: cfg.output.stride };
    let mut quiet = |_: usize, _: f64, _: &NetworkState, _: &DiagnosticsRecord| {};
    match evolve(&state, &params, &cfg.solver, &options, &mut quiet) {
        Ok(traj) => {
            for w in &traj.warnings {
                let _ = writeln!(log, "warning: {w}");
            }
            if let Err(e) = write_outputs(out, &cfg, &traj, &params) {
                return fail(log, &e);
            }
            let last = traj.records.last();
            let _ = writeln!(
                log,
                "completed {} steps to t = {}; energy {:e} -> {:e}",
                traj.records.len().saturating_sub(1),
                last.map_or(state.time, |r| r.time),
                traj.records.first().map_or(f64::NAN, |r| r.energy_total),
                last.map_or(f64::NAN, |r| r.energy_total)
            );
            EXIT_OK
        }
        Err(failure) => {
            let before_start = failure.trajectory.records.is_empty();
            if !before_start {
                if let Err(e) = write_outputs(out, &cfg, &failure.trajectory, &params) {
                    let _ = writeln!(log, "error: {e}");
                }
                if let Some(last) = &failure.last_good {
                    let _ = fs::create_dir_all(out);
                    let _ = write_json(&out.join("last_good.json"), &NetworkFile::from_state(last, &params));
                }
            }
            let _ = writeln!(log, "error at t = {}: {}", failure.time, failure.error);
            if before_start {
                exit_code(&failure.error)
            } else {
                EXIT_SOLVER
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Refinement {
    /// Levels are interval counts `N` at fixed `dt`.
    Space,
    /// Levels are divisors `m` of `dt` at fixed `N`.
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub error: f64,
    /// Order against the previous level.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub mode: Refinement,
    pub reference: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `−log error` against `log level`.
    pub fitted_order: f64,
}

/// Samples every curve at a new interval count through the local cubic
/// interpolant (exact subsampling when the counts divide).
pub fn resample(state: &NetworkState, intervals: usize) -> Result<NetworkState> {
    let curves = state
        .curves
        .iter()
        .map(|c| CurveSamples::from_fn(c.dim(), intervals, |x| interp::eval(c.coords(), c.dim(), x)))
        .collect::<Result<Vec<_>>>()?;
    NetworkState::new(state.time, curves)
}

fn final_state(state: &NetworkState, params: &FlowParams, cfg: &SolverConfig) -> Result<NetworkState> {
    let options = EvolveOptions { preflight: Preflight::Warn, stride: usize::MAX };
    let mut quiet = |_: usize, _: f64, _: &NetworkState, _: &DiagnosticsRecord| {};
    let traj = evolve(state, params, cfg, &options, &mut quiet).map_err(|f| f.error)?;
    Ok(traj.last_state().cloned().unwrap_or_else(|| state.clone()))
}

/// Largest node distance after sampling `fine` at the nodes of `coarse`.
fn level_error(coarse: &NetworkState, fine: &NetworkState) -> f64 {
    let nn = coarse.intervals();
    let mut err: f64 = 0.0;
    for (c, f) in coarse.curves.iter().zip(&fine.curves) {
        for k in 0..=nn {
            let p = interp::eval(f.coords(), f.dim(), k as f64 / nn as f64);
            let d = p.iter().zip(c.node(k)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            err = err.max(d);
        }
    }
    err
}

/// Runs the same problem at each level and at the reference, and measures
/// the final-state error of each level against the reference.
pub fn convergence_study(
    state: &NetworkState,
    params: &FlowParams,
    cfg: &SolverConfig,
    mode: Refinement,
    levels: &[usize],
    reference: usize,
) -> Result<ConvergenceTable> {
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) || levels.last() >= Some(&reference) {
        return Err(Error::Config("levels must be strictly increasing and below the reference".into()));
    }
    if levels[0] == 0 {
        return Err(Error::Config("levels must be positive".into()));
    }
    let run = |level: usize| -> Result<NetworkState> {
        let (s, c) = match mode {
            Refinement::Space => (resample(state, level)?, cfg.clone()),
            Refinement::Time => (state.clone(), SolverConfig { dt: cfg.dt / level as f64, ..cfg.clone() }),
        };
        final_state(&s, params, &c).map_err(|e| Error::LevelFailed { level, source: Box::new(e) })
    };
    let fine = run(reference)?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &level in levels {
        let error = level_error(&run(level)?, &fine);
        let order = rows.last().map(|prev| (prev.error / error).ln() / (level as f64 / prev.level as f64).ln());
        rows.push(ConvergenceRow { level, error, order });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.level as f64).ln(), -r.error.ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let fitted_order = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    Ok(ConvergenceTable { mode, reference, rows, fitted_order })
}

/// `elnet convergence`.
pub fn cmd_convergence(
    network: &Path,
    config: Option<&Path>,
    mode: Refinement,
    levels: &[usize],
    reference: usize,
    out: Option<&Path>,
    log: &mut dyn Write,
) -> i32 {
    let run = || -> Result<ConvergenceTable> {
        let (state, params) = read_network(network)?;
        let cfg = load_config(config)?;
        let table = convergence_study(&state, &params, &cfg.solver, mode, levels, reference)?;
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            write_json(&dir.join("convergence.json"), &table)?;
        }
        Ok(table)
    };
    match run() {
        Ok(table) => {
            let name = match mode {
                Refinement::Space => "N",
                Refinement::Time => "dt divisor",
            };
            let _ = writeln!(log, "{name:>10} {:>14} {:>8}", "error", "order");
            for r in &table.rows {
                let order = r.order.map_or("-".to_string(), |o| format!("{o:.3}"));
                let _ = writeln!(log, "{:>10} {:>14.6e} {:>8}", r.level, r.error, order);
            }
            let _ = writeln!(log, "reference {name} = {}; fitted order {:.3}", table.reference, table.fitted_order);
            EXIT_OK
        }
        Err(e) => fail(log, &e),
    }
}

/// `elnet equivalence`: whether two trajectory files trace the same sets.
pub fn cmd_equivalence(a: &Path, b: &Path, tol: f64, log: &mut dyn Write) -> i32 {
    let run = || -> Result<(bool, f64)> {
        let fa: TrajectoryFile = read_json(a)?;
        let fb: TrajectoryFile = read_json(b)?;
        if fa.params.lambda != fb.params.lambda || fa.params.endpoints != fb.params.endpoints {
            return Err(Error::Config("trajectories have different parameters".into()));
        }
        let (sa, sb) = (
            fa.states().map_err(|e| Error::Parse(format!("{}: {e}", a.display())))?,
            fb.states().map_err(|e| Error::Parse(format!("{}: {e}", b.display())))?,
        );
        let rep = geometric_equivalence(&sa, &sb, &fa.params.lambda, tol)?;
        Ok((rep.pass, rep.deviation))
    };
    match run() {
        Ok((pass, deviation)) => {
            let _ = writeln!(log, "{} max deviation {deviation:e} (tolerance {tol:e})", verdict(pass));
            if pass {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            }
        }
        Err(e) => fail(log, &e),
    }
}

/// Writes every bundled fixture as `<dir>/<name>.json`.
pub fn write_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    fixtures::bundled()?
        .into_iter()
        .map(|(name, file)| {
            let path = dir.join(format!("{name}.json"));
            write_json(&path, &file)?;
            Ok(path)
        })
        .collect()
}
