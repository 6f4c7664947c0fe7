use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use elastic_network::cli::{self, Refinement, SimulateOverrides};
use elastic_network::solver::Preflight;

#[derive(Parser)]
#[command(name = "elnet", version, about = "Elastic flow of curve networks with a movable junction")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Space,
    Time,
}

#[derive(Subcommand)]
enum Command {
    /// Check compatibility, non-collinearity and well-posedness of a network.
    Check {
        #[arg(long)]
        network: PathBuf,
        /// Also write check.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a network and write snapshots and diagnostics.
    Simulate {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Refuse to run when a precondition fails (default).
        #[arg(long, conflicts_with = "warn")]
        strict: bool,
        /// Report failed preconditions and run anyway.
        #[arg(long)]
        warn: bool,
        /// Write SVG frames (planar networks only).
        #[arg(long)]
        svg: bool,
        /// Keep every K-th state.
        #[arg(long, value_name = "K")]
        stride: Option<usize>,
    },
    /// Measure convergence orders against a reference run.
    Convergence {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "space")]
        mode: Mode,
        /// Interval counts (space) or dt divisors (time), increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long)]
        reference: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two trajectories describe the same geometric evolution.
    Equivalence {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut out = io::stdout();
    let code = match args.command {
        Command::Check { network, out: dir } => cli::cmd_check(&network, dir.as_deref(), &mut out),
        Command::Simulate { network, config, out: dir, strict, warn, svg, stride } => {
            let preflight = match (strict, warn) {
                (_, true) => Some(Preflight::Warn),
                (true, _) => Some(Preflight::Strict),
                _ => None,
            };
            let overrides = SimulateOverrides { preflight, svg, stride };
            cli::cmd_simulate(&network, config.as_deref(), &overrides, &dir, &mut out)
        }
        Command::Convergence { network, config, mode, levels, reference, out: dir } => {
            let mode = match mode {
                Mode::Space => Refinement::Space,
                Mode::Time => Refinement::Time,
            };
            cli::cmd_convergence(&network, config.as_deref(), mode, &levels, reference, dir.as_deref(), &mut out)
        }
        Command::Equivalence { a, b, tol } => cli::cmd_equivalence(&a, &b, tol, &mut out),
    };
    ExitCode::from(code as u8)
}
