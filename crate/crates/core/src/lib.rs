//! Elastic flow of curve networks joined at one movable junction.
//!
//! The crate evolves `q` curves in `Rⁿ` under the L²-gradient flow of the
//! penalized elastic energy `½∫|κ|² ds + λ·length`. Every curve is pinned at
//! its far end `x = 1` and all curves meet at `x = 0`, where the natural
//! boundary conditions hold. The nonlinear fourth-order system is advanced by
//! implicit Euler steps, each solved as a fixed point of a frozen-coefficient
//! linear problem.
//!
//! Module map:
//! - [`geometry`]: finite differences and every per-node geometric formula.
//! - [`junction`]: tangents, the non-collinearity functional, the junction
//!   tangential-speed system and the boundary linearization.
//! - [`wellposed`]: compatibility checks, parabolicity margin and the
//!   complementing-condition algebra.
//! - [`solver`]: network state, linear step assembly, banded solve, fixed-point
//!   stepping and time evolution.
//! - [`diagnostics`]: energies, residuals, first variations, Hölder seminorms.
//! - [`repar`]: constant-speed reparametrization and the tangential
//!   diffeomorphism ODE used for geometric equivalence.
//! - [`cli`]: file formats, fixtures and the `elnet` subcommands.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod junction;
pub mod repar;
pub mod solver;
pub mod wellposed;

pub use error::{Error, Result};
pub use geometry::{CurveSamples, DerivativeBundle, GeometricFields};

pub use solver::{FlowParams, NetworkState, SolverConfig};
