//! Default and CoCo-trigger contagion on regular interbank networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: economy parameters and the pointwise balance-sheet arithmetic
//!   (activation, payoffs, trigger and conversion rules, liquidation).
//! * [`network`]: ring, complete and random regular liability matrices plus the
//!   compensated investments that make the no-shock state an equilibrium.
//! * [`equilibrium`]: the fitness-propagation map, its greatest fixed point and
//!   the contagion metrics.
//! * [`analytics`]: closed-form equilibria, thresholds and critical shocks used
//!   as an independent oracle for the solver.
//! * [`experiments`]: seeded shock sweeps, safe-region rasters and critical
//!   shock curves written as CSV.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod model;
pub mod network;
mod numfmt;

pub use equilibrium::{solve, EquilibriumResult, SolverSettings};
pub use error::{Error, Result};
pub use model::{EconomyParams, RegimeParams, ShockScenario};
pub use network::{InterbankNetwork, Topology};
