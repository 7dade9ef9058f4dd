//! Seeded experiment drivers and their file outputs.

pub mod cli;
pub mod config;
pub mod eta;
pub mod phase;
pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::ExperimentConfig;
pub use eta::{run_eta_curve, EtaRow};
pub use phase::{run_phase_diagram, PhaseMode, PhaseRaster};
pub use sweep::{realization_seed, run_shock_sweep, SweepConfig, SweepResult, SweepRow};

/// Schema tags written as the first line of every CSV.
pub const SWEEP_SCHEMA: &str = "coco-contagion/sweep/v1";
pub const PHASE_SCHEMA: &str = "coco-contagion/phase/v1";
pub const ETA_SCHEMA: &str = "coco-contagion/eta-curve/v1";

/// Evenly spaced values `min, min + step, ...` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let grid = Grid { min, max, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.max >= self.min) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!(
                "grid needs finite min <= max and step > 0, got {}..{} step {}",
                self.min, self.max, self.step
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points are computed as `min + k * step`, never accumulated.
    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.min + k as f64 * self.step).collect()
    }
}
