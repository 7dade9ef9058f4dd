//! Safe-region rasters in the `(y, eps)` plane, one per trigger ratio.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Grid, PHASE_SCHEMA};
use crate::analytics::{coco_thresholds, Shape, StabilityRegion};
use crate::equilibrium::{FitnessProblem, SolverSettings};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{EconomyParams, RegimeParams, ShockScenario};
use crate::network::{make_complete, make_ring, InterbankNetwork};
use crate::numfmt::full_precision;

/// How a raster cell is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    /// Closed-form region membership.
    Analytic,
    /// Solve the equilibrium; a cell is safe unless every bank triggers.
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCell {
    pub y: f64,
    pub eps: f64,
    pub ring_safe: bool,
    pub complete_safe: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRaster {
    pub tau: f64,
    pub mode: PhaseMode,
    /// Row-major: `y` outer, `eps` inner.
    pub cells: Vec<PhaseCell>,
}

impl PhaseRaster {
    /// Cells where exactly one topology is safe.
    pub fn disagreement(&self) -> usize {
        self.cells.iter().filter(|c| c.ring_safe != c.complete_safe).count()
    }

    pub fn file_name(&self) -> String {
        match self.mode {
            PhaseMode::Analytic => format!("phase_tau{}.csv", self.tau),
            PhaseMode::Simulated => format!("phase_tau{}_sim.csv", self.tau),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={PHASE_SCHEMA}\n");
        out.push_str("y,eps,ring_safe,complete_safe\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                full_precision(c.y),
                full_precision(c.eps),
                u8::from(c.ring_safe),
                u8::from(c.complete_safe)
            );
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(self.file_name());
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }
}

pub fn run_phase_diagram(
    economy: &EconomyParams,
    tau_list: &[f64],
    y_grid: &Grid,
    eps_grid: &Grid,
    mode: PhaseMode,
    exec: Execution,
) -> Result<Vec<PhaseRaster>> {
    economy.validate()?;
    y_grid.validate()?;
    eps_grid.validate()?;
    if y_grid.min <= 0.0 {
        return Err(Error::Config("exposure grid must be strictly positive".into()));
    }
    let ys = y_grid.points();
    let eps = eps_grid.points();
    let coords: Vec<(f64, f64)> = ys.iter().flat_map(|&y| eps.iter().map(move |&e| (y, e))).collect();

    tau_list
        .iter()
        .map(|&tau| {
            RegimeParams::new(tau, 0.0)?;
            let cells = match mode {
                PhaseMode::Analytic => {
                    let ring = coco_thresholds(economy.n, economy.a, economy.s, tau, Shape::Ring)?;
                    let complete = coco_thresholds(economy.n, economy.a, economy.s, tau, Shape::Complete)?;
                    analytic_cells(&coords, &ring, &complete)
                }
                PhaseMode::Simulated => simulated_cells(economy, tau, &coords, exec)?,
            };
            Ok(PhaseRaster { tau, mode, cells })
        })
        .collect()
}

fn analytic_cells(coords: &[(f64, f64)], ring: &StabilityRegion, complete: &StabilityRegion) -> Vec<PhaseCell> {
    coords
        .iter()
        .map(|&(y, eps)| PhaseCell {
            y,
            eps,
            ring_safe: ring.is_safe(y, eps),
            complete_safe: complete.is_safe(y, eps),
        })
        .collect()
}

fn simulated_cells(
    economy: &EconomyParams,
    tau: f64,
    coords: &[(f64, f64)],
    exec: Execution,
) -> Result<Vec<PhaseCell>> {
    let regime = RegimeParams::new(tau, 0.0)?;
    let settings = SolverSettings::default();
    let systemic = |net: &InterbankNetwork, econ: &EconomyParams, eps: f64| -> Result<bool> {
        let scenario = ShockScenario::single(eps)?;
        let res = FitnessProblem::new(net, econ, &scenario, &regime)?.solve(&settings)?;
        Ok(res.extent >= 1.0)
    };
    exec.map(coords, |&(y, eps)| {
        let econ = economy.with_exposure(y)?;
        let ring = make_ring(econ.n, y)?;
        let complete = make_complete(econ.n, y)?;
        Ok(PhaseCell {
            y,
            eps,
            ring_safe: !systemic(&ring, &econ, eps)?,
            complete_safe: !systemic(&complete, &econ, eps)?,
        })
    })
    .into_iter()
    .collect()
}
