//! Flat key-value experiment configuration (TOML syntax, no tables).
//!
//! Every key is optional and defaults to the reference setting; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sweep::SweepConfig;
use super::Grid;
use crate::equilibrium::SolverSettings;
use crate::error::{Error, Result};
use crate::model::{EconomyParams, RegimeParams};
use crate::network::Topology;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n: usize,
    pub a: f64,
    pub s: f64,
    pub y: f64,
    /// Long-term project value `A`.
    pub project: f64,
    pub zeta: f64,
    pub tau: f64,
    pub eta: f64,
    /// `ring`, `complete` or `regular(c)`; `c_list` appends more regular ones.
    pub topologies: Vec<String>,
    pub c_list: Vec<usize>,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_step: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub tau_list: Vec<f64>,
    pub y_min: f64,
    pub y_max: f64,
    pub y_step: f64,
    /// Phase rasters from the solver instead of the closed forms.
    pub simulate: bool,
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_points: usize,
    pub eps_cap: f64,
    pub tol: f64,
    pub one_tol: f64,
    pub max_iter: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let e = EconomyParams::reference();
        ExperimentConfig {
            n: e.n,
            a: e.a,
            s: e.s,
            y: e.y,
            project: 0.0,
            zeta: 0.0,
            tau: 0.0,
            eta: 0.0,
            topologies: vec!["ring".into(), "complete".into()],
            c_list: vec![2, 3, 10, 20, 30, 40],
            eps_min: 0.0,
            eps_max: 100.0,
            eps_step: 0.5,
            realizations: 10,
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            tau_list: vec![0.001, 0.004, 0.008, 0.02],
            y_min: 0.5,
            y_max: 100.0,
            y_step: 0.5,
            simulate: false,
            eta_min: 0.0,
            eta_max: 0.95,
            eta_points: 20,
            eps_cap: 100.0,
            tol: 1e-12,
            one_tol: 1e-9,
            max_iter: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn economy(&self) -> Result<EconomyParams> {
        let economy = EconomyParams {
            n: self.n,
            a: self.a,
            s: self.s,
            y: self.y,
            project: self.project,
            zeta: self.zeta,
        };
        economy.validate()?;
        Ok(economy)
    }

    pub fn regime(&self) -> Result<RegimeParams> {
        RegimeParams::new(self.tau, self.eta)
    }

    pub fn settings(&self) -> Result<SolverSettings> {
        let settings = SolverSettings {
            tol: self.tol,
            max_iter: self.max_iter,
            one_tol: self.one_tol,
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn eps_grid(&self) -> Result<Grid> {
        Grid::new(self.eps_min, self.eps_max, self.eps_step)
    }

    pub fn y_grid(&self) -> Result<Grid> {
        Grid::new(self.y_min, self.y_max, self.y_step)
    }

    /// `eta_points` evenly spaced values from `eta_min` to `eta_max` inclusive.
    pub fn eta_grid(&self) -> Result<Vec<f64>> {
        if self.eta_points == 0 || !(0.0..1.0).contains(&self.eta_min) || !(self.eta_min..1.0).contains(&self.eta_max) {
            return Err(Error::Config(format!(
                "eta grid needs 0 <= eta_min <= eta_max < 1 and eta_points >= 1, got {}..{} x{}",
                self.eta_min, self.eta_max, self.eta_points
            )));
        }
        if self.eta_points == 1 {
            return Ok(vec![self.eta_min]);
        }
        let span = self.eta_max - self.eta_min;
        Ok((0..self.eta_points)
            .map(|k| self.eta_min + span * k as f64 / (self.eta_points - 1) as f64)
            .collect())
    }

    pub fn topology_list(&self) -> Result<Vec<Topology>> {
        let mut out: Vec<Topology> = Vec::new();
        let parsed = self
            .topologies
            .iter()
            .map(|t| t.parse::<Topology>().map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        for t in parsed
            .into_iter()
            .chain(self.c_list.iter().map(|&c| Topology::Regular(c)))
        {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        Ok(out)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let config = SweepConfig {
            economy: self.economy()?,
            regime: self.regime()?,
            topologies: self.topology_list()?,
            eps_grid: self.eps_grid()?,
            realizations: self.realizations,
            master_seed: self.master_seed,
            settings: self.settings()?,
        };
        config.validate()?;
        Ok(config)
    }
}
