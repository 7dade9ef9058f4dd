//! Shock sweeps: extent and distress against shock size per topology,
//! averaged over configuration-model realizations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Grid, SWEEP_SCHEMA};
use crate::equilibrium::{FitnessProblem, SolverSettings};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{EconomyParams, RegimeParams, ShockScenario};
use crate::network::{make_network, InterbankNetwork, Topology};
use crate::numfmt::full_precision;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub economy: EconomyParams,
    pub regime: RegimeParams,
    pub topologies: Vec<Topology>,
    pub eps_grid: Grid,
    /// Samples per random topology; deterministic ones are solved once.
    pub realizations: usize,
    pub master_seed: u64,
    #[serde(skip)]
    pub settings: SolverSettings,
}

impl SweepConfig {
    /// Reference economy, plain debt, ring and complete only.
    pub fn reference(regime: RegimeParams) -> Self {
        SweepConfig {
            economy: EconomyParams::reference(),
            regime,
            topologies: vec![Topology::Ring, Topology::Complete],
            eps_grid: Grid {
                min: 0.0,
                max: 100.0,
                step: 0.5,
            },
            realizations: 10,
            master_seed: 0,
            settings: SolverSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.economy.validate()?;
        self.regime.validate()?;
        self.eps_grid.validate()?;
        self.settings.validate()?;
        if self.eps_grid.min < 0.0 {
            return Err(Error::Config("shock grid must start at eps >= 0".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        if self.topologies.is_empty() {
            return Err(Error::Config("no topologies selected".into()));
        }
        let n = self.economy.n;
        for t in &self.topologies {
            if let Topology::Regular(c) = *t {
                if c < 2 || c + 2 > n {
                    return Err(Error::Config(format!(
                        "connectivity {c} outside [2, {}]",
                        n.saturating_sub(2)
                    )));
                }
            }
        }
        Ok(())
    }

    fn realizations_for(&self, topology: Topology) -> usize {
        if topology.is_random() {
            self.realizations
        } else {
            1
        }
    }
}

/// Seed of realization `r` of `topology`.
///
/// A ChaCha8 generator keyed by `master_seed` is switched to stream
/// `(c << 32) | r`, where `c` is the topology's nominal connectivity, and its
/// first 64-bit output is the seed. Each sample therefore depends only on
/// `(master_seed, topology, r)`, never on evaluation order.
pub fn realization_seed(master_seed: u64, topology: Topology, n: usize, realization: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let stream = ((topology.connectivity(n) as u64) << 32) | realization as u64;
    rng.set_stream(stream);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub topology: Topology,
    pub eps: f64,
    pub mean_e: f64,
    pub std_e: f64,
    pub mean_d: f64,
    pub std_d: f64,
    /// Converged realizations behind the means.
    pub realizations: usize,
}

/// A cell whose solve hit the iteration cap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub topology: Topology,
    pub eps: f64,
    pub realization: usize,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub failures: Vec<CellFailure>,
}

struct Sample {
    topology: Topology,
    realization: usize,
    network: InterbankNetwork,
}

enum CellOutcome {
    Solved { extent: f64, distress: f64 },
    Failed(CellFailure),
}

pub fn run_shock_sweep(config: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    config.validate()?;
    let economy = config.economy;
    let n = economy.n;

    let specs: Vec<(Topology, usize)> = config
        .topologies
        .iter()
        .flat_map(|&t| (0..config.realizations_for(t)).map(move |r| (t, r)))
        .collect();
    let samples = exec
        .map(&specs, |&(topology, realization)| {
            let seed = realization_seed(config.master_seed, topology, n, realization);
            make_network(topology, n, economy.y, seed).map(|network| Sample {
                topology,
                realization,
                network,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let eps_points = config.eps_grid.points();
    let cells: Vec<(usize, usize)> = (0..samples.len())
        .flat_map(|s| (0..eps_points.len()).map(move |k| (s, k)))
        .collect();
    let outcomes = exec.map(&cells, |&(s, k)| {
        let sample = &samples[s];
        let eps = eps_points[k];
        let solved = ShockScenario::single(eps)
            .and_then(|scenario| FitnessProblem::new(&sample.network, &economy, &scenario, &config.regime))
            .and_then(|problem| problem.solve(&config.settings));
        match solved {
            Ok(res) => Ok(CellOutcome::Solved {
                extent: res.extent,
                distress: res.distress,
            }),
            Err(Error::NotConverged {
                iterations, residual, ..
            }) => Ok(CellOutcome::Failed(CellFailure {
                topology: sample.topology,
                eps,
                realization: sample.realization,
                iterations,
                residual,
            })),
            Err(e) => Err(e),
        }
    });

    // group realizations per (topology, eps) in sample order
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut outcomes = outcomes.into_iter();
    let mut per_topology: Vec<(Topology, Vec<Vec<CellOutcome>>)> = Vec::new();
    for sample in &samples {
        let by_eps: Vec<CellOutcome> = (&mut outcomes).take(eps_points.len()).collect::<Result<_>>()?;
        match per_topology.last_mut() {
            Some((t, runs)) if *t == sample.topology => runs.push(by_eps),
            _ => per_topology.push((sample.topology, vec![by_eps])),
        }
    }
    for (topology, runs) in per_topology {
        for (k, &eps) in eps_points.iter().enumerate() {
            let mut extents = Vec::with_capacity(runs.len());
            let mut distresses = Vec::with_capacity(runs.len());
            for run in &runs {
                match &run[k] {
                    CellOutcome::Solved { extent, distress } => {
                        extents.push(*extent);
                        distresses.push(*distress);
                    }
                    CellOutcome::Failed(f) => failures.push(f.clone()),
                }
            }
            let (mean_e, std_e) = mean_std(&extents);
            let (mean_d, std_d) = mean_std(&distresses);
            rows.push(SweepRow {
                topology,
                eps,
                mean_e,
                std_e,
                mean_d,
                std_d,
                realizations: extents.len(),
            });
        }
    }
    rows.sort_by(|a, b| a.topology.cmp(&b.topology).then(a.eps.total_cmp(&b.eps)));
    failures.sort_by(|a, b| {
        a.topology
            .cmp(&b.topology)
            .then(a.eps.total_cmp(&b.eps))
            .then(a.realization.cmp(&b.realization))
    });

    Ok(SweepResult {
        config: config.clone(),
        rows,
        failures,
    })
}

/// Mean and population standard deviation; NaN for an empty slice.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={SWEEP_SCHEMA}\n");
        out.push_str("topology,c,eps,mean_E,std_E,mean_D,std_D,realizations\n");
        let n = self.config.economy.n;
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.topology.family(),
                row.topology.connectivity(n),
                full_precision(row.eps),
                full_precision(row.mean_e),
                full_precision(row.std_e),
                full_precision(row.mean_d),
                full_precision(row.std_d),
                row.realizations
            );
        }
        out
    }

    /// Rows of one topology, in increasing `eps`.
    pub fn curve(&self, topology: Topology) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.topology == topology).collect()
    }

    pub fn file_stem(&self) -> String {
        format!("sweep_{}", self.config.regime.tag())
    }

    /// Writes `sweep_<regime>.csv` plus a JSON sidecar with the run metadata.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.file_stem()));
        std::fs::write(&csv_path, self.to_csv())?;
        let meta = serde_json::json!({
            "schema": SWEEP_SCHEMA,
            "economy": self.config.economy,
            "regime": self.config.regime,
            "topologies": self.config.topologies.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "eps_grid": self.config.eps_grid,
            "realizations": self.config.realizations,
            "master_seed": self.config.master_seed,
            "seed_derivation": "ChaCha8(master_seed), stream (c << 32) | r, first u64",
            "shocked_bank": 1,
            "failures": self.failures,
        });
        let meta_path = dir.join(format!("{}.json", self.file_stem()));
        std::fs::write(meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(csv_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            economy: EconomyParams {
                n: 12,
                ..EconomyParams::reference()
            },
            regime: RegimeParams::VANILLA,
            topologies: vec![Topology::Ring, Topology::Complete, Topology::Regular(3)],
            eps_grid: Grid::new(0.0, 30.0, 2.5).unwrap(),
            realizations: 3,
            master_seed: 5,
            settings: SolverSettings::default(),
        }
    }

    #[test]
    fn seeds_are_pure_and_distinct() {
        let a = realization_seed(1, Topology::Regular(3), 50, 0);
        assert_eq!(a, realization_seed(1, Topology::Regular(3), 50, 0));
        assert_ne!(a, realization_seed(1, Topology::Regular(3), 50, 1));
        assert_ne!(a, realization_seed(1, Topology::Regular(4), 50, 0));
        assert_ne!(a, realization_seed(2, Topology::Regular(3), 50, 0));
    }

    #[test]
    fn sweep_shape_and_bounds() {
        let res = run_shock_sweep(&small_config(), Execution::Sequential).unwrap();
        assert_eq!(res.rows.len(), 3 * 13);
        assert!(res.failures.is_empty());
        for row in &res.rows {
            assert!((0.0..=1.0).contains(&row.mean_e));
            assert!((0.0..=1.0).contains(&row.mean_d));
            assert!(row.mean_d <= row.mean_e + 12.0 * 1e-9);
            let expected = if row.topology.is_random() { 3 } else { 1 };
            assert_eq!(row.realizations, expected);
        }
        // sorted: ring < complete < regular, eps increasing
        assert_eq!(res.rows[0].topology, Topology::Ring);
        assert_eq!(res.rows[13].topology, Topology::Complete);
        assert!(res.curve(Topology::Ring).windows(2).all(|w| w[0].eps < w[1].eps));
    }

    #[test]
    fn execution_modes_agree() {
        let cfg = small_config();
        let seq = run_shock_sweep(&cfg, Execution::Sequential).unwrap();
        let par = run_shock_sweep(&cfg, Execution::default()).unwrap();
        assert_eq!(seq.to_csv(), par.to_csv());
    }

    #[test]
    fn csv_layout() {
        let res = run_shock_sweep(&small_config(), Execution::Sequential).unwrap();
        let csv = res.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# schema=coco-contagion/sweep/v1"));
        assert_eq!(
            lines.next(),
            Some("topology,c,eps,mean_E,std_E,mean_D,std_D,realizations")
        );
        assert_eq!(
            lines.next().unwrap().split(',').take(3).collect::<Vec<_>>(),
            vec!["ring", "1", "0"]
        );
        assert_eq!(res.file_stem(), "sweep_vanilla");
    }

    #[test]
    fn nonconvergence_is_flagged_not_fatal() {
        let mut cfg = small_config();
        cfg.topologies = vec![Topology::Complete];
        cfg.settings.max_iter = Some(2);
        let res = run_shock_sweep(&cfg, Execution::Sequential).unwrap();
        assert!(!res.failures.is_empty());
        let failed = res.rows.iter().find(|r| r.realizations == 0).unwrap();
        assert!(failed.mean_e.is_nan());
    }

    #[test]
    fn write_creates_csv_and_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let res = run_shock_sweep(&small_config(), Execution::Sequential).unwrap();
        let path = res.write(dir.path()).unwrap();
        assert_eq!(path.file_name().unwrap(), "sweep_vanilla.csv");
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep_vanilla.json")).unwrap()).unwrap();
        assert_eq!(meta["master_seed"], 5);
        assert_eq!(meta["eps_grid"]["step"], 2.5);
    }
}
