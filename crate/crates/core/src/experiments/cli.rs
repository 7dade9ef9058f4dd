//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when the numerics
//! fail (no convergence, failed sampling).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use super::config::ExperimentConfig;
use super::eta::{run_eta_curve, write_eta_curve};
use super::phase::{run_phase_diagram, PhaseMode};
use super::sweep::run_shock_sweep;
use crate::analytics::{coco_thresholds, systemic_onset, vanilla_thresholds, Shape};
use crate::equilibrium::{FitnessProblem, SolverSettings};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{EconomyParams, RegimeParams, ShockScenario};
use crate::network::{make_network, InterbankNetwork, Topology};

#[derive(Debug, Parser)]
#[command(
    name = "coco-contagion",
    version,
    about = "Contagion with contingent convertible interbank debt"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a network as an edge list.
    Generate(GenerateArgs),
    /// Solve one shock scenario and print the equilibrium as JSON.
    Solve(SolveArgs),
    /// Print closed-form thresholds as JSON.
    Thresholds(ThresholdArgs),
    /// Extent and distress against shock size, one CSV per regime.
    Sweep(DriverArgs),
    /// Safe-region rasters in the (y, eps) plane, one CSV per tau.
    Phase(DriverArgs),
    /// Critical shock against the conversion value eta.
    EtaCurve(DriverArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// ring, complete or regular(c)
    #[arg(long)]
    topology: Topology,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 75.0)]
    y: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, conflicts_with = "network", required_unless_present = "network")]
    topology: Option<Topology>,
    /// Edge-list file to load instead of generating a topology.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 21.0)]
    a: f64,
    #[arg(long, default_value_t = 20.0)]
    s: f64,
    #[arg(long, default_value_t = 75.0)]
    y: f64,
    #[arg(long)]
    eps: f64,
    /// Shocked banks, 1-based; bank 1 when omitted.
    #[arg(long, value_delimiter = ',')]
    shocked: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    project: f64,
    #[arg(long, default_value_t = 0.0)]
    zeta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 21.0)]
    a: f64,
    #[arg(long, default_value_t = 20.0)]
    s: f64,
    /// Adds the trigger regions for ring and complete.
    #[arg(long)]
    tau: Option<f64>,
    /// With `--tau`, evaluates boundaries and critical shocks at this exposure.
    #[arg(long)]
    y: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
}

#[derive(Debug, Args)]
struct DriverArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match dispatch(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Generate(args) => generate(args, out),
        Command::Solve(args) => solve(args, out),
        Command::Thresholds(args) => thresholds(args, out),
        Command::Sweep(args) => sweep(args, out),
        Command::Phase(args) => phase(args, out),
        Command::EtaCurve(args) => eta_curve(args, out),
    }
}

fn generate(args: GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let net = make_network(args.topology, args.n, args.y, args.seed)?;
    match args.out {
        Some(path) => net.write_edge_list(std::io::BufWriter::new(File::create(path)?)),
        None => net.write_edge_list(out),
    }
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<()> {
    let network = match (&args.network, args.topology) {
        (Some(path), _) => InterbankNetwork::read_edge_list(BufReader::new(File::open(path)?))?,
        (None, Some(topology)) => make_network(topology, args.n, args.y, args.seed)?,
        (None, None) => return Err(Error::Config("need --topology or --network".into())),
    };
    let economy =
        EconomyParams::new(network.n(), args.a, args.s, network.nominal_y())?.with_project(args.project, args.zeta)?;
    let regime = RegimeParams::new(args.tau, args.eta)?;
    if !regime.is_vanilla() && !regime.rest_condition_holds(&economy) {
        log::warn!("(1 - tau) a - s < tau y: CoCos convert even without a shock");
    }
    let scenario = if args.shocked.is_empty() {
        ShockScenario::single(args.eps)?
    } else {
        if args.shocked.contains(&0) {
            return Err(Error::Config("--shocked takes 1-based bank indices".into()));
        }
        ShockScenario::new(args.shocked.iter().map(|i| i - 1), args.eps)?
    };
    let settings = SolverSettings {
        max_iter: args.max_iter,
        ..SolverSettings::default()
    };
    let result = FitnessProblem::new(&network, &economy, &scenario, &regime)?.solve(&settings)?;
    serde_json::to_writer_pretty(&mut *out, &result)?;
    writeln!(out)?;
    Ok(())
}

fn thresholds(args: ThresholdArgs, out: &mut dyn Write) -> Result<()> {
    let vanilla = vanilla_thresholds(args.n, args.a, args.s)?;
    let mut doc = json!({
        "n": args.n,
        "a": args.a,
        "s": args.s,
        "eps_star": vanilla.eps_star,
        "y_star": vanilla.y_star,
    });
    if let Some(tau) = args.tau {
        for (key, shape) in [("ring", Shape::Ring), ("complete", Shape::Complete)] {
            let region = coco_thresholds(args.n, args.a, args.s, tau, shape)?;
            let mut entry = json!({
                "tau": tau,
                "lambda": region.lambda,
                "y_star": region.y_star,
                "eps_star_intercept": region.eps_star(region.y_star),
                "eps_star_slope": region.eps_star_slope(),
            });
            if let Some(y) = args.y {
                entry["y"] = json!(y);
                entry["eps_star"] = json!(region.eps_star(y));
                entry["systemic_shock"] = json!(region.systemic_shock(y));
                entry["eta"] = json!(args.eta);
                entry["systemic_onset"] = json!(systemic_onset(args.n, args.a, args.s, y, tau, args.eta, shape)?);
            }
            doc[key] = entry;
        }
    }
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn load(args: &DriverArgs) -> Result<(ExperimentConfig, PathBuf, Execution)> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let dir = args.out.clone().unwrap_or_else(|| config.output_dir.clone());
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    Ok((config, dir, exec))
}

fn report(out: &mut dyn Write, path: &Path) -> Result<()> {
    writeln!(out, "{}", path.display())?;
    Ok(())
}

fn sweep(args: DriverArgs, out: &mut dyn Write) -> Result<()> {
    let (config, dir, exec) = load(&args)?;
    let sweep = config.sweep_config()?;
    if !sweep.regime.is_vanilla() && !sweep.regime.rest_condition_holds(&sweep.economy) {
        log::warn!("(1 - tau) a - s < tau y: CoCos convert even without a shock");
    }
    let result = run_shock_sweep(&sweep, exec)?;
    if !result.failures.is_empty() {
        log::warn!(
            "{} cells did not converge; see the metadata file",
            result.failures.len()
        );
    }
    report(out, &result.write(&dir)?)
}

fn phase(args: DriverArgs, out: &mut dyn Write) -> Result<()> {
    let (config, dir, exec) = load(&args)?;
    let mode = if config.simulate {
        PhaseMode::Simulated
    } else {
        PhaseMode::Analytic
    };
    let rasters = run_phase_diagram(
        &config.economy()?,
        &config.tau_list,
        &config.y_grid()?,
        &config.eps_grid()?,
        mode,
        exec,
    )?;
    for raster in &rasters {
        report(out, &raster.write(&dir)?)?;
    }
    Ok(())
}

fn eta_curve(args: DriverArgs, out: &mut dyn Write) -> Result<()> {
    let (config, dir, _) = load(&args)?;
    let rows = run_eta_curve(&config.economy()?, config.tau, &config.eta_grid()?, config.eps_cap)?;
    report(out, &write_eta_curve(&rows, &dir)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(args).expect("valid arguments");
        let mut buf = Vec::new();
        dispatch(cli.command, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn solve_ring_large_shock() {
        let text = capture(&[
            "x",
            "solve",
            "--topology",
            "ring",
            "--n",
            "50",
            "--a",
            "21",
            "--s",
            "20",
            "--y",
            "75",
            "--eps",
            "60",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["extent"], 1.0);
        assert!((v["distress"].as_f64().unwrap() - (1.0 - 49.0 / 150.0)).abs() < 1e-9);
        assert_eq!(v["phi"].as_array().unwrap().len(), 50);
        assert!(v["iterations"].is_u64() && v["residual"].is_f64());
    }

    #[test]
    fn thresholds_reference() {
        let v: serde_json::Value =
            serde_json::from_str(&capture(&["x", "thresholds", "--n", "50", "--a", "21", "--s", "20"]).unwrap())
                .unwrap();
        assert_eq!(v["eps_star"], 50.0);
        assert_eq!(v["y_star"], 49.0);
        assert!(v.get("ring").is_none());
        let v: serde_json::Value =
            serde_json::from_str(&capture(&["x", "thresholds", "--tau", "0.008", "--y", "75"]).unwrap()).unwrap();
        assert!(v["ring"]["eps_star"].as_f64().unwrap() > v["complete"]["eps_star"].as_f64().unwrap());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["x", "--help"]), 0);
        assert_eq!(run(["x", "--version"]), 0);
        assert_eq!(run(["x", "solve", "--bogus"]), 1);
        assert_eq!(run(["x", "thresholds", "--n", "1"]), 1);
        assert_eq!(
            run(["x", "solve", "--topology", "complete", "--eps", "30", "--max-iter", "1"]),
            2
        );
    }

    #[test]
    fn generate_to_stdout() {
        let text = capture(&["x", "generate", "--topology", "ring", "--n", "4", "--y", "2"]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("4 2 ring -"));
        assert_eq!(lines.count(), 4);
    }
}
