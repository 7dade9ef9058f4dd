//! Critical shock as a function of the conversion value `eta`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::ETA_SCHEMA;
use crate::analytics::{critical_shock_liq, Shape};
use crate::error::{Error, Result};
use crate::model::EconomyParams;
use crate::numfmt::full_precision;

/// Critical shocks at one `eta`. Values are raw; the flags mark those above
/// the plotting cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaRow {
    pub eta: f64,
    pub eps_star_ring: f64,
    pub eps_star_complete: f64,
    pub capped_ring: bool,
    pub capped_complete: bool,
}

pub fn run_eta_curve(economy: &EconomyParams, tau: f64, eta_grid: &[f64], cap: f64) -> Result<Vec<EtaRow>> {
    economy.validate()?;
    if !(cap > 0.0) {
        return Err(Error::Config(format!("eta-curve cap must be positive, got {cap}")));
    }
    let critical = |eta: f64, shape: Shape| {
        match critical_shock_liq(economy.n, economy.a, economy.s, economy.y, tau, eta, shape) {
            // already systemic without a shock
            Err(Error::SystemicAtAnyShock) => Ok(0.0),
            other => other,
        }
    };
    eta_grid
        .iter()
        .map(|&eta| {
            let ring = critical(eta, Shape::Ring)?;
            let complete = critical(eta, Shape::Complete)?;
            Ok(EtaRow {
                eta,
                eps_star_ring: ring,
                eps_star_complete: complete,
                capped_ring: ring > cap,
                capped_complete: complete > cap,
            })
        })
        .collect()
}

pub fn eta_curve_csv(rows: &[EtaRow]) -> String {
    let mut out = format!("# schema={ETA_SCHEMA}\n");
    out.push_str("eta,eps_star_ring,eps_star_complete,capped_ring,capped_complete\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            full_precision(r.eta),
            full_precision(r.eps_star_ring),
            full_precision(r.eps_star_complete),
            u8::from(r.capped_ring),
            u8::from(r.capped_complete)
        );
    }
    out
}

pub fn write_eta_curve(rows: &[EtaRow], dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("eta_curve.csv");
    std::fs::write(&path, eta_curve_csv(rows))?;
    Ok(path)
}
