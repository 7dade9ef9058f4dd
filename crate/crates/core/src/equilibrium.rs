//! Fixed point of the fitness-propagation map.
//!
//! Bank `i` repays the fraction
//!
//! ```text
//! phi_i = eta + (1 - eta) * f((1 - tau) * h_i(phi)),   h_i(phi) = z_i + sum_k y_ik phi_k
//! ```
//!
//! of its junior debt, with `f` the activation against the realized liability
//! `y_i`. The map is monotone, so iterating from all-ones decreases
//! componentwise to the greatest fixed point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{activation_unchecked, liquidation_decision, EconomyParams, RegimeParams, ShockScenario};
use crate::network::{compensate, InterbankNetwork};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Stop once the max-norm update is at or below this.
    pub tol: f64,
    /// Iteration cap; `None` means `10 * n * 1000`.
    pub max_iter: Option<usize>,
    /// `phi_i >= 1 - one_tol` counts as fully repaid.
    pub one_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-12,
            max_iter: None,
            one_tol: 1e-9,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::domain("solver tolerance must be positive"));
        }
        if !(self.one_tol >= self.tol) {
            return Err(Error::domain("one_tol must be at least tol"));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n * 1000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub phi: Vec<f64>,
    pub extent: f64,
    pub distress: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// `h_i = z_i + sum_k y_ik phi_k`.
pub fn bank_income(network: &InterbankNetwork, z: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
    check_len(network.n(), z.len())?;
    check_len(network.n(), phi.len())?;
    Ok(income_iter(network, z, phi).collect())
}

/// One application of the regime-adjusted map to `phi`.
pub fn fitness_map(
    network: &InterbankNetwork,
    z: &[f64],
    phi: &[f64],
    s: f64,
    regime: &RegimeParams,
) -> Result<Vec<f64>> {
    regime.validate()?;
    let problem = FitnessProblem::with_investments(network, z.to_vec(), s, *regime)?;
    check_len(network.n(), phi.len())?;
    let mut out = vec![0.0; network.n()];
    problem.apply(phi, &mut out);
    Ok(out)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn income_iter<'a>(network: &'a InterbankNetwork, z: &'a [f64], phi: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    z.iter()
        .enumerate()
        .map(move |(i, &zi)| zi + network.claims_of(i).iter().map(|&(k, w)| w * phi[k]).sum::<f64>())
}

/// A network together with investments and a repayment regime.
#[derive(Debug, Clone)]
pub struct FitnessProblem<'a> {
    network: &'a InterbankNetwork,
    z: Vec<f64>,
    s: f64,
    regime: RegimeParams,
}

impl<'a> FitnessProblem<'a> {
    /// Investments are the compensated base minus the shock, plus the
    /// liquidation value `zeta * A` available to every bank.
    pub fn new(
        network: &'a InterbankNetwork,
        economy: &EconomyParams,
        scenario: &ShockScenario,
        regime: &RegimeParams,
    ) -> Result<Self> {
        economy.validate()?;
        if economy.n != network.n() {
            return Err(Error::DimensionMismatch {
                expected: network.n(),
                got: economy.n,
            });
        }
        let base = compensate(network, economy.a);
        let mut z = scenario.investments(&base.base)?;
        let buffer = economy.zeta * economy.project;
        if buffer != 0.0 {
            z.iter_mut().for_each(|zi| *zi += buffer);
        }
        Self::with_investments(network, z, economy.s, *regime)
    }

    pub fn with_investments(network: &'a InterbankNetwork, z: Vec<f64>, s: f64, regime: RegimeParams) -> Result<Self> {
        check_len(network.n(), z.len())?;
        regime.validate()?;
        Ok(FitnessProblem { network, z, s, regime })
    }

    pub fn investments(&self) -> &[f64] {
        &self.z
    }

    pub fn network(&self) -> &InterbankNetwork {
        self.network
    }

    pub fn apply(&self, phi: &[f64], out: &mut [f64]) {
        let RegimeParams { tau, eta } = self.regime;
        let liability = self.network.liability();
        for (i, h) in income_iter(self.network, &self.z, phi).enumerate() {
            out[i] = if liability[i] > 0.0 {
                let f = activation_unchecked((1.0 - tau) * h, liability[i], self.s);
                if f >= 1.0 {
                    1.0
                } else {
                    eta + (1.0 - eta) * f
                }
            } else {
                // nothing owed, nothing to default on
                1.0
            };
        }
    }

    pub fn solve(&self, settings: &SolverSettings) -> Result<EquilibriumResult> {
        let start = vec![1.0; self.network.n()];
        self.solve_from(&start, settings, |_| {})
    }

    /// Iterates the map from `start`; `observer` sees every iterate, the
    /// start included.
    pub fn solve_from<F>(&self, start: &[f64], settings: &SolverSettings, mut observer: F) -> Result<EquilibriumResult>
    where
        F: FnMut(&[f64]),
    {
        settings.validate()?;
        let n = self.network.n();
        check_len(n, start.len())?;
        let cap = settings.iteration_cap(n);
        let mut current = start.to_vec();
        let mut next = vec![0.0; n];
        observer(&current);
        let mut residual = f64::INFINITY;
        for iteration in 1..=cap {
            self.apply(&current, &mut next);
            residual = current
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut current, &mut next);
            observer(&current);
            if residual <= settings.tol {
                return Ok(EquilibriumResult {
                    extent: extent_of_contagion(&current, settings.one_tol),
                    distress: distress(&current),
                    phi: current,
                    iterations: iteration,
                    residual,
                });
            }
        }
        Err(Error::NotConverged {
            iterations: cap,
            residual,
            last: current,
        })
    }
}

/// Greatest fixed point for `scenario` on `network`.
pub fn solve(
    network: &InterbankNetwork,
    economy: &EconomyParams,
    scenario: &ShockScenario,
    regime: &RegimeParams,
    settings: &SolverSettings,
) -> Result<EquilibriumResult> {
    FitnessProblem::new(network, economy, scenario, regime)?.solve(settings)
}

/// Fraction of banks not repaying in full.
pub fn extent_of_contagion(phi: &[f64], one_tol: f64) -> f64 {
    let hit = phi.iter().filter(|&&p| p < 1.0 - one_tol).count();
    hit as f64 / phi.len() as f64
}

/// One minus the average fitness.
pub fn distress(phi: &[f64]) -> f64 {
    phi.iter().map(|p| 1.0 - p).sum::<f64>() / phi.len() as f64
}

/// How the zero-recovery surplus charges liquidations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SurplusConvention {
    /// `A` per liquidating bank.
    #[default]
    PerDefault,
    /// The printed `n * #defaults * A`, kept for comparison.
    ScaledByN,
}

/// `u = n (a + A) - p eps - (1 - zeta) sum_i l_i` with liquidations evaluated
/// at equilibrium incomes.
pub fn social_surplus(
    network: &InterbankNetwork,
    economy: &EconomyParams,
    scenario: &ShockScenario,
    result: &EquilibriumResult,
    convention: SurplusConvention,
) -> Result<f64> {
    let base = compensate(network, economy.a);
    let z = scenario.investments(&base.base)?;
    let income = bank_income(network, &z, &result.phi)?;
    let liquidated: f64 = income
        .iter()
        .zip(network.liability())
        .map(|(&h, &y_i)| liquidation_decision(h, economy.s, y_i, economy.project, economy.zeta))
        .sum();
    let scale = match convention {
        SurplusConvention::PerDefault => 1.0,
        SurplusConvention::ScaledByN => economy.n as f64,
    };
    let n = economy.n as f64;
    Ok(n * (economy.a + economy.project)
        - scenario.count() as f64 * scenario.epsilon()
        - (1.0 - economy.zeta) * scale * liquidated)
}
