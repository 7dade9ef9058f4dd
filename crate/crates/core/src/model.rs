//! Economy parameters and the per-bank balance-sheet arithmetic.
//!
//! Everything here is a pure function of its arguments. Currency amounts are
//! `f64`; region boundaries are compared exactly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar constants of the economy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconomyParams {
    /// Number of banks.
    pub n: usize,
    /// Short-term project return when no shock hits.
    pub a: f64,
    /// Senior obligation per bank.
    pub s: f64,
    /// Total junior interbank liability per bank.
    pub y: f64,
    /// Long-term project value `A`.
    pub project: f64,
    /// Fraction of `A` recovered on early liquidation.
    pub zeta: f64,
}

impl EconomyParams {
    pub fn new(n: usize, a: f64, s: f64, y: f64) -> Result<Self> {
        let params = EconomyParams {
            n,
            a,
            s,
            y,
            project: 0.0,
            zeta: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// N=50, a=21, s=20, y=75, the setting used throughout the figures.
    pub fn reference() -> Self {
        EconomyParams {
            n: 50,
            a: 21.0,
            s: 20.0,
            y: 75.0,
            project: 0.0,
            zeta: 0.0,
        }
    }

    pub fn with_project(mut self, project: f64, zeta: f64) -> Result<Self> {
        self.project = project;
        self.zeta = zeta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_exposure(mut self, y: f64) -> Result<Self> {
        self.y = y;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("need at least 2 banks, got {}", self.n)));
        }
        if !(self.s >= 0.0 && self.a > self.s) {
            return Err(Error::domain(format!(
                "require a > s >= 0 (a={}, s={})",
                self.a, self.s
            )));
        }
        if !(self.y > 0.0) {
            return Err(Error::domain(format!(
                "junior liability must be positive, got {}",
                self.y
            )));
        }
        if !(self.project >= 0.0) {
            return Err(Error::domain("project value must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::domain(format!("zeta must lie in [0,1], got {}", self.zeta)));
        }
        Ok(())
    }

    /// Excess liquidity `a - s` of an unshocked bank.
    pub fn excess_liquidity(&self) -> f64 {
        self.a - self.s
    }
}

/// Repayment regime: `tau` is the trigger capital ratio and `eta` the market
/// value of converted shares. `(0, 0)` is the plain-debt model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegimeParams {
    pub tau: f64,
    pub eta: f64,
}

impl RegimeParams {
    pub const VANILLA: RegimeParams = RegimeParams { tau: 0.0, eta: 0.0 };

    pub fn new(tau: f64, eta: f64) -> Result<Self> {
        let regime = RegimeParams { tau, eta };
        regime.validate()?;
        Ok(regime)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.tau) {
            return Err(Error::domain(format!("tau must lie in [0,1), got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::domain(format!("eta must lie in [0,1], got {}", self.eta)));
        }
        Ok(())
    }

    pub fn is_vanilla(&self) -> bool {
        self.tau == 0.0 && self.eta == 0.0
    }

    /// `(1 - tau) a - s >= tau y`: no CoCo converts when nothing is shocked.
    pub fn rest_condition_holds(&self, economy: &EconomyParams) -> bool {
        (1.0 - self.tau) * economy.a - economy.s >= self.tau * economy.y
    }

    /// Short tag used in output file names.
    pub fn tag(&self) -> String {
        if self.is_vanilla() {
            "vanilla".to_string()
        } else {
            format!("tau{}_eta{}", self.tau, self.eta)
        }
    }
}

/// A deterministic shock of size `epsilon` on each bank in `shocked`
/// (zero-based indices).
#[derive(Debug, Clone, PartialEq)]
pub struct ShockScenario {
    shocked: BTreeSet<usize>,
    epsilon: f64,
}

impl ShockScenario {
    pub fn new(shocked: impl IntoIterator<Item = usize>, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::domain(format!("shock size must be >= 0, got {epsilon}")));
        }
        Ok(ShockScenario {
            shocked: shocked.into_iter().collect(),
            epsilon,
        })
    }

    /// Shock on the first bank only.
    pub fn single(epsilon: f64) -> Result<Self> {
        Self::new([0], epsilon)
    }

    pub fn none() -> Self {
        ShockScenario {
            shocked: BTreeSet::new(),
            epsilon: 0.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn shocked(&self) -> impl Iterator<Item = usize> + '_ {
        self.shocked.iter().copied()
    }

    /// Number of shocked banks `p`.
    pub fn count(&self) -> usize {
        self.shocked.len()
    }

    /// `z_i = base_i - epsilon` on shocked banks, `base_i` elsewhere.
    pub fn investments(&self, base: &[f64]) -> Result<Vec<f64>> {
        if let Some(&max) = self.shocked.iter().next_back() {
            if max >= base.len() {
                return Err(Error::domain(format!("shocked bank {} outside 0..{}", max, base.len())));
            }
        }
        let mut z = base.to_vec();
        for &i in &self.shocked {
            z[i] -= self.epsilon;
        }
        Ok(z)
    }
}

/// `min(1, (h - s) / y_i)^+`.
pub fn activation(h: f64, y_i: f64, s: f64) -> Result<f64> {
    if !(y_i > 0.0) {
        return Err(Error::domain(format!("liability must be positive, got {y_i}")));
    }
    Ok(activation_unchecked(h, y_i, s))
}

#[inline]
pub(crate) fn activation_unchecked(h: f64, y_i: f64, s: f64) -> f64 {
    ((h - s) / y_i).clamp(0.0, 1.0)
}

/// Plain-debt waterfall of asset value `v`: `(senior, junior, equity)`.
pub fn vanilla_payoffs(v: f64, s: f64, y_i: f64) -> Result<(f64, f64, f64)> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("asset value must be >= 0, got {v}")));
    }
    let senior = s.min(v);
    let junior = (v - s).min(y_i).max(0.0);
    let equity = (v - s - y_i).max(0.0);
    Ok((senior, junior, equity))
}

/// True iff the capital ratio is at or below `tau`, i.e. `V <= (s + y_i) / (1 - tau)`.
pub fn trigger_check(v: f64, s: f64, y_i: f64, tau: f64) -> bool {
    v <= (s + y_i) / (1.0 - tau)
}

/// Split of the junior claim at asset value `v` into
/// `(unconverted, converted)` with `unconverted = min[y_i, (1 - tau) V - s]^+`.
pub fn conversion_split(v: f64, s: f64, y_i: f64, tau: f64) -> Result<(f64, f64)> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("asset value must be >= 0, got {v}")));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain(format!("tau must lie in [0,1), got {tau}")));
    }
    let unconverted = ((1.0 - tau) * v - s).min(y_i).max(0.0);
    Ok((unconverted, y_i - unconverted))
}

/// Amount of the long-term project liquidated at income `h`.
///
/// With `zeta = 0` any shortfall liquidates the whole project.
pub fn liquidation_decision(h: f64, s: f64, y_i: f64, project: f64, zeta: f64) -> f64 {
    let shortfall = s + y_i - h;
    if zeta == 0.0 {
        if shortfall > 0.0 {
            project
        } else {
            0.0
        }
    } else {
        (shortfall / zeta).min(project).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn activation_examples() {
        assert_eq!(activation(95.0, 75.0, 20.0).unwrap(), 1.0);
        assert_eq!(activation(20.0, 75.0, 20.0).unwrap(), 0.0);
        assert_eq!(activation(57.5, 75.0, 20.0).unwrap(), 0.5);
        assert!(activation(57.5, 0.0, 20.0).is_err());
        assert!(activation(57.5, -1.0, 20.0).is_err());
    }

    #[test]
    fn payoff_examples() {
        assert_eq!(vanilla_payoffs(120.0, 20.0, 75.0).unwrap(), (20.0, 75.0, 25.0));
        assert_eq!(vanilla_payoffs(15.0, 20.0, 75.0).unwrap(), (15.0, 0.0, 0.0));
        assert_eq!(vanilla_payoffs(60.0, 20.0, 75.0).unwrap(), (20.0, 40.0, 0.0));
        assert!(vanilla_payoffs(-1.0, 20.0, 75.0).is_err());
    }

    #[test]
    fn trigger_examples() {
        // (s + y) / (1 - tau) = 95 / 0.992 = 95.7661...
        assert!(trigger_check(95.77 - 0.01, 20.0, 75.0, 0.008));
        assert!(!trigger_check(95.77, 20.0, 75.0, 0.008));
        assert!(trigger_check(95.0 / 0.992, 20.0, 75.0, 0.008));
        assert!(!trigger_check(200.0, 20.0, 75.0, 0.008));
        assert!(trigger_check(95.0, 20.0, 75.0, 0.0));
    }

    #[test]
    fn conversion_examples() {
        assert_eq!(conversion_split(200.0, 20.0, 75.0, 0.008).unwrap(), (75.0, 0.0));
        assert_eq!(conversion_split(10.0, 20.0, 75.0, 0.008).unwrap(), (0.0, 75.0));
        let (nc, c) = conversion_split(60.0, 20.0, 75.0, 0.008).unwrap();
        assert_abs_diff_eq!(nc, 39.52, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 35.48, epsilon = 1e-12);
        assert!(conversion_split(-1.0, 20.0, 75.0, 0.008).is_err());
        assert!(conversion_split(10.0, 20.0, 75.0, 1.0).is_err());
    }

    #[test]
    fn conversion_regimes() {
        let (s, y, tau) = (20.0, 75.0, 0.01);
        // full conversion between s and s/(1-tau)
        let v = (s + s / (1.0 - tau)) / 2.0;
        assert_eq!(conversion_split(v, s, y, tau).unwrap().0, 0.0);
        // partial conversion between s/(1-tau) and (s+y)/(1-tau)
        let v = (s / (1.0 - tau) + (s + y) / (1.0 - tau)) / 2.0;
        let (nc, c) = conversion_split(v, s, y, tau).unwrap();
        assert!(nc > 0.0 && c > 0.0);
    }

    #[test]
    fn liquidation_examples() {
        assert_eq!(liquidation_decision(100.0, 20.0, 75.0, 5.0, 0.5), 0.0);
        assert_eq!(liquidation_decision(94.0, 20.0, 75.0, 5.0, 0.5), 2.0);
        assert_eq!(liquidation_decision(50.0, 20.0, 75.0, 5.0, 0.5), 5.0);
        assert_eq!(liquidation_decision(94.0, 20.0, 75.0, 5.0, 0.0), 5.0);
        assert_eq!(liquidation_decision(95.0, 20.0, 75.0, 5.0, 0.0), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(EconomyParams::new(1, 21.0, 20.0, 75.0).is_err());
        assert!(EconomyParams::new(50, 20.0, 20.0, 75.0).is_err());
        assert!(EconomyParams::new(50, 21.0, 20.0, 0.0).is_err());
        assert!(EconomyParams::reference().with_project(1.0, 1.5).is_err());
        assert!(RegimeParams::new(1.0, 0.0).is_err());
        assert!(RegimeParams::new(0.5, 1.1).is_err());
        let e = EconomyParams::reference();
        // 0.992 * 21 - 20 = 0.832 >= 0.6
        assert!(RegimeParams::new(0.008, 0.0).unwrap().rest_condition_holds(&e));
        assert!(!RegimeParams::new(0.02, 0.0).unwrap().rest_condition_holds(&e));
    }

    #[test]
    fn scenario_investments() {
        let sc = ShockScenario::new([0, 2], 5.0).unwrap();
        assert_eq!(sc.investments(&[21.0, 21.0, 21.0]).unwrap(), vec![16.0, 21.0, 16.0]);
        assert!(sc.investments(&[21.0, 21.0]).is_err());
        assert!(ShockScenario::single(-1.0).is_err());
        assert_eq!(sc.count(), 2);
    }

    proptest! {
        #[test]
        fn activation_is_monotone_and_lipschitz(
            h1 in -200.0f64..300.0, h2 in -200.0f64..300.0,
            y in 0.5f64..150.0, s in 0.0f64..50.0,
        ) {
            let (lo, hi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
            let f_lo = activation(lo, y, s).unwrap();
            let f_hi = activation(hi, y, s).unwrap();
            prop_assert!((0.0..=1.0).contains(&f_lo));
            prop_assert!(f_lo <= f_hi);
            prop_assert!(f_hi - f_lo <= (hi - lo) / y + 1e-12);
        }

        #[test]
        fn waterfall_conserves_value(v_frac in 0.0f64..11.0, s in 0.0f64..50.0, y in 0.5f64..100.0) {
            let v = v_frac * (s + y);
            let (senior, junior, equity) = vanilla_payoffs(v, s, y).unwrap();
            prop_assert!((senior + junior + equity - v).abs() <= 1e-9 * v.max(1.0));
            let (s2, j2, e2) = vanilla_payoffs(v + 1.0, s, y).unwrap();
            prop_assert!(s2 >= senior && j2 >= junior && e2 >= equity);
        }

        #[test]
        fn conversion_consistent_with_trigger(v in 0.0f64..400.0, s in 0.0f64..50.0, y in 0.5f64..100.0, tau in 0.0f64..0.5) {
            let (nc, c) = conversion_split(v, s, y, tau).unwrap();
            prop_assert!((nc + c - y).abs() <= 1e-12 * y);
            // strict no-trigger region repays in full
            if !trigger_check(v, s, y, tau) {
                prop_assert!((nc - y).abs() <= 1e-12 * (v + s + y));
            }
            if nc < y {
                prop_assert!(trigger_check(v, s, y, tau));
            }
            let (_, junior, _) = vanilla_payoffs(v, s, y).unwrap();
            prop_assert_eq!(conversion_split(v, s, y, 0.0).unwrap().0, junior);
        }

        #[test]
        fn liquidation_bounded_and_nonincreasing(
            h in 0.0f64..200.0, dh in 0.0f64..10.0, a_val in 0.0f64..20.0, zeta in 0.0f64..1.0,
        ) {
            let l1 = liquidation_decision(h, 20.0, 75.0, a_val, zeta);
            let l2 = liquidation_decision(h + dh, 20.0, 75.0, a_val, zeta);
            prop_assert!((0.0..=a_val).contains(&l1));
            prop_assert!(l2 <= l1);
        }

        #[test]
        fn zero_recovery_is_the_limit(h in 0.0f64..200.0, a_val in 0.1f64..20.0) {
            prop_assume!((h - 95.0).abs() > 1e-3);
            let limit = liquidation_decision(h, 20.0, 75.0, a_val, 0.0);
            let near = liquidation_decision(h, 20.0, 75.0, a_val, 1e-9);
            prop_assert_eq!(limit, near);
        }
    }
}
