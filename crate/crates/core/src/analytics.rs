//! Closed-form equilibria, thresholds and critical shocks for ring and
//! complete networks with a single shocked bank.
//!
//! Expressions are kept in the same shape as their derivations so each line
//! can be checked by eye; none of this shares code with the iterative solver.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::activation;

const CONSISTENCY_SLACK: f64 = 1e-9;

/// Clamp to `[0, 1]`, warning when the raw value overshoots by more than the slack.
fn clamp_unit(raw: f64, what: &str) -> f64 {
    if !(-CONSISTENCY_SLACK..=1.0 + CONSISTENCY_SLACK).contains(&raw) {
        warn!("{what} evaluated to {raw}, outside [0, 1]; clamping");
    }
    raw.clamp(0.0, 1.0)
}

fn extent_and_distress(phi: &[f64]) -> (usize, f64, f64) {
    let n = phi.len() as f64;
    let hit = phi.iter().filter(|&&p| p < 1.0 - CONSISTENCY_SLACK).count();
    let distress = phi.iter().map(|p| 1.0 - p).sum::<f64>() / n;
    (hit, hit as f64 / n, distress)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VanillaThresholds {
    /// Shock above which default becomes systemic, `n (a - s)`.
    pub eps_star: f64,
    /// Exposure above which default becomes systemic, `(n - 1)(a - s)`.
    pub y_star: f64,
}

pub fn vanilla_thresholds(n: usize, a: f64, s: f64) -> Result<VanillaThresholds> {
    if n < 2 {
        return Err(Error::domain("need at least 2 banks"));
    }
    if a < s {
        return Err(Error::domain(format!("require a >= s (a={a}, s={s})")));
    }
    Ok(VanillaThresholds {
        eps_star: n as f64 * (a - s),
        y_star: (n - 1) as f64 * (a - s),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingVanillaSolution {
    pub phi: Vec<f64>,
    /// Banks with `phi_i < 1`.
    pub n_insolvent: usize,
    pub extent: f64,
    pub distress: f64,
}

/// Equilibrium of the plain-debt ring after a shock `eps >= a - s` on bank 1.
pub fn ring_closed_form_vanilla(n: usize, a: f64, s: f64, y: f64, eps: f64) -> Result<RingVanillaSolution> {
    let th = vanilla_thresholds(n, a, s)?;
    if !(a > s) || !(y > 0.0) {
        return Err(Error::domain("require a > s and y > 0"));
    }
    if eps < a - s {
        return Err(Error::NotCovered(format!(
            "shock {eps} below the excess liquidity {}: the shocked bank stays solvent",
            a - s
        )));
    }
    let phi: Vec<f64> = if eps <= th.eps_star || y <= th.y_star {
        let phi_1 = activation(y + a - eps, y, s)?;
        (0..n).map(|i| (phi_1 + i as f64 * (a - s) / y).min(1.0)).collect()
    } else {
        // distress propagation is maximal and independent of eps
        (0..n).map(|i| i as f64 * (a - s) / y).collect()
    };
    let (n_insolvent, extent, distress) = extent_and_distress(&phi);
    Ok(RingVanillaSolution {
        phi,
        n_insolvent,
        extent,
        distress,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompleteVanillaSolution {
    /// Fitness of the shocked bank.
    pub phi_s: f64,
    /// Fitness of every other bank.
    pub phi_ns: f64,
    pub extent: f64,
    pub distress: f64,
}

impl CompleteVanillaSolution {
    pub fn to_vector(&self, n: usize) -> Vec<f64> {
        std::iter::once(self.phi_s)
            .chain(std::iter::repeat_n(self.phi_ns, n - 1))
            .collect()
    }
}

/// Equilibrium of the plain-debt complete network after a shock `eps >= a - s` on bank 1.
pub fn complete_closed_form_vanilla(n: usize, a: f64, s: f64, y: f64, eps: f64) -> Result<CompleteVanillaSolution> {
    let th = vanilla_thresholds(n, a, s)?;
    if !(a > s) || !(y > 0.0) {
        return Err(Error::domain("require a > s and y > 0"));
    }
    if eps < a - s {
        return Err(Error::NotCovered(format!(
            "shock {eps} below the excess liquidity {}: the shocked bank stays solvent",
            a - s
        )));
    }
    let (phi_s, phi_ns) = if y <= th.y_star || eps <= th.eps_star {
        ((1.0 - (eps - (a - s)) / y).max(0.0), 1.0)
    } else {
        (0.0, th.y_star / y)
    };
    let (_, extent, distress) = extent_and_distress(
        &CompleteVanillaSolution {
            phi_s,
            phi_ns,
            extent: 0.0,
            distress: 0.0,
        }
        .to_vector(n),
    );
    Ok(CompleteVanillaSolution {
        phi_s,
        phi_ns,
        extent,
        distress,
    })
}

/// Safe region in the `(y, eps)` plane for a network summarised by its
/// mixing coefficient `lambda`.
///
/// A point is safe when `y <= y_star`, or `eps <= eps_star(y)`, or
/// `eps <= eps_noshock(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRegion {
    pub lambda: f64,
    /// Excess liquidity `(1 - tau) a - s`.
    pub b: f64,
    pub tau: f64,
    pub y_star: f64,
    /// `eps_star(y) = anchor - (y - y_star) * decay`.
    pub anchor: f64,
    pub decay: f64,
}

impl StabilityRegion {
    /// Small-shock boundary `eps*_lambda(y)`.
    pub fn eps_star(&self, y: f64) -> f64 {
        self.anchor - (y - self.y_star) * self.decay
    }

    /// Slope of `eps_star` in `y`.
    pub fn eps_star_slope(&self) -> f64 {
        -self.decay
    }

    /// No-shock boundary `(b - tau y) / (1 - tau)`: below it the shocked bank
    /// does not even trigger.
    pub fn eps_noshock(&self, y: f64) -> f64 {
        (self.b - self.tau * y) / (1.0 - self.tau)
    }

    pub fn is_safe(&self, y: f64, eps: f64) -> bool {
        y <= self.y_star || eps <= self.eps_star(y) || eps <= self.eps_noshock(y)
    }

    /// Boundary of the unsafe set along `eps` at exposure `y`:
    /// `None` when every shock is safe, otherwise
    /// `max(eps_star(y), eps_noshock(y))`, which may be negative.
    pub fn systemic_shock(&self, y: f64) -> Option<f64> {
        if y <= self.y_star {
            None
        } else {
            Some(self.eps_star(y).max(self.eps_noshock(y)))
        }
    }
}

pub fn stability_region(lambda: f64, b: f64, tau: f64) -> Result<StabilityRegion> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!("lambda must lie in [0,1], got {lambda}")));
    }
    if !(b >= 0.0) {
        return Err(Error::domain(format!("excess liquidity must be >= 0, got {b}")));
    }
    if tau == 0.0 {
        return Err(Error::domain("tau = 0 is the plain-debt limit; use vanilla_thresholds"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau must lie in (0,1), got {tau}")));
    }
    let y_star = b * lambda / tau;
    let anchor = b * (lambda / tau + 1.0 / (1.0 - tau));
    let decay = 1.0 / ((1.0 - tau) * (1.0 - lambda)) - 1.0;
    Ok(StabilityRegion {
        lambda,
        b,
        tau,
        y_star,
        anchor,
        decay,
    })
}

/// The two topologies with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ring,
    Complete,
}

/// `1 - (1 - tau)^(n - 1)`.
pub fn ring_lambda(n: usize, tau: f64) -> f64 {
    1.0 - (1.0 - tau).powi(n as i32 - 1)
}

/// `tau (n - 1) / (1 + tau (n - 2))`.
pub fn complete_lambda(n: usize, tau: f64) -> f64 {
    tau * (n - 1) as f64 / (1.0 + tau * (n - 2) as f64)
}

/// Systemic-trigger region of the ring or complete network.
///
/// At `tau = 0` this returns the plain-debt limit: `y_star = (n-1)(a-s)`
/// and a flat `eps_star = n (a - s)`.
pub fn coco_thresholds(n: usize, a: f64, s: f64, tau: f64, shape: Shape) -> Result<StabilityRegion> {
    if n < 2 {
        return Err(Error::domain("need at least 2 banks"));
    }
    let b = (1.0 - tau) * a - s;
    if !(b >= 0.0) {
        return Err(Error::domain(format!("(1 - tau) a - s = {b} is negative")));
    }
    if tau == 0.0 {
        let th = vanilla_thresholds(n, a, s)?;
        return Ok(StabilityRegion {
            lambda: 0.0,
            b,
            tau,
            y_star: th.y_star,
            anchor: th.eps_star,
            decay: 0.0,
        });
    }
    let lambda = match shape {
        Shape::Ring => ring_lambda(n, tau),
        Shape::Complete => complete_lambda(n, tau),
    };
    stability_region(lambda, b, tau)
}

/// Fraction of ring banks whose CoCo triggers, from the geometric recursion
/// of fitness along the ring.
pub fn coco_ring_extent(n: usize, a: f64, s: f64, y: f64, tau: f64, eps: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau must lie in (0,1), got {tau}")));
    }
    let phi_inf = ((1.0 - tau) * a - s) / (tau * y);
    if !(phi_inf > 1.0) {
        return Err(Error::Region(format!(
            "fitness limit {phi_inf} <= 1: triggering is systemic"
        )));
    }
    let phi_1 = activation((1.0 - tau) * (y + a - eps), y, s)?;
    let raw = ((phi_inf - 1.0) / (phi_inf - phi_1)).ln() / (n as f64 * (1.0 - tau).ln());
    Ok(clamp_unit(raw, "ring trigger extent"))
}

/// Critical shock with equity liquidation value `eta`.
///
/// Returns [`Error::SystemicAtAnyShock`] when `(1 - tau)(a + y) - (s + y) <= 0`.
pub fn critical_shock_liq(n: usize, a: f64, s: f64, y: f64, tau: f64, eta: f64, shape: Shape) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) || !(0.0..1.0).contains(&eta) {
        return Err(Error::domain(format!(
            "need tau, eta in [0,1), got tau={tau}, eta={eta}"
        )));
    }
    let bracket = (1.0 - tau) * (a + y) - (s + y);
    if !(bracket > 0.0) {
        return Err(Error::SystemicAtAnyShock);
    }
    let nf = n as f64;
    let factor = match shape {
        Shape::Ring => {
            let c = (1.0 - eta) * (1.0 - tau);
            if tau == 0.0 && eta == 0.0 {
                // (1 - C^n) / (1 - C) -> n as C -> 1
                nf
            } else {
                let cn = c.powi(n as i32);
                (1.0 - eta) * (1.0 - cn) / (cn * (1.0 - c))
            }
        }
        Shape::Complete => (nf - tau - eta * (1.0 - tau)) / ((1.0 - eta) * (1.0 - tau).powi(2)),
    };
    Ok(bracket * factor)
}

/// Smallest shock making the trigger systemic with liquidation value `eta`,
/// or `None` if no shock does.
///
/// The critical-shock formula assumes the shocked bank's fitness is still
/// above its floor; past `a + y - s / (1 - tau)` it is pinned at `eta`, so a
/// critical value beyond that point is never reached.
pub fn systemic_onset(n: usize, a: f64, s: f64, y: f64, tau: f64, eta: f64, shape: Shape) -> Result<Option<f64>> {
    match critical_shock_liq(n, a, s, y, tau, eta, shape) {
        Ok(eps) => {
            let pinned = a + y - s / (1.0 - tau);
            Ok((eps <= pinned).then_some(eps))
        }
        Err(Error::SystemicAtAnyShock) => Ok(Some(0.0)),
        Err(e) => Err(e),
    }
}
