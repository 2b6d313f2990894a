//! Constellation designs that maximize the error exponent under an average
//! power budget.
//!
//! Every design shares the same outer loop: for a candidate exponent `t`,
//! build the cheapest constellation whose interior exponents all reach `t`
//! and compare its mean power `S_t` with the budget. `S_t` grows with `t`,
//! so the largest admissible `t` is found by bisection.

mod baselines;
mod exact;
mod moments;
mod robust;

pub use baselines::{ask_constellation, equalized_regions, min_distance_constellation, pam_constellation, PamConstellation};
pub use exact::{construct_exact, construct_with_model, design_exact, design_with_model};
pub use moments::{construct_moments, design_moments};
pub use robust::{construct_robust, design_robust, RobustOutcome, UncertaintyBox};

use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{invalid, Result};

/// Absolute ceiling on any single power level while probing without a budget.
const UNBOUNDED_LEVEL_CAP: f64 = 1e12;
/// Exponents above this are treated as unbounded during the doubling phase.
const EXPONENT_CAP: f64 = 1e9;

/// Size, power budget and stopping tolerance shared by the designs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    /// Number of power levels `L`.
    pub levels: usize,
    /// Mean transmit power budget.
    pub budget: f64,
    /// Stops once the exponent bracket is narrower than this and the mean
    /// power is within this of the budget.
    pub epsilon: f64,
}

impl DesignConfig {
    pub fn new(levels: usize) -> Self {
        DesignConfig {
            levels,
            budget: 1.0,
            epsilon: 1e-9,
        }
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(invalid("levels", format!("need at least 2 levels, got {}", self.levels)));
        }
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return Err(invalid("budget", format!("must be positive and finite, got {}", self.budget)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(invalid("epsilon", format!("must be positive and finite, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Levels and boundaries built for one candidate exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub levels: Vec<f64>,
    pub boundaries: Vec<f64>,
}

impl Construction {
    /// `S_t`.
    pub fn mean_power(&self) -> f64 {
        self.levels.iter().sum::<f64>() / self.levels.len() as f64
    }
}

/// Result of a successful design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    pub constellation: Constellation,
    /// Exponent the construction was built for.
    pub t_star: f64,
    /// For each boundary `k`, the right exponent of level `k` and the left
    /// exponent of level `k + 1`, under the rate model of the design.
    pub boundary_exponents: Vec<(f64, f64)>,
    pub mean_power: f64,
    /// Constructions evaluated by the outer search.
    pub iterations: usize,
}

/// Largest exponent the power budget admits, with its construction.
pub(crate) struct Search {
    pub t: f64,
    pub construction: Construction,
    pub iterations: usize,
}

/// Outer search over the exponent.
///
/// `construct(t, level_cap)` returns `None` when no construction reaches `t`
/// with every level below `level_cap`-derived limits. Returns `None` if even
/// `t = epsilon` is unattainable.
pub(crate) fn search_exponent<F>(cfg: &DesignConfig, mut construct: F) -> Result<Option<Search>>
where
    F: FnMut(f64, f64) -> Result<Option<Construction>>,
{
    cfg.validate()?;
    let mut iterations = 0usize;
    let mut attempt = |t: f64, iterations: &mut usize| -> Result<Option<Construction>> {
        *iterations += 1;
        Ok(construct(t, cfg.budget)?.filter(|c| c.mean_power() <= cfg.budget))
    };

    let mut t_low = 0.0;
    let mut best: Option<Construction> = None;
    let mut t = cfg.epsilon;
    let mut t_high = loop {
        match attempt(t, &mut iterations)? {
            Some(c) => {
                t_low = t;
                best = Some(c);
                t *= 2.0;
                if t > EXPONENT_CAP {
                    break f64::INFINITY;
                }
            }
            None => break t,
        }
    };
    let Some(mut best) = best else {
        return Ok(None);
    };
    if t_high.is_infinite() {
        return Ok(Some(Search {
            t: t_low,
            construction: best,
            iterations,
        }));
    }

    for _ in 0..1000 {
        let slack = cfg.budget - best.mean_power();
        if t_high - t_low < cfg.epsilon && slack < cfg.epsilon {
            break;
        }
        let mid = 0.5 * (t_low + t_high);
        if mid <= t_low || mid >= t_high {
            break;
        }
        match attempt(mid, &mut iterations)? {
            Some(c) => {
                t_low = mid;
                best = c;
            }
            None => t_high = mid,
        }
    }
    Ok(Some(Search {
        t: t_low,
        construction: best,
        iterations,
    }))
}

/// Upper limit for level `index` (zero-based) given the levels placed so
/// far: every later level is at least as large, so exceeding it breaks the
/// mean-power budget. Infinite budgets fall back to a fixed ceiling.
pub(crate) fn level_cap(levels: &[f64], total: usize, budget: f64) -> f64 {
    if !budget.is_finite() {
        return UNBOUNDED_LEVEL_CAP;
    }
    let placed: f64 = levels.iter().sum();
    let remaining = (total - levels.len()) as f64;
    let cap = (total as f64 * budget - placed) / remaining;
    // Slight headroom so a level landing exactly on the limit is kept.
    cap * (1.0 + 1e-12) + f64::MIN_POSITIVE
}
