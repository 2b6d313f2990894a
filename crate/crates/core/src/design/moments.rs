//! Design from the fourth-moment coefficient alone, using the quadratic
//! approximation of the rate functions.

use super::{level_cap, search_exponent, Construction, DesignConfig, DesignOutcome};
use crate::channel::energy_variance;
use crate::constellation::Constellation;
use crate::error::{invalid, Error, Result};

/// Maximizes the approximate error exponent `d^2 / (2 s(p))` with
/// `s(p) = alpha1 p^2 + 2 sigma2 p + sigma2^2`.
pub fn design_moments(alpha1: f64, sigma2: f64, cfg: &DesignConfig) -> Result<DesignOutcome> {
    check(alpha1, sigma2)?;
    let search = search_exponent(cfg, |t, budget| Ok(construct(alpha1, sigma2, cfg.levels, t, budget)))?
        .ok_or_else(|| Error::RootNotFound("no positive exponent fits the power budget".into()))?;
    let c = search.construction;
    let s = |p: f64| energy_variance(alpha1, sigma2, p);
    let boundary_exponents = c
        .boundaries
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let (lo, hi) = (c.levels[k], c.levels[k + 1]);
            let right = (b - lo - sigma2).powi(2) / (2.0 * s(lo));
            let left = (hi + sigma2 - b).powi(2) / (2.0 * s(hi));
            (right, left)
        })
        .collect();
    let mean_power = c.mean_power();
    Ok(DesignOutcome {
        constellation: Constellation::new(c.levels, sigma2, c.boundaries)?,
        t_star: search.t,
        boundary_exponents,
        mean_power,
        iterations: search.iterations,
    })
}

/// Construction for a fixed exponent `t` without a power limit.
pub fn construct_moments(alpha1: f64, sigma2: f64, levels: usize, t: f64) -> Result<Option<Construction>> {
    check(alpha1, sigma2)?;
    if levels < 2 {
        return Err(invalid("levels", format!("need at least 2 levels, got {levels}")));
    }
    if !(t > 0.0) {
        return Err(invalid("t", format!("target exponent must be positive, got {t}")));
    }
    Ok(construct(alpha1, sigma2, levels, t, f64::INFINITY))
}

fn check(alpha1: f64, sigma2: f64) -> Result<()> {
    if !(alpha1.is_finite() && alpha1 >= 0.0) {
        return Err(invalid("alpha1", format!("must be finite and >= 0, got {alpha1}")));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(invalid("sigma2", format!("must be positive and finite, got {sigma2}")));
    }
    Ok(())
}

fn construct(alpha1: f64, sigma2: f64, count: usize, t: f64, budget: f64) -> Option<Construction> {
    let scale2 = 2.0 * t;
    let leading = 1.0 - scale2 * alpha1;
    // Past this the gap grows no faster than sqrt(s(p)) and never closes.
    if leading <= 0.0 {
        return None;
    }
    let scale = scale2.sqrt();
    let mut levels = vec![0.0];
    let mut boundaries = Vec::with_capacity(count - 1);
    while levels.len() < count {
        let p = *levels.last().unwrap();
        let reach = scale * energy_variance(alpha1, sigma2, p).sqrt();
        // Next level q > a solves (q - a)^2 = 2t s(q) with a = p + reach;
        // a lies between the two roots of the quadratic, so take the larger.
        let a = p + reach;
        let half_b = a + scale2 * sigma2;
        let c = a * a - scale2 * sigma2 * sigma2;
        let disc = (half_b * half_b - leading * c).max(0.0);
        let next = (half_b + disc.sqrt()) / leading;
        if !(next < level_cap(&levels, count, budget)) {
            return None;
        }
        boundaries.push(p + sigma2 + reach);
        levels.push(next);
    }
    Some(Construction { levels, boundaries })
}
