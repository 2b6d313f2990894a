//! Design with the exact rate functions of a known fading law.

use std::cell::RefCell;

use super::{level_cap, search_exponent, Construction, DesignConfig, DesignOutcome};
use crate::channel::ChannelSpec;
use crate::constellation::Constellation;
use crate::error::{invalid, Error, Result};
use crate::numeric::first_crossing;
use crate::rates::{ExactRates, RateModel, Side};

/// Maximizes the error exponent for a known channel distribution.
pub fn design_exact(channel: &ChannelSpec, sigma2: f64, cfg: &DesignConfig) -> Result<DesignOutcome> {
    if !channel.is_samplable() {
        return Err(Error::MomentsOnly);
    }
    design_with_model(
        &ExactRates {
            channel: *channel,
            sigma2,
        },
        cfg,
    )
}

/// The same sequential construction with any rate model, e.g. the
/// quadratic approximation.
pub fn design_with_model<M: RateModel>(model: &M, cfg: &DesignConfig) -> Result<DesignOutcome> {
    check_sigma2(model.sigma2())?;
    let search = search_exponent(cfg, |t, budget| construct_capped(model, cfg.levels, t, budget))?
        .ok_or_else(|| Error::RootNotFound("no positive exponent fits the power budget".into()))?;
    let c = search.construction;
    let boundary_exponents = c
        .boundaries
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let right = model.rate(Side::Right, c.levels[k], b - c.levels[k] - model.sigma2())?;
            let left = model.rate(Side::Left, c.levels[k + 1], c.levels[k + 1] + model.sigma2() - b)?;
            Ok((right, left))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_power = c.mean_power();
    Ok(DesignOutcome {
        constellation: Constellation::new(c.levels, model.sigma2(), c.boundaries)?,
        t_star: search.t,
        boundary_exponents,
        mean_power,
        iterations: search.iterations,
    })
}

/// Cheapest `L`-level construction whose interior exponents all equal `t`,
/// or `None` if some level cannot be placed.
pub fn construct_exact(channel: &ChannelSpec, sigma2: f64, levels: usize, t: f64) -> Result<Option<Construction>> {
    construct_with_model(
        &ExactRates {
            channel: *channel,
            sigma2,
        },
        levels,
        t,
    )
}

pub fn construct_with_model<M: RateModel>(model: &M, levels: usize, t: f64) -> Result<Option<Construction>> {
    check_sigma2(model.sigma2())?;
    if levels < 2 {
        return Err(invalid("levels", format!("need at least 2 levels, got {levels}")));
    }
    construct_capped(model, levels, t, f64::INFINITY)
}

fn construct_capped<M: RateModel>(model: &M, count: usize, t: f64, budget: f64) -> Result<Option<Construction>> {
    let sigma2 = model.sigma2();
    let mut levels = vec![0.0];
    let mut boundaries = Vec::with_capacity(count - 1);
    while levels.len() < count {
        let p = *levels.last().unwrap();
        let d_right = model.inverse(Side::Right, p, t)?;
        let start = p + d_right;
        let cap = level_cap(&levels, count, budget);
        if !(start < cap) {
            return Ok(None);
        }
        let failure = RefCell::new(None);
        let gap = |q: f64| match model.rate(Side::Left, q, q - start) {
            Ok(r) => r - t,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let next = first_crossing(gap, start, d_right.max(1e-12), cap);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let Some(next) = next else {
            return Ok(None);
        };
        boundaries.push(p + sigma2 + d_right);
        levels.push(next);
    }
    Ok(Some(Construction { levels, boundaries }))
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(invalid("sigma2", format!("must be positive and finite, got {sigma2}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sigma_from_snr;
    use crate::rates::error_exponent;

    #[test]
    fn two_levels_spend_the_whole_budget() {
        let s2 = sigma_from_snr(10.0).unwrap();
        let cfg = DesignConfig::new(2).with_epsilon(1e-7);
        let out = design_exact(&ChannelSpec::rayleigh(), s2, &cfg).unwrap();
        let lv = out.constellation.levels();
        assert_eq!(lv[0], 0.0);
        assert!((lv[1] - 2.0).abs() <= 2.0 * cfg.epsilon, "{lv:?}");
    }

    #[test]
    fn interior_exponents_equal_t_star() {
        let s2 = sigma_from_snr(10.0).unwrap();
        let cfg = DesignConfig::new(4).with_epsilon(1e-6);
        let ch = ChannelSpec::rayleigh();
        let out = design_exact(&ch, s2, &cfg).unwrap();
        for &(r, l) in &out.boundary_exponents {
            assert!((r - out.t_star).abs() < 1e-8, "{r} vs {}", out.t_star);
            assert!((l - out.t_star).abs() < 1e-8, "{l} vs {}", out.t_star);
        }
        assert!((out.mean_power - 1.0).abs() < cfg.epsilon);
        let ie = error_exponent(&out.constellation, &ch, s2).unwrap();
        assert!((ie - out.t_star).abs() < 1e-8);
    }

    #[test]
    fn moments_only_channel_is_rejected() {
        let ch = ChannelSpec::moments_only(1.0).unwrap();
        assert_eq!(design_exact(&ch, 0.1, &DesignConfig::new(2)).unwrap_err(), Error::MomentsOnly);
    }

    #[test]
    fn larger_exponent_costs_more_power() {
        let ch = ChannelSpec::rician(0.0).unwrap();
        let s2 = sigma_from_snr(5.0).unwrap();
        let mut last = 0.0;
        for &t in &[0.001, 0.004, 0.016, 0.05] {
            let s = construct_exact(&ch, s2, 4, t).unwrap().map_or(f64::INFINITY, |c| c.mean_power());
            assert!(s >= last, "t={t}: {s} < {last}");
            last = s;
        }
    }
}
