//! Worst-case design over a box of fourth-moment coefficients and noise
//! levels.
//!
//! Exponents use the same units as the moment design, `d^2 / (2 s_f(p))`,
//! so every distance threshold is `sqrt(2 t s_f(p))`. A box of zero width
//! therefore reproduces the moment design.

use serde::{Deserialize, Serialize};

use super::{level_cap, search_exponent, Construction, DesignConfig, DesignOutcome};
use crate::channel::{energy_variance, sigma_from_snr, ChannelSpec};
use crate::constellation::Constellation;
use crate::error::{invalid, Result};
use crate::numeric::first_crossing;

/// `alpha1 in [alpha_min, alpha_max]`, noise amplitude `sigma in [sigma_min, sigma_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBox {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl UncertaintyBox {
    pub fn new(alpha_min: f64, alpha_max: f64, sigma_min: f64, sigma_max: f64) -> Result<Self> {
        let b = UncertaintyBox {
            alpha_min,
            alpha_max,
            sigma_min,
            sigma_max,
        };
        b.validate()?;
        Ok(b)
    }

    /// Box given by noise-power bounds instead of amplitudes.
    pub fn from_noise_powers(alpha_min: f64, alpha_max: f64, sigma2_min: f64, sigma2_max: f64) -> Result<Self> {
        Self::new(alpha_min, alpha_max, sigma2_min.sqrt(), sigma2_max.sqrt())
    }

    /// Zero-width box.
    pub fn point(alpha1: f64, sigma2: f64) -> Result<Self> {
        Self::from_noise_powers(alpha1, alpha1, sigma2, sigma2)
    }

    /// Enclosing box of the Rician channels with K-factor and SNR each
    /// within `a_db` of the nominal values.
    pub fn from_rician_db(k_db: f64, gamma_db: f64, a_db: f64) -> Result<Self> {
        if !(a_db.is_finite() && a_db >= 0.0) {
            return Err(invalid("a_db", format!("half-width must be finite and >= 0, got {a_db}")));
        }
        let alphas = [
            ChannelSpec::rician(k_db - a_db)?.alpha1(),
            ChannelSpec::rician(k_db + a_db)?.alpha1(),
        ];
        let noise = [sigma_from_snr(gamma_db - a_db)?, sigma_from_snr(gamma_db + a_db)?];
        Self::from_noise_powers(
            alphas[0].min(alphas[1]),
            alphas[0].max(alphas[1]),
            noise[0].min(noise[1]),
            noise[0].max(noise[1]),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min.is_finite() && self.alpha_max.is_finite() && 0.0 <= self.alpha_min && self.alpha_min <= self.alpha_max) {
            return Err(invalid(
                "alpha",
                format!("need 0 <= alpha_min <= alpha_max, got [{}, {}]", self.alpha_min, self.alpha_max),
            ));
        }
        if !(self.sigma_min.is_finite() && self.sigma_max.is_finite() && 0.0 < self.sigma_min && self.sigma_min <= self.sigma_max) {
            return Err(invalid(
                "sigma",
                format!("need 0 < sigma_min <= sigma_max, got [{}, {}]", self.sigma_min, self.sigma_max),
            ));
        }
        Ok(())
    }

    pub fn sigma2_min(&self) -> f64 {
        self.sigma_min * self.sigma_min
    }

    pub fn sigma2_max(&self) -> f64 {
        self.sigma_max * self.sigma_max
    }

    /// Geometric mean of the noise-power bounds; used as the nominal noise
    /// power of the resulting constellation.
    pub fn nominal_sigma2(&self) -> f64 {
        self.sigma_min * self.sigma_max
    }

    pub fn contains(&self, other: &UncertaintyBox) -> bool {
        self.alpha_min <= other.alpha_min
            && other.alpha_max <= self.alpha_max
            && self.sigma_min <= other.sigma_min
            && other.sigma_max <= self.sigma_max
    }
}

/// Robust design result; an empty feasible set is an ordinary outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RobustOutcome {
    Designed(DesignOutcome),
    /// Even exponent `epsilon` needs more than the budget; `mean_power` is
    /// what it would take (infinite when no construction exists).
    Infeasible { epsilon: f64, mean_power: f64 },
}

impl RobustOutcome {
    pub fn designed(&self) -> Option<&DesignOutcome> {
        match self {
            RobustOutcome::Designed(d) => Some(d),
            RobustOutcome::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, RobustOutcome::Designed(_))
    }
}

pub fn design_robust(uncertainty: &UncertaintyBox, cfg: &DesignConfig) -> Result<RobustOutcome> {
    uncertainty.validate()?;
    let Some(search) = search_exponent(cfg, |t, budget| Ok(construct(uncertainty, cfg.levels, t, budget)))? else {
        let mean_power = construct(uncertainty, cfg.levels, cfg.epsilon, f64::INFINITY).map_or(f64::INFINITY, |c| c.mean_power());
        return Ok(RobustOutcome::Infeasible {
            epsilon: cfg.epsilon,
            mean_power,
        });
    };
    let c = search.construction;
    let t = search.t;
    let a = uncertainty.alpha_max;
    let x_max = uncertainty.sigma2_max();
    let boundary_exponents = c
        .boundaries
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let (lo, hi) = (c.levels[k], c.levels[k + 1]);
            let right = (b - lo - x_max).powi(2) / (2.0 * energy_variance(a, x_max, lo));
            let left = noise_candidates(uncertainty, t, hi)
                .map(|x| (hi + x - b).powi(2) / (2.0 * energy_variance(a, x, hi)))
                .fold(f64::INFINITY, f64::min);
            (right, left)
        })
        .collect();
    let mean_power = c.mean_power();
    Ok(RobustOutcome::Designed(DesignOutcome {
        constellation: Constellation::new(c.levels, uncertainty.nominal_sigma2(), c.boundaries)?,
        t_star: t,
        boundary_exponents,
        mean_power,
        iterations: search.iterations,
    }))
}

/// Construction for a fixed exponent `t` without a power limit.
pub fn construct_robust(uncertainty: &UncertaintyBox, levels: usize, t: f64) -> Result<Option<Construction>> {
    uncertainty.validate()?;
    if levels < 2 {
        return Err(invalid("levels", format!("need at least 2 levels, got {levels}")));
    }
    if !(t > 0.0) {
        return Err(invalid("t", format!("target exponent must be positive, got {t}")));
    }
    Ok(construct(uncertainty, levels, t, f64::INFINITY))
}

/// Noise powers at which `sqrt(2t s_f(p)) - sigma2` can peak: both ends of
/// the range and the interior stationary point when it lies inside.
fn noise_candidates(b: &UncertaintyBox, t: f64, p: f64) -> impl Iterator<Item = f64> {
    let (lo, hi) = (b.sigma2_min(), b.sigma2_max());
    let scale2 = 2.0 * t;
    let mut interior = None;
    if b.alpha_max < 1.0 && scale2 < 1.0 && p > 0.0 {
        let x = p * (((1.0 - b.alpha_max) / (1.0 - scale2)).sqrt() - 1.0);
        if lo < x && x < hi {
            interior = Some(x);
        }
    }
    [lo, hi].into_iter().chain(interior)
}

fn construct(b: &UncertaintyBox, count: usize, t: f64, budget: f64) -> Option<Construction> {
    let a = b.alpha_max;
    let scale2 = 2.0 * t;
    if scale2 * a >= 1.0 {
        return None;
    }
    let scale = scale2.sqrt();
    let x_max = b.sigma2_max();
    let worst_excess = |p: f64| {
        noise_candidates(b, t, p)
            .map(|x| scale * energy_variance(a, x, p).sqrt() - x)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut levels = vec![0.0];
    let mut boundaries = Vec::with_capacity(count - 1);
    while levels.len() < count {
        let p = *levels.last().unwrap();
        let boundary = p + x_max + scale * energy_variance(a, x_max, p).sqrt();
        let cap = level_cap(&levels, count, budget);
        let next = first_crossing(|q| q - boundary - worst_excess(q), p, (boundary - p).max(1e-12), cap)?;
        boundaries.push(boundary);
        levels.push(next);
    }
    Some(Construction { levels, boundaries })
}
