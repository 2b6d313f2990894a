//! Large-deviations rate functions of the antenna-averaged received energy.
//!
//! For power level `p` the per-antenna centered energy `U` has cumulant
//! function `Λ(θ) = log E[exp(θU)]`. The right and left rate functions are
//! the Legendre transforms
//!
//! ```text
//! I_R(d) = sup_{θ≥0} θd − Λ(θ),     I_L(d) = sup_{θ≥0} θd − Λ(−θ)
//! ```
//!
//! and `P(‖y‖²/n − r(p) > d) ≤ exp(−n I_R(d))` (likewise on the left).
//! Infinite exponents are ordinary `f64::INFINITY` values.

use serde::{Deserialize, Serialize};

use crate::channel::{energy_variance, log_mgf_energy, mgf_theta_max, u_second_moment, ChannelSpec};
use crate::constellation::Constellation;
use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect_increasing, golden_section_max};

/// Which tail of the energy statistic a rate function describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Rate-function evaluator for one `(channel, sigma2, p)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOracle {
    channel: ChannelSpec,
    sigma2: f64,
    p: f64,
    theta_max: f64,
    variance: f64,
}

impl RateOracle {
    pub fn new(channel: ChannelSpec, sigma2: f64, p: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(invalid("sigma2", format!("must be finite and >= 0, got {sigma2}")));
        }
        let theta_max = mgf_theta_max(&channel, sigma2, p)?;
        let variance = u_second_moment(&channel, sigma2, p)?;
        Ok(RateOracle {
            channel,
            sigma2,
            p,
            theta_max,
            variance,
        })
    }

    pub fn power(&self) -> f64 {
        self.p
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Right boundary of the MGF domain.
    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// `r(p) = p + sigma2`.
    pub fn mean_energy(&self) -> f64 {
        self.p + self.sigma2
    }

    /// `E[U^2]`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `Λ(θ)`, or `+inf` outside the domain.
    pub fn log_mgf(&self, theta: f64) -> f64 {
        if theta >= self.theta_max {
            return f64::INFINITY;
        }
        log_mgf_energy(&self.channel, self.sigma2, self.p, theta).unwrap_or(f64::INFINITY)
    }

    fn theta_scale(&self) -> f64 {
        if self.variance > 0.0 {
            1.0 / self.variance.sqrt()
        } else {
            1.0
        }
    }

    pub fn rate(&self, side: Side, d: f64) -> Result<f64> {
        match side {
            Side::Left => self.rate_left(d),
            Side::Right => self.rate_right(d),
        }
    }

    /// `I_R(d)`.
    pub fn rate_right(&self, d: f64) -> Result<f64> {
        check_deviation(d)?;
        if d == 0.0 {
            return Ok(0.0);
        }
        if d.is_infinite() {
            return Ok(f64::INFINITY);
        }
        let objective = |theta: f64| theta * d - self.log_mgf(theta);
        if self.theta_max.is_finite() {
            let (_, value) = golden_section_max(objective, 0.0, self.theta_max, 1e-13 * self.theta_max);
            Ok(value.max(0.0))
        } else {
            Ok(sup_on_half_line(objective, self.theta_scale()))
        }
    }

    /// `I_L(d)`; infinite once `d >= r(p)` since the statistic is nonnegative.
    pub fn rate_left(&self, d: f64) -> Result<f64> {
        check_deviation(d)?;
        if d == 0.0 {
            return Ok(0.0);
        }
        if d >= self.mean_energy() {
            return Ok(f64::INFINITY);
        }
        let objective = |theta: f64| theta * d - self.log_mgf(-theta);
        Ok(sup_on_half_line(objective, self.theta_scale()))
    }

    /// Smallest `d > 0` with `I(d) = t`.
    pub fn inverse_rate(&self, side: Side, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(invalid("t", format!("target exponent must be positive, got {t}")));
        }
        if t.is_infinite() {
            return Ok(match side {
                Side::Left => self.mean_energy(),
                Side::Right => f64::INFINITY,
            });
        }
        let rate = |d: f64| self.rate(side, d).unwrap_or(f64::INFINITY);
        let hi = match side {
            Side::Left => self.mean_energy(),
            Side::Right => {
                let mut hi = (2.0 * t * self.variance).sqrt().max(f64::MIN_POSITIVE);
                while rate(hi) < t {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(Error::RootNotFound(format!("right rate never reaches {t}")));
                    }
                }
                hi
            }
        };
        let d = bisect_increasing(|d| rate(d) - t, 0.0, hi);
        if side == Side::Left && d >= hi {
            // The exponent only reaches `t` closer to `r(p)` than one ulp.
            return Ok(f64::from_bits(hi.to_bits() - 1));
        }
        Ok(d)
    }
}

fn check_deviation(d: f64) -> Result<()> {
    if d.is_nan() || d < 0.0 {
        return Err(invalid("d", format!("deviation must be >= 0, got {d}")));
    }
    Ok(())
}

/// Supremum of a concave function with `f(0) = 0` over `[0, inf)`.
fn sup_on_half_line<F: Fn(f64) -> f64>(f: F, scale: f64) -> f64 {
    let mut b = scale;
    let mut fb = f(b);
    loop {
        let f2 = f(2.0 * b);
        if !(f2 > fb) {
            break;
        }
        b *= 2.0;
        fb = f2;
        if b > 1e250 {
            return f64::INFINITY;
        }
    }
    let upper = 2.0 * b;
    let (_, value) = golden_section_max(&f, 0.0, upper, 1e-13 * upper);
    value.max(fb).max(0.0)
}

/// Quadratic small-deviation approximation `d^2 / (2 s_p)`.
pub fn approx_rate(s_p: f64, d: f64) -> Result<f64> {
    if !(s_p > 0.0) {
        return Err(invalid("s_p", format!("energy variance must be positive, got {s_p}")));
    }
    check_deviation(d)?;
    Ok(d * d / (2.0 * s_p))
}

/// Splits the gap between adjacent receiver points so that the right
/// exponent of the lower level equals the left exponent of the upper one.
/// Returns the right deviation `d_R` of the lower level.
pub fn equalize_boundary(lower: &RateOracle, upper: &RateOracle, gap: f64) -> Result<f64> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(invalid("gap", format!("must be positive and finite, got {gap}")));
    }
    let diff = |d: f64| {
        let right = lower.rate_right(d).unwrap_or(f64::INFINITY);
        let left = upper.rate_left((gap - d).max(0.0)).unwrap_or(f64::INFINITY);
        if right.is_infinite() && left.is_infinite() {
            0.0
        } else {
            right - left
        }
    };
    Ok(bisect_increasing(diff, 0.0, gap))
}

/// Per-level `(I_L(d_L), I_R(d_R))` with the constellation's regions
/// evaluated on the given channel. Outer sides are infinite; a receiver
/// point outside its own region yields exponent 0 on that side.
pub fn level_exponents(constellation: &Constellation, channel: &ChannelSpec, sigma2: f64) -> Result<Vec<(f64, f64)>> {
    let deviations = constellation.deviations(sigma2)?;
    constellation
        .levels()
        .iter()
        .zip(deviations)
        .map(|(&p, (dl, dr))| {
            let oracle = RateOracle::new(*channel, sigma2, p)?;
            let side = |s: Side, d: f64| -> Result<f64> {
                if d.is_infinite() {
                    Ok(f64::INFINITY)
                } else if d <= 0.0 {
                    Ok(0.0)
                } else {
                    oracle.rate(s, d)
                }
            };
            Ok((side(Side::Left, dl)?, side(Side::Right, dr)?))
        })
        .collect()
}

/// Chernoff upper bound on the symbol error rate with `n` antennas.
pub fn chernoff_ser_bound(constellation: &Constellation, channel: &ChannelSpec, sigma2: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "antenna count must be >= 1"));
    }
    let exps = level_exponents(constellation, channel, sigma2)?;
    let nf = n as f64;
    let total: f64 = exps.iter().map(|&(l, r)| (-nf * l).exp() + (-nf * r).exp()).sum();
    Ok(total / constellation.len() as f64)
}

/// Error exponent of the SER: the smallest finite-side exponent.
pub fn error_exponent(constellation: &Constellation, channel: &ChannelSpec, sigma2: f64) -> Result<f64> {
    Ok(level_exponents(constellation, channel, sigma2)?
        .into_iter()
        .flat_map(|(l, r)| [l, r])
        .fold(f64::INFINITY, f64::min))
}

/// Rate functions as a function of power level, so designs can swap the
/// exact Legendre transforms for the quadratic approximation.
pub trait RateModel {
    /// Noise power that places receiver points at `p + sigma2`.
    fn sigma2(&self) -> f64;
    fn rate(&self, side: Side, p: f64, d: f64) -> Result<f64>;
    fn inverse(&self, side: Side, p: f64, t: f64) -> Result<f64>;
}

/// Exact rate functions of a known fading distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRates {
    pub channel: ChannelSpec,
    pub sigma2: f64,
}

impl RateModel for ExactRates {
    fn sigma2(&self) -> f64 {
        self.sigma2
    }

    fn rate(&self, side: Side, p: f64, d: f64) -> Result<f64> {
        RateOracle::new(self.channel, self.sigma2, p)?.rate(side, d)
    }

    fn inverse(&self, side: Side, p: f64, t: f64) -> Result<f64> {
        RateOracle::new(self.channel, self.sigma2, p)?.inverse_rate(side, t)
    }
}

/// Quadratic approximation `d^2 / (2 E[U^2])`, which needs only `alpha1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRates {
    pub alpha1: f64,
    pub sigma2: f64,
}

impl RateModel for QuadraticRates {
    fn sigma2(&self) -> f64 {
        self.sigma2
    }

    fn rate(&self, _side: Side, p: f64, d: f64) -> Result<f64> {
        approx_rate(energy_variance(self.alpha1, self.sigma2, p), d)
    }

    fn inverse(&self, _side: Side, p: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(invalid("t", format!("target exponent must be positive, got {t}")));
        }
        Ok((2.0 * t * energy_variance(self.alpha1, self.sigma2, p)).sqrt())
    }
}
