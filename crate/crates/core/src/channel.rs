//! Fading and noise statistics.
//!
//! A [`ChannelSpec`] describes the per-antenna fading law `h ~ f(h)` with
//! `E[|h|^2] = 1`. The received energy at one antenna for transmit power
//! `p` is `|h sqrt(p) + v|^2` with `v ~ CN(0, sigma2)`; its centered version
//! `U = |h sqrt(p) + v|^2 - (p + sigma2)` drives all rate functions.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::ln_gamma;

/// Converts decibels to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Fading-distribution descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// `h ~ CN(sqrt(K/(K+1)), 1/(K+1))`. `k_db = -inf` is Rayleigh,
    /// `k_db = +inf` a deterministic line-of-sight channel.
    Rician { k_db: f64 },
    /// Nonnegative real amplitude with Nakagami-m law and second moment `omega`.
    NakagamiReal { m: f64, omega: f64 },
    /// Only the fourth-moment coefficient is known.
    MomentsOnly { alpha1: f64 },
}

impl ChannelSpec {
    pub fn rician(k_db: f64) -> Result<Self> {
        if k_db.is_nan() {
            return Err(invalid("k_db", "must not be NaN"));
        }
        Ok(ChannelSpec::Rician { k_db })
    }

    pub fn rayleigh() -> Self {
        ChannelSpec::Rician {
            k_db: f64::NEG_INFINITY,
        }
    }

    /// Unit-power Nakagami-m channel.
    pub fn nakagami(m: f64) -> Result<Self> {
        Self::nakagami_with_omega(m, 1.0)
    }

    /// Nakagami-m channel; `omega` must be 1 since every rate function
    /// assumes `E[|h|^2] = 1`.
    pub fn nakagami_with_omega(m: f64, omega: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(invalid("m", format!("shape must be positive and finite, got {m}")));
        }
        if !(omega.is_finite() && (omega - 1.0).abs() <= 1e-12) {
            return Err(invalid("omega", format!("channel must be normalized (omega = 1), got {omega}")));
        }
        Ok(ChannelSpec::NakagamiReal { m, omega })
    }

    /// Nakagami-m channel whose mean matches a Rician channel with the given K.
    pub fn nakagami_matched(k_db: f64) -> Result<Self> {
        Self::nakagami(nakagami_m_from_k(k_db)?)
    }

    pub fn moments_only(alpha1: f64) -> Result<Self> {
        if !(alpha1.is_finite() && alpha1 >= 0.0) {
            return Err(invalid("alpha1", format!("must be finite and >= 0, got {alpha1}")));
        }
        Ok(ChannelSpec::MomentsOnly { alpha1 })
    }

    /// Checks the invariants of a deserialized value.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Rician { k_db } => Self::rician(k_db).map(|_| ()),
            ChannelSpec::NakagamiReal { m, omega } => Self::nakagami_with_omega(m, omega).map(|_| ()),
            ChannelSpec::MomentsOnly { alpha1 } => Self::moments_only(alpha1).map(|_| ()),
        }
    }

    /// Linear K-factor of a Rician channel.
    pub fn k_linear(&self) -> Option<f64> {
        match *self {
            ChannelSpec::Rician { k_db } => Some(db_to_linear(k_db)),
            _ => None,
        }
    }

    pub fn is_samplable(&self) -> bool {
        !matches!(self, ChannelSpec::MomentsOnly { .. })
    }

    /// `E[h]`.
    pub fn mean(&self) -> Result<Complex64> {
        match *self {
            ChannelSpec::Rician { k_db } => Ok(Complex64::new(rician_los_amplitude(k_db), 0.0)),
            ChannelSpec::NakagamiReal { m, omega } => Ok(Complex64::new(
                nakagami_mean_ratio(m) * omega.sqrt(),
                0.0,
            )),
            ChannelSpec::MomentsOnly { .. } => Err(Error::MomentsOnly),
        }
    }

    /// `E[|h - E[h]|^2]`.
    pub fn scatter_variance(&self) -> Result<f64> {
        match *self {
            ChannelSpec::Rician { k_db } => Ok(rician_scatter(k_db)),
            ChannelSpec::NakagamiReal { m, omega } => {
                let mean = nakagami_mean_ratio(m);
                Ok(omega * (1.0 - mean * mean).max(0.0))
            }
            ChannelSpec::MomentsOnly { .. } => Err(Error::MomentsOnly),
        }
    }

    /// Fourth-moment coefficient `E[h_re^4] + E[h_im^4] + 2 E[h_re^2] E[h_im^2] - 1`.
    pub fn alpha1(&self) -> f64 {
        match *self {
            ChannelSpec::Rician { k_db } => {
                let k = db_to_linear(k_db);
                if k.is_infinite() {
                    0.0
                } else {
                    (1.0 + 2.0 * k) / ((1.0 + k) * (1.0 + k))
                }
            }
            ChannelSpec::NakagamiReal { m, omega } => omega * omega * (1.0 + 1.0 / m) - 1.0,
            ChannelSpec::MomentsOnly { alpha1 } => alpha1,
        }
    }

    /// Precomputed sampler for the fading law.
    pub fn sampler(&self) -> Result<ChannelSampler> {
        match *self {
            ChannelSpec::Rician { .. } => Ok(ChannelSampler::Gaussian {
                mean: self.mean()?,
                component_std: (0.5 * self.scatter_variance()?).sqrt(),
            }),
            ChannelSpec::NakagamiReal { m, omega } => Ok(ChannelSampler::Nakagami {
                power: Gamma::new(m, omega / m).map_err(|e| invalid("m", e.to_string()))?,
            }),
            ChannelSpec::MomentsOnly { .. } => Err(Error::NotSamplable),
        }
    }

    /// Draws `count` i.i.d. fading coefficients.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Complex64>> {
        let sampler = self.sampler()?;
        Ok((0..count).map(|_| sampler.draw(rng)).collect())
    }
}

fn rician_los_amplitude(k_db: f64) -> f64 {
    let k = db_to_linear(k_db);
    if k.is_infinite() {
        1.0
    } else {
        (k / (k + 1.0)).sqrt()
    }
}

fn rician_scatter(k_db: f64) -> f64 {
    let k = db_to_linear(k_db);
    if k.is_infinite() {
        0.0
    } else {
        1.0 / (k + 1.0)
    }
}

/// Sampler state for a samplable [`ChannelSpec`].
#[derive(Debug, Clone, Copy)]
pub enum ChannelSampler {
    Gaussian { mean: Complex64, component_std: f64 },
    Nakagami { power: Gamma<f64> },
}

impl ChannelSampler {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            ChannelSampler::Gaussian {
                mean,
                component_std,
            } => {
                if *component_std == 0.0 {
                    return *mean;
                }
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                mean + Complex64::new(re, im) * *component_std
            }
            ChannelSampler::Nakagami { power } => Complex64::new(power.sample(rng).sqrt(), 0.0),
        }
    }
}

/// Draws circularly-symmetric complex Gaussian noise with total variance `sigma2`.
#[inline]
pub fn draw_noise<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> Complex64 {
    let s = (0.5 * sigma2).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Receiver noise level derived from the per-antenna SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePlan {
    pub gamma_db: f64,
    pub sigma2: f64,
}

impl NoisePlan {
    pub fn from_snr_db(gamma_db: f64) -> Result<Self> {
        Ok(NoisePlan {
            gamma_db,
            sigma2: sigma_from_snr(gamma_db)?,
        })
    }

    pub fn from_sigma2(sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(invalid("sigma2", format!("must be positive and finite, got {sigma2}")));
        }
        Ok(NoisePlan {
            gamma_db: -linear_to_db(sigma2),
            sigma2,
        })
    }
}

/// Noise power `10^(-gamma_db/10)` for unit average channel gain.
pub fn sigma_from_snr(gamma_db: f64) -> Result<f64> {
    if !gamma_db.is_finite() {
        return Err(invalid("gamma_db", format!("must be finite, got {gamma_db}")));
    }
    Ok(db_to_linear(-gamma_db))
}

/// `E[U^2] = alpha1 p^2 + 2 sigma2 p + sigma2^2`.
pub fn u_second_moment(channel: &ChannelSpec, sigma2: f64, p: f64) -> Result<f64> {
    check_power(p)?;
    Ok(energy_variance(channel.alpha1(), sigma2, p))
}

/// The same second moment from the raw coefficients.
#[inline]
pub fn energy_variance(alpha1: f64, sigma2: f64, p: f64) -> f64 {
    alpha1 * p * p + 2.0 * sigma2 * p + sigma2 * sigma2
}

fn check_power(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(invalid("p", format!("power level must be finite and >= 0, got {p}")));
    }
    Ok(())
}

/// Supremum of the MGF domain of `U`; `+inf` when `U` is degenerate.
pub fn mgf_theta_max(channel: &ChannelSpec, sigma2: f64, p: f64) -> Result<f64> {
    check_power(p)?;
    let spread = match *channel {
        ChannelSpec::Rician { .. } => channel.scatter_variance()? * p + sigma2,
        ChannelSpec::NakagamiReal { m, omega } => omega * p / m + sigma2,
        ChannelSpec::MomentsOnly { .. } => return Err(Error::MomentsOnly),
    };
    Ok(if spread > 0.0 { 1.0 / spread } else { f64::INFINITY })
}

/// `log E[exp(theta U)]` for the centered received energy `U`.
///
/// Rician channels use the noncentral-exponential closed form. Nakagami
/// channels condition on the amplitude and use the gamma MGF of `|h|^2`,
/// which is exact; its domain is `theta < 1 / (omega p / m + sigma2)`.
pub fn log_mgf_energy(channel: &ChannelSpec, sigma2: f64, p: f64, theta: f64) -> Result<f64> {
    let theta_max = mgf_theta_max(channel, sigma2, p)?;
    if theta >= theta_max {
        return Err(Error::DivergentMgf { theta, theta_max });
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let mean_energy = p + sigma2;
    match *channel {
        ChannelSpec::Rician { .. } => {
            let los = channel.mean()?.norm_sqr();
            let s2 = channel.scatter_variance()? * p + sigma2;
            let one_minus = 1.0 - theta * s2;
            Ok(-theta * mean_energy + theta * los * p / one_minus - one_minus.ln())
        }
        ChannelSpec::NakagamiReal { m, omega } => {
            let one_minus = 1.0 - theta * sigma2;
            let lambda = theta * p / one_minus;
            Ok(-theta * mean_energy - one_minus.ln() - m * (1.0 - lambda * omega / m).ln())
        }
        ChannelSpec::MomentsOnly { .. } => Err(Error::MomentsOnly),
    }
}

/// `Gamma(m + 1/2) / (Gamma(m) sqrt(m))`, the mean amplitude of a unit-power
/// Nakagami-m variable.
pub fn nakagami_mean_ratio(m: f64) -> f64 {
    if m >= 100.0 {
        let x = 1.0 / m;
        1.0 - x / 8.0 + x * x / 128.0 + 5.0 * x * x * x / 1024.0 - 21.0 * x * x * x * x / 32768.0
    } else {
        (ln_gamma(m + 0.5) - ln_gamma(m) - 0.5 * m.ln()).exp()
    }
}

/// Nakagami shape whose unit-power mean amplitude equals `sqrt(K/(K+1))`.
pub fn nakagami_m_from_k(k_db: f64) -> Result<f64> {
    if k_db.is_nan() {
        return Err(invalid("k_db", "must not be NaN"));
    }
    let k = db_to_linear(k_db);
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::NoMatchingShape { k_linear: k });
    }
    let target = (k / (k + 1.0)).sqrt();
    if target >= 1.0 {
        return Err(Error::NoMatchingShape { k_linear: k });
    }
    let residual = |m: f64| nakagami_mean_ratio(m) - target;
    let (mut lo, mut hi) = (1.0, 1.0);
    while residual(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoMatchingShape { k_linear: k });
        }
    }
    while residual(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoMatchingShape { k_linear: k });
        }
    }
    // Bisect in log(m) so tiny and huge shapes converge alike.
    let log_m = crate::numeric::bisect_increasing(|x| residual(x.exp()), lo.ln(), hi.ln());
    Ok(log_m.exp())
}
