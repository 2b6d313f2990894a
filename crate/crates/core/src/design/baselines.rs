//! Reference constellations: evenly spaced powers, evenly spaced
//! amplitudes (energy ASK), and coherent PAM.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::constellation::Constellation;
use crate::error::{invalid, Result};
use crate::gray;
use crate::rates::{equalize_boundary, RateOracle};

fn check_size(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(invalid("levels", format!("need at least 2 levels, got {levels}")));
    }
    Ok(())
}

/// Powers `2k/(L-1)`, `k = 0..L`, with boundaries halfway between
/// consecutive receiver points `p_k + sigma2`.
pub fn min_distance_constellation(levels: usize, sigma2: f64) -> Result<Constellation> {
    check_size(levels)?;
    let span = (levels - 1) as f64;
    let powers = (0..levels).map(|k| 2.0 * k as f64 / span).collect();
    let boundaries = (1..levels).map(|k| (2 * k - 1) as f64 / span + sigma2).collect();
    Constellation::new(powers, sigma2, boundaries)
}

/// Equally spaced amplitudes `delta * k` with unit mean power. Levels only;
/// decoded by the energy likelihood receiver or given regions separately.
pub fn ask_constellation(levels: usize, sigma2: f64) -> Result<Constellation> {
    check_size(levels)?;
    let sum_sq: f64 = (0..levels).map(|k| (k * k) as f64).sum();
    let delta2 = levels as f64 / sum_sq;
    let powers = (0..levels).map(|k| delta2 * (k * k) as f64).collect();
    Constellation::levels_only(powers, sigma2)
}

/// Boundaries that balance the right exponent of each level against the
/// left exponent of the next one on the given channel.
pub fn equalized_regions(levels: &[f64], channel: &ChannelSpec, sigma2: f64) -> Result<Constellation> {
    let oracles = levels
        .iter()
        .map(|&p| RateOracle::new(*channel, sigma2, p))
        .collect::<Result<Vec<_>>>()?;
    let boundaries = oracles
        .windows(2)
        .map(|w| {
            let gap = w[1].power() - w[0].power();
            Ok(w[0].mean_energy() + equalize_boundary(&w[0], &w[1], gap)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Constellation::new(levels.to_vec(), sigma2, boundaries)
}

/// Symmetric real amplitudes for coherent detection, labelled with the
/// binary reflected Gray code in amplitude order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamConstellation {
    amplitudes: Vec<f64>,
}

impl PamConstellation {
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        gray::bits_for(self.amplitudes.len())
    }

    pub fn label(&self, k: usize) -> u64 {
        gray::gray_encode(k as u64)
    }

    pub fn mean_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>() / self.amplitudes.len() as f64
    }
}

/// Amplitudes `(2k - 1 - L) delta`, `k = 1..=L`, with `delta^2 = 3 / (L^2 - 1)`.
pub fn pam_constellation(levels: usize) -> Result<PamConstellation> {
    check_size(levels)?;
    if !levels.is_power_of_two() {
        return Err(invalid("levels", format!("PAM size must be a power of two, got {levels}")));
    }
    let l = levels as f64;
    let delta = (3.0 / (l * l - 1.0)).sqrt();
    let amplitudes = (1..=levels).map(|k| (2.0 * k as f64 - 1.0 - l) * delta).collect();
    Ok(PamConstellation { amplitudes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sigma_from_snr;

    #[test]
    fn min_distance_examples() {
        let c = min_distance_constellation(4, 0.1).unwrap();
        let want = [0.0, 2.0 / 3.0, 4.0 / 3.0, 2.0];
        for (a, b) in c.levels().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let two = min_distance_constellation(2, 0.1).unwrap();
        assert_eq!(two.levels(), &[0.0, 2.0]);
        assert!((two.boundaries().unwrap()[0] - 1.1).abs() < 1e-15);
        for l in 2..20 {
            assert!((min_distance_constellation(l, 0.3).unwrap().mean_power() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ask_examples() {
        let c = ask_constellation(4, 0.1).unwrap();
        let want = [0.0, 2.0 / 7.0, 8.0 / 7.0, 18.0 / 7.0];
        for (a, b) in c.levels().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(ask_constellation(2, 0.1).unwrap().levels(), &[0.0, 2.0]);
        for l in 2..20 {
            assert!((ask_constellation(l, 0.1).unwrap().mean_power() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pam_examples() {
        let p = pam_constellation(4).unwrap();
        let r5 = 5f64.sqrt();
        let want = [-3.0 / r5, -1.0 / r5, 1.0 / r5, 3.0 / r5];
        for (a, b) in p.amplitudes().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(pam_constellation(2).unwrap().amplitudes(), &[-1.0, 1.0]);
        assert!(pam_constellation(6).is_err());
        let p8 = pam_constellation(8).unwrap();
        assert!((p8.mean_power() - 1.0).abs() < 1e-12);
        for k in 0..7 {
            assert_eq!((p8.label(k) ^ p8.label(k + 1)).count_ones(), 1);
        }
    }

    #[test]
    fn equalized_regions_balance_exponents() {
        let s2 = sigma_from_snr(10.0).unwrap();
        let ch = ChannelSpec::rayleigh();
        let ask = ask_constellation(4, s2).unwrap();
        let c = equalized_regions(ask.levels(), &ch, s2).unwrap();
        let e = crate::rates::level_exponents(&c, &ch, s2).unwrap();
        for k in 0..3 {
            assert!((e[k].1 - e[k + 1].0).abs() < 1e-9);
        }
    }
}
