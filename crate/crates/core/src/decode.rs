//! Receivers: interval energy decoding, the noncoherent Gaussian
//! likelihood decoder, the exact energy-likelihood decoder for ASK, and
//! pilot-aided coherent PAM detection.
//!
//! Noncoherent transmitters send `x = sqrt(p_k)`, a nonnegative real.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::design::PamConstellation;
use crate::error::{invalid, Result};
use crate::special::{ln_bessel_i, ln_gamma};

pub use crate::gray::{gray_map, gray_unmap};

/// Received samples for `symbols` consecutive channel uses at `n` antennas,
/// stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    n: usize,
    symbols: usize,
    samples: Vec<Complex64>,
}

impl ReceivedBlock {
    pub fn new(n: usize, symbols: usize, samples: Vec<Complex64>) -> Result<Self> {
        if n == 0 || symbols == 0 {
            return Err(invalid("block", format!("need n >= 1 and T >= 1, got n={n}, T={symbols}")));
        }
        if samples.len() != n * symbols {
            return Err(invalid("samples", format!("expected {} samples, got {}", n * symbols, samples.len())));
        }
        Ok(ReceivedBlock { n, symbols, samples })
    }

    pub fn zeros(n: usize, symbols: usize) -> Result<Self> {
        Self::new(n, symbols, vec![Complex64::new(0.0, 0.0); n * symbols])
    }

    pub fn antennas(&self) -> usize {
        self.n
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.samples[j * self.n..(j + 1) * self.n]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.samples[j * self.n..(j + 1) * self.n]
    }
}

/// `‖y‖² / n` for one received column.
pub fn energy_statistic(column: &[Complex64]) -> f64 {
    column.iter().map(|y| y.norm_sqr()).sum::<f64>() / column.len() as f64
}

/// Region index containing `stat`; a statistic on a boundary belongs to the
/// lower region.
pub fn energy_decode(regions: &Constellation, stat: f64) -> Result<usize> {
    let c = regions.boundaries()?;
    Ok(c.partition_point(|&b| b < stat))
}

/// Receiver-side fading statistics: mean `mu`, scatter variance and noise power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumedStats {
    pub mean: Complex64,
    pub scatter: f64,
    pub sigma2: f64,
}

impl AssumedStats {
    pub fn new(mean: Complex64, scatter: f64, sigma2: f64) -> Result<Self> {
        if !(mean.re.is_finite() && mean.im.is_finite()) {
            return Err(invalid("mean", "must be finite"));
        }
        if !(scatter.is_finite() && scatter >= 0.0) {
            return Err(invalid("scatter", format!("must be finite and >= 0, got {scatter}")));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(invalid("sigma2", format!("must be positive and finite, got {sigma2}")));
        }
        Ok(AssumedStats { mean, scatter, sigma2 })
    }

    /// Statistics of a samplable channel.
    pub fn of_channel(channel: &crate::channel::ChannelSpec, sigma2: f64) -> Result<Self> {
        Self::new(channel.mean()?, channel.scatter_variance()?, sigma2)
    }

    fn spread(&self, p: f64) -> f64 {
        self.scatter * p + self.sigma2
    }
}

/// Gaussian negative log-likelihood of a column for each level, from the
/// sufficient pair `(‖y‖², Σ y_i)`.
fn noncoherent_nll(norm2: f64, sum: Complex64, n: usize, p: f64, stats: &AssumedStats) -> f64 {
    let a = stats.mean * p.sqrt();
    let nf = n as f64;
    let dist = norm2 - 2.0 * (a.conj() * sum).re + nf * a.norm_sqr();
    let v = stats.spread(p);
    dist / v + nf * v.ln()
}

/// Noncoherent maximum-likelihood decision for Rician fading:
/// `argmin_k ‖y − mu sqrt(p_k) 1‖² / v_k + n ln v_k` with
/// `v_k = sigma2 + scatter p_k`; ties go to the smaller index.
pub fn ml_noncoherent_rician(column: &[Complex64], levels: &[f64], stats: &AssumedStats) -> usize {
    let norm2: f64 = column.iter().map(|y| y.norm_sqr()).sum();
    let sum: Complex64 = column.iter().sum();
    ml_noncoherent_from_sums(norm2, sum, column.len(), levels, stats)
}

/// [`ml_noncoherent_rician`] from `‖y‖²` and `Σ y_i` over `n` antennas.
pub fn ml_noncoherent_from_sums(norm2: f64, sum: Complex64, n: usize, levels: &[f64], stats: &AssumedStats) -> usize {
    argmin(levels.iter().map(|&p| noncoherent_nll(norm2, sum, n, p, stats)))
}

/// Log-density of `‖y‖²/n` when level `p` is sent.
///
/// `2n S / v` is noncentral chi-square with `2n` degrees of freedom and
/// noncentrality `2n |mu|² p / v`, where `v = scatter p + sigma2`.
pub fn energy_log_density(stat: f64, n: usize, p: f64, stats: &AssumedStats) -> f64 {
    if stat < 0.0 {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    let v = stats.spread(p);
    let scale = 2.0 * nf / v;
    let x = scale * stat;
    let lambda = scale * stats.mean.norm_sqr() * p;
    let order = nf - 1.0;
    let ln_chi = if x == 0.0 {
        if n == 1 {
            -std::f64::consts::LN_2 - 0.5 * lambda
        } else {
            f64::NEG_INFINITY
        }
    } else if lambda == 0.0 {
        order * x.ln() - 0.5 * x - nf * std::f64::consts::LN_2 - ln_gamma(nf)
    } else {
        -std::f64::consts::LN_2 - 0.5 * (x + lambda) + 0.5 * order * (x / lambda).ln() + ln_bessel_i(order, (lambda * x).sqrt())
    };
    ln_chi + scale.ln()
}

/// Exact energy-likelihood decision; ties go to the smaller index.
pub fn ml_energy_ask(stat: f64, n: usize, levels: &[f64], stats: &AssumedStats) -> usize {
    argmax(levels.iter().map(|&p| energy_log_density(stat, n, p, stats)))
}

/// Per-antenna MMSE channel estimate from the first `pilots` columns, each
/// carrying the real pilot amplitude `pilot_amp`.
pub fn pilot_mmse_estimate(block: &ReceivedBlock, pilots: usize, pilot_amp: f64, stats: &AssumedStats) -> Result<Vec<Complex64>> {
    if pilots == 0 {
        return Err(invalid("pilots", "MMSE estimation needs at least one pilot"));
    }
    if pilots > block.symbols() {
        return Err(invalid("pilots", format!("{pilots} pilots exceed the block length {}", block.symbols())));
    }
    let tl = pilots as f64;
    let gain = stats.scatter * pilot_amp / (stats.scatter * pilot_amp * pilot_amp + stats.sigma2 / tl);
    let prior = stats.mean * pilot_amp;
    Ok((0..block.antennas())
        .map(|i| {
            let mean_obs: Complex64 = (0..pilots).map(|j| block.column(j)[i]).sum::<Complex64>() / tl;
            stats.mean + (mean_obs - prior) * gain
        })
        .collect())
}

/// Per-antenna error variance of [`pilot_mmse_estimate`].
pub fn pilot_mmse_error_variance(pilots: usize, pilot_amp: f64, stats: &AssumedStats) -> f64 {
    let noise = stats.sigma2 / pilots as f64;
    stats.scatter * noise / (stats.scatter * pilot_amp * pilot_amp + noise)
}

/// Coherent detection `argmin_a ‖y − ĥ a‖²` over the PAM amplitudes, ties
/// toward the smaller amplitude.
pub fn coherent_pam_decode(column: &[Complex64], h_hat: &[Complex64], pam: &PamConstellation) -> usize {
    let gain: f64 = h_hat.iter().map(|h| h.norm_sqr()).sum();
    let corr: f64 = h_hat.iter().zip(column).map(|(h, y)| (h.conj() * y).re).sum();
    argmin(pam.amplitudes().iter().map(|&a| a * a * gain - 2.0 * a * corr))
}

/// Receiver configured with its assumed statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderSpec {
    EnergyRegions { constellation: Constellation },
    NoncoherentMl { levels: Vec<f64>, stats: AssumedStats },
    EnergyMlAsk { levels: Vec<f64>, stats: AssumedStats },
    PilotPam { pam: PamConstellation, stats: AssumedStats, pilots: usize, pilot_amp: f64 },
}

impl DecoderSpec {
    /// Leading columns of each block reserved for pilots.
    pub fn pilot_columns(&self) -> usize {
        match self {
            DecoderSpec::PilotPam { pilots, .. } => *pilots,
            _ => 0,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            DecoderSpec::EnergyRegions { constellation } => constellation.len(),
            DecoderSpec::NoncoherentMl { levels, .. } | DecoderSpec::EnergyMlAsk { levels, .. } => levels.len(),
            DecoderSpec::PilotPam { pam, .. } => pam.len(),
        }
    }

    /// Decisions for the data columns of a block.
    pub fn decode_block(&self, block: &ReceivedBlock) -> Result<Vec<usize>> {
        let n = block.antennas();
        match self {
            DecoderSpec::EnergyRegions { constellation } => (0..block.symbols())
                .map(|j| energy_decode(constellation, energy_statistic(block.column(j))))
                .collect(),
            DecoderSpec::NoncoherentMl { levels, stats } => Ok((0..block.symbols())
                .map(|j| ml_noncoherent_rician(block.column(j), levels, stats))
                .collect()),
            DecoderSpec::EnergyMlAsk { levels, stats } => Ok((0..block.symbols())
                .map(|j| ml_energy_ask(energy_statistic(block.column(j)), n, levels, stats))
                .collect()),
            DecoderSpec::PilotPam {
                pam,
                stats,
                pilots,
                pilot_amp,
            } => {
                let h_hat = if *pilots == 0 {
                    vec![stats.mean; n]
                } else {
                    pilot_mmse_estimate(block, *pilots, *pilot_amp, stats)?
                };
                Ok((*pilots..block.symbols())
                    .map(|j| coherent_pam_decode(block.column(j), &h_hat, pam))
                    .collect())
            }
        }
    }
}

/// Index of the smallest value; the first one wins ties and NaN never wins.
fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, v) in values.enumerate() {
        if v < best.1 {
            best = (k, v);
        }
    }
    best.0
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    argmin(values.map(|v| -v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_noise, sigma_from_snr, ChannelSpec};
    use crate::design::{ask_constellation, pam_constellation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rayleigh_stats(sigma2: f64) -> AssumedStats {
        AssumedStats::new(c(0.0, 0.0), 1.0, sigma2).unwrap()
    }

    fn receive(rng: &mut ChaCha8Rng, channel: &ChannelSpec, sigma2: f64, amp: f64, n: usize) -> Vec<Complex64> {
        let sampler = channel.sampler().unwrap();
        (0..n).map(|_| sampler.draw(rng) * amp + draw_noise(sigma2, rng)).collect()
    }

    #[test]
    fn statistic_examples() {
        assert_eq!(energy_statistic(&[c(0.0, 0.0); 4]), 0.0);
        assert_eq!(energy_statistic(&[c(1.0, 0.0), c(0.0, 1.0)]), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s2 = sigma_from_snr(10.0).unwrap();
        let n = 100_000;
        let y = receive(&mut rng, &ChannelSpec::rayleigh(), s2, 1.0, n);
        let sd = (crate::channel::energy_variance(1.0, s2, 1.0) / n as f64).sqrt();
        assert!((energy_statistic(&y) - 1.1).abs() < 3.0 * sd);
    }

    #[test]
    fn interval_decoder_examples() {
        let regions = Constellation::new(vec![0.0, 1.5, 3.5], 0.1, vec![1.0, 3.0]).unwrap();
        assert_eq!(energy_decode(&regions, 2.5).unwrap(), 1);
        assert_eq!(energy_decode(&regions, 1.0).unwrap(), 0);
        assert_eq!(energy_decode(&regions, 0.0).unwrap(), 0);
        assert_eq!(energy_decode(&regions, 1e9).unwrap(), 2);
        for k in 0..3 {
            assert_eq!(energy_decode(&regions, regions.receiver_point(k, 0.1)).unwrap(), k);
        }
        let mut last = 0;
        for i in 0..1000 {
            let k = energy_decode(&regions, i as f64 * 0.005).unwrap();
            assert!(k >= last);
            last = k;
        }
        assert!(energy_decode(&ask_constellation(4, 0.1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn noncoherent_threshold_closed_form() {
        let stats = rayleigh_stats(1.0);
        let threshold = 1.5 * 3f64.ln();
        let below = [c((threshold * 0.999).sqrt(), 0.0)];
        let above = [c(0.0, (threshold * 1.001).sqrt())];
        assert_eq!(ml_noncoherent_rician(&below, &[0.0, 2.0], &stats), 0);
        assert_eq!(ml_noncoherent_rician(&above, &[0.0, 2.0], &stats), 1);
    }

    #[test]
    fn noncoherent_los_channel_picks_exact_match() {
        let stats = AssumedStats::new(c(1.0, 0.0), 0.0, 1e-6).unwrap();
        let levels = [0.0, 0.5, 1.0, 2.0];
        let y = vec![c(0.5f64.sqrt(), 0.0); 8];
        assert_eq!(ml_noncoherent_rician(&y, &levels, &stats), 1);
    }

    #[test]
    fn rayleigh_likelihood_depends_only_on_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let stats = rayleigh_stats(0.1);
        let levels = [0.0, 0.3, 1.0, 2.7];
        for _ in 0..2000 {
            let n = rng.random_range(1..40);
            let y: Vec<Complex64> = (0..n).map(|_| draw_noise(rng.random_range(0.05..4.0), &mut rng)).collect();
            // Rotate every sample: same energy, different vector.
            let rotated: Vec<Complex64> = y.iter().map(|v| v * Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
            let a = ml_noncoherent_rician(&y, &levels, &stats);
            assert_eq!(a, ml_noncoherent_rician(&rotated, &levels, &stats));
            assert_eq!(a, ml_energy_ask(energy_statistic(&y), n, &levels, &stats));
        }
    }

    fn density_integral(n: usize, p: f64, stats: &AssumedStats) -> f64 {
        let v = stats.spread(p);
        let mean = stats.mean.norm_sqr() * p + v;
        let sd = ((2.0 * stats.mean.norm_sqr() * p * v + v * v) / n as f64).sqrt();
        let upper = mean + 40.0 * sd;
        let steps = 400_000;
        let h = upper / steps as f64;
        let f = |s: f64| energy_log_density(s, n, p, stats).exp();
        let mut acc = f(0.0) + f(upper);
        for i in 1..steps {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn energy_density_is_normalized() {
        let rician = AssumedStats::of_channel(&ChannelSpec::rician(0.0).unwrap(), 0.1).unwrap();
        let ray = rayleigh_stats(0.1);
        for &n in &[1usize, 10, 100] {
            for &p in &[0.0, 0.7, 2.0] {
                for stats in [&rician, &ray] {
                    let total = density_integral(n, p, stats);
                    assert!((total - 1.0).abs() < 1e-6, "n={n} p={p}: {total}");
                }
            }
        }
    }

    #[test]
    fn energy_density_matches_simulated_histogram() {
        let channel = ChannelSpec::rician(0.0).unwrap();
        let s2 = sigma_from_snr(10.0).unwrap();
        let stats = AssumedStats::of_channel(&channel, s2).unwrap();
        let (n, draws) = (50usize, 1_000_000usize);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let stats_sample: Vec<f64> = (0..draws)
            .map(|_| energy_statistic(&receive(&mut rng, &channel, s2, 1.0, n)))
            .collect();
        let sd = (crate::channel::energy_variance(channel.alpha1(), s2, 1.0) / n as f64).sqrt();
        let (lo, hi, bins) = (1.1 - 4.0 * sd, 1.1 + 4.0 * sd, 40usize);
        let width = (hi - lo) / bins as f64;
        let mut observed = vec![0f64; bins + 2];
        for s in stats_sample {
            let idx = if s < lo {
                0
            } else if s >= hi {
                bins + 1
            } else {
                (1 + ((s - lo) / width) as usize).min(bins)
            };
            observed[idx] += 1.0;
        }
        let mass = |a: f64, b: f64| {
            let steps = 200;
            let h = (b - a) / steps as f64;
            let f = |s: f64| energy_log_density(s, n, 1.0, &stats).exp();
            let mut acc = f(a) + f(b);
            for i in 1..steps {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        let mut expected: Vec<f64> = (0..bins).map(|b| mass(lo + b as f64 * width, lo + (b + 1) as f64 * width)).collect();
        let inside: f64 = expected.iter().sum();
        let below = mass(0.0, lo);
        expected.insert(0, below);
        expected.push(1.0 - inside - below);
        let chi2: f64 = observed
            .iter()
            .zip(&expected)
            .filter(|(_, e)| **e * draws as f64 >= 5.0)
            .map(|(o, e)| {
                let e = e * draws as f64;
                (o - e).powi(2) / e
            })
            .sum();
        let dof = expected.iter().filter(|e| **e * draws as f64 >= 5.0).count() - 1;
        let critical = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.99);
        assert!(chi2 < critical, "chi2 {chi2} >= {critical} with {dof} dof");
    }

    fn pilot_block(rng: &mut ChaCha8Rng, h: &[Complex64], pilots: usize, sigma2: f64) -> ReceivedBlock {
        let n = h.len();
        let mut block = ReceivedBlock::zeros(n, pilots).unwrap();
        for j in 0..pilots {
            for (i, y) in block.column_mut(j).iter_mut().enumerate() {
                *y = h[i] + draw_noise(sigma2, rng);
            }
        }
        block
    }

    #[test]
    fn mmse_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let channel = ChannelSpec::rician(3.0).unwrap();
        let h = channel.sample(64, &mut rng).unwrap();
        let clean = AssumedStats::of_channel(&channel, 1e-12).unwrap();
        let est = pilot_mmse_estimate(&pilot_block(&mut rng, &h, 4, 1e-12), 4, 1.0, &clean).unwrap();
        let err: f64 = est.iter().zip(&h).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / 64.0;
        assert!(err < 1e-9);
        let noisy = AssumedStats::of_channel(&channel, 1e12).unwrap();
        let est = pilot_mmse_estimate(&pilot_block(&mut rng, &h, 4, 1e12), 4, 1.0, &noisy).unwrap();
        for e in est {
            assert!((e - noisy.mean).norm() < 1e-4);
        }
        assert!(pilot_mmse_estimate(&ReceivedBlock::zeros(2, 2).unwrap(), 0, 1.0, &clean).is_err());
    }

    #[test]
    fn mmse_error_variance_and_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let channel = ChannelSpec::rician(0.0).unwrap();
        let s2 = 0.5;
        let stats = AssumedStats::of_channel(&channel, s2).unwrap();
        let (pilots, trials) = (3usize, 200_000usize);
        let mut sum_err = 0.0;
        let mut sum_err2 = 0.0;
        let mut bias = Complex64::new(0.0, 0.0);
        let mut bias2 = 0.0;
        for _ in 0..trials {
            let h = channel.sample(1, &mut rng).unwrap();
            let est = pilot_mmse_estimate(&pilot_block(&mut rng, &h, pilots, s2), pilots, 1.0, &stats).unwrap();
            let e = (est[0] - h[0]).norm_sqr();
            sum_err += e;
            sum_err2 += e * e;
            let d = est[0] - stats.mean;
            bias += d;
            bias2 += d.norm_sqr();
        }
        let t = trials as f64;
        let mean_err = sum_err / t;
        let se = ((sum_err2 / t - mean_err * mean_err) / t).sqrt();
        let want = pilot_mmse_error_variance(pilots, 1.0, &stats);
        assert!((mean_err - want).abs() < 3.0 * se, "{mean_err} vs {want} (se {se})");
        let bias_se = (bias2 / t / t).sqrt();
        assert!((bias / t).norm() < 4.0 * bias_se);
    }

    #[test]
    fn coherent_pam_examples() {
        let pam = pam_constellation(4).unwrap();
        assert_eq!(coherent_pam_decode(&[c(0.9, 0.0)], &[c(1.0, 0.0)], &pam), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = ChannelSpec::rician(0.0).unwrap().sample(16, &mut rng).unwrap();
        for (k, &a) in pam.amplitudes().iter().enumerate() {
            let y: Vec<Complex64> = h.iter().map(|v| v * a).collect();
            assert_eq!(coherent_pam_decode(&y, &h, &pam), k);
        }
    }

    #[test]
    fn binary_pam_ignores_estimate_scale() {
        let pam = pam_constellation(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let h = ChannelSpec::rician(0.0).unwrap().sample(8, &mut rng).unwrap();
        for _ in 0..1000 {
            let y: Vec<Complex64> = h.iter().map(|v| v * 0.3 + draw_noise(1.0, &mut rng)).collect();
            let scaled: Vec<Complex64> = h.iter().map(|v| v * 7.5).collect();
            assert_eq!(coherent_pam_decode(&y, &h, &pam), coherent_pam_decode(&y, &scaled, &pam));
        }
    }

    #[test]
    fn decoder_spec_skips_pilot_columns() {
        let pam = pam_constellation(2).unwrap();
        let stats = AssumedStats::of_channel(&ChannelSpec::rician(f64::INFINITY).unwrap(), 1e-3).unwrap();
        let spec = DecoderSpec::PilotPam {
            pam,
            stats,
            pilots: 1,
            pilot_amp: 1.0,
        };
        let block = ReceivedBlock::new(1, 3, vec![c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(spec.decode_block(&block).unwrap(), vec![0, 1]);
    }
}
