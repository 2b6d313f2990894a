//! Monte Carlo estimation of symbol and bit error rates.
//!
//! Work is cut into fixed-size batches. Batch `b` draws from a ChaCha8
//! stream keyed by `(seed, b)`, so its counts do not depend on which
//! worker runs it. Shards are contiguous runs of batches executed in
//! parallel and merged by integer sums, which makes every report identical
//! for any shard count. The early-stop rule is checked only after fixed
//! groups of batches for the same reason.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_noise, ChannelSpec};
use crate::constellation::Constellation;
use crate::decode::{energy_decode, ml_energy_ask, ml_noncoherent_from_sums, AssumedStats, DecoderSpec, ReceivedBlock};
use crate::design::PamConstellation;
use crate::error::{invalid, Error, Result};
use crate::gray;

/// Data symbols per batch (rounded up to whole coherence blocks).
const BATCH_SYMBOLS: u64 = 1024;
/// Batches between two evaluations of the stopping rule.
const CHECKPOINT_BATCHES: u64 = 16;
/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;
/// Smallest symbol budget a scenario accepts.
pub const MIN_SYMBOLS: u64 = 1000;

/// Transmitter and receiver pair under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Power levels decoded by the energy statistic's regions.
    EnergyRegions { constellation: Constellation },
    /// Power levels decoded by the noncoherent Gaussian likelihood.
    NoncoherentMl { levels: Vec<f64>, stats: AssumedStats },
    /// Power levels decoded by the exact likelihood of the energy statistic.
    AskEnergyMl { levels: Vec<f64>, stats: AssumedStats },
    /// Coherent PAM over block fading: `pilots` of every `block_len`
    /// symbols carry the pilot amplitude and feed an MMSE estimate.
    PilotPam {
        pam: PamConstellation,
        stats: AssumedStats,
        block_len: usize,
        pilots: usize,
        pilot_amp: f64,
    },
}

impl Scheme {
    pub fn alphabet_size(&self) -> usize {
        match self {
            Scheme::EnergyRegions { constellation } => constellation.len(),
            Scheme::NoncoherentMl { levels, .. } | Scheme::AskEnergyMl { levels, .. } => levels.len(),
            Scheme::PilotPam { pam, .. } => pam.len(),
        }
    }

    pub fn bits_per_symbol(&self) -> u32 {
        gray::bits_for(self.alphabet_size())
    }

    /// Information bits per channel use after pilot overhead.
    pub fn effective_rate(&self) -> f64 {
        let bits = (self.alphabet_size() as f64).log2();
        match self {
            Scheme::PilotPam { block_len, pilots, .. } => (*block_len - *pilots) as f64 / *block_len as f64 * bits,
            _ => bits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scheme::EnergyRegions { constellation } => {
                constellation.validate()?;
                constellation.boundaries().map(|_| ())
            }
            Scheme::NoncoherentMl { levels, .. } | Scheme::AskEnergyMl { levels, .. } => Constellation::levels_only(levels.clone(), 0.0).map(|_| ()),
            Scheme::PilotPam { pam, block_len, pilots, pilot_amp, .. } => {
                if pam.is_empty() {
                    return Err(invalid("pam", "no amplitudes"));
                }
                if pilots >= block_len {
                    return Err(invalid("pilots", format!("need pilots < block length, got {pilots} >= {block_len}")));
                }
                if !(pilot_amp.is_finite() && *pilot_amp > 0.0) {
                    return Err(invalid("pilot_amp", format!("must be positive, got {pilot_amp}")));
                }
                Ok(())
            }
        }
    }

    /// Data symbols carried per channel draw.
    fn data_per_unit(&self) -> u64 {
        match self {
            Scheme::PilotPam { block_len, pilots, .. } => (block_len - pilots) as u64,
            _ => 1,
        }
    }
}

/// One Monte Carlo experiment: the scheme, the true channel it runs over
/// and the simulation budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub scheme: Scheme,
    pub channel: ChannelSpec,
    pub sigma2: f64,
    pub n: usize,
    /// Data symbols to simulate (the cap when an error target is set).
    pub symbols: u64,
    pub seed: u64,
    pub shards: usize,
    /// Stop early once this many bit errors have been seen.
    pub min_bit_errors: Option<u64>,
}

impl SimScenario {
    pub fn new(scheme: Scheme, channel: ChannelSpec, sigma2: f64, n: usize) -> Self {
        SimScenario {
            scheme,
            channel,
            sigma2,
            n,
            symbols: 100_000,
            seed: 0,
            shards: 1,
            min_bit_errors: None,
        }
    }

    pub fn with_symbols(mut self, symbols: u64) -> Self {
        self.symbols = symbols;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }

    pub fn with_min_bit_errors(mut self, errors: Option<u64>) -> Self {
        self.min_bit_errors = errors;
        self
    }

    pub fn with_antennas(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        self.channel.validate()?;
        if !self.channel.is_samplable() {
            return Err(Error::NotSamplable);
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(invalid("sigma2", format!("must be finite and >= 0, got {}", self.sigma2)));
        }
        if self.n == 0 {
            return Err(invalid("n", "antenna count must be >= 1"));
        }
        if self.symbols < MIN_SYMBOLS {
            return Err(invalid("symbols", format!("budget must be >= {MIN_SYMBOLS}, got {}", self.symbols)));
        }
        if self.shards == 0 {
            return Err(invalid("shards", "need at least one shard"));
        }
        Ok(())
    }
}

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Outcome of [`simulate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub symbols: u64,
    pub symbol_errors: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ser: f64,
    pub ber: f64,
    pub ser_ci: (f64, f64),
    pub ber_ci: (f64, f64),
    /// Transmissions of each symbol index.
    pub sent: Vec<u64>,
    pub seed: u64,
    pub shards: usize,
    pub wall_time_secs: f64,
}

impl SimReport {
    /// Binomial standard error of the SER estimate.
    pub fn ser_std_error(&self) -> f64 {
        if self.symbols == 0 {
            return 0.0;
        }
        (self.ser * (1.0 - self.ser) / self.symbols as f64).sqrt()
    }

    /// Everything except the wall time, for reproducibility checks.
    pub fn counts(&self) -> (u64, u64, u64, u64, &[u64]) {
        (self.symbols, self.symbol_errors, self.bits, self.bit_errors, &self.sent)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Counts {
    symbols: u64,
    symbol_errors: u64,
    bit_errors: u64,
    sent: Vec<u64>,
}

impl Counts {
    fn new(alphabet: usize) -> Self {
        Counts {
            sent: vec![0; alphabet],
            ..Default::default()
        }
    }

    fn record(&mut self, sent: usize, decided: usize) {
        self.symbols += 1;
        self.sent[sent] += 1;
        if sent != decided {
            self.symbol_errors += 1;
            self.bit_errors += (gray::gray_encode(sent as u64) ^ gray::gray_encode(decided as u64)).count_ones() as u64;
        }
    }

    fn merge(mut self, other: Counts) -> Counts {
        self.symbols += other.symbols;
        self.symbol_errors += other.symbol_errors;
        self.bit_errors += other.bit_errors;
        for (a, b) in self.sent.iter_mut().zip(other.sent) {
            *a += b;
        }
        self
    }
}

/// Per-run constants shared by every batch.
struct Engine<'a> {
    scenario: &'a SimScenario,
    sampler: crate::channel::ChannelSampler,
    amplitudes: Vec<f64>,
    decoder: Option<DecoderSpec>,
    units_total: u64,
    units_per_batch: u64,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a SimScenario) -> Result<Self> {
        scenario.validate()?;
        let per_unit = scenario.scheme.data_per_unit();
        let (amplitudes, decoder) = match &scenario.scheme {
            Scheme::EnergyRegions { constellation } => (constellation.levels().iter().map(|p| p.sqrt()).collect(), None),
            Scheme::NoncoherentMl { levels, .. } | Scheme::AskEnergyMl { levels, .. } => (levels.iter().map(|p| p.sqrt()).collect(), None),
            Scheme::PilotPam {
                pam,
                stats,
                pilots,
                pilot_amp,
                ..
            } => (
                pam.amplitudes().to_vec(),
                Some(DecoderSpec::PilotPam {
                    pam: pam.clone(),
                    stats: *stats,
                    pilots: *pilots,
                    pilot_amp: *pilot_amp,
                }),
            ),
        };
        Ok(Engine {
            scenario,
            sampler: scenario.channel.sampler()?,
            amplitudes,
            decoder,
            units_total: scenario.symbols.div_ceil(per_unit),
            units_per_batch: BATCH_SYMBOLS.div_ceil(per_unit),
        })
    }

    fn batches(&self) -> u64 {
        self.units_total.div_ceil(self.units_per_batch)
    }

    fn run_batch(&self, batch: u64) -> Result<Counts> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.scenario.seed);
        rng.set_stream(batch);
        let first = batch * self.units_per_batch;
        let last = (first + self.units_per_batch).min(self.units_total);
        let mut counts = Counts::new(self.amplitudes.len());
        for _ in first..last {
            match &self.scenario.scheme {
                Scheme::PilotPam { block_len, .. } => self.run_block(*block_len, &mut rng, &mut counts)?,
                _ => self.run_symbol(&mut rng, &mut counts)?,
            }
        }
        Ok(counts)
    }

    fn run_symbol(&self, rng: &mut ChaCha8Rng, counts: &mut Counts) -> Result<()> {
        let s = self.scenario;
        let k = rng.random_range(0..self.amplitudes.len());
        let amp = self.amplitudes[k];
        let mut norm2 = 0.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for _ in 0..s.n {
            let y = self.sampler.draw(rng) * amp + draw_noise(s.sigma2, rng);
            norm2 += y.norm_sqr();
            sum += y;
        }
        let stat = norm2 / s.n as f64;
        let decided = match &s.scheme {
            Scheme::EnergyRegions { constellation } => energy_decode(constellation, stat)?,
            Scheme::NoncoherentMl { levels, stats } => ml_noncoherent_from_sums(norm2, sum, s.n, levels, stats),
            Scheme::AskEnergyMl { levels, stats } => ml_energy_ask(stat, s.n, levels, stats),
            Scheme::PilotPam { .. } => unreachable!("block scheme"),
        };
        counts.record(k, decided);
        Ok(())
    }

    fn run_block(&self, block_len: usize, rng: &mut ChaCha8Rng, counts: &mut Counts) -> Result<()> {
        let s = self.scenario;
        let Some(decoder) = &self.decoder else {
            unreachable!("block scheme without decoder")
        };
        let pilots = decoder.pilot_columns();
        let pilot_amp = match decoder {
            DecoderSpec::PilotPam { pilot_amp, .. } => *pilot_amp,
            _ => 0.0,
        };
        let h: Vec<Complex64> = (0..s.n).map(|_| self.sampler.draw(rng)).collect();
        let mut block = ReceivedBlock::zeros(s.n, block_len)?;
        let mut sent = Vec::with_capacity(block_len - pilots);
        for j in 0..block_len {
            let amp = if j < pilots {
                pilot_amp
            } else {
                let k = rng.random_range(0..self.amplitudes.len());
                sent.push(k);
                self.amplitudes[k]
            };
            for (y, hi) in block.column_mut(j).iter_mut().zip(&h) {
                *y = hi * amp + draw_noise(s.sigma2, rng);
            }
        }
        for (k, d) in sent.into_iter().zip(decoder.decode_block(&block)?) {
            counts.record(k, d);
        }
        Ok(())
    }

    fn run_range(&self, batches: std::ops::Range<u64>) -> Result<Counts> {
        let shards = self.scenario.shards as u64;
        let len = batches.end - batches.start;
        let per_shard = len.div_ceil(shards).max(1);
        (0..shards)
            .into_par_iter()
            .map(|j| {
                let lo = (batches.start + j * per_shard).min(batches.end);
                let hi = (lo + per_shard).min(batches.end);
                let mut acc = Counts::new(self.amplitudes.len());
                for b in lo..hi {
                    acc = acc.merge(self.run_batch(b)?);
                }
                Ok(acc)
            })
            .try_reduce(|| Counts::new(self.amplitudes.len()), |a, b| Ok(a.merge(b)))
    }
}

/// Estimates the SER and BER of a scenario.
pub fn simulate(scenario: &SimScenario) -> Result<SimReport> {
    let start = Instant::now();
    let engine = Engine::new(scenario)?;
    let total = engine.batches();
    let mut counts = Counts::new(engine.amplitudes.len());
    let mut done = 0;
    while done < total {
        let next = match scenario.min_bit_errors {
            Some(_) => (done + CHECKPOINT_BATCHES).min(total),
            None => total,
        };
        counts = counts.merge(engine.run_range(done..next)?);
        done = next;
        if scenario.min_bit_errors.is_some_and(|target| counts.bit_errors >= target) {
            break;
        }
    }
    let bits_per_symbol = scenario.scheme.bits_per_symbol() as u64;
    let bits = counts.symbols * bits_per_symbol;
    let ratio = |e: u64, t: u64| if t == 0 { 0.0 } else { e as f64 / t as f64 };
    Ok(SimReport {
        symbols: counts.symbols,
        symbol_errors: counts.symbol_errors,
        bits,
        bit_errors: counts.bit_errors,
        ser: ratio(counts.symbol_errors, counts.symbols),
        ber: ratio(counts.bit_errors, bits),
        ser_ci: wilson_interval(counts.symbol_errors, counts.symbols),
        ber_ci: wilson_interval(counts.bit_errors, bits),
        sent: counts.sent,
        seed: scenario.seed,
        shards: scenario.shards,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Result of the antenna search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MinAntennas {
    Found { n: usize, report: SimReport },
    /// Even `n_max` antennas miss the target; the report is for `n_max`.
    NotReached { n_max: usize, report: SimReport },
}

impl MinAntennas {
    pub fn antennas(&self) -> Option<usize> {
        match self {
            MinAntennas::Found { n, .. } => Some(*n),
            MinAntennas::NotReached { .. } => None,
        }
    }
}

/// Bit-error target used by [`min_antennas`] when the template has none.
pub const DEFAULT_MIN_BIT_ERRORS: u64 = 100;

/// Smallest antenna count whose BER Wilson upper bound is below `target`.
///
/// Doubles `n` from 1 until a count qualifies, then bisects. Each count is
/// simulated until the template's bit-error target (default 100) or its
/// symbol cap. Assumes the BER decreases with `n`.
pub fn min_antennas(template: &SimScenario, target: f64, n_max: usize) -> Result<MinAntennas> {
    if !(target > 0.0 && target < 0.5) && target != 0.5 {
        return Err(invalid("target", format!("BER target must lie in (0, 0.5], got {target}")));
    }
    if n_max == 0 {
        return Err(invalid("n_max", "must be >= 1"));
    }
    let errors = template.min_bit_errors.or(Some(DEFAULT_MIN_BIT_ERRORS));
    let run = |n: usize| simulate(&template.clone().with_antennas(n).with_min_bit_errors(errors));
    let qualifies = |r: &SimReport| r.ber_ci.1 < target;

    let mut fail = 0usize;
    let mut n = 1usize;
    let (mut hi, mut hi_report) = loop {
        let report = run(n)?;
        if qualifies(&report) {
            break (n, report);
        }
        if n >= n_max {
            return Ok(MinAntennas::NotReached { n_max, report });
        }
        fail = n;
        n = (2 * n).min(n_max);
    };
    while hi - fail > 1 {
        let mid = fail + (hi - fail) / 2;
        let report = run(mid)?;
        if qualifies(&report) {
            hi = mid;
            hi_report = report;
        } else {
            fail = mid;
        }
    }
    Ok(MinAntennas::Found { n: hi, report: hi_report })
}

/// Per-symbol histograms of the energy statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Common bin edges (`bins + 1` values).
    pub edges: Vec<f64>,
    /// `counts[k][b]`: draws of symbol `k` in bin `b`; values beyond the
    /// last edge land in the last bin.
    pub counts: Vec<Vec<u64>>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    /// Fraction of each symbol's draws outside its own region.
    pub outside: Vec<f64>,
    pub boundaries: Vec<f64>,
    pub receiver_points: Vec<f64>,
}

impl Histogram {
    /// Average over symbols of the mass outside the own region.
    pub fn overlap(&self) -> f64 {
        self.outside.iter().sum::<f64>() / self.outside.len() as f64
    }
}

/// Draws `trials` energy statistics per level of `constellation` over the
/// given channel and bins them on a shared grid.
pub fn histogram(
    constellation: &Constellation,
    channel: &ChannelSpec,
    sigma2: f64,
    n: usize,
    trials: usize,
    bins: usize,
    seed: u64,
) -> Result<Histogram> {
    if bins < 10 {
        return Err(invalid("bins", format!("need at least 10 bins, got {bins}")));
    }
    if n == 0 || trials == 0 {
        return Err(invalid("trials", "need n >= 1 and trials >= 1"));
    }
    let boundaries = constellation.boundaries()?.to_vec();
    let sampler = channel.sampler()?;
    let draws: Vec<Vec<f64>> = constellation
        .levels()
        .par_iter()
        .enumerate()
        .map(|(k, &p)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let amp = p.sqrt();
            (0..trials)
                .map(|_| (0..n).map(|_| (sampler.draw(&mut rng) * amp + draw_noise(sigma2, &mut rng)).norm_sqr()).sum::<f64>() / n as f64)
                .collect()
        })
        .collect();
    let top = draws.iter().flatten().fold(0.0f64, |m, &x| m.max(x));
    let width = if top > 0.0 { top / bins as f64 } else { 1.0 };
    let edges = (0..=bins).map(|b| b as f64 * width).collect();
    let mut counts = Vec::with_capacity(draws.len());
    let mut means = Vec::with_capacity(draws.len());
    let mut variances = Vec::with_capacity(draws.len());
    let mut outside = Vec::with_capacity(draws.len());
    for (k, d) in draws.iter().enumerate() {
        let mut c = vec![0u64; bins];
        let mut wrong = 0usize;
        for &x in d {
            c[((x / width) as usize).min(bins - 1)] += 1;
            if energy_decode(constellation, x)? != k {
                wrong += 1;
            }
        }
        let m = d.iter().sum::<f64>() / d.len() as f64;
        let v = if d.len() > 1 {
            d.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (d.len() - 1) as f64
        } else {
            0.0
        };
        counts.push(c);
        means.push(m);
        variances.push(v);
        outside.push(wrong as f64 / d.len() as f64);
    }
    let receiver_points = (0..constellation.len()).map(|k| constellation.receiver_point(k, sigma2)).collect();
    Ok(Histogram {
        edges,
        counts,
        means,
        variances,
        outside,
        boundaries,
        receiver_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{energy_variance, sigma_from_snr};
    use crate::design::{min_distance_constellation, pam_constellation};

    fn two_level(sigma2: f64) -> Scheme {
        Scheme::EnergyRegions {
            constellation: Constellation::new(vec![0.0, 2.0], sigma2, vec![1.0 + sigma2]).unwrap(),
        }
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_995).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_832).abs() < 1e-5 && (hi - 0.596_168).abs() < 1e-5);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn noiseless_deterministic_channel_is_error_free() {
        let ch = ChannelSpec::rician(f64::INFINITY).unwrap();
        let scheme = Scheme::EnergyRegions {
            constellation: min_distance_constellation(8, 0.0).unwrap(),
        };
        let r = simulate(&SimScenario::new(scheme, ch, 0.0, 4).with_symbols(5000)).unwrap();
        assert_eq!((r.symbols, r.symbol_errors, r.bit_errors), (5000, 0, 0));
    }

    #[test]
    fn single_level_never_errs() {
        let scheme = Scheme::EnergyRegions {
            constellation: Constellation::new(vec![1.0], 0.1, vec![]).unwrap(),
        };
        let r = simulate(&SimScenario::new(scheme, ChannelSpec::rayleigh(), 0.1, 3).with_symbols(2000)).unwrap();
        assert_eq!(r.symbol_errors, 0);
        assert_eq!(r.ber, 0.0);
    }

    #[test]
    fn shard_count_does_not_change_counts() {
        let s2 = sigma_from_snr(5.0).unwrap();
        let base = SimScenario::new(two_level(s2), ChannelSpec::rayleigh(), s2, 10)
            .with_symbols(20_000)
            .with_seed(42);
        let one = simulate(&base).unwrap();
        for shards in [4, 16] {
            let r = simulate(&base.clone().with_shards(shards)).unwrap();
            assert_eq!(one.counts(), r.counts());
        }
        let early = base.clone().with_min_bit_errors(Some(100));
        let a = simulate(&early).unwrap();
        let b = simulate(&early.with_shards(7)).unwrap();
        assert_eq!(a.counts(), b.counts());
        assert!(a.symbols < 20_000);
    }

    #[test]
    fn symbols_are_equiprobable() {
        let s2 = 0.1;
        let scheme = Scheme::EnergyRegions {
            constellation: min_distance_constellation(4, s2).unwrap(),
        };
        let r = simulate(&SimScenario::new(scheme, ChannelSpec::rayleigh(), s2, 2).with_symbols(100_000).with_seed(1)).unwrap();
        let expect = r.symbols as f64 / 4.0;
        let sd = (r.symbols as f64 * 0.25 * 0.75).sqrt();
        for &c in &r.sent {
            assert!((c as f64 - expect).abs() < 4.0 * sd);
        }
    }

    #[test]
    fn block_fading_counts_only_data_symbols() {
        let stats = AssumedStats::of_channel(&ChannelSpec::rician(10.0).unwrap(), 0.1).unwrap();
        let scheme = Scheme::PilotPam {
            pam: pam_constellation(4).unwrap(),
            stats,
            block_len: 10,
            pilots: 2,
            pilot_amp: 1.0,
        };
        assert!((scheme.effective_rate() - 1.6).abs() < 1e-15);
        let r = simulate(&SimScenario::new(scheme, ChannelSpec::rician(10.0).unwrap(), 0.1, 8).with_symbols(4000)).unwrap();
        assert_eq!(r.symbols, 4000);
        assert_eq!(r.bits, 8000);
        assert!(r.ser < 0.05, "{}", r.ser);
    }

    #[test]
    fn antenna_search_trivial_target() {
        let s2 = sigma_from_snr(10.0).unwrap();
        let t = SimScenario::new(two_level(s2), ChannelSpec::rayleigh(), s2, 1).with_symbols(10_000);
        assert_eq!(min_antennas(&t, 0.5, 64).unwrap().antennas(), Some(1));
    }

    #[test]
    fn histogram_moments() {
        let s2 = sigma_from_snr(5.0).unwrap();
        let c = min_distance_constellation(4, s2).unwrap();
        let (n, trials) = (100, 20_000);
        let h = histogram(&c, &ChannelSpec::rayleigh(), s2, n, trials, 50, 3).unwrap();
        for (k, &p) in c.levels().iter().enumerate() {
            let var = energy_variance(1.0, s2, p);
            let tol = 3.0 * (var / (n * trials) as f64).sqrt();
            assert!((h.means[k] - (p + s2)).abs() < tol, "k={k}");
            assert!((h.variances[k] / (var / n as f64) - 1.0).abs() < 0.1, "k={k}");
            assert_eq!(h.counts[k].iter().sum::<u64>(), trials as u64);
        }
        assert!(h.overlap() > 0.0);
        assert!(histogram(&c, &ChannelSpec::rayleigh(), s2, n, trials, 5, 3).is_err());
    }
}
