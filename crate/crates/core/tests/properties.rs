use energy_simo::channel::sigma_from_snr;
use energy_simo::decode::energy_decode;
use energy_simo::design::{ask_constellation, design_robust, min_distance_constellation, pam_constellation};
use energy_simo::montecarlo::{simulate, wilson_interval, Scheme, SimScenario};
use energy_simo::rates::{chernoff_ser_bound, equalize_boundary, level_exponents};
use energy_simo::{ChannelSpec, DesignConfig, RateOracle, Side, UncertaintyBox};
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = ChannelSpec> {
    prop_oneof![
        Just(ChannelSpec::rayleigh()),
        (-10.0..15.0f64).prop_map(|k| ChannelSpec::rician(k).unwrap()),
        (0.6..5.0f64).prop_map(|m| ChannelSpec::nakagami(m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_rate_round_trips(ch in channel(), gamma in -5.0..20.0f64, p in 0.0..3.0f64, t in 1e-4..2.0f64) {
        let o = RateOracle::new(ch, sigma_from_snr(gamma).unwrap(), p).unwrap();
        let d = o.inverse_rate(Side::Right, t).unwrap();
        prop_assert!((o.rate_right(d).unwrap() - t).abs() < 1e-8 * t.max(1.0));
        let d = o.inverse_rate(Side::Left, t).unwrap();
        prop_assert!(d > 0.0 && d < o.mean_energy());
        let back = o.rate_left(d).unwrap();
        // Near the floor a single ulp of d moves the exponent a lot.
        prop_assert!(back <= t + 1e-8 * t.max(1.0) || t > 5.0, "{back} vs {t}");
    }

    #[test]
    fn rates_grow_with_deviation(ch in channel(), gamma in -5.0..20.0f64, p in 0.0..3.0f64, a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let o = RateOracle::new(ch, sigma_from_snr(gamma).unwrap(), p).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(o.rate_right(lo).unwrap() <= o.rate_right(hi).unwrap() + 1e-10);
        prop_assert!(o.rate_left(lo).unwrap() <= o.rate_left(hi).unwrap() + 1e-10);
    }

    #[test]
    fn equalized_boundary_balances(ch in channel(), gamma in 0.0..20.0f64, p in 0.0..2.0f64, gap in 0.05..3.0f64) {
        let s2 = sigma_from_snr(gamma).unwrap();
        let lower = RateOracle::new(ch, s2, p).unwrap();
        let upper = RateOracle::new(ch, s2, p + gap).unwrap();
        let d = equalize_boundary(&lower, &upper, gap).unwrap();
        prop_assert!(d > 0.0 && d < gap);
        let r = lower.rate_right(d).unwrap();
        let l = upper.rate_left(gap - d).unwrap();
        prop_assert!((r - l).abs() < 1e-9, "{r} vs {l}");
    }

    #[test]
    fn energy_decoder_is_monotone(l in 2usize..16, s2 in 0.01..1.0f64, x in 0.0..4.0f64, y in 0.0..4.0f64) {
        let c = min_distance_constellation(l, s2).unwrap();
        let (lo, hi) = (x.min(y), x.max(y));
        prop_assert!(energy_decode(&c, lo).unwrap() <= energy_decode(&c, hi).unwrap());
        for k in 0..l {
            prop_assert_eq!(energy_decode(&c, c.receiver_point(k, s2)).unwrap(), k);
        }
    }

    #[test]
    fn baselines_meet_the_budget(l in 2usize..64) {
        prop_assert!((min_distance_constellation(l, 0.1).unwrap().mean_power() - 1.0).abs() < 1e-12);
        prop_assert!((ask_constellation(l, 0.1).unwrap().mean_power() - 1.0).abs() < 1e-12);
        let pam = pam_constellation(l.next_power_of_two()).unwrap();
        prop_assert!((pam.mean_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(trials in 1u64..1_000_000, frac in 0.0..=1.0f64) {
        let k = ((trials as f64) * frac) as u64;
        let (lo, hi) = wilson_interval(k, trials);
        let p = k as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn chernoff_terms_square_when_n_doubles(ch in channel(), gamma in 0.0..15.0f64, l in 2usize..8, n in 1usize..200) {
        let s2 = sigma_from_snr(gamma).unwrap();
        let c = min_distance_constellation(l, s2).unwrap();
        let exps = level_exponents(&c, &ch, s2).unwrap();
        let squared: f64 = exps
            .iter()
            .map(|&(a, b)| (-(n as f64) * a).exp().powi(2) + (-(n as f64) * b).exp().powi(2))
            .sum::<f64>()
            / l as f64;
        let direct = chernoff_ser_bound(&c, &ch, s2, 2 * n).unwrap();
        prop_assert!((direct - squared).abs() <= 1e-12 * direct.max(1e-300) + 1e-300);
        prop_assert!((0.0..=2.0).contains(&direct));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn widening_the_box_never_raises_the_exponent(
        a_lo in 0.2..1.0f64, a_w in 0.0..0.5f64, s_lo in 0.02..0.3f64, s_w in 0.0..0.1f64, grow in 0.0..0.2f64,
    ) {
        let cfg = DesignConfig::new(4).with_epsilon(1e-7);
        let inner = UncertaintyBox::from_noise_powers(a_lo, a_lo + a_w, s_lo, s_lo + s_w).unwrap();
        let outer = UncertaintyBox::from_noise_powers(a_lo, a_lo + a_w + grow, s_lo, s_lo + s_w + grow).unwrap();
        prop_assert!(outer.contains(&inner));
        let t = |b: &UncertaintyBox| design_robust(b, &cfg).unwrap().designed().map_or(0.0, |d| d.t_star);
        prop_assert!(t(&inner) >= t(&outer) - 1e-6);
    }

    #[test]
    fn shards_never_change_counts(seed in any::<u64>(), shards in 2usize..24, n in 1usize..12) {
        let s2 = 0.3;
        let scheme = Scheme::EnergyRegions { constellation: min_distance_constellation(4, s2).unwrap() };
        let base = SimScenario::new(scheme, ChannelSpec::rician(3.0).unwrap(), s2, n).with_symbols(5000).with_seed(seed);
        let one = simulate(&base).unwrap();
        let many = simulate(&base.with_shards(shards)).unwrap();
        prop_assert_eq!(one.counts(), many.counts());
        prop_assert!(one.symbol_errors <= one.symbols && one.bit_errors <= one.bits);
        prop_assert!(one.ser_ci.0 <= one.ser && one.ser <= one.ser_ci.1);
    }
}
