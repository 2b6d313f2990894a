"""Smoke test for the Python bindings.

Build and install first:

    cd crates/python && maturin build --release -o dist && pip install dist/*.whl

Then run `python python/smoke_test.py` (or `pytest python/smoke_test.py`).
"""

import math

import energy_simo as es


def test_rates_match_exponential_closed_form():
    oracle = es.RateOracle(es.Channel.rayleigh(), 1.0, 0.0)
    for d in (0.1, 0.5, 1.0, 3.0):
        assert abs(oracle.rate_right(d) - (d - math.log1p(d))) < 1e-8
    assert abs(oracle.rate_left(0.5) - (math.log(2) - 0.5)) < 1e-8
    assert oracle.rate_left(1.5) == math.inf
    assert abs(oracle.inverse_rate("right", 1 - math.log(2)) - 1.0) < 1e-8


def test_designs():
    s2 = es.noise_power(10.0)
    ch = es.Channel.rayleigh()
    two = es.design_exact(ch, s2, 2, epsilon=1e-6)
    assert two.constellation.levels[0] == 0.0
    assert abs(two.constellation.levels[1] - 2.0) < 1e-5

    four = es.design_exact(ch, s2, 4, epsilon=1e-6)
    for right, left in four.boundary_exponents:
        assert abs(right - four.t_star) < 1e-8 and abs(left - four.t_star) < 1e-8
    assert abs(es.error_exponent(four.constellation, ch, s2) - four.t_star) < 1e-8
    assert es.error_exponent(es.min_distance(4, s2), ch, s2) < four.t_star

    moments = es.design_moments(1.0, 0.1, 4)
    robust = es.design_robust(1.0, 1.0, 0.1, 0.1, 4)
    for a, b in zip(moments.constellation.levels, robust.constellation.levels):
        assert abs(a - b) < 1e-8
    assert es.design_robust(1.0, 1.0, 0.1, 10.0, 2, epsilon=1e-6) is None


def test_simulation_is_shard_invariant_and_bounded():
    s2 = es.noise_power(5.0)
    ch = es.Channel.rician(0.0)
    c = es.design_exact(ch, s2, 4, epsilon=1e-6).constellation
    one = es.simulate(c, ch, s2, 40, symbols=20_000, seed=3)
    many = es.simulate(c, ch, s2, 40, symbols=20_000, seed=3, shards=8)
    assert (one.symbol_errors, one.bit_errors, one.sent) == (many.symbol_errors, many.bit_errors, many.sent)
    se = math.sqrt(one.ser * (1 - one.ser) / one.symbols)
    assert one.ser <= es.chernoff_ser_bound(c, ch, s2, 40) + 3 * se
    lo, hi = one.ser_ci
    assert lo <= one.ser <= hi


def test_pam_without_phase_reference_fails_on_rayleigh():
    s2 = es.noise_power(10.0)
    n = es.min_antennas(None, es.Channel.rayleigh(), s2, 1e-3, n_max=64, symbols=20_000, scheme="pilot_pam")
    assert n is None


def test_histogram():
    s2 = es.noise_power(5.0)
    h = es.histogram(es.min_distance(4, s2), es.Channel.rayleigh(), s2, 100, trials=2000, bins=20)
    assert len(h["edges"]) == 21 and len(h["counts"]) == 4
    assert all(sum(c) == 2000 for c in h["counts"])
    assert h["overlap"] > 0.0


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok  {t.__name__}")
    print(f"{len(tests)} passed")
