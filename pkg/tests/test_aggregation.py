import math
from fractions import Fraction

import numpy as np
import pytest

from practical_bounds.aggregation import (
    aggregate,
    augment,
    augmented_table,
    dump_augmented,
    density_partial_sum,
    prime_power_residual,
    load_augmented,
    run_pipeline,
)
from practical_bounds.errors import ConfigError
from practical_bounds.practical import enumerate_practical
from practical_bounds.primes import advance_state, PrimeFunctionalState, simple_sieve


def test_pipeline_n1_by_hand():
    a = run_pipeline(1, 2)
    assert a.alpha_N.contains(Fraction(1, 2) * Fraction(math.log(2)))
    assert a.eps_N.contains(Fraction(1, 2))
    assert a.U_N == a.U_N.point(0.0)


def test_pipeline_n2_by_hand():
    # rows n=1 (theta 2) and n=2 (theta 4): weights 1/2 and (1/2)(2/3)/2
    a = run_pipeline(2, 13)
    assert a.eps_N.contains(Fraction(1, 3))
    L2, L3 = math.log(2), math.log(3)
    alpha = 0.5 * L2 + (1 / 6) * (L2 + L3 / 2 - L2)
    assert abs(a.alpha_N.mid - alpha) < 1e-15


def test_functionals_match_scalar_path():
    t = augmented_table(3000, 13)
    primes = simple_sieve(int(t.rows.theta.max())).tolist()
    states, s, i = {}, PrimeFunctionalState.initial(13), 0
    for theta in sorted(set(t.rows.theta.tolist())):
        while i < len(primes) and primes[i] <= theta:
            s = advance_state(s, primes[i])
            i += 1
        states[theta] = s
    for k, theta in enumerate(t.rows.theta.tolist()):
        assert t.mertens[k].intersects(states[theta].mertens_prod)
        assert t.logsum[k].intersects(states[theta].sum_logp_over_pm1)
        assert t.wsum[k].intersects(states[theta].sum_wqj)


def test_segment_length_only_moves_rounding_slack():
    # the running-sum error bound depends on segment size, so endpoints differ
    rows = enumerate_practical(20_000)
    a = aggregate(augment(rows, 13, segment_length=1 << 12))
    b = aggregate(augment(rows, 13))
    for name in ("alpha_N", "eps_N", "U_N", "A_NJ"):
        x, y = getattr(a, name), getattr(b, name)
        assert x.intersects(y)
        assert max(x.width, y.width) < 1e-12


def test_density_partial_sums(table_1e6):
    prev = None
    for N in (10**2, 10**3, 10**4, 10**5, 10**6):
        s = density_partial_sum(N, table_1e6)
        assert s.hi < 1
        if prev is not None:
            assert s.lo >= prev.lo
        prev = s


@pytest.mark.parametrize("q,h", [(2, 1), (2, 2), (3, 1), (5, 1)])
def test_prime_power_residual(q, h):
    tab = augmented_table(10**5, 13)
    eps = aggregate(tab).eps_N
    assert prime_power_residual(q, h, 10**5, tab) <= eps.hi * (1 + (1 - 1 / q) / q**h)


def test_truncate_matches_fresh_table(table_1e6):
    assert aggregate(table_1e6.truncate(10**4)) == aggregate(augmented_table(10**4, 13))


@pytest.mark.parametrize("fmt", ["csv", "binary"])
def test_checkpoint_roundtrip(tmp_path, fmt):
    t = augmented_table(5000, 13)
    dump_augmented(t, tmp_path / "aug", fmt)
    back = load_augmented(tmp_path / "aug", 13, fmt, N=5000)
    assert aggregate(back) == aggregate(t)


def test_memory_guard():
    with pytest.raises(ConfigError):
        run_pipeline(10**6, 13, max_n=10**5)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        run_pipeline(0)
    with pytest.raises(ValueError):
        augmented_table(100, 1)


def test_partial_sum_small_cases():
    assert density_partial_sum(1).contains(Fraction(1, 2))
    assert density_partial_sum(2).contains(Fraction(2, 3))
