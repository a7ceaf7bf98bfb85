import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from practical_bounds.errors import ConfigError
from practical_bounds.interval import Interval, math_constants
from practical_bounds.primes import (
    PrimeFunctionalState,
    advance_state,
    delta_enclosure,
    eta,
    eta_sup_bound,
    extend_functionals,
    prime_segments,
    primes_upto,
    segmented_primes,
    simple_sieve,
    state_at,
)


def test_small_range():
    assert list(segmented_primes(10, 20)) == [11, 13, 17, 19]


def test_prime_count_1e6():
    assert len(primes_upto(10**6)) == 78498


def test_segments_match_simple_sieve_across_boundaries():
    got = np.concatenate(list(prime_segments(2, 200_000, segment_length=1000)))
    assert np.array_equal(got, simple_sieve(200_000))


def test_threads_do_not_change_output():
    one = np.concatenate(list(prime_segments(2, 10**6, 1 << 16, threads=1)))
    two = np.concatenate(list(prime_segments(2, 10**6, 1 << 16, threads=3)))
    assert np.array_equal(one, two)


def test_sieve_guard():
    with pytest.raises(ConfigError):
        list(prime_segments(2, 10**6, max_sieve=10**5))


def test_mertens_product_at_10():
    s = state_at(10)
    assert s.mertens_prod.contains(Fraction(8, 35))


def test_advance_rejects_non_ascending():
    s = advance_state(PrimeFunctionalState.initial(13), 5)
    with pytest.raises(ValueError):
        advance_state(s, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=3000), st.integers(min_value=2, max_value=13))
def test_incremental_matches_batch(x, J):
    primes = simple_sieve(x)
    s = PrimeFunctionalState.initial(J)
    for p in primes.tolist():
        s = advance_state(s, p)
    batch = extend_functionals(primes, PrimeFunctionalState.initial(J)).end
    for name in ("mertens_prod", "sum_logp_over_pm1", "sum_wqj"):
        a, b = getattr(s, name), getattr(batch, name)
        assert a.intersects(b), (name, a, b)


def test_eta_2_encloses_gamma():
    g = math_constants().gamma
    e = eta(2)
    assert e.lo <= g.lo and g.hi <= e.hi


def test_eta_10_hand_value():
    exact = sum(math.log(p) / (p - 1) for p in (2, 3, 5, 7)) - math.log(10) + 0.5772156649015329
    e = eta(10)
    assert abs(e.mid - exact) < 1e-12
    assert e.intersects(Interval(0.243760 - 1e-5, 0.243760 + 1e-5))


def test_eta_rejects_small_x():
    with pytest.raises(ValueError):
        eta(1)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=2, max_value=20_000), st.integers(min_value=1, max_value=20_000))
def test_eta_sup_split_consistency(a, span):
    b = a + span
    m = (a + b) // 2
    whole = eta_sup_bound(a, b)
    assert math.isclose(whole, max(eta_sup_bound(a, m), eta_sup_bound(m, b)), rel_tol=1e-12)


def test_eta_sup_dominates_point_values():
    bound = eta_sup_bound(100, 1000)
    for x in (100, 101, 500, 997, 1000):
        assert eta(x).mag <= bound


def test_delta_enclosure_is_finite():
    d = delta_enclosure(10**4, 10**6)
    assert d.width < 1e-4
    assert abs(d.mid) < 0.1
