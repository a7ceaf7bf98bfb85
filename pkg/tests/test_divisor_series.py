import math
from fractions import Fraction

import pytest

from practical_bounds.divisor_series import (
    global_remainder_bound,
    w_upper_bound,
    remainder_bound,
    wq_direct,
    wqj,
    wqj_array,
)
from practical_bounds.primes import simple_sieve

QS = [2, 3, 5, 7, 11, 101]
JS = [2, 5, 13]


def test_w2_value():
    # direct sum over h of (1/2^h - 1/2^(h+1)) log(sigma(2^h)/2^h) terms
    assert abs(wq_direct(2, 200).mid - 0.2526081216) < 1e-9


@pytest.mark.parametrize("q", QS)
@pytest.mark.parametrize("J", JS)
def test_sandwich_endpoint_level(q, J):
    d = wq_direct(q, 200)
    w = wqj(q, J)
    assert w.value.hi - d.lo >= 0
    assert w.value.lo - d.hi <= remainder_bound(q, J)


@pytest.mark.parametrize("q", QS)
def test_w_upper_bound(q):
    assert Fraction(wq_direct(q, 200).hi) < w_upper_bound(q)


def test_remainder_bounds():
    assert remainder_bound(2, 13) >= 1 / (13 * 2**28 * 3)
    assert global_remainder_bound(13) >= 1 / (13 * 2**29)
    for q in (2, 3, 5):
        assert remainder_bound(q, 13) <= global_remainder_bound(13)
    with pytest.raises(ValueError):
        global_remainder_bound(1)


@pytest.mark.parametrize("J", [2, 13])
def test_vector_path_matches_scalar(J):
    primes = simple_sieve(5000)
    arr = wqj_array(primes, J)
    for p, v in zip(primes.tolist(), arr):
        assert v.intersects(wqj(p, J).value), p


def test_sum_over_primes_respects_termwise_bound():
    primes = simple_sieve(10**5)
    s = wqj_array(primes, 13).sum()
    cap = math.fsum(1 / (p * (p - 1)) for p in primes.tolist())
    assert wqj(2, 13).value.lo < s.lo and s.hi < cap
