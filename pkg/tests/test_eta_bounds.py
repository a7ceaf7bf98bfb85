from decimal import Decimal
from fractions import Fraction

import pytest

from practical_bounds.errors import ConfigError
from practical_bounds.eta_bounds import MK_TABLE, MkTable, e_bound, verify_table_prefix
from practical_bounds.primes import eta, eta_sup_bound


def test_table_shape():
    assert MK_TABLE.ks == list(range(24, 39))
    assert MK_TABLE.rows[24] == Decimal("36.80e-5")


def test_bounds_round_up():
    for k in MK_TABLE.ks:
        assert Fraction(MK_TABLE.bound(k)) >= Fraction(str(MK_TABLE.rows[k]))


def test_non_monotone_table_rejected():
    with pytest.raises(ValueError):
        MkTable({24: Decimal("1e-4"), 25: Decimal("2e-4")})


def test_table_lookup_above_2_24():
    assert e_bound(2**30) == MK_TABLE.bound(30)
    assert e_bound(2**30 + 12345) == MK_TABLE.bound(30)
    assert e_bound(2**60) == MK_TABLE.bound(38)


def test_extension_below_2_24_regression():
    # frozen output of the prime-sum sup over [2^21, 2^24]
    assert e_bound(2**21) == pytest.approx(1.04835019837346e-3, rel=1e-12)
    assert e_bound(2**21) == max(eta_sup_bound(2**21, 2**24), MK_TABLE.bound(24))


def test_extension_covers_point_values():
    b = e_bound(2**16)
    for x in (2**16, 3 * 2**15, 2**20):
        assert eta(x).mag <= b


def test_extension_k0_range():
    with pytest.raises(ConfigError):
        e_bound(1000, extension_k0=23)
    with pytest.raises(ConfigError):
        e_bound(1000, extension_k0=39)


def test_e_bound_is_nonincreasing():
    xs = [2**k for k in range(12, 40, 3)]
    vals = [e_bound(x) for x in xs]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_table_prefix_k24():
    assert verify_table_prefix(24, 2**26)


def test_perturbed_table_fails_prefix():
    bad = MK_TABLE.perturbed(24, "0.9")
    assert bad.rows[24] == Decimal("36.80e-5") * Decimal("0.9")
    assert not verify_table_prefix(24, 2**26, bad)
