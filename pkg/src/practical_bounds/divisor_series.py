"""Per-prime weights W_q coming from the log(sigma(n)/n) rearrangement.

``W_q = sum_{h>=1} (1-1/q) q^-h log((1 - q^-(h+1)) / (1 - 1/q))``.  Expanding
the logarithm gives the closed form used in production,

    W_{q,J} = -log(1 - 1/q)/q - sum_{j=1..J} (q-1) / (j q^(j+1) (q^(j+1) - 1)),

which overshoots W_q by ``R_{q,J}`` with ``0 < R_{q,J} < 1/(J q^(2J+2) (q+1))``.

:func:`wq_direct` sums the defining series term by term and is kept as an
independent oracle.  Its truncation after ``h_max`` terms uses the bound
``log(q/(q-1)) (1-1/q) q^-h`` on each term (from ``log(1 - q^-(h+1)) < 0``);
summing the geometric tail gives at most ``log(q/(q-1)) q^-h_max``.  That
stopping rule is derived here, not taken from the literature.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .interval import Interval, IntervalArray, enclose, iv_add, iv_div, iv_log, iv_log1p, iv_mul, iv_sub


@dataclass(frozen=True)
class WqValue:
    q: int
    j_order: int
    value: Interval
    remainder_bound: float


def _check_j(J: int) -> None:
    if J < 2:
        raise ValueError(f"J must be >= 2, got {J}")


def remainder_bound(q: int, J: int) -> float:
    """Upper bound on R_{q,J}, rounded up."""
    return enclose(Fraction(1, J * q ** (2 * J + 2) * (q + 1))).hi


def global_remainder_bound(J: int) -> float:
    """Upper bound ``1/(J 2^(2J+3))`` on the sum of R_{q,J} over all primes."""
    _check_j(J)
    return enclose(Fraction(1, J * 2 ** (2 * J + 3))).hi


def _log_head(q: int) -> Interval:
    """Enclosure of ``-log(1 - 1/q) / q``."""
    return iv_div(-iv_log1p(-enclose(Fraction(1, q))), q)


def wqj(q: int, J: int) -> WqValue:
    """Closed-form W_{q,J}; the finite sum over j is evaluated exactly."""
    _check_j(J)
    series = sum(
        (Fraction(q - 1, j * q ** (j + 1) * (q ** (j + 1) - 1)) for j in range(1, J + 1)),
        Fraction(0),
    )
    value = iv_sub(_log_head(q), enclose(series))
    return WqValue(q, J, value, remainder_bound(q, J))


def wq_direct(q: int, h_max: int) -> Interval:
    """W_q by direct summation of its defining series plus a tail enclosure."""
    if h_max < 1:
        raise ValueError("h_max must be >= 1")
    log_ratio0 = -iv_log1p(-enclose(Fraction(1, q)))  # log(q/(q-1))
    terms = []
    for h in range(1, h_max + 1):
        weight = enclose(Fraction(q - 1, q ** (h + 1)))
        log_term = iv_log(enclose(Fraction(q ** (h + 1) - 1, q**h * (q - 1))))
        terms.append(iv_mul(weight, log_term))
    tail = iv_mul(log_ratio0, enclose(Fraction(1, q**h_max)))
    total = Interval(0.0, 0.0)
    for t in terms:
        total = iv_add(total, t)
    return iv_add(total, Interval(0.0, tail.hi))


def wqj_array(primes: np.ndarray, J: int) -> IntervalArray:
    """Vectorised W_{q,J} enclosures, one outward-rounded op per term."""
    _check_j(J)
    q = IntervalArray.from_ints(primes)
    x = 1.0 / q
    head = (-((-x).log1p())) / q
    qm1 = q - 1.0
    xp = x * x  # q^-(j+1) for j = 1
    series = None
    for j in range(1, J + 1):
        term = (qm1 * (xp * xp)) / ((1.0 - xp) * float(j))
        series = term if series is None else series + term
        xp = xp * x
    return head - series


def w_upper_bound(q: int) -> Fraction:
    """The exact bound ``1/(q(q-1))`` on W_q."""
    return Fraction(1, q * (q - 1))
