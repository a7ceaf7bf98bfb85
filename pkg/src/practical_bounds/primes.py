"""Segmented prime generation and running prime functionals.

Everything the bounds need from primes is a running quantity over
``p <= x``: the Mertens product, ``sum log p/(p-1)``, and ``sum W_{q,J}``.
Primes are sieved in fixed-length segments (odd-only byte sieve) and each
segment is turned into vectors of running values, continuing from the state
carried over from the previous segment.  Segments may be sieved by worker
threads but are always consumed in ascending order.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .divisor_series import wqj, wqj_array
from .errors import ConfigError
from .interval import (
    Interval,
    IntervalArray,
    enclose,
    iv_add,
    iv_div,
    iv_log,
    iv_mul,
    iv_sub,
    math_constants,
)

DEFAULT_SEGMENT = 1 << 22
MAX_SIEVE = 1 << 40


def simple_sieve(limit: int) -> np.ndarray:
    """All primes ``<= limit`` (plain Eratosthenes, for base primes and tests)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if is_p[i]:
            is_p[i * i :: 2 * i] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in ``[lo, hi)`` given all odd base primes up to ``sqrt(hi)``."""
    start = lo | 1
    if start >= hi:
        odd = np.empty(0, dtype=np.int64)
    else:
        size = (hi - start + 1) // 2
        flags = np.ones(size, dtype=bool)
        for p in base.tolist():
            pp = p * p
            if pp >= hi:
                break
            first = max(pp, -(-start // p) * p)
            if first % 2 == 0:
                first += p
            flags[(first - start) // 2 :: p] = False
        odd = start + 2 * np.flatnonzero(flags).astype(np.int64)
        if start == 1:
            odd = odd[1:]  # 1 is not prime
    if lo <= 2 < hi:
        odd = np.concatenate([np.array([2], dtype=np.int64), odd])
    return odd


def prime_segments(
    lo: int,
    hi: int,
    segment_length: int = DEFAULT_SEGMENT,
    threads: int = 1,
    max_sieve: int = MAX_SIEVE,
) -> Iterator[np.ndarray]:
    """Primes in ``[lo, hi]`` as ascending int64 arrays, one per segment."""
    if hi > max_sieve:
        raise ConfigError(f"sieve limit {hi} exceeds the configured maximum {max_sieve}")
    if lo < 2 or lo > hi:
        raise ValueError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    if segment_length < 2:
        raise ConfigError("segment length must be >= 2")
    base = simple_sieve(math.isqrt(hi))
    base = base[base > 2]
    bounds = [(s, min(s + segment_length, hi + 1)) for s in range(lo, hi + 1, segment_length)]
    if threads <= 1:
        for a, b in bounds:
            yield _sieve_segment(a, b, base)
        return
    # bounded look-ahead keeps memory flat; results are yielded in order
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: deque = deque()
        it = iter(bounds)
        for a, b in it:
            pending.append(pool.submit(_sieve_segment, a, b, base))
            if len(pending) >= 2 * threads:
                break
        while pending:
            yield pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(_sieve_segment, nxt[0], nxt[1], base))


def segmented_primes(lo: int, hi: int, **kwargs) -> Iterator[int]:
    """Stream of the primes in ``[lo, hi]``, ascending."""
    for seg in prime_segments(lo, hi, **kwargs):
        yield from seg.tolist()


def primes_upto(x: int, **kwargs) -> np.ndarray:
    if x < 2:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(list(prime_segments(2, x, **kwargs)))


# -- running functionals -----------------------------------------------------


@dataclass(frozen=True)
class PrimeFunctionalState:
    """Running prime functionals over all primes ``p <= x``."""

    x: int
    mertens_prod: Interval
    sum_logp_over_pm1: Interval
    sum_wqj: Interval
    j_order: int

    @classmethod
    def initial(cls, j_order: int = 13) -> "PrimeFunctionalState":
        return cls(1, Interval(1.0, 1.0), Interval(0.0, 0.0), Interval(0.0, 0.0), j_order)


def advance_state(s: PrimeFunctionalState, p: int) -> PrimeFunctionalState:
    """Fold one more prime into the state (scalar reference path)."""
    if p <= s.x:
        raise ValueError(f"primes must be fed in ascending order: {p} after {s.x}")
    factor = enclose(Fraction(p - 1, p))
    logterm = iv_div(iv_log(p), p - 1)
    return PrimeFunctionalState(
        x=p,
        mertens_prod=iv_mul(s.mertens_prod, factor),
        sum_logp_over_pm1=iv_add(s.sum_logp_over_pm1, logterm),
        sum_wqj=iv_add(s.sum_wqj, wqj(p, s.j_order).value),
        j_order=s.j_order,
    )


def logp_terms(primes: np.ndarray) -> IntervalArray:
    """``log p / (p - 1)`` per prime."""
    p = IntervalArray.from_ints(primes)
    return p.log() / (p - 1.0)


def mertens_factors(primes: np.ndarray) -> IntervalArray:
    """``1 - 1/p`` per prime, as ``(p - 1)/p`` with one rounding."""
    p = IntervalArray.from_ints(primes)
    return (p - 1.0) / p


@dataclass(frozen=True)
class FunctionalSegment:
    """Running values after each prime of one segment.

    ``prod[i]`` etc. describe the state at threshold ``primes[i]``; ``start``
    is the state just below ``primes[0]``.  Columns not requested are None.
    """

    primes: np.ndarray
    start: PrimeFunctionalState
    prod: IntervalArray | None
    logsum: IntervalArray | None
    wsum: IntervalArray | None

    @property
    def end(self) -> PrimeFunctionalState:
        if len(self.primes) == 0:
            return self.start
        s = self.start
        return PrimeFunctionalState(
            x=int(self.primes[-1]),
            mertens_prod=self.prod[-1] if self.prod is not None else s.mertens_prod,
            sum_logp_over_pm1=self.logsum[-1] if self.logsum is not None else s.sum_logp_over_pm1,
            sum_wqj=self.wsum[-1] if self.wsum is not None else s.sum_wqj,
            j_order=s.j_order,
        )

    def column(self, name: str, idx: np.ndarray) -> IntervalArray:
        """Values at positions ``idx`` = number of segment primes <= threshold."""
        arr: IntervalArray = getattr(self, name)
        carry = {
            "prod": self.start.mertens_prod,
            "logsum": self.start.sum_logp_over_pm1,
            "wsum": self.start.sum_wqj,
        }[name]
        lo = np.concatenate([[carry.lo], arr.lo])
        hi = np.concatenate([[carry.hi], arr.hi])
        return IntervalArray(lo[idx], hi[idx])


def _running(terms: IntervalArray, carry: Interval, *, product: bool = False) -> IntervalArray:
    if product:
        return terms.cumprod() * carry
    return terms.cumsum() + carry


def extend_functionals(
    primes: np.ndarray,
    start: PrimeFunctionalState,
    *,
    columns: Iterable[str] = ("prod", "logsum", "wsum"),
) -> FunctionalSegment:
    """Vectorised batch path: running functionals over ``primes`` from ``start``."""
    columns = set(columns)
    if len(primes) and (primes[0] <= start.x or np.any(np.diff(primes) <= 0)):
        raise ValueError("primes must be ascending and above the current threshold")
    empty = len(primes) == 0
    prod = logsum = wsum = None
    if "prod" in columns:
        prod = IntervalArray(np.empty(0), np.empty(0)) if empty else _running(
            mertens_factors(primes), start.mertens_prod, product=True
        )
    if "logsum" in columns:
        logsum = IntervalArray(np.empty(0), np.empty(0)) if empty else _running(
            logp_terms(primes), start.sum_logp_over_pm1
        )
    if "wsum" in columns:
        wsum = IntervalArray(np.empty(0), np.empty(0)) if empty else _running(
            wqj_array(primes, start.j_order), start.sum_wqj
        )
    return FunctionalSegment(primes, start, prod, logsum, wsum)


def functional_segments(
    hi: int,
    j_order: int = 13,
    *,
    columns: Iterable[str] = ("prod", "logsum", "wsum"),
    segment_length: int = DEFAULT_SEGMENT,
    threads: int = 1,
    max_sieve: int = MAX_SIEVE,
) -> Iterator[FunctionalSegment]:
    """Stream :class:`FunctionalSegment` objects covering all primes ``<= hi``."""
    state = PrimeFunctionalState.initial(j_order)
    if hi < 2:
        return
    columns = tuple(columns)
    for primes in prime_segments(2, hi, segment_length, threads, max_sieve):
        seg = extend_functionals(primes, state, columns=columns)
        state = seg.end
        yield seg


def state_from_primes(primes: Iterable[int], j_order: int = 13) -> PrimeFunctionalState:
    """Batch state over an explicit ascending list of primes."""
    arr = np.asarray(list(primes), dtype=np.int64)
    return extend_functionals(arr, PrimeFunctionalState.initial(j_order)).end


def state_at(x: int, j_order: int = 13, **kwargs) -> PrimeFunctionalState:
    """State at threshold ``x`` (all primes ``<= x``)."""
    state = PrimeFunctionalState.initial(j_order)
    for seg in functional_segments(x, j_order, **kwargs):
        state = seg.end
    return PrimeFunctionalState(
        x, state.mertens_prod, state.sum_logp_over_pm1, state.sum_wqj, j_order
    )


# -- eta and delta -----------------------------------------------------------


def _logsum_upto(x: int, **kwargs) -> Interval:
    total = Interval(0.0, 0.0)
    if x < 2:
        return total
    for primes in prime_segments(2, x, **kwargs):
        total = iv_add(total, logp_terms(primes).sum())
    return total


def eta(x: int, **kwargs) -> Interval:
    """``sum_{p<=x} log p/(p-1) - log x + gamma``."""
    if x < 2:
        raise ValueError(f"eta is defined for x >= 2, got {x}")
    gamma = math_constants().gamma
    return iv_add(iv_sub(_logsum_upto(x, **kwargs), iv_log(x)), gamma)


def eta_sup_bound(a: int, b: int, **kwargs) -> float:
    """Certified upper bound on ``sup |eta(y)|`` for real ``y`` in ``[a, b]``.

    Between consecutive primes eta decreases (``-log y`` plus a constant), so
    the extremes over ``[a, b]`` sit at the endpoints, at each prime in the
    range (value after the jump) and just below each prime above ``a`` (value
    before the jump).  All of them are evaluated.
    """
    if not 2 <= a <= b:
        raise ValueError(f"need 2 <= a <= b, got a={a}, b={b}")
    gamma = math_constants().gamma
    best = 0.0
    carry = Interval(0.0, 0.0)  # sum over primes below the current segment
    s_a = None
    for primes in prime_segments(2, b, **kwargs):
        if len(primes) == 0:
            continue
        if primes[-1] < a:
            carry = iv_add(carry, logp_terms(primes).sum())
            continue
        cum = logp_terms(primes).cumsum() + carry
        if s_a is None:
            k = int(np.searchsorted(primes, a, side="right"))
            s_a = carry if k == 0 else cum[k - 1]
        sel = primes >= a
        p = primes[sel]
        lg = IntervalArray.from_ints(p).log()
        right = cum[sel] - lg + gamma
        prev_lo = np.concatenate([[carry.lo], cum.lo[:-1]])[sel]
        prev_hi = np.concatenate([[carry.hi], cum.hi[:-1]])[sel]
        left = IntervalArray(prev_lo, prev_hi) - lg + gamma
        above = p > a
        cand = [right.mag()]
        if above.any():
            cand.append(left.mag()[above])
        best = max(best, max(float(np.max(c)) for c in cand))
        carry = cum[-1]
    if s_a is None:  # no prime >= a up to b
        s_a = carry
    s_b = carry
    for y, s in ((a, s_a), (b, s_b)):
        best = max(best, iv_add(iv_sub(s, iv_log(y)), gamma).mag)
    return best


def delta_enclosure(x: int, tail_cutoff: int, **kwargs) -> Interval:
    """``eta(x) + sum_{p > x} log p/(p(p-1))``, tail beyond the cutoff enclosed.

    The primes in ``(x, tail_cutoff]`` are summed; beyond the cutoff the sum is
    in ``[0, (1 + log T)/T]`` with ``T = tail_cutoff``.
    """
    if tail_cutoff < x:
        raise ValueError("tail_cutoff must be >= x")
    base = eta(x, **kwargs)
    partial = Interval(0.0, 0.0)
    if tail_cutoff > x:
        for primes in prime_segments(x + 1, tail_cutoff, **kwargs):
            if len(primes):
                pa = IntervalArray.from_ints(primes)
                partial = iv_add(partial, (pa.log() / (pa * (pa - 1.0))).sum())
    tail_hi = iv_div(iv_add(1, iv_log(tail_cutoff)), tail_cutoff).hi
    return iv_add(iv_add(base, partial), Interval(0.0, tail_hi))
