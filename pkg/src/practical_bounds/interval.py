"""Outward-rounded interval arithmetic on IEEE-754 doubles.

Endpoints of ``+ - * /`` are rounded in the safe direction using error-free
transformations (TwoSum, Dekker's TwoProduct): the round-to-nearest result
is kept when the exact error shows it already lies on the safe side, and is
stepped outward by one ulp otherwise.  That reproduces what a directed-rounding
FPU would return without touching the rounding mode.  Outside the range where
the transformations are exact the endpoint is stepped unconditionally.

``log``, ``log1p`` and ``exp`` trust the platform libm and widen by
``TRANSCENDENTAL_ULPS`` on each side.  :func:`check_transcendentals` compares
that policy against mpmath and must pass before any certified run.

The :func:`widened` context multiplies every outward step, which is how the
rigor regression checks that a looser kernel never tightens a result.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

TRANSCENDENTAL_ULPS = 2
UNIT_ROUNDOFF = 2.0**-53

_WIDEN: contextvars.ContextVar[int] = contextvars.ContextVar("widen", default=1)

_SPLITTER = 134217729.0  # 2**27 + 1
_BIG = 2.0**995
_TINY = 2.0**-969

Number = Union[int, float, Fraction, Decimal, str]


class RigorError(RuntimeError):
    """A floating-point primitive failed its accuracy contract."""


@contextlib.contextmanager
def widened(factor: int) -> Iterator[None]:
    """Multiply every outward rounding step by ``factor`` inside the block."""
    if factor < 1:
        raise ValueError("widening factor must be >= 1")
    token = _WIDEN.set(int(factor))
    try:
        yield
    finally:
        _WIDEN.reset(token)


def widening_factor() -> int:
    return _WIDEN.get()


# -- scalar rounding helpers -------------------------------------------------


def _step(x: float, direction: int, n: int) -> float:
    target = math.inf if direction > 0 else -math.inf
    for _ in range(n):
        x = math.nextafter(x, target)
    return x


def _finish(r: float, err: float | None, direction: int) -> float:
    """Round ``r`` toward ``direction`` given the sign of ``exact - r``."""
    if not math.isfinite(r):
        raise OverflowError("interval endpoint overflow")
    if err is not None:
        if err == 0 or (err > 0) == (direction < 0):
            return r
    return _step(r, direction, _WIDEN.get())


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    h = c - (c - a)
    return h, a - h


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _prod_safe(a: float, b: float, p: float) -> bool:
    return abs(a) < _BIG and abs(b) < _BIG and _TINY < abs(p) < _BIG


def add_r(a: float, b: float, direction: int) -> float:
    s = a + b
    if not math.isfinite(s):
        return _finish(s, None, direction)
    return _finish(s, _two_sum_err(a, b, s), direction)


def mul_r(a: float, b: float, direction: int) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    err = _two_prod_err(a, b, p) if _prod_safe(a, b, p) else None
    return _finish(p, err, direction)


def div_r(a: float, b: float, direction: int) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    err = None
    if math.isfinite(q) and _prod_safe(q, b, a):
        p = q * b
        r = (a - p) - _two_prod_err(q, b, p)
        err = r if b > 0 else -r
    return _finish(q, err, direction)


def _fn_r(value: float, direction: int) -> float:
    if not math.isfinite(value):
        raise OverflowError("interval endpoint overflow")
    return _step(value, direction, TRANSCENDENTAL_ULPS * _WIDEN.get())


# -- scalar interval ---------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval ``[lo, hi]`` of doubles containing an exact real."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError(f"invalid interval [{self.lo!r}, {self.hi!r}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        x = float(x)
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def mag(self) -> float:
        """Upper bound on ``|x|`` over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x: Number) -> bool:
        v = Fraction(x) if not isinstance(x, (str, Decimal)) else Fraction(str(x))
        above = self.lo == -math.inf or Fraction(self.lo) <= v
        below = self.hi == math.inf or v <= Fraction(self.hi)
        return above and below

    def __contains__(self, x: Number) -> bool:
        return self.contains(x)

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other):
        return iv_add(self, other)

    def __radd__(self, other):
        return iv_add(other, self)

    def __sub__(self, other):
        return iv_sub(self, other)

    def __rsub__(self, other):
        return iv_sub(other, self)

    def __mul__(self, other):
        return iv_mul(self, other)

    def __rmul__(self, other):
        return iv_mul(other, self)

    def __truediv__(self, other):
        return iv_div(self, other)

    def __rtruediv__(self, other):
        return iv_div(other, self)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


def enclose(value: Number) -> Interval:
    """Tightest double interval around an exact int, rational or decimal."""
    if isinstance(value, Interval):
        return value
    if isinstance(value, float):
        return Interval(value, value)
    exact = Fraction(value) if not isinstance(value, Decimal) else Fraction(str(value))
    f = float(exact)  # correctly rounded
    if not math.isfinite(f):
        raise OverflowError(f"{value!r} is outside the double range")
    back = Fraction(f)
    if back == exact:
        return Interval(f, f)
    if back < exact:
        return Interval(f, math.nextafter(f, math.inf))
    return Interval(math.nextafter(f, -math.inf), f)


def _iv(x) -> Interval:
    return x if isinstance(x, Interval) else enclose(x)


def iv_add(a, b) -> Interval:
    a, b = _iv(a), _iv(b)
    return Interval(add_r(a.lo, b.lo, -1), add_r(a.hi, b.hi, 1))


def iv_sub(a, b) -> Interval:
    a, b = _iv(a), _iv(b)
    return Interval(add_r(a.lo, -b.hi, -1), add_r(a.hi, -b.lo, 1))


def iv_mul(a, b) -> Interval:
    a, b = _iv(a), _iv(b)
    pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    return Interval(min(mul_r(x, y, -1) for x, y in pairs), max(mul_r(x, y, 1) for x, y in pairs))


def iv_div(a, b) -> Interval:
    a, b = _iv(a), _iv(b)
    if b.lo <= 0.0 <= b.hi:
        raise ZeroDivisionError(f"interval division by {b!r}, which contains 0")
    pairs = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    return Interval(min(div_r(x, y, -1) for x, y in pairs), max(div_r(x, y, 1) for x, y in pairs))


def iv_log(a) -> Interval:
    a = _iv(a)
    if a.lo <= 0.0:
        raise ValueError(f"log of non-positive interval {a!r}")
    lo = 0.0 if a.lo == 1.0 else _fn_r(math.log(a.lo), -1)
    hi = 0.0 if a.hi == 1.0 else _fn_r(math.log(a.hi), 1)
    return Interval(lo, hi)


def iv_log1p(a) -> Interval:
    a = _iv(a)
    if a.lo <= -1.0:
        raise ValueError(f"log1p of interval {a!r} reaching -1")
    lo = 0.0 if a.lo == 0.0 else _fn_r(math.log1p(a.lo), -1)
    hi = 0.0 if a.hi == 0.0 else _fn_r(math.log1p(a.hi), 1)
    return Interval(lo, hi)


def iv_exp(a) -> Interval:
    a = _iv(a)
    lo = 1.0 if a.lo == 0.0 else max(_fn_r(math.exp(a.lo), -1), 0.0)
    hi = 1.0 if a.hi == 0.0 else _fn_r(math.exp(a.hi), 1)
    return Interval(lo, hi)


def _directed_fsum(values: list[float], direction: int) -> float:
    s = math.fsum(values)
    if not math.isfinite(s):
        raise OverflowError("interval sum overflow")
    values.append(-s)
    residual = math.fsum(values)  # sign of (exact sum - s); zero iff exact
    values.pop()
    return _finish(s, residual, direction)


def iv_sum(terms: Iterable[Interval]) -> Interval:
    """Sum with correctly rounded, outward-directed endpoints (order free)."""
    terms = [_iv(t) for t in terms]
    if not terms:
        return Interval(0.0, 0.0)
    return Interval(
        _directed_fsum([t.lo for t in terms], -1),
        _directed_fsum([t.hi for t in terms], 1),
    )


# -- constants ---------------------------------------------------------------

# Euler's constant bracketed by 20-digit literals.
_GAMMA_LO = "0.57721566490153286060"
_GAMMA_HI = "0.57721566490153286061"


@dataclass(frozen=True)
class MathConstants:
    gamma: Interval
    one_minus_exp_neg_gamma: Interval
    exp_neg_gamma: Interval


@lru_cache(maxsize=None)
def _constants(factor: int) -> MathConstants:
    with widened(factor):
        gamma = Interval(enclose(_GAMMA_LO).lo, enclose(_GAMMA_HI).hi)
        e = iv_exp(-gamma)
        return MathConstants(gamma, iv_sub(1, e), e)


def math_constants() -> MathConstants:
    return _constants(_WIDEN.get())


# -- vectorised intervals ----------------------------------------------------


def _vstep(x: np.ndarray, need: np.ndarray, direction: int, n: int) -> np.ndarray:
    if not need.any():
        return x
    target = np.inf if direction > 0 else -np.inf
    y = x
    for _ in range(n):
        y = np.nextafter(y, target)
    return np.where(need, y, x)


def _vfinish(r: np.ndarray, err: np.ndarray, direction: int) -> np.ndarray:
    if not np.all(np.isfinite(r)):
        raise OverflowError("interval endpoint overflow")
    # NaN errors (unknown) compare False and are stepped
    need = ~(err >= 0) if direction < 0 else ~(err <= 0)
    return _vstep(r, need, direction, _WIDEN.get())


def _vsplit(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = _SPLITTER * a
    h = c - (c - a)
    return h, a - h


def _vprod_err(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        ah, al = _vsplit(a)
        bh, bl = _vsplit(b)
        err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    safe = (np.abs(a) < _BIG) & (np.abs(b) < _BIG) & (np.abs(p) > _TINY) & (np.abs(p) < _BIG)
    return np.where(safe, err, np.nan)


def vadd_r(a: np.ndarray, b: np.ndarray, direction: int) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _vfinish(s, err, direction)


def vmul_r(a: np.ndarray, b: np.ndarray, direction: int) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    with np.errstate(under="ignore"):
        p = a * b
    err = _vprod_err(a, b, p)
    zero = (a == 0.0) | (b == 0.0)
    err = np.where(zero, 0.0, err)
    p = np.where(zero, 0.0, p)
    return _vfinish(p, err, direction)


def vdiv_r(a: np.ndarray, b: np.ndarray, direction: int) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    with np.errstate(under="ignore"):
        q = a / b
        p = q * b
    err = _vprod_err(q, b, p)
    safe = np.isfinite(err) & (np.abs(a) > _TINY)
    with np.errstate(invalid="ignore"):
        r = (a - p) - err
        signed = np.where(b > 0, r, -r)
    err = np.where(safe, signed, np.nan)
    zero = a == 0.0
    err = np.where(zero, 0.0, err)
    q = np.where(zero, 0.0, q)
    return _vfinish(q, err, direction)


def _vfn(values: np.ndarray, exact: np.ndarray, exact_value: float, direction: int) -> np.ndarray:
    values = np.where(exact, exact_value, values)
    return _vstep(values, ~exact, direction, TRANSCENDENTAL_ULPS * _WIDEN.get())


def _gamma_bound(k: np.ndarray) -> np.ndarray:
    """Upward-rounded ``2 * gamma_k`` with ``gamma_k = k u / (1 - k u)``."""
    ku = k.astype(np.float64) * UNIT_ROUNDOFF
    if np.any(ku >= 0.01):
        raise ValueError("sequence too long for the running-error bound")
    g = vdiv_r(vmul_r(2.0, ku, 1), vadd_r(1.0, -ku, -1), 1)
    return vmul_r(g, float(_WIDEN.get()), 1)


@dataclass(frozen=True)
class IntervalArray:
    """Elementwise intervals backed by two float64 arrays."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape:
            raise ValueError("endpoint shapes differ")
        if not np.all(lo <= hi):
            raise ValueError("lo > hi in interval array")

    @classmethod
    def from_ints(cls, values) -> "IntervalArray":
        v = np.asarray(values)
        if v.size and np.max(np.abs(v)) >= 2**53:
            raise OverflowError("integer not exactly representable as a double")
        f = v.astype(np.float64)
        return cls(f, f.copy())

    @classmethod
    def full(cls, shape, value: Interval) -> "IntervalArray":
        return cls(np.full(shape, value.lo), np.full(shape, value.hi))

    def __len__(self) -> int:
        return len(self.lo)

    @property
    def shape(self):
        return self.lo.shape

    def __getitem__(self, idx):
        lo, hi = self.lo[idx], self.hi[idx]
        if np.ndim(lo) == 0:
            return Interval(float(lo), float(hi))
        return IntervalArray(lo, hi)

    def __iter__(self) -> Iterator[Interval]:
        for lo, hi in zip(self.lo.tolist(), self.hi.tolist()):
            yield Interval(lo, hi)

    def mag(self) -> np.ndarray:
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def width(self) -> np.ndarray:
        return self.hi - self.lo

    @staticmethod
    def _coerce(x) -> tuple[np.ndarray, np.ndarray]:
        if isinstance(x, IntervalArray):
            return x.lo, x.hi
        if not isinstance(x, Interval):
            x = enclose(x)
        return np.float64(x.lo), np.float64(x.hi)

    def __add__(self, other) -> "IntervalArray":
        blo, bhi = self._coerce(other)
        return IntervalArray(vadd_r(self.lo, blo, -1), vadd_r(self.hi, bhi, 1))

    __radd__ = __add__

    def __neg__(self) -> "IntervalArray":
        return IntervalArray(-self.hi, -self.lo)

    def __sub__(self, other) -> "IntervalArray":
        blo, bhi = self._coerce(other)
        return IntervalArray(vadd_r(self.lo, -bhi, -1), vadd_r(self.hi, -blo, 1))

    def __rsub__(self, other) -> "IntervalArray":
        return (-self) + other

    def __mul__(self, other) -> "IntervalArray":
        blo, bhi = self._coerce(other)
        if np.all(self.lo >= 0.0) and np.all(blo >= 0.0):
            return IntervalArray(vmul_r(self.lo, blo, -1), vmul_r(self.hi, bhi, 1))
        cands = [(self.lo, blo), (self.lo, bhi), (self.hi, blo), (self.hi, bhi)]
        lo = np.minimum.reduce([vmul_r(x, y, -1) for x, y in cands])
        hi = np.maximum.reduce([vmul_r(x, y, 1) for x, y in cands])
        return IntervalArray(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IntervalArray":
        blo, bhi = self._coerce(other)
        if np.any((blo <= 0.0) & (bhi >= 0.0)):
            raise ZeroDivisionError("interval division by an interval containing 0")
        if np.all(self.lo >= 0.0) and np.all(blo > 0.0):
            return IntervalArray(vdiv_r(self.lo, bhi, -1), vdiv_r(self.hi, blo, 1))
        cands = [(self.lo, blo), (self.lo, bhi), (self.hi, blo), (self.hi, bhi)]
        lo = np.minimum.reduce([vdiv_r(x, y, -1) for x, y in cands])
        hi = np.maximum.reduce([vdiv_r(x, y, 1) for x, y in cands])
        return IntervalArray(lo, hi)

    def __rtruediv__(self, other) -> "IntervalArray":
        alo, ahi = self._coerce(other)
        a = IntervalArray(np.broadcast_to(alo, self.shape).copy(), np.broadcast_to(ahi, self.shape).copy())
        return a / self

    def log(self) -> "IntervalArray":
        if np.any(self.lo <= 0.0):
            raise ValueError("log of non-positive interval")
        return IntervalArray(
            _vfn(np.log(self.lo), self.lo == 1.0, 0.0, -1),
            _vfn(np.log(self.hi), self.hi == 1.0, 0.0, 1),
        )

    def log1p(self) -> "IntervalArray":
        if np.any(self.lo <= -1.0):
            raise ValueError("log1p of interval reaching -1")
        return IntervalArray(
            _vfn(np.log1p(self.lo), self.lo == 0.0, 0.0, -1),
            _vfn(np.log1p(self.hi), self.hi == 0.0, 0.0, 1),
        )

    def sum(self) -> Interval:
        if self.lo.size == 0:
            return Interval(0.0, 0.0)
        return Interval(
            _directed_fsum(self.lo.ravel().tolist(), -1),
            _directed_fsum(self.hi.ravel().tolist(), 1),
        )

    def cumsum(self) -> "IntervalArray":
        """Running sums enclosed via the recursive-summation error bound."""
        n = self.lo.size
        if n == 0:
            return self
        g = _gamma_bound(np.arange(1, n + 1))
        out = []
        for end, direction in ((self.lo, -1), (self.hi, 1)):
            s = np.cumsum(end)
            a = np.cumsum(np.abs(end))
            e = vmul_r(g, a, 1)
            out.append(vadd_r(s, direction * e, direction))
        return IntervalArray(*out)

    def cumprod(self) -> "IntervalArray":
        """Running products of positive intervals with a relative error bound."""
        n = self.lo.size
        if n == 0:
            return self
        if np.any(self.lo <= 0.0):
            raise ValueError("cumprod requires strictly positive intervals")
        g = _gamma_bound(np.arange(1, n + 1))
        lo = vmul_r(np.cumprod(self.lo), vadd_r(1.0, -g, -1), -1)
        hi = vmul_r(np.cumprod(self.hi), vadd_r(1.0, g, 1), 1)
        return IntervalArray(lo, hi)


def concat(parts: Sequence[IntervalArray]) -> IntervalArray:
    if not parts:
        return IntervalArray(np.empty(0), np.empty(0))
    return IntervalArray(np.concatenate([p.lo for p in parts]), np.concatenate([p.hi for p in parts]))


# -- transcendental self-test --------------------------------------------------


_checked: set[int] = set()


def check_transcendentals(samples: int = 10_000, seed: int = 0, *, digits: int = 40) -> int:
    """Compare the widened log/log1p/exp enclosures with a mpmath oracle.

    Both the scalar (libm) and the numpy code paths are sampled.  Returns the
    number of points checked; raises :class:`RigorError` on the first miss.
    """
    import mpmath

    rng = np.random.default_rng(seed)
    third = samples // 3
    log_args = np.concatenate(
        [
            rng.uniform(0.5, 2.0, third // 2),
            np.exp(rng.uniform(-40.0, 60.0, third - third // 2)),
        ]
    )
    log1p_args = -1.0 / rng.integers(2, 2**40, third).astype(np.float64)
    exp_args = rng.uniform(-20.0, 20.0, samples - 2 * third)

    cases = [
        ("log", log_args, mpmath.log, lambda x: iv_log(x), lambda a: a.log()),
        ("log1p", log1p_args, mpmath.log1p, lambda x: iv_log1p(x), lambda a: a.log1p()),
        ("exp", exp_args, mpmath.exp, lambda x: iv_exp(x), None),
    ]
    checked = 0
    with mpmath.workdps(digits):
        for name, args, oracle, scalar, vector in cases:
            vec = vector(IntervalArray(args, args.copy())) if vector else None
            for i, x in enumerate(args.tolist()):
                exact = oracle(mpmath.mpf(x))
                encs = [scalar(Interval(x, x))]
                if vec is not None:
                    encs.append(vec[i])
                for enc in encs:
                    if not (mpmath.mpf(enc.lo) <= exact <= mpmath.mpf(enc.hi)):
                        raise RigorError(f"{name}({x!r}) = {exact} escapes {enc!r}")
                checked += 1
    return checked


def ensure_transcendentals_verified() -> None:
    """Run :func:`check_transcendentals` once per widening factor."""
    factor = _WIDEN.get()
    if factor not in _checked:
        check_transcendentals()
        _checked.add(factor)
