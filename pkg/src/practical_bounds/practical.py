"""Practical numbers and the sum-of-divisors function.

n is practical iff, writing n = p1^a1 ... pk^ak with p1 < ... < pk, every
prime satisfies ``p_{j+1} <= sigma(p1^a1 ... pj^aj) + 1`` (Stewart and
Sierpinski).  Peeling off the largest prime power turns that into a recursion
on ``m = n / P^+(n)^a``: n is practical iff m is practical and
``P^+(n) <= sigma(m) + 1``.  Since ``m <= n/2``, whole dyadic blocks of n can
be decided at once from a largest-prime-factor sieve.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .errors import ConfigError
from .primes import simple_sieve

ORACLE_LIMIT = 10**5
DEFAULT_MAX_N = 1 << 26
SIGMA_MAX = 2**62

ROW_DTYPE = np.dtype([("n", "<u8"), ("sigma", "<u8")])


class PracticalRow(NamedTuple):
    n: int
    sigma: int
    theta: int


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation by trial division, ascending primes."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def sigma(n: int) -> int:
    """Sum of the positive divisors of ``n``."""
    s = 1
    for p, a in factorize(n):
        s *= (p ** (a + 1) - 1) // (p - 1)
    if s > SIGMA_MAX:
        raise OverflowError(f"sigma({n}) exceeds the 63-bit carrier")
    return s


def is_practical(n: int) -> bool:
    """Ascending-prefix test: each next prime must be <= sigma(prefix) + 1."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    sig = 1
    for p, a in factorize(n):
        if p > sig + 1:
            return False
        sig *= (p ** (a + 1) - 1) // (p - 1)
    return True


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def is_practical_oracle(n: int) -> bool:
    """Brute force: every m <= n is a sum of distinct divisors (subset-sum bitset)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > ORACLE_LIMIT:
        raise ConfigError(f"oracle refused for n={n} > {ORACLE_LIMIT}")
    reach = 1
    for d in divisors(n):
        reach |= reach << d
    full = (1 << (n + 1)) - 1
    return reach & full == full


@dataclass(frozen=True)
class PracticalTable:
    """Practical n <= N with exact sigma(n), ascending in n."""

    N: int
    n: np.ndarray
    sigma: np.ndarray

    @property
    def theta(self) -> np.ndarray:
        return self.sigma + 1

    def __len__(self) -> int:
        return len(self.n)

    def __iter__(self) -> Iterator[PracticalRow]:
        for n, s in zip(self.n.tolist(), self.sigma.tolist()):
            yield PracticalRow(n, s, s + 1)

    def truncate(self, N: int) -> "PracticalTable":
        k = int(np.searchsorted(self.n, N, side="right"))
        return PracticalTable(N, self.n[:k], self.sigma[:k])


def largest_prime_factor_table(N: int) -> np.ndarray:
    """``lpf[n]`` = largest prime factor of n (0 and 1 map to 1)."""
    lpf = np.ones(N + 1, dtype=np.int32 if N < 2**31 else np.int64)
    for p in simple_sieve(N).tolist():
        lpf[p::p] = p
    return lpf


def practical_sieve(N: int, max_n: int = DEFAULT_MAX_N) -> tuple[np.ndarray, np.ndarray]:
    """Boolean practical flags and sigma for every ``0 <= n <= N``.

    ``flags[0]`` is False and ``sigma[0]`` is 0.
    """
    if N < 1:
        raise ConfigError(f"N must be >= 1, got {N}")
    if N > max_n:
        raise ConfigError(f"N={N} exceeds the enumeration guard {max_n}")
    lpf = largest_prime_factor_table(N)
    sig = np.zeros(N + 1, dtype=np.int64)
    flags = np.zeros(N + 1, dtype=bool)
    sig[1] = 1
    flags[1] = True
    lo = 2
    while lo <= N:
        hi = min(2 * lo, N + 1)  # m <= n/2 < lo, so every m is already known
        n = np.arange(lo, hi, dtype=np.int64)
        p = lpf[lo:hi].astype(np.int64)
        m = n // p
        pk = p.copy()
        mask = m % p == 0
        while mask.any():
            m[mask] //= p[mask]
            pk[mask] *= p[mask]
            mask = m % p == 0
        sm = sig[m]
        s = sm * ((pk * p - 1) // (p - 1))
        if np.any(s < sm):
            raise OverflowError("sigma overflowed int64")
        sig[lo:hi] = s
        flags[lo:hi] = flags[m] & (p <= sm + 1)
        lo = hi
    return flags, sig


def enumerate_practical(N: int, max_n: int = DEFAULT_MAX_N) -> PracticalTable:
    """All practical ``n <= N`` with sigma(n), via the sieve recursion."""
    flags, sig = practical_sieve(N, max_n)
    n = np.flatnonzero(flags).astype(np.int64)
    table = PracticalTable(N, n, sig[n])
    if len(n) > 1 and np.any(table.theta[1:] < 2 * n[1:]):
        raise AssertionError("theta(n) >= 2n violated for a practical n")
    return table


# -- row dumps ---------------------------------------------------------------


def dump_rows(table: PracticalTable, path: str | Path, fmt: str = "csv") -> None:
    """Write ``(n, sigma)`` pairs as ``n,sigma`` text or little-endian u64 pairs."""
    path = Path(path)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("n,sigma\n")
        for n, s in zip(table.n.tolist(), table.sigma.tolist()):
            buf.write(f"{n},{s}\n")
        path.write_text(buf.getvalue())
    elif fmt == "binary":
        rec = np.empty(len(table), dtype=ROW_DTYPE)
        rec["n"] = table.n
        rec["sigma"] = table.sigma
        path.write_bytes(rec.tobytes())
    else:
        raise ValueError(f"unknown row format {fmt!r}")


def load_rows(path: str | Path, fmt: str = "csv", N: int | None = None) -> PracticalTable:
    path = Path(path)
    if fmt == "csv":
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["n", "sigma"]:
                raise ValueError(f"unexpected header {header}")
            pairs = [(int(a), int(b)) for a, b in reader]
        n = np.array([a for a, _ in pairs], dtype=np.int64)
        s = np.array([b for _, b in pairs], dtype=np.int64)
    elif fmt == "binary":
        rec = np.frombuffer(path.read_bytes(), dtype=ROW_DTYPE)
        n = rec["n"].astype(np.int64)
        s = rec["sigma"].astype(np.int64)
    else:
        raise ValueError(f"unknown row format {fmt!r}")
    return PracticalTable(int(n[-1]) if N is None and len(n) else (N or 0), n, s)
