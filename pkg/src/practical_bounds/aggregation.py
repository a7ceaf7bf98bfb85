"""Truncated sums over practical n <= N.

The rows are sorted by ``theta(n) = sigma(n) + 1`` and joined against a single
ascending stream of prime segments, so every prime functional is evaluated
once per distinct threshold.  The four aggregates are then summed over the
rows with correctly rounded, outward-directed sums, which makes the result
independent of row order; rows are kept in ascending n regardless.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConsistencyError
from .interval import Interval, IntervalArray, enclose, ensure_transcendentals_verified, iv_mul, iv_sub
from .practical import DEFAULT_MAX_N, PracticalTable, enumerate_practical
from .primes import DEFAULT_SEGMENT, MAX_SIEVE, PrimeFunctionalState, functional_segments

log = logging.getLogger(__name__)

AUG_DTYPE = np.dtype(
    [
        ("n", "<u8"),
        ("sigma", "<u8"),
        ("mertens_lo", "<f8"),
        ("mertens_hi", "<f8"),
        ("logsum_lo", "<f8"),
        ("logsum_hi", "<f8"),
        ("wsum_lo", "<f8"),
        ("wsum_hi", "<f8"),
    ]
)


@dataclass(frozen=True)
class AugmentedTable:
    """Practical rows with the prime functionals evaluated at theta(n)."""

    rows: PracticalTable
    J: int
    mertens: IntervalArray
    logsum: IntervalArray
    wsum: IntervalArray

    @property
    def N(self) -> int:
        return self.rows.N

    def truncate(self, N: int) -> "AugmentedTable":
        k = int(np.searchsorted(self.rows.n, N, side="right"))
        return AugmentedTable(
            self.rows.truncate(N), self.J, self.mertens[:k], self.logsum[:k], self.wsum[:k]
        )

    def weights(self) -> IntervalArray:
        """``prod_{p <= theta(n)} (1 - 1/p) / n`` per row."""
        return self.mertens / IntervalArray.from_ints(self.rows.n)


@dataclass(frozen=True)
class Aggregates:
    alpha_N: Interval
    eps_N: Interval
    U_N: Interval
    A_NJ: Interval
    N: int
    J: int


def augment(
    rows: PracticalTable,
    J: int,
    *,
    segment_length: int = DEFAULT_SEGMENT,
    threads: int = 1,
    max_sieve: int = MAX_SIEVE,
) -> AugmentedTable:
    """Attach the functionals at theta(n) to every row (sorted-table join)."""
    theta = rows.theta
    size = len(theta)
    mert = [np.empty(size), np.empty(size)]
    lsum = [np.empty(size), np.empty(size)]
    wsum = [np.empty(size), np.empty(size)]
    if size == 0:
        empty = IntervalArray(np.empty(0), np.empty(0))
        return AugmentedTable(rows, J, empty, empty, empty)

    # equal thresholds share one read of the prime state
    uniq, inverse = np.unique(theta, return_inverse=True)  # ascending theta
    u_mert = [np.empty(len(uniq)), np.empty(len(uniq))]
    u_lsum = [np.empty(len(uniq)), np.empty(len(uniq))]
    u_wsum = [np.empty(len(uniq)), np.empty(len(uniq))]

    cursor = 0
    last = PrimeFunctionalState.initial(J)
    for seg in functional_segments(
        int(uniq[-1]), J, segment_length=segment_length, threads=threads, max_sieve=max_sieve
    ):
        last = seg.end
        if len(seg.primes) == 0:
            continue
        # thresholds up to this segment's last prime; those in the gap before
        # the next prime are read from the next segment's carried start state
        stop = int(np.searchsorted(uniq, seg.primes[-1], side="right"))
        if stop > cursor:
            idx = np.searchsorted(seg.primes, uniq[cursor:stop], side="right")
            for name, dest in (("prod", u_mert), ("logsum", u_lsum), ("wsum", u_wsum)):
                col = seg.column(name, idx)
                dest[0][cursor:stop] = col.lo
                dest[1][cursor:stop] = col.hi
            cursor = stop
    if cursor < len(uniq):
        for dest, val in ((u_mert, last.mertens_prod), (u_lsum, last.sum_logp_over_pm1), (u_wsum, last.sum_wqj)):
            dest[0][cursor:] = val.lo
            dest[1][cursor:] = val.hi

    for src, dest in ((u_mert, mert), (u_lsum, lsum), (u_wsum, wsum)):
        dest[0][:] = src[0][inverse]
        dest[1][:] = src[1][inverse]
    return AugmentedTable(
        rows, J, IntervalArray(*mert), IntervalArray(*lsum), IntervalArray(*wsum)
    )


def augmented_table(
    N: int,
    J: int,
    *,
    segment_length: int = DEFAULT_SEGMENT,
    threads: int = 1,
    max_n: int = DEFAULT_MAX_N,
    max_sieve: int = MAX_SIEVE,
) -> AugmentedTable:
    if J < 2:
        raise ValueError(f"J must be >= 2, got {J}")
    t0 = time.perf_counter()
    rows = enumerate_practical(N, max_n)
    log.info("practical rows: %d (N=%d) in %.2fs", len(rows), N, time.perf_counter() - t0)
    t0 = time.perf_counter()
    table = augment(rows, J, segment_length=segment_length, threads=threads, max_sieve=max_sieve)
    log.info("prime functionals to theta_max=%d in %.2fs", int(rows.theta.max()), time.perf_counter() - t0)
    return table


def aggregate(table: AugmentedTable) -> Aggregates:
    """Sum the four truncation aggregates over the rows of ``table``."""
    n = IntervalArray.from_ints(table.rows.n)
    log_n = n.log()
    log_sigma = IntervalArray.from_ints(table.rows.sigma).log()
    w = table.weights()
    alpha = (w * (table.logsum - log_n)).sum()
    mass = w.sum()
    U = (w * (log_sigma - log_n)).sum()
    A = (w * table.wsum).sum()
    eps = iv_sub(1, mass)
    if not eps.hi > 0:
        raise ConsistencyError(f"epsilon_N enclosure {eps!r} is not positive")
    return Aggregates(alpha, eps, U, A, table.N, table.J)


def run_pipeline(N: int, J: int = 13, **kwargs) -> Aggregates:
    """alpha_N, eps_N, U_N and A_{N,J} for truncation level N."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    ensure_transcendentals_verified()
    return aggregate(augmented_table(N, J, **kwargs))


def density_partial_sum(N: int, table: AugmentedTable | None = None, **kwargs) -> Interval:
    """``sum_{n <= N, practical} prod_{p <= theta(n)} (1 - 1/p) / n``."""
    if table is None:
        table = augmented_table(N, 13, **kwargs)
    elif table.N != N:
        table = table.truncate(N)
    return table.weights().sum()


def prime_power_residual(q: int, h: int, N: int, table: AugmentedTable | None = None, **kwargs) -> float:
    """Upper bound on ``|L - (1 - 1/q) q^-h R|`` for the truncated identity.

    L sums the weights of practical n <= N with ``q^h || n``; R those with
    ``theta(n) >= q``.
    """
    if table is None:
        table = augmented_table(N, 13, **kwargs)
    elif table.N != N:
        table = table.truncate(N)
    n = table.rows.n
    exact = (n % q**h == 0) & (n % q ** (h + 1) != 0)
    w = table.weights()
    L = w[exact].sum() if exact.any() else Interval(0.0, 0.0)
    big = table.rows.theta >= q
    R = w[big].sum() if big.any() else Interval(0.0, 0.0)
    coeff = enclose(Fraction(q - 1, q ** (h + 1)))
    return iv_sub(L, iv_mul(coeff, R)).mag


# -- checkpoints ---------------------------------------------------------------


def dump_augmented(table: AugmentedTable, path: str | Path, fmt: str = "csv") -> None:
    """Augmented rows: ``n, sigma`` plus lo/hi columns of the three functionals."""
    path = Path(path)
    rec = np.empty(len(table.rows), dtype=AUG_DTYPE)
    rec["n"] = table.rows.n
    rec["sigma"] = table.rows.sigma
    for name, arr in (("mertens", table.mertens), ("logsum", table.logsum), ("wsum", table.wsum)):
        rec[f"{name}_lo"] = arr.lo
        rec[f"{name}_hi"] = arr.hi
    if fmt == "binary":
        path.write_bytes(rec.tobytes())
    elif fmt == "csv":
        lines = [",".join(AUG_DTYPE.names)]
        for r in rec.tolist():
            lines.append(f"{r[0]},{r[1]}," + ",".join(repr(float(v)) for v in r[2:]))
        path.write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown table format {fmt!r}")


def load_augmented(path: str | Path, J: int, fmt: str = "csv", N: int | None = None) -> AugmentedTable:
    path = Path(path)
    if fmt == "binary":
        rec = np.frombuffer(path.read_bytes(), dtype=AUG_DTYPE)
    elif fmt == "csv":
        rec = np.genfromtxt(path, delimiter=",", names=True, dtype=AUG_DTYPE, ndmin=1)
    else:
        raise ValueError(f"unknown table format {fmt!r}")
    n = rec["n"].astype(np.int64)
    if N is None:
        N = int(n[-1]) if len(n) else 0
    rows = PracticalTable(N, n, rec["sigma"].astype(np.int64))
    cols = [IntervalArray(rec[f"{c}_lo"].copy(), rec[f"{c}_hi"].copy()) for c in ("mertens", "logsum", "wsum")]
    return AugmentedTable(rows, J, *cols)
