"""Built-in checks behind ``practical-bounds selftest``.

``fast`` runs the cheap oracles; ``full`` adds every acceptance criterion.
Each check reports a reproducible counterexample when it fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .aggregation import augmented_table, density_partial_sum, prime_power_residual
from .bounds import REFERENCE_C_INTERVAL, compute_bounds, to_json
from .divisor_series import w_upper_bound, wq_direct, wqj
from .eta_bounds import MK_TABLE, MkTable, verify_table_prefix
from .interval import Interval, check_transcendentals, math_constants, widened
from .practical import is_practical, is_practical_oracle
from .primes import eta, simple_sieve


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _oracle_equivalence(limit: int) -> CheckResult:
    for n in range(1, limit + 1):
        if is_practical(n) != is_practical_oracle(n):
            return CheckResult("practical-oracle", False, f"mismatch at n={n}")
    return CheckResult("practical-oracle", True, f"n <= {limit}")


def _w_sandwich(qs, Js=(2, 5, 13)) -> CheckResult:
    for q in qs:
        d = wq_direct(q, 200)
        if not d.hi < float(w_upper_bound(q)):
            return CheckResult("w-sandwich", False, f"W_{q} >= 1/(q(q-1))")
        for J in Js:
            w = wqj(q, J)
            # W_q <= W_{q,J} <= W_q + R_{q,J}, checked at endpoint level
            if not (w.value.hi >= d.lo and w.value.lo - w.remainder_bound <= d.hi):
                return CheckResult("w-sandwich", False, f"q={q}, J={J}: {w.value!r} vs {d!r}")
    return CheckResult("w-sandwich", True, f"{len(list(qs))} primes")


def _eta_spots() -> CheckResult:
    g = math_constants().gamma
    e2 = eta(2)
    if not e2.intersects(g) or not (e2.lo <= g.lo and g.hi <= e2.hi):
        return CheckResult("eta-spots", False, f"eta(2)={e2!r} does not enclose gamma")
    e10 = eta(10)
    if not e10.intersects(Interval(0.243760 - 1e-5, 0.243760 + 1e-5)):
        return CheckResult("eta-spots", False, f"eta(10)={e10!r}")
    return CheckResult("eta-spots", True, f"eta(10)={e10.mid:.8f}")


def _eta_table_spot() -> CheckResult:
    e = eta(2**24)
    ok = e.mag <= MK_TABLE.bound(24)
    return CheckResult("eta-2^24", ok, f"|eta(2^24)| <= {e.mag:.6e}")


def _transcendentals() -> CheckResult:
    n = check_transcendentals()
    return CheckResult("transcendentals", True, f"{n} points")


def fast_checks() -> list[Callable[[], CheckResult]]:
    return [
        _transcendentals,
        lambda: _oracle_equivalence(5000),
        lambda: _w_sandwich(simple_sieve(100).tolist()),
        _eta_spots,
    ]


def full_checks(table: MkTable = MK_TABLE, threads: int = 1) -> list[Callable[[], CheckResult]]:
    cache: dict = {}

    def report(N: int, factor: int = 1, t: int = threads):
        key = (N, factor, t)
        if key not in cache:
            with widened(factor):
                cache[key] = compute_bounds(N, 13, table=table, threads=t)
        return cache[key]

    def c1():
        return _oracle_equivalence(20000)

    def c2():
        r20, r22 = report(2**20), report(2**22)
        ok = r20.intersects(*REFERENCE_C_INTERVAL) and r22.intersects(*REFERENCE_C_INTERVAL)
        ok = ok and r22.c_width < r20.c_width
        return CheckResult(
            "reference-interval", ok,
            f"2^20: [{r20.c_lo:.9f}, {r20.c_hi:.9f}], 2^22: [{r22.c_lo:.9f}, {r22.c_hi:.9f}]",
        )

    def c3():
        r = report(2**20)
        ratio = r.c_width / r.predicted_gap
        return CheckResult("gap-prediction", 0.3 <= ratio <= 3.0, f"ratio {ratio:.4f}")

    def c4():
        r = report(2**20)
        target = 1.336 * math_constants().exp_neg_gamma.mid
        v = r.eps_N.mid * math.log(2**20) / target
        return CheckResult("eps-decay", 0.8 <= v <= 1.2, f"eps_N log N / (c e^-gamma) = {v:.4f}")

    def c5():
        return _w_sandwich([2, 3, 5, 7, 11, 101])

    def c6():
        tab = augmented_table(10**5, 13)
        eps_hi = 1.0 - density_partial_sum(10**5, tab).lo
        for q, h in ((2, 1), (2, 2), (3, 1), (5, 1)):
            res = prime_power_residual(q, h, 10**5, tab)
            slack = eps_hi * (1 + (1 - 1 / q) / q**h)
            if res > slack:
                return CheckResult("prime-power-identity", False, f"q={q}, h={h}: residual {res:.3e} > {slack:.3e}")
        return CheckResult("prime-power-identity", True, "4 cases")

    def c7():
        a, b = _eta_spots(), _eta_table_spot()
        return CheckResult("eta-spots", a.passed and b.passed, f"{a.detail}; {b.detail}")

    def c8():
        bad = [k for k in (24, 25) if not verify_table_prefix(k, 2**26, table)]
        return CheckResult("table-prefix", not bad, f"failed k={bad}" if bad else "k=24,25 to 2^26")

    def c9():
        r1, r2 = report(2**20), report(2**20, factor=2)
        if not (r2.c_lo <= r1.c_lo and r2.c_hi >= r1.c_hi):
            return CheckResult("rigor-regression", False, "widened kernel narrowed [c_lo, c_hi]")
        tab = augmented_table(10**6, 13)
        prev = None
        for N in (10**2, 10**3, 10**4, 10**5, 10**6):
            s = density_partial_sum(N, tab)
            if not s.hi < 1 or (prev is not None and s.hi < prev.lo):
                return CheckResult("rigor-regression", False, f"density partial sum at N={N}: {s!r}")
            prev = s
        return CheckResult("rigor-regression", True, "widening monotone; partial sums < 1")

    def c10():
        a = to_json(report(2**20))
        b = to_json(compute_bounds(2**20, 13, table=table, threads=1))
        c = to_json(report(2**20, t=2))
        return CheckResult("determinism", a == b == c, "byte-identical JSON")

    return [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10]


def run_checks(level: str, table: MkTable = MK_TABLE, threads: int = 1) -> Iterator[CheckResult]:
    checks = fast_checks()
    if level == "full":
        checks += full_checks(table, threads)
    elif level != "fast":
        raise ValueError(f"unknown selftest level {level!r}")
    for check in checks:
        try:
            yield check()
        except Exception as exc:  # a crashing check is a failed check
            yield CheckResult(getattr(check, "__name__", "check"), False, f"{type(exc).__name__}: {exc}")
