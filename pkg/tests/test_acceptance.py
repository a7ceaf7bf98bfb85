"""One test per acceptance criterion; each prints a PASS/FAIL line.

The lines are also collected into the ``acceptance criteria`` section of the
pytest terminal summary.
"""

import math
import time

import pytest

from practical_bounds.aggregation import augmented_table, density_partial_sum, prime_power_residual
from practical_bounds.bounds import REFERENCE_C_INTERVAL, compute_bounds, to_json
from practical_bounds.divisor_series import w_upper_bound, remainder_bound, wq_direct, wqj
from practical_bounds.eta_bounds import MK_TABLE, verify_table_prefix
from practical_bounds.interval import math_constants, widened
from practical_bounds.practical import is_practical, is_practical_oracle
from practical_bounds.primes import eta

pytestmark = pytest.mark.slow

C_LO, C_HI = REFERENCE_C_INTERVAL


def test_c01_characterisation_equivalence(record):
    t0 = time.perf_counter()
    bad = [n for n in range(1, 20_001) if is_practical(n) != is_practical_oracle(n)]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    record(1, ok, f"mismatches={len(bad)} over n<=20000 in {dt:.1f}s (< 120s)")
    assert ok, bad[:10]


def test_c02_reference_interval(reports, record):
    r20, r22 = reports(2**20), reports(2**22)
    ok = r20.intersects(C_LO, C_HI) and r22.intersects(C_LO, C_HI) and r22.c_width < r20.c_width
    record(
        2, ok,
        f"2^20: [{r20.c_lo:.9f}, {r20.c_hi:.9f}] w={r20.c_width:.3e}; "
        f"2^22: [{r22.c_lo:.9f}, {r22.c_hi:.9f}] w={r22.c_width:.3e}",
    )
    assert ok


def test_c03_width_vs_predicted_gap(reports, record):
    r = reports(2**20)
    ratio = r.c_width / r.predicted_gap
    ok = 0.3 <= ratio <= 3.0
    record(3, ok, f"width/predicted_gap = {ratio:.4f} (band [0.3, 3.0])")
    assert ok


def test_c04_eps_decay(reports, record):
    r = reports(2**20)
    target = 1.336 * math_constants().exp_neg_gamma.mid
    lo, hi = r.eps_N.lo * math.log(2**20) / target, r.eps_N.hi * math.log(2**20) / target
    ok = 0.8 <= lo and hi <= 1.2
    record(4, ok, f"eps_N log N / (1.336 e^-gamma) in [{lo:.5f}, {hi:.5f}] (band [0.8, 1.2])")
    assert ok


def test_c05_w_sandwich(record):
    failures, worst = [], 0.0
    for q in (2, 3, 5, 7, 11, 101):
        d = wq_direct(q, 200)
        if not d.hi < float(w_upper_bound(q)):
            failures.append((q, "upper"))
        for J in (2, 5, 13):
            w = wqj(q, J).value
            if not w.hi - d.lo >= 0:
                failures.append((q, J, "below"))
            excess = w.lo - d.hi
            worst = max(worst, excess / remainder_bound(q, J))
            if not excess <= remainder_bound(q, J):
                failures.append((q, J, "above"))
    ok = not failures
    record(5, ok, f"18 (q, J) pairs, max (wqj.lo - direct.hi)/R = {worst:.3f}; failures={failures}")
    assert ok


def test_c06_prime_power_identity(record):
    tab = augmented_table(10**5, 13)
    eps_hi = 1.0 - density_partial_sum(10**5, tab).lo
    parts, ok = [], True
    for q, h in ((2, 1), (2, 2), (3, 1), (5, 1)):
        res = prime_power_residual(q, h, 10**5, tab)
        slack = eps_hi * (1 + (1 - 1 / q) / q**h)
        ok &= res <= slack
        parts.append(f"({q},{h}) {res:.2e}<={slack:.2e}")
    record(6, ok, "; ".join(parts))
    assert ok


def test_c07_eta_spots(record):
    g = math_constants().gamma
    e2, e10, e24 = eta(2), eta(10), eta(2**24)
    ok2 = e2.lo <= g.lo and g.hi <= e2.hi
    ok10 = e10.lo <= 0.243760 + 1e-5 and e10.hi >= 0.243760 - 1e-5
    ok24 = e24.mag <= MK_TABLE.bound(24)
    ok = ok2 and ok10 and ok24
    record(7, ok, f"eta(2)~gamma {ok2}; eta(10)={e10.mid:.8f}; |eta(2^24)|<={e24.mag:.4e} <= 36.80e-5")
    assert ok


def test_c08_table_prefix(record):
    ok24 = verify_table_prefix(24, 2**26)
    ok25 = verify_table_prefix(25, 2**26)
    bad = not verify_table_prefix(24, 2**26, MK_TABLE.perturbed(24, "0.9"))
    ok = ok24 and ok25 and bad
    record(8, ok, f"k=24 {ok24}, k=25 {ok25}; perturbed M_24 rejected {bad}")
    assert ok


def test_c09_rigor_regression(reports, table_1e6, record):
    base = reports(2**20)
    with widened(2):
        wide = compute_bounds(2**20, 13)
    not_narrower = wide.c_lo <= base.c_lo and wide.c_hi >= base.c_hi
    sums = [density_partial_sum(N, table_1e6) for N in (10**2, 10**3, 10**4, 10**5, 10**6)]
    below_one = all(s.hi < 1 for s in sums)
    monotone = all(b.lo >= a.lo and b.hi >= a.hi for a, b in zip(sums, sums[1:]))
    ok = not_narrower and below_one and monotone
    record(
        9, ok,
        f"widened [{wide.c_lo:.9f}, {wide.c_hi:.9f}] contains base {not_narrower}; "
        f"partial sums {[round(s.hi, 6) for s in sums]} < 1 {below_one}, monotone {monotone}",
    )
    assert ok


def test_c10_determinism(reports, record):
    a = to_json(reports(2**20))
    b = to_json(compute_bounds(2**20, 13))
    c = to_json(reports(2**20, threads=2))
    ok = a == b == c
    record(10, ok, f"threads=1 twice and threads=2 byte-identical: {ok} ({len(a)} bytes)")
    assert ok
