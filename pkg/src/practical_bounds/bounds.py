"""Final certified interval for alpha = (1 - e^-gamma) c, and for c.

With eps = eps_N, Y = Y_{2N,J}, E = E(2N) and R = 1/(J 2^(2J+3)):

    alpha > alpha_N + A_{N,J} - U_N - R + eps (Y - gamma - E)
    alpha < alpha_N + A_{N,J} - U_N     + eps (Y + 1/N - gamma + E)

Both sides are evaluated in interval arithmetic and the safe endpoint kept.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .aggregation import Aggregates, run_pipeline
from .divisor_series import global_remainder_bound, wqj_array
from .errors import ConsistencyError
from .eta_bounds import MK_TABLE, MkTable, e_bound
from .interval import Interval, iv_add, iv_div, iv_mul, iv_sub, math_constants
from .primes import DEFAULT_SEGMENT, prime_segments

log = logging.getLogger(__name__)

REFERENCE_C_INTERVAL = (1.33607322, 1.33607654)
C_ESTIMATE = 1.336


@dataclass(frozen=True)
class YSum:
    x: int
    J: int
    value: Interval


def y_sum(x: int, J: int, *, segment_length: int = DEFAULT_SEGMENT, threads: int = 1) -> YSum:
    """``sum_{q <= x} W_{q,J}`` over primes, ascending."""
    if x < 2:
        raise ValueError(f"y_sum needs x >= 2, got {x}")
    total = Interval(0.0, 0.0)
    for primes in prime_segments(2, x, segment_length, threads):
        if len(primes):
            total = iv_add(total, wqj_array(primes, J).sum())
    return YSum(x, J, total)


@dataclass(frozen=True)
class BoundsReport:
    N: int
    J: int
    alpha_N: Interval
    eps_N: Interval
    U_N: Interval
    A_NJ: Interval
    Y_2NJ: Interval
    E_2N: float
    alpha_lo: float
    alpha_hi: float
    c_lo: float
    c_hi: float
    predicted_gap: float | None

    @property
    def c_width(self) -> float:
        return self.c_hi - self.c_lo

    def intersects(self, lo: float, hi: float) -> bool:
        return self.c_lo <= hi and lo <= self.c_hi


def predicted_gap(c: float, e2n: float, N: int) -> float | None:
    """Asymptotic width ``2 c e^-gamma E(2N) / ((1 - e^-gamma) log N)``."""
    if N < 2:
        return None
    eg = math_constants().exp_neg_gamma.mid
    return 2.0 * c * eg * e2n / ((1.0 - eg) * math.log(N))


def lower_eps_coefficient(y: Interval, e2n: float) -> Interval:
    return iv_sub(iv_sub(y, math_constants().gamma), e2n)


def upper_eps_coefficient(y: Interval, e2n: float, N: int) -> Interval:
    return iv_add(iv_sub(iv_add(y, Fraction(1, N)), math_constants().gamma), e2n)


def assemble(agg: Aggregates, y: YSum, e2n: float) -> BoundsReport:
    """Certified alpha and c bounds from the aggregates, Y_{2N,J} and E(2N)."""
    N, J = agg.N, agg.J
    if y.x != 2 * N or y.J != J:
        raise ValueError(f"Y sum is for x={y.x}, J={y.J}; aggregates need x={2 * N}, J={J}")
    if not (e2n >= 0 and math.isfinite(e2n)):
        raise ValueError(f"E(2N) must be a finite non-negative bound, got {e2n}")
    if J * 2 ** (2 * J + 3) < N:
        log.warning("J*2^(2J+3) < N: the J remainder no longer sits below the 1/N term")
    K = math_constants()
    base = iv_sub(iv_add(agg.alpha_N, agg.A_NJ), agg.U_N)
    lower = iv_add(
        iv_sub(base, global_remainder_bound(J)),
        iv_mul(agg.eps_N, lower_eps_coefficient(y.value, e2n)),
    )
    upper = iv_add(base, iv_mul(agg.eps_N, upper_eps_coefficient(y.value, e2n, N)))
    alpha_lo, alpha_hi = lower.lo, upper.hi
    if not alpha_lo < alpha_hi:
        raise ConsistencyError(f"inverted alpha bounds: {alpha_lo!r} >= {alpha_hi!r}")
    c_lo = iv_div(Interval.point(alpha_lo), K.one_minus_exp_neg_gamma).lo
    c_hi = iv_div(Interval.point(alpha_hi), K.one_minus_exp_neg_gamma).hi
    gap = predicted_gap(0.5 * (c_lo + c_hi), e2n, N)
    return BoundsReport(
        N=N,
        J=J,
        alpha_N=agg.alpha_N,
        eps_N=agg.eps_N,
        U_N=agg.U_N,
        A_NJ=agg.A_NJ,
        Y_2NJ=y.value,
        E_2N=e2n,
        alpha_lo=alpha_lo,
        alpha_hi=alpha_hi,
        c_lo=c_lo,
        c_hi=c_hi,
        predicted_gap=gap,
    )


def compute_bounds(
    N: int,
    J: int = 13,
    extension_k0: int = 24,
    *,
    table: MkTable = MK_TABLE,
    segment_length: int = DEFAULT_SEGMENT,
    threads: int = 1,
    **kwargs,
) -> BoundsReport:
    """End to end: rows, prime functionals, Y, E and the final interval."""
    agg = run_pipeline(N, J, segment_length=segment_length, threads=threads, **kwargs)
    return bounds_from_aggregates(
        agg, extension_k0, table=table, segment_length=segment_length, threads=threads
    )


def bounds_from_aggregates(
    agg: Aggregates,
    extension_k0: int = 24,
    *,
    table: MkTable = MK_TABLE,
    segment_length: int = DEFAULT_SEGMENT,
    threads: int = 1,
) -> BoundsReport:
    t0 = time.perf_counter()
    y = y_sum(2 * agg.N, agg.J, segment_length=segment_length, threads=threads)
    e2n = e_bound(2 * agg.N, extension_k0, table, segment_length=segment_length, threads=threads)
    log.info("Y_2N,J=%r  E(2N)<=%.6g in %.2fs", y.value, e2n, time.perf_counter() - t0)
    return assemble(agg, y, e2n)


# -- serialisation -------------------------------------------------------------

INTERVAL_FIELDS = ("alpha_N", "eps_N", "U_N", "A_NJ", "Y_2NJ")
CSV_COLUMNS = (
    ["N", "J"]
    + [f"{name}_{end}" for name in INTERVAL_FIELDS for end in ("lo", "hi")]
    + ["E_2N", "alpha_lo", "alpha_hi", "c_lo", "c_hi", "predicted_gap"]
)


def _num(x: float | None) -> str:
    if x is None:
        return "null"
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(x, ".17g")


def _flat(r: BoundsReport) -> dict[str, object]:
    out: dict[str, object] = {"N": r.N, "J": r.J}
    for name in INTERVAL_FIELDS:
        iv = getattr(r, name)
        out[f"{name}_lo"], out[f"{name}_hi"] = iv.lo, iv.hi
    for name in ("E_2N", "alpha_lo", "alpha_hi", "c_lo", "c_hi", "predicted_gap"):
        out[name] = getattr(r, name)
    return out


def to_json(r: BoundsReport) -> str:
    parts = [f'  "N": {r.N}', f'  "J": {r.J}']
    for name in INTERVAL_FIELDS:
        iv = getattr(r, name)
        parts.append(f'  "{name}": {{"lo": {_num(iv.lo)}, "hi": {_num(iv.hi)}}}')
    for name in ("E_2N", "alpha_lo", "alpha_hi", "c_lo", "c_hi", "predicted_gap"):
        parts.append(f'  "{name}": {_num(getattr(r, name))}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def to_csv(r: BoundsReport) -> str:
    flat = _flat(r)
    row = [str(flat[c]) if c in ("N", "J") else _num(flat[c]) for c in CSV_COLUMNS]
    row = ["" if v == "null" else v for v in row]
    return ",".join(CSV_COLUMNS) + "\n" + ",".join(row) + "\n"


def to_text(r: BoundsReport) -> str:
    lines = [
        f"N = {r.N}, J = {r.J}",
        f"alpha_N   in [{_num(r.alpha_N.lo)}, {_num(r.alpha_N.hi)}]",
        f"eps_N     in [{_num(r.eps_N.lo)}, {_num(r.eps_N.hi)}]",
        f"U_N       in [{_num(r.U_N.lo)}, {_num(r.U_N.hi)}]",
        f"A_N,J     in [{_num(r.A_NJ.lo)}, {_num(r.A_NJ.hi)}]",
        f"Y_2N,J    in [{_num(r.Y_2NJ.lo)}, {_num(r.Y_2NJ.hi)}]",
        f"E(2N)     <= {_num(r.E_2N)}",
        f"alpha     in [{_num(r.alpha_lo)}, {_num(r.alpha_hi)}]",
        f"c ∈ [{_num(r.c_lo)}, {_num(r.c_hi)}]",
        f"width {r.c_width:.3e}, predicted {('n/a' if r.predicted_gap is None else format(r.predicted_gap, '.3e'))}",
    ]
    return "\n".join(lines) + "\n"


def report_serialize(r: BoundsReport, fmt: str = "json") -> str:
    try:
        writer = {"json": to_json, "csv": to_csv, "text": to_text}[fmt]
    except KeyError:
        raise ValueError(f"unknown report format {fmt!r}") from None
    return writer(r)


def _from_flat(flat: dict[str, object]) -> BoundsReport:
    kw: dict[str, object] = {"N": int(flat["N"]), "J": int(flat["J"])}
    for name in INTERVAL_FIELDS:
        kw[name] = Interval(float(flat[f"{name}_lo"]), float(flat[f"{name}_hi"]))
    for name in ("E_2N", "alpha_lo", "alpha_hi", "c_lo", "c_hi"):
        kw[name] = float(flat[name])
    gap = flat.get("predicted_gap")
    kw["predicted_gap"] = None if gap in (None, "") else float(gap)
    return BoundsReport(**kw)


def from_json(text: str) -> BoundsReport:
    doc = json.loads(text)
    flat = dict(doc)
    for name in INTERVAL_FIELDS:
        flat[f"{name}_lo"], flat[f"{name}_hi"] = doc[name]["lo"], doc[name]["hi"]
    return _from_flat(flat)


def from_csv(text: str) -> BoundsReport:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return _from_flat(next(reader))


def report_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("schema/bounds_report.schema.json").read_text())
