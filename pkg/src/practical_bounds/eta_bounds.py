"""Tabulated bounds ``|eta(x)| <= M_k`` for ``x >= 2^k`` and their use for E(x).

E(x) = sup_{y >= x} |eta(y)|.  For ``x >= 2^24`` the table answers directly.
Below that, the sup over ``[x, 2^k0]`` is computed from the primes and
combined with ``M_k0``, which covers everything beyond ``2^k0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from types import MappingProxyType
from typing import Mapping

from .errors import ConfigError
from .interval import enclose
from .primes import MAX_SIEVE, eta_sup_bound

# M_k * 10^5 as printed, k = 24..38
_PRINTED = {
    24: "36.80",
    25: "27.65",
    26: "17.60",
    27: "13.04",
    28: "8.173",
    29: "6.377",
    30: "5.122",
    31: "3.143",
    32: "2.174",
    33: "1.654",
    34: "1.101",
    35: "0.833",
    36: "0.569",
    37: "0.438",
    38: "0.305",
}

TABLE_MIN_K = 24
TABLE_MAX_K = 38


@dataclass(frozen=True)
class MkTable:
    """Exact decimal M_k values; :meth:`bound` rounds each up to a double once."""

    rows: Mapping[int, Decimal]
    _up: Mapping[int, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ks = sorted(self.rows)
        vals = [self.rows[k] for k in ks]
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValueError("M_k must be strictly decreasing in k")
        object.__setattr__(self, "rows", MappingProxyType(dict(self.rows)))
        object.__setattr__(self, "_up", MappingProxyType({k: enclose(v).hi for k, v in self.rows.items()}))

    @classmethod
    def from_printed(cls, printed: Mapping[int, str]) -> "MkTable":
        return cls({k: Decimal(v) * Decimal("1e-5") for k, v in printed.items()})

    @property
    def ks(self) -> list[int]:
        return sorted(self.rows)

    def bound(self, k: int) -> float:
        return self._up[k]

    def perturbed(self, k: int, factor: str) -> "MkTable":
        """Copy with ``M_k`` scaled by ``factor`` (fault injection in self-tests)."""
        rows = dict(self.rows)
        rows[k] = rows[k] * Decimal(factor)
        return MkTable(rows)


MK_TABLE = MkTable.from_printed(_PRINTED)


def e_bound(x: int, extension_k0: int = TABLE_MIN_K, table: MkTable = MK_TABLE, **kwargs) -> float:
    """Certified upper bound on ``sup_{y >= x} |eta(y)|``."""
    if x < 2:
        raise ValueError(f"E(x) needs x >= 2, got {x}")
    lo_k = min(table.ks)
    if x >= 2**lo_k:
        k = min(x.bit_length() - 1, max(table.ks))  # largest k with 2^k <= x
        return table.bound(k)
    if not lo_k <= extension_k0 <= max(table.ks):
        raise ConfigError(f"extension_k0={extension_k0} outside {lo_k}..{max(table.ks)}")
    limit = 2**extension_k0
    if limit > kwargs.get("max_sieve", MAX_SIEVE):
        raise ConfigError(f"extension range up to 2^{extension_k0} exceeds the sieve guard")
    return max(eta_sup_bound(x, limit, **kwargs), table.bound(extension_k0))


def verify_table_prefix(k: int, span_limit: int, table: MkTable = MK_TABLE, **kwargs) -> bool:
    """Check ``sup |eta|`` over ``[2^k, span_limit]`` against ``M_k`` (partial check)."""
    return eta_sup_bound(2**k, span_limit, **kwargs) <= table.bound(k)
