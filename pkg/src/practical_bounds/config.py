from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .eta_bounds import TABLE_MAX_K, TABLE_MIN_K
from .practical import DEFAULT_MAX_N
from .primes import DEFAULT_SEGMENT

DEFAULT_MEM_BUDGET = 4 << 30
FORMATS = ("json", "csv", "text")
VERIFY_LEVELS = ("none", "fast", "full")

# bytes per unit, measured on the reference build and rounded up
_FIXED_BYTES = 64 << 20  # interpreter, numpy, mpmath
_PER_N_BYTES = 40  # largest-prime-factor table, sigma, flags, block temporaries
_PER_SEGMENT_BYTES = 24  # sieve flags plus the per-prime interval columns


def estimate_memory(n_max: int, segment_length: int = DEFAULT_SEGMENT) -> int:
    """Conservative peak-memory estimate for a ``bounds`` run."""
    return _FIXED_BYTES + _PER_N_BYTES * (n_max + 1) + _PER_SEGMENT_BYTES * segment_length


@dataclass(frozen=True)
class RunConfig:
    n_max: int
    j_order: int = 13
    extension_k0: int = TABLE_MIN_K
    mem_budget_bytes: int = DEFAULT_MEM_BUDGET
    output_format: str = "text"
    checkpoint_dir: Path | None = None
    verify_level: str = "none"
    threads: int = 1
    segment_length: int = DEFAULT_SEGMENT
    max_n: int = DEFAULT_MAX_N

    def validate(self) -> "RunConfig":
        if self.n_max < 1:
            raise ConfigError(f"--n-max must be >= 1, got {self.n_max}")
        if self.n_max > self.max_n:
            raise ConfigError(f"--n-max {self.n_max} exceeds the enumeration guard {self.max_n}")
        if self.j_order < 2:
            raise ConfigError(f"--j must be >= 2, got {self.j_order}")
        if not TABLE_MIN_K <= self.extension_k0 <= TABLE_MAX_K:
            raise ConfigError(f"--k0 must be in {TABLE_MIN_K}..{TABLE_MAX_K}, got {self.extension_k0}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"--format must be one of {FORMATS}")
        if self.verify_level not in VERIFY_LEVELS:
            raise ConfigError(f"--verify must be one of {VERIFY_LEVELS}")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        need = estimate_memory(self.n_max, self.segment_length)
        if need > self.mem_budget_bytes:
            raise ConfigError(
                f"estimated memory {need} bytes exceeds --mem-budget {self.mem_budget_bytes}"
            )
        return self
