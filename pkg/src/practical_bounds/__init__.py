"""Certified bounds for the density constant of practical numbers."""

from .aggregation import (
    Aggregates,
    AugmentedTable,
    aggregate,
    augmented_table,
    density_partial_sum,
    prime_power_residual,
    run_pipeline,
)
from .bounds import BoundsReport, assemble, compute_bounds, report_serialize, y_sum
from .config import RunConfig, estimate_memory
from .divisor_series import global_remainder_bound, remainder_bound, wq_direct, wqj
from .errors import ConfigError, ConsistencyError
from .eta_bounds import MK_TABLE, MkTable, e_bound, verify_table_prefix
from .interval import Interval, IntervalArray, RigorError, widened
from .practical import enumerate_practical, is_practical, is_practical_oracle, sigma
from .primes import delta_enclosure, eta, eta_sup_bound, segmented_primes

__all__ = [
    "Aggregates",
    "AugmentedTable",
    "BoundsReport",
    "ConfigError",
    "ConsistencyError",
    "Interval",
    "IntervalArray",
    "MK_TABLE",
    "MkTable",
    "RigorError",
    "RunConfig",
    "aggregate",
    "assemble",
    "augmented_table",
    "compute_bounds",
    "delta_enclosure",
    "e_bound",
    "enumerate_practical",
    "estimate_memory",
    "eta",
    "eta_sup_bound",
    "global_remainder_bound",
    "is_practical",
    "is_practical_oracle",
    "density_partial_sum",
    "prime_power_residual",
    "remainder_bound",
    "report_serialize",
    "run_pipeline",
    "segmented_primes",
    "sigma",
    "verify_table_prefix",
    "widened",
    "wq_direct",
    "wqj",
    "y_sum",
]
