"""Familywise error rate control for discrete test statistics."""

from .exact_tests import (
    ExactTestResult,
    PoissonPairInput,
    TwoByTwoInput,
    binomial_exact,
    fisher_exact,
    log_choose,
)
from .nulls import DiscreteNull, Family, cdf, sum_cdf, support_union
from .procedures import ALL_PROCEDURES, Decision, ProcedureId, apply
from .simulation import SimConfig, SimResult, estimate

__all__ = [
    "ALL_PROCEDURES",
    "Decision",
    "DiscreteNull",
    "ExactTestResult",
    "Family",
    "PoissonPairInput",
    "ProcedureId",
    "SimConfig",
    "SimResult",
    "TwoByTwoInput",
    "apply",
    "binomial_exact",
    "cdf",
    "estimate",
    "fisher_exact",
    "log_choose",
    "sum_cdf",
    "support_union",
]

__version__ = "0.1.0"
