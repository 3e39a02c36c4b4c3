"""Skin body system adverse-event counts and their published adjusted p-values.

Nine AE types, 600 patients in the study arm and 650 in the control arm.
Rows are stored in increasing order of the raw two-sided Fisher p-value, so
row index and rank coincide. Values are as printed (4 decimal places).
"""

from __future__ import annotations

from .exact_tests import TwoByTwoInput, fisher_exact
from .nulls import Family

N1 = 600
N2 = 650

# (label, study-arm count, control-arm count)
COUNTS: tuple[tuple[str, int, int], ...] = (
    ("AE1", 13, 3),
    ("AE2", 8, 1),
    ("AE3", 4, 0),
    ("AE4", 6, 2),
    ("AE5", 2, 0),
    ("AE6", 4, 2),
    ("AE7", 0, 2),
    ("AE8", 2, 1),
    ("AE9", 1, 2),
)

RAW_P = (0.0098, 0.0170, 0.0528, 0.1634, 0.2302, 0.4353, 0.5004, 0.6103, 1.0000)

# single-step procedures
TABLE1 = {
    "MBonf": (0.0218, 0.0469, 0.1978, 0.8467, 1.0, 1.0, 1.0, 1.0, 1.0),
    "ModTarone": (0.0295, 0.0679, 0.2640, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
    "Sidak": (0.0851, 0.1428, 0.3863, 0.7993, 0.9051, 0.9942, 0.9981, 0.9998, 1.0),
    "Bonf": (0.0885, 0.1527, 0.4753, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
}

# step-down procedures, by rank
TABLE2 = {
    "MHolm": (0.0218, 0.0370, 0.1165, 0.4948, 0.9009, 1.0, 1.0, 1.0, 1.0),
    "TaroneHolm": (0.0295, 0.0509, 0.1584, 0.6536, 1.0, 1.0, 1.0, 1.0, 1.0),
    "Holm": (0.0885, 0.1358, 0.3697, 0.9804, 1.0, 1.0, 1.0, 1.0, 1.0),
}

# step-up procedures, by rank
TABLE3 = {
    "MHoch": (0.0218, 0.0370, 0.1165, 0.4948, 0.9009, 1.0, 1.0, 1.0, 1.0),
    "Hochberg": (0.0885, 0.1358, 0.3697, 0.9804, 1.0, 1.0, 1.0, 1.0, 1.0),
}

# Reference only: the two-stage step-up procedure behind this column is not
# implemented, so it is never compared.
ROTH_REFERENCE = (0.0296, 0.0510, 0.1585, 0.7722, 1.0, 1.0, 1.0, 1.0, 1.0)

# number of AEs flagged at alpha = 0.05
FLAGS_AT_005 = {
    "MBonf": 2, "MHolm": 2, "MHoch": 2,
    "Tarone": 1, "TaroneHolm": 1,
    "Bonf": 0, "Sidak": 0, "Holm": 0, "Hochberg": 0,
}


def inputs() -> list[TwoByTwoInput]:
    return [TwoByTwoInput(x1, x2, N1, N2) for _, x1, x2 in COUNTS]


def family() -> Family:
    """The clinical family under two-sided Fisher exact tests."""
    return Family.from_results(
        [fisher_exact(inp) for inp in inputs()],
        labels=[label for label, _, _ in COUNTS],
    )
