"""FWER-controlling multiple testing procedures.

Conventional baselines (Bonferroni, Sidak, Holm, Hochberg), the Tarone-type
procedures built on minimal attainable p-values (Tarone, modified Tarone,
Tarone-Holm), and the modified Bonferroni, Holm and Hochberg procedures that
use the full true-null CDFs of discrete p-values.

Every function returns a :class:`Decision` in the original hypothesis order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .nulls import REL_TOL, Family, leq


class ProcedureId(str, enum.Enum):
    BONF = "Bonf"
    SIDAK = "Sidak"
    HOLM = "Holm"
    HOCHBERG = "Hochberg"
    TARONE = "Tarone"
    MOD_TARONE = "ModTarone"
    TARONE_HOLM = "TaroneHolm"
    MBONF = "MBonf"
    MHOLM = "MHolm"
    MHOCH = "MHoch"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name) -> "ProcedureId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown procedure {name!r}; choose from {valid}")


@dataclass(frozen=True)
class Decision:
    """Outcome of a procedure at level ``alpha``.

    ``adjusted_p`` is None for plain Tarone, which has no adjusted p-values.
    ``critical`` holds one constant for single-step procedures and m constants
    (by rank) for stepwise ones; it is empty where rejection is defined through
    adjusted p-values only.
    """

    procedure: ProcedureId
    alpha: float
    rejected: tuple[bool, ...]
    adjusted_p: tuple[float, ...] | None
    critical: tuple[float, ...] = ()

    @property
    def n_rejected(self) -> int:
        return sum(self.rejected)

    @property
    def adjusted_available(self) -> bool:
        return self.adjusted_p is not None

    @property
    def rejected_set(self) -> frozenset[int]:
        return frozenset(i for i, r in enumerate(self.rejected) if r)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def _decision(pid, family, alpha, adjusted, rejected=None, critical=()) -> Decision:
    _check_alpha(alpha)
    adjusted = np.clip(np.asarray(adjusted, dtype=float), 0.0, 1.0)
    if rejected is None:
        rejected = leq(adjusted, alpha)
    return Decision(
        procedure=pid,
        alpha=float(alpha),
        rejected=tuple(bool(r) for r in rejected),
        adjusted_p=tuple(float(a) for a in adjusted),
        critical=tuple(float(c) for c in critical),
    )


def _unsort(family: Family, ranked_values: np.ndarray) -> np.ndarray:
    out = np.empty(family.m)
    out[family.order] = ranked_values
    return out


# -- conventional baselines ---------------------------------------------------

def bonferroni_adjust(family: Family, alpha: float = 0.05) -> Decision:
    m = family.m
    adj = np.minimum(1.0, m * family.observed)
    return _decision(ProcedureId.BONF, family, alpha, adj, critical=[alpha / m])


def sidak_adjust(family: Family, alpha: float = 0.05) -> Decision:
    _check_alpha(alpha)
    m = family.m
    with np.errstate(divide="ignore"):
        adj = -np.expm1(m * np.log1p(-family.observed))
    crit = -np.expm1(np.log1p(-alpha) / m)
    return _decision(ProcedureId.SIDAK, family, alpha, adj, critical=[crit])


def _holm_constants(m: int, alpha: float) -> np.ndarray:
    return alpha / (m - np.arange(m))


def holm_adjust(family: Family, alpha: float = 0.05) -> Decision:
    m = family.m
    p = family.observed[family.order]
    ranked = np.maximum.accumulate(np.minimum(1.0, (m - np.arange(m)) * p))
    return _decision(ProcedureId.HOLM, family, alpha, _unsort(family, ranked),
                     critical=_holm_constants(m, alpha))


def hochberg_adjust(family: Family, alpha: float = 0.05) -> Decision:
    m = family.m
    p = family.observed[family.order]
    raw = np.minimum(1.0, (m - np.arange(m)) * p)
    ranked = np.minimum.accumulate(raw[::-1])[::-1]
    return _decision(ProcedureId.HOCHBERG, family, alpha, _unsort(family, ranked),
                     critical=_holm_constants(m, alpha))


# -- Tarone family ------------------------------------------------------------

def tarone_k(min_attainable: np.ndarray, alpha: float) -> int:
    """Smallest k with #{i : p*_i <= alpha/k} <= k."""
    pstar = np.asarray(min_attainable)
    m = pstar.size
    for k in range(1, m + 1):
        if np.count_nonzero(leq(pstar, alpha / k)) <= k:
            return k
    return m


def tarone(family: Family, alpha: float) -> Decision:
    """Tarone's procedure: Bonferroni over the K(alpha) testable hypotheses.

    Not alpha-consistent, so no adjusted p-values are reported.
    """
    _check_alpha(alpha)
    crit = alpha / tarone_k(family.min_attainable, alpha)
    rejected = leq(family.observed, crit)
    return Decision(
        procedure=ProcedureId.TARONE,
        alpha=float(alpha),
        rejected=tuple(bool(r) for r in rejected),
        adjusted_p=None,
        critical=(float(crit),),
    )


def _mod_tarone_values(observed: np.ndarray, pstar: np.ndarray) -> np.ndarray:
    # Smallest gamma with P <= gamma / K(gamma). It is attained at gamma = k P
    # for some k, and M(kP, k) = #{j : p*_j <= P}, so the minimal feasible k
    # is that count.
    counts = np.count_nonzero(leq(pstar[None, :], observed[:, None]), axis=1)
    return np.minimum(1.0, np.maximum(counts, 1) * observed)


def mod_tarone_adjust(family: Family, alpha: float = 0.05) -> Decision:
    adj = _mod_tarone_values(family.observed, family.min_attainable)
    return _decision(ProcedureId.MOD_TARONE, family, alpha, adj)


def tarone_holm_adjust(family: Family, alpha: float = 0.05) -> Decision:
    """Step-down Tarone-Holm via sequential elimination.

    Each stage computes modified-Tarone adjusted values inside the active set,
    retires the hypothesis with the smallest one and carries a running max.
    """
    pstar = family.min_attainable
    observed = family.observed
    active = list(family.order)
    adjusted = np.empty(family.m)
    running = 0.0
    while active:
        idx = np.array(active)
        vals = _mod_tarone_values(observed[idx], pstar[idx])
        pick = int(np.argmin(vals))  # first minimum keeps the rank order on ties
        running = max(running, float(vals[pick]))
        adjusted[idx[pick]] = running
        del active[pick]
    return _decision(ProcedureId.TARONE_HOLM, family, alpha, adjusted)


# -- modified procedures using the full null CDFs ----------------------------

def mbonf_critical(family: Family, alpha: float) -> float:
    """Largest union point with sum_i F_i(p) <= alpha, else alpha/m."""
    _check_alpha(alpha)
    t = family.tables
    # suffix[0] is nondecreasing along the union, so this is a binary search
    pos = int(np.searchsorted(t.suffix[0], alpha * (1.0 + REL_TOL), side="right")) - 1
    if pos < 0:
        return alpha / family.m
    return float(t.points[pos])


def _mbonf_adjusted(family: Family) -> np.ndarray:
    t = family.tables
    ranked = np.minimum(1.0, t.suffix[0, t.obs_index])
    return _unsort(family, ranked)


def mbonf_adjust(family: Family, alpha: float = 0.05) -> Decision:
    return _decision(ProcedureId.MBONF, family, alpha, _mbonf_adjusted(family))


def mbonf(family: Family, alpha: float) -> Decision:
    """Single-step modified Bonferroni: reject when P_i <= s*."""
    s = mbonf_critical(family, alpha)
    rejected = leq(family.observed, s)
    return _decision(ProcedureId.MBONF, family, alpha, _mbonf_adjusted(family),
                     rejected=rejected, critical=[s])


def mholm_critical(family: Family, alpha: float) -> np.ndarray:
    """Rank-wise critical constants shared by the modified Holm and Hochberg.

    alpha_i is the largest point of the union of supports of ranks i..m whose
    CDF sum over those ranks stays within alpha; without such a point it falls
    back to max(alpha_{i-1}, alpha / (m - i + 1)).
    """
    _check_alpha(alpha)
    t = family.tables
    m = family.m
    out = np.empty(m)
    prev = 0.0
    for i in range(m):
        ok = (t.max_rank >= i) & leq(t.suffix[i], alpha)
        if np.any(ok):
            out[i] = t.points[ok][-1]
        else:
            out[i] = max(prev, alpha / (m - i))
        prev = out[i]
    return out


def _ranked_sums(family: Family) -> np.ndarray:
    t = family.tables
    return t.suffix[np.arange(family.m), t.obs_index]


def _mholm_adjusted(family: Family) -> np.ndarray:
    ranked = np.maximum.accumulate(np.minimum(1.0, _ranked_sums(family)))
    return _unsort(family, ranked)


def _mhoch_adjusted(family: Family) -> np.ndarray:
    sums = _ranked_sums(family)
    ranked = np.minimum.accumulate(sums[::-1])[::-1]
    return _unsort(family, ranked)


def mholm_adjust(family: Family, alpha: float = 0.05) -> Decision:
    return _decision(ProcedureId.MHOLM, family, alpha, _mholm_adjusted(family))


def mholm(family: Family, alpha: float) -> Decision:
    """Step-down modified Holm with data-dependent critical constants."""
    crit = mholm_critical(family, alpha)
    p = family.observed[family.order]
    passed = leq(p, crit)
    n_rej = family.m if passed.all() else int(np.argmin(passed))
    ranked = np.arange(family.m) < n_rej
    return _decision(ProcedureId.MHOLM, family, alpha, _mholm_adjusted(family),
                     rejected=_unsort(family, ranked).astype(bool), critical=crit)


def mhoch_adjust(family: Family, alpha: float = 0.05) -> Decision:
    return _decision(ProcedureId.MHOCH, family, alpha, _mhoch_adjusted(family))


def mhoch(family: Family, alpha: float) -> Decision:
    """Step-up modified Hochberg on the modified Holm constants."""
    crit = mholm_critical(family, alpha)
    p = family.observed[family.order]
    hits = np.flatnonzero(leq(p, crit))
    n_rej = int(hits[-1]) + 1 if hits.size else 0
    ranked = np.arange(family.m) < n_rej
    return _decision(ProcedureId.MHOCH, family, alpha, _mhoch_adjusted(family),
                     rejected=_unsort(family, ranked).astype(bool), critical=crit)


_DISPATCH = {
    ProcedureId.BONF: bonferroni_adjust,
    ProcedureId.SIDAK: sidak_adjust,
    ProcedureId.HOLM: holm_adjust,
    ProcedureId.HOCHBERG: hochberg_adjust,
    ProcedureId.TARONE: tarone,
    ProcedureId.MOD_TARONE: mod_tarone_adjust,
    ProcedureId.TARONE_HOLM: tarone_holm_adjust,
    ProcedureId.MBONF: mbonf,
    ProcedureId.MHOLM: mholm,
    ProcedureId.MHOCH: mhoch,
}

ALL_PROCEDURES: tuple[ProcedureId, ...] = tuple(ProcedureId)


def apply(procedure, family: Family, alpha: float) -> Decision:
    """Run the procedure named by ``procedure`` (id or case-insensitive name)."""
    return _DISPATCH[ProcedureId.parse(procedure)](family, alpha)
