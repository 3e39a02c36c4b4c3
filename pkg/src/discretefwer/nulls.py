"""Discrete null distributions of p-values and families of hypotheses.

A :class:`DiscreteNull` stores the attainable p-values of one test. Under the
null hypothesis the p-value takes each attainable value ``u`` with
``Pr(P <= u) = u``, so its CDF is the step function returning the largest
attainable value not exceeding the argument.

A :class:`Family` couples observed p-values with their nulls and caches the
rank-ordered quantities the stepwise procedures need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .exact_tests import SUPPORT_RELTOL, ExactTestResult, merge_close

REL_TOL = SUPPORT_RELTOL


def leq(a, b):
    """``a <= b`` with a relative slack of ``REL_TOL`` in favour of ``a``."""
    return np.asarray(a) <= np.asarray(b) * (1.0 + REL_TOL)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteNull:
    """Attainable p-values of one test; strictly increasing, ending at 1."""

    support: np.ndarray

    def __post_init__(self):
        s = np.array(self.support, dtype=float).ravel()
        if s.size == 0:
            raise ValueError("support must be non-empty")
        if np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        if s[0] <= 0.0:
            raise ValueError("support values must be positive")
        if abs(s[-1] - 1.0) > REL_TOL:
            raise ValueError(f"support must end at 1, got {s[-1]!r}")
        s[-1] = 1.0
        object.__setattr__(self, "support", _readonly(s))

    @classmethod
    def uniform_grid(cls, n: int) -> "DiscreteNull":
        """Support {1/n, 2/n, ..., 1}; approaches a continuous null as n grows."""
        return cls(np.arange(1, n + 1) / n)

    @property
    def min_attainable(self) -> float:
        return float(self.support[0])

    def __len__(self) -> int:
        return self.support.size

    def cdf(self, u: float) -> float:
        return cdf(self, u)

    def cdf_many(self, u) -> np.ndarray:
        """Vectorised CDF without range checking."""
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.support, u * (1.0 + REL_TOL), side="right") - 1
        return np.where(idx >= 0, self.support[np.maximum(idx, 0)], 0.0)

    def contains(self, p: float) -> bool:
        v = self.cdf_many(p)
        return bool(abs(v - p) <= REL_TOL * p)


def cdf(null: DiscreteNull, u: float) -> float:
    """True-null CDF: the largest attainable value <= u, or 0 if there is none.

    >>> cdf(DiscreteNull([0.1, 0.5, 1.0]), 0.49)
    0.1
    """
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"cdf argument must lie in [0, 1], got {u!r}")
    return float(null.cdf_many(u))


@dataclass(frozen=True)
class _RankTables:
    points: np.ndarray     # union of all supports, sorted and merged
    suffix: np.ndarray     # suffix[i, u] = sum_{j >= i} F_(j)(points[u]), rank order
    max_rank: np.ndarray   # largest rank whose support contains points[u]
    obs_index: np.ndarray  # position of P_(i) in points


@dataclass(frozen=True, eq=False)
class Family:
    """Observed p-values of m hypotheses together with their discrete nulls.

    Immutable. Ranks are 1-based in the public API and follow a stable sort of
    the observed p-values (ties keep the original order).
    """

    observed: np.ndarray
    nulls: tuple[DiscreteNull, ...]
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        obs = np.array(self.observed, dtype=float).ravel()
        nulls = tuple(self.nulls)
        if obs.size == 0:
            raise ValueError("a family needs at least one hypothesis")
        if len(nulls) != obs.size:
            raise ValueError("need exactly one null distribution per observed p-value")
        for i, (p, null) in enumerate(zip(obs, nulls)):
            if not null.contains(p):
                raise ValueError(f"observed p-value {p!r} of hypothesis {i} is not attainable")
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != obs.size:
                raise ValueError("need one label per hypothesis")
            object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "observed", _readonly(obs))
        object.__setattr__(self, "nulls", nulls)

    @classmethod
    def from_results(cls, results: Sequence[ExactTestResult], labels=None) -> "Family":
        return cls(
            np.array([r.observed_p for r in results]),
            tuple(DiscreteNull(r.support) for r in results),
            labels,
        )

    @property
    def m(self) -> int:
        return self.observed.size

    def __len__(self) -> int:
        return self.m

    @cached_property
    def order(self) -> np.ndarray:
        """Original indices sorted by observed p-value (stable)."""
        return _readonly(np.argsort(self.observed, kind="stable"))

    @cached_property
    def min_attainable(self) -> np.ndarray:
        return _readonly(np.array([n.min_attainable for n in self.nulls]))

    def _check_rank(self, from_rank: int) -> None:
        if not 1 <= from_rank <= self.m:
            raise ValueError(f"rank must lie in 1..{self.m}, got {from_rank}")

    @cached_property
    def tables(self) -> _RankTables:
        ranked = [self.nulls[j] for j in self.order]
        points = merge_close(np.concatenate([n.support for n in ranked]))
        F = np.vstack([n.cdf_many(points) for n in ranked])
        suffix = np.cumsum(F[::-1], axis=0)[::-1]
        member = np.abs(F - points) <= REL_TOL * points
        # last True along the rank axis
        max_rank = self.m - 1 - np.argmax(member[::-1], axis=0)
        sorted_obs = self.observed[self.order]
        obs_index = np.searchsorted(points, sorted_obs * (1.0 + REL_TOL), side="right") - 1
        return _RankTables(
            _readonly(points), _readonly(suffix), _readonly(max_rank), _readonly(obs_index)
        )

    def support_union(self, from_rank: int = 1) -> np.ndarray:
        self._check_rank(from_rank)
        t = self.tables
        return t.points[t.max_rank >= from_rank - 1]

    def sum_cdf(self, from_rank: int, p: float) -> float:
        self._check_rank(from_rank)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p!r}")
        ranked = self.order[from_rank - 1:]
        return float(sum(float(self.nulls[j].cdf_many(p)) for j in ranked))


def support_union(family: Family, from_rank: int = 1) -> np.ndarray:
    """Sorted union of the supports of hypotheses ranked ``from_rank``..m."""
    return family.support_union(from_rank)


def sum_cdf(family: Family, from_rank: int, p: float) -> float:
    """Sum of the true-null CDFs at ``p`` over ranks ``from_rank``..m."""
    return family.sum_cdf(from_rank, p)
