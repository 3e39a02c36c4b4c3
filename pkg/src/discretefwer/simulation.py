"""Monte Carlo estimation of FWER and minimal power.

Two designs are supported:

* ``FET``: per hypothesis, binomial event counts in two groups of size N,
  tested with a one-sided Fisher exact test;
* ``BET``: per hypothesis, Poisson counts in two groups, tested with the
  conditional binomial test. With ``rho > 0`` counts within the true-null
  block and within the false-null block share a common Poisson component,
  giving pairwise correlation ``rho`` inside each block while keeping the
  Poisson marginals.

The first ``m0 = round(m * pi0)`` hypotheses are true nulls. Replicate ``r``
draws from its own Philox stream keyed by ``(seed, r)``, so estimates do not
depend on how replicates are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exact_tests import (
    ExactTestResult,
    PoissonPairInput,
    TwoByTwoInput,
    binomial_exact,
    fisher_exact,
)
from .nulls import DiscreteNull, Family
from .procedures import ProcedureId, apply

DEFAULT_B = 2000


@dataclass(frozen=True)
class SimConfig:
    test_kind: str
    m: int
    pi0: float
    sample_size: int | None = None
    p_null: float = 0.1
    p_alt: float = 0.2
    lambda_null: float = 2.0
    lambda_alt: float = 10.0
    rho: float = 0.0
    B: int = DEFAULT_B
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        kind = str(self.test_kind).upper()
        if kind not in ("FET", "BET"):
            raise ValueError(f"test_kind must be FET or BET, got {self.test_kind!r}")
        object.__setattr__(self, "test_kind", kind)
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError("pi0 must lie in [0, 1]")
        if kind == "FET" and (self.sample_size is None or self.sample_size < 1):
            raise ValueError("FET simulations need a positive sample_size")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if kind == "FET" and self.rho != 0.0:
            raise ValueError("block dependence is only defined for BET")
        if self.B < 1:
            raise ValueError("B must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        for name in ("p_null", "p_alt"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("lambda_null", "lambda_alt"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def m0(self) -> int:
        # round half up; Python's round() would send 2.5 to 2
        return int(math.floor(self.m * self.pi0 + 0.5))

    @property
    def truth(self) -> np.ndarray:
        """True where the hypothesis is a true null."""
        return np.arange(self.m) < self.m0


@dataclass(frozen=True)
class SimResult:
    procedure: ProcedureId
    B: int
    fwer_hat: float
    minpow_hat: float
    mean_rejections: float
    fwer_se: float
    minpow_se: float
    minpow_defined: bool = True

    @property
    def mc_stderr(self) -> tuple[float, float]:
        return self.fwer_se, self.minpow_se


def replicate_rng(seed: int, r: int) -> np.random.Generator:
    """Independent counter-based stream for replicate ``r``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, r])))


@lru_cache(maxsize=200_000)
def _fet_cached(x1: int, x2: int, n: int) -> ExactTestResult:
    # alternative p1 < p2: small group-1 counts are significant
    return fisher_exact(TwoByTwoInput(x1, x2, n, n), alternative="less")


@lru_cache(maxsize=200_000)
def _bet_cached(x1: int, x2: int) -> ExactTestResult:
    return binomial_exact(PoissonPairInput(x1, x2), alternative="less")


@lru_cache(maxsize=200_000)
def _null_of(result: ExactTestResult) -> DiscreteNull:
    return DiscreteNull(result.support)


def _family(results: Sequence[ExactTestResult]) -> Family:
    return Family(
        np.array([r.observed_p for r in results]),
        tuple(_null_of(r) for r in results),
    )


def gen_fet_replicate(config: SimConfig, rng: np.random.Generator) -> tuple[Family, np.ndarray]:
    truth = config.truth
    n = config.sample_size
    p2 = np.where(truth, config.p_null, config.p_alt)
    x1 = rng.binomial(n, config.p_null, size=config.m)
    x2 = rng.binomial(n, p2)
    fam = _family([_fet_cached(int(a), int(b), n) for a, b in zip(x1, x2)])
    return fam, truth


def _bet_family(x1: np.ndarray, x2: np.ndarray) -> Family:
    return _family([_bet_cached(int(a), int(b)) for a, b in zip(x1, x2)])


def gen_bet_replicate_indep(config: SimConfig, rng: np.random.Generator) -> tuple[Family, np.ndarray]:
    truth = config.truth
    lam2 = np.where(truth, config.lambda_null, config.lambda_alt)
    x1 = rng.poisson(config.lambda_null, size=config.m)
    x2 = rng.poisson(lam2)
    return _bet_family(x1, x2), truth


def block_poisson_counts(config: SimConfig, rng: np.random.Generator, size: int | None = None):
    """Block-dependent Poisson counts built from shared components.

    Group 1: X_i1 = Y_i1 + Y_01 with Y_i1 ~ Poi((1-rho) lam0), Y_01 ~ Poi(rho lam0).
    Group 2: the true-null block shares Y_02 ~ Poi(rho lam0), the false-null
    block shares Y'_02 ~ Poi(rho lam1); own parts are Poi((1-rho) lam).

    With ``size`` the arrays gain a leading replicate axis.
    """
    truth = config.truth
    rho = config.rho
    lam0, lam1 = config.lambda_null, config.lambda_alt
    lam2 = np.where(truth, lam0, lam1)
    own = (config.m,) if size is None else (size, config.m)
    shared = None if size is None else (size, 1)
    y1 = rng.poisson((1.0 - rho) * lam0, size=own)
    y01 = rng.poisson(rho * lam0, size=shared)
    y2 = rng.poisson((1.0 - rho) * lam2, size=own)
    y02 = rng.poisson(rho * lam0, size=shared)
    y02_alt = rng.poisson(rho * lam1, size=shared)
    x1 = y1 + y01
    x2 = y2 + np.where(truth, y02, y02_alt)
    return x1, x2


def gen_bet_replicate_block(config: SimConfig, rng: np.random.Generator) -> tuple[Family, np.ndarray]:
    x1, x2 = block_poisson_counts(config, rng)
    return _bet_family(x1, x2), config.truth


def generate(config: SimConfig, rng: np.random.Generator) -> tuple[Family, np.ndarray]:
    if config.test_kind == "FET":
        return gen_fet_replicate(config, rng)
    if config.rho == 0.0:
        return gen_bet_replicate_indep(config, rng)
    return gen_bet_replicate_block(config, rng)


def _run_block(args) -> np.ndarray:
    config, procedures, start, stop = args
    out = np.zeros((stop - start, len(procedures), 3), dtype=np.int64)
    for r in range(start, stop):
        fam, truth = generate(config, replicate_rng(config.seed, r))
        for j, pid in enumerate(procedures):
            rej = np.asarray(apply(pid, fam, config.alpha).rejected)
            out[r - start, j] = (
                np.any(rej & truth),
                np.any(rej & ~truth),
                np.count_nonzero(rej),
            )
    return out


def simulate_outcomes(
    config: SimConfig, procedures: Iterable, workers: int = 1
) -> np.ndarray:
    """Per-replicate outcomes, shape (B, n_procedures, 3).

    The last axis holds (any true-null rejected, any false-null rejected,
    number of rejections).
    """
    procedures = tuple(ProcedureId.parse(p) for p in procedures)
    if not procedures:
        raise ValueError("at least one procedure is required")
    if workers <= 1 or config.B < 2 * workers:
        return _run_block((config, procedures, 0, config.B))
    edges = np.linspace(0, config.B, workers + 1).astype(int)
    jobs = [(config, procedures, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_block, jobs))
    return np.concatenate(parts, axis=0)


def _stderr(rate: float, B: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / B)


def summarize(config: SimConfig, procedures: Sequence, outcomes: np.ndarray) -> list[SimResult]:
    B = outcomes.shape[0]
    has_alt = config.m0 < config.m
    results = []
    for j, pid in enumerate(procedures):
        fwer = float(outcomes[:, j, 0].mean())
        minpow = float(outcomes[:, j, 1].mean()) if has_alt else 0.0
        results.append(SimResult(
            procedure=ProcedureId.parse(pid),
            B=B,
            fwer_hat=fwer,
            minpow_hat=minpow,
            mean_rejections=float(outcomes[:, j, 2].mean()),
            fwer_se=_stderr(fwer, B),
            minpow_se=_stderr(minpow, B),
            minpow_defined=has_alt,
        ))
    return results


def estimate(config: SimConfig, procedures: Iterable, workers: int = 1) -> list[SimResult]:
    """Estimated FWER, minimal power and mean rejections per procedure."""
    procedures = tuple(ProcedureId.parse(p) for p in procedures)
    outcomes = simulate_outcomes(config, procedures, workers=workers)
    return summarize(config, procedures, outcomes)
