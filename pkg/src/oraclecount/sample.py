"""Approximately-uniform witness sampling by count-guided rejection down a
chain of halving vertex subsets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ConstantsProfile,
    IndependenceOracle,
    InvalidArgument,
    QueryBudgetExceeded,
    enumerate_edges_within,
    full_mask,
    ilog2,
    pad_oracle_to_power_of_two,
    random_fixed_subset,
    scaled,
)
from .count import count

FAIL = None  # sentinel: sampler gave up; callers must handle it


@dataclass(frozen=True)
class SampleParams:
    I: int
    xi: float
    delta: float
    loop_cap: int

    @classmethod
    def for_instance(
        cls, n: int, k: int, epsilon: float, profile: ConstantsProfile
    ) -> "SampleParams":
        log_n = ilog2(n)
        I = log_n - math.ceil(math.log2(8 * k * k))
        xi = epsilon / (100.0 * log_n)
        delta = xi / (2.0 ** (k + 8) * float(n) ** (2 * k))
        raw_cap = 2.0 ** (k + 2) * math.log(8.0 * max(I, 1) * float(n) ** k / epsilon)
        loop_cap = scaled(math.ceil(raw_cap), profile.sample_loop_mult)
        return cls(I=I, xi=xi, delta=delta, loop_cap=loop_cap)


def _uniform_edge(
    oracle: IndependenceOracle, universe: int, rng: np.random.Generator
) -> int | None:
    edges = enumerate_edges_within(oracle, universe)
    if not edges:
        return FAIL
    return edges[int(rng.integers(0, len(edges)))]


def helper_sample(
    oracle: IndependenceOracle,
    epsilon: float,
    rng: np.random.Generator,
    profile: ConstantsProfile,
) -> int | None:
    """One sampling attempt; returns an edge mask or FAIL.

    Walks a chain V = X_1 > X_2 > ... > X_I of uniform half-size subsets,
    accepting each candidate with probability proportional to its estimated
    edge count (so the chain is biased toward edge-rich subsets exactly
    enough to cancel the halving bias), then picks a uniform edge of the
    final small subset.
    """
    n = oracle.n
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must be in (0, 1/2)")
    k = oracle.k
    universe = full_mask(n)
    if epsilon <= n ** (-float(k)):
        return _uniform_edge(oracle, universe, rng)
    params = SampleParams.for_instance(n, k, epsilon, profile)
    if params.I <= 1:
        return _uniform_edge(oracle, universe, rng)
    X_prev = universe
    M_prev = count(oracle, params.xi, params.delta, rng, profile, universe=X_prev)
    stats = oracle.stats
    for i in range(2, params.I + 1):
        accepted = False
        for _ in range(params.loop_cap):
            stats.rejection_iters += 1
            X = random_fixed_subset(rng, X_prev, X_prev.bit_count() // 2)
            M = count(oracle, params.xi, params.delta, rng, profile, universe=X)
            if M_prev <= 0:
                return FAIL
            if rng.random() < max(0.0, 1.0 - M / M_prev):
                continue  # reject X and resample
            X_prev, M_prev = X, M
            accepted = True
            break
        if not accepted:
            return FAIL
    return _uniform_edge(oracle, X_prev, rng)


def sample_query_budget(n: int, k: int, epsilon: float, profile: ConstantsProfile) -> float:
    log_n = max(1.0, math.log2(n))
    try:
        return profile.cap_factor * epsilon**-2 * float(k) ** (7 * k) * log_n ** (4 * k + 11)
    except OverflowError:
        return math.inf


def sample(
    oracle: IndependenceOracle,
    epsilon: float,
    rng: np.random.Generator,
    profile: ConstantsProfile,
) -> int | None:
    """Draw a single witness; faithful-profile contract: each edge appears
    with probability (1 +/- epsilon)/e(G) and FAIL has probability <= epsilon.
    Requires e(G) >= 1 (promise)."""
    if not (0 < epsilon < 1):
        raise InvalidArgument("epsilon must be in (0,1)")
    padded = pad_oracle_to_power_of_two(oracle)
    budget = sample_query_budget(padded.n, padded.k, epsilon, profile)
    stats = padded.stats
    old_limit = stats.query_limit
    if math.isfinite(budget):
        limit = stats.queries + int(budget)
        stats.query_limit = limit if old_limit is None else min(limit, old_limit)
    try:
        return helper_sample(padded, epsilon / 3.0, rng, profile)
    except QueryBudgetExceeded:
        return FAIL
    finally:
        stats.query_limit = old_limit
