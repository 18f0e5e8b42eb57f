"""Coarse (factor-polylog^k) edge-count estimation from decision queries.

Pipeline: verify_guess is a gap tester for a guess M; colour_coarse scans the
power-of-two guesses to bracket the count of a k-partite instance;
helper_coarse lifts it to arbitrary instances by random colourings;
coarse amplifies by a median of independent runs.

`universe` parameters restrict an oracle to an induced sub-instance without
rebuilding it: all sampling happens inside the universe mask and queries go
to the original oracle (a query about G[S] is a query about G with classes
inside S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import median
from typing import Sequence

import numpy as np

from .core import (
    ConstantsProfile,
    IndependenceOracle,
    InvalidArgument,
    UnsupportedParameter,
    bits_list,
    full_mask,
    ilog2,
    is_power_of_two,
    scaled,
)


@dataclass(frozen=True)
class CoarseParams:
    """All constants the coarse estimator derives from (n, k, profile)."""

    n: int
    k: int
    log_n: int
    p_out: float
    reps: int  # N: verify_guess repetitions per guess
    gamma: float
    scale: float
    b: float

    @classmethod
    def for_universe(cls, n: int, k: int, profile: ConstantsProfile) -> "CoarseParams":
        log_n = ilog2(n)
        if log_n < 1:
            raise InvalidArgument("universe must have at least 2 vertices")
        p_out = (8.0 * k * log_n) ** (-k)
        raw_reps = math.ceil(48.0 * math.log(6.0 * k * log_n) / p_out)
        reps = scaled(raw_reps, profile.coarse_reps_mult, floor=profile.coarse_reps_floor)
        gamma = p_out / (2.0 * (k * log_n) ** k)
        scale = math.sqrt(p_out / (2.0 * k**k * log_n**k))
        b = (4.0 * k * log_n) ** k
        return cls(n=n, k=k, log_n=log_n, p_out=p_out, reps=reps, gamma=gamma, scale=scale, b=b)


def _sample_survivor_sets(
    rng: np.random.Generator, mask: int, jmax: int
) -> list[int]:
    """Y_j for j = 0..jmax: keep each vertex with probability 2^-j, using one
    fresh 64-bit word per (vertex, j); Y_0 is the set itself."""
    if jmax > 63:
        raise UnsupportedParameter("k*log n exceeds the 64-bit sampling range")
    if mask == 0:
        return [0] * (jmax + 1)
    out = [mask]
    if jmax == 0:
        return out
    members = bits_list(mask)
    words = rng.integers(0, 1 << 64, size=(jmax, len(members)), dtype=np.uint64)
    shifts = np.uint64(64) - np.arange(1, jmax + 1, dtype=np.uint64)
    keep = (words >> shifts[:, None]) == 0
    for j in range(jmax):
        m = 0
        for i in np.flatnonzero(keep[j]):
            m |= 1 << members[i]
        out.append(m)
    return out


def verify_guess(
    oracle: IndependenceOracle,
    M: int,
    classes: Sequence[int],
    rng: np.random.Generator,
    n: int | None = None,
) -> bool:
    """Gap test for the guess M on the k-partite instance given by `classes`.

    Samples each survivor set Y_{i,j} once and reuses it across every tuple
    (the reuse is correctness-critical for the completeness argument), scans
    tuples (a_1..a_k) with sum >= log M in lexicographic order, and answers
    Yes (True) on the first query that finds a colourful edge.
    """
    if n is None:
        n = oracle.n
    if not is_power_of_two(M) or M < 1:
        raise InvalidArgument("M must be a positive power of two")
    k = oracle.k
    log_n = ilog2(n)
    log_m = ilog2(M)
    jmax = k * log_n
    Y = [_sample_survivor_sets(rng, X, jmax) for X in classes]

    def scan(prefix: list[int], total: int, i: int) -> bool:
        if i == k:
            return oracle.query(prefix)
        for a in range(jmax + 1):
            if total + a + (k - 1 - i) * jmax < log_m:
                continue
            m = Y[i][a]
            if m == 0:
                continue  # empty class cannot host a colourful edge
            prefix.append(m)
            if scan(prefix, total + a, i + 1):
                return True
            prefix.pop()
        return False

    return scan([], 0, 0)


def colour_coarse(
    oracle: IndependenceOracle,
    classes: Sequence[int],
    rng: np.random.Generator,
    profile: ConstantsProfile,
    universe: int | None = None,
    params: CoarseParams | None = None,
) -> float:
    """Bracket e(G[X_1..X_k]) within factor (4k log n)^k via guess scanning.

    Returns 0 exactly when the induced colourful subgraph is edgeless.
    Otherwise scans guesses M = 1,2,4,...,n^k upward, running verify_guess up
    to N times per guess, and takes m = the least M whose Yes-count falls
    below (3/4)*p_out*N (defaulting to n^k when every guess passes); the
    output is m * (p_out / (2 k^k log^k n))^(1/2).
    """
    if universe is None:
        universe = full_mask(oracle.n)
    n = universe.bit_count()
    if params is None:
        params = CoarseParams.for_universe(n, oracle.k, profile)
    if not oracle.query(classes):
        return 0.0
    N = params.reps
    threshold = 0.75 * params.p_out * N
    need = max(1, math.ceil(threshold - 1e-12))  # least integer count passing
    k = oracle.k
    m = params.n**k
    for log_m in range(k * params.log_n + 1):
        M = 1 << log_m
        yes = 0
        for r in range(N):
            if verify_guess(oracle, M, classes, rng, n=n):
                yes += 1
                if yes >= need:
                    break
            elif yes + (N - r - 1) < need:
                break
        if yes < need:
            m = M
            break
    return m * params.scale


def _random_partition(
    rng: np.random.Generator, universe: int, k: int
) -> list[int]:
    members = bits_list(universe)
    colours = rng.integers(0, k, size=len(members))
    masks = [0] * k
    for v, c in zip(members, colours):
        masks[c] |= 1 << v
    return masks


def helper_coarse(
    oracle: IndependenceOracle,
    rng: np.random.Generator,
    profile: ConstantsProfile,
    universe: int | None = None,
) -> float:
    """Colour-coding lift of colour_coarse to non-partitioned instances."""
    if universe is None:
        universe = full_mask(oracle.n)
    n = universe.bit_count()
    k = oracle.k
    params = CoarseParams.for_universe(n, k, profile)
    t_raw = math.ceil(3.0 * math.exp(2 * k))
    t = scaled(t_raw, profile.colouring_count_mult, cap=profile.colouring_count_cap)
    T_raw = math.ceil(72.0 * math.log(t_raw)) + 3
    T = scaled(T_raw, profile.colouring_median_mult, cap=profile.colouring_median_cap)
    total = 0.0
    for _ in range(t):
        masks = _random_partition(rng, universe, k)
        vals = [
            colour_coarse(oracle, masks, rng, profile, universe=universe, params=params)
            for _ in range(T)
        ]
        total += median(vals)
    return (k**k / (t * math.factorial(k))) * total


def coarse(
    oracle: IndependenceOracle,
    delta: float,
    rng: np.random.Generator,
    profile: ConstantsProfile,
    universe: int | None = None,
) -> float:
    """Median-amplified coarse estimate of e(G).

    Faithful-profile contract: with probability >= 1-delta the output is
    within factor 2(4k log n)^k of e(G).
    """
    if not (0 < delta < 1):
        raise InvalidArgument("delta must be in (0,1)")
    oracle.stats.coarse_calls += 1
    rounds_raw = math.ceil(36.0 * math.log(2.0 / delta))
    rounds = scaled(rounds_raw, profile.coarse_median_mult, cap=profile.coarse_median_cap)
    outs = [helper_coarse(oracle, rng, profile, universe=universe) for _ in range(rounds)]
    return float(median(outs))
