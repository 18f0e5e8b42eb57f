"""The fine estimator: importance-sampling trim, subdividing halve, the
single-run driver, and the median-of-runs wrapper.

State is a weighted list of (w, S, ehat) triples at level y (|S| = 2^y); the
conserved quantity is Z(L) = sum of w * e(G[S]), which only tests can compute
(it needs ground truth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from .coarse import coarse
from .core import (
    ConstantsProfile,
    IndependenceOracle,
    InvalidArgument,
    QueryBudgetExceeded,
    RunStats,
    enumerate_edges_within,
    full_mask,
    halving_survival_p,
    ilog2,
    pad_oracle_to_power_of_two,
    random_fixed_subset,
    scaled,
)


@dataclass
class WeightedEntry:
    w: float
    S: int  # vertex mask, |S| = 2^y for the owning list's level y
    ehat: float


@dataclass
class WeightedList:
    y: int
    entries: list[WeightedEntry] = field(default_factory=list)

    def total_weight_estimate(self) -> float:
        return sum(e.w * e.ehat for e in self.entries)


@dataclass(frozen=True)
class CountParams:
    I: int
    b: float
    xi: float
    delta: float

    @classmethod
    def for_instance(cls, n: int, k: int, epsilon: float) -> "CountParams":
        log_n = ilog2(n)
        I = log_n - math.ceil(math.log2(2 * k * k))
        b = 2.0 * (4.0 * k * log_n) ** k
        xi = epsilon / (4 * I) if I >= 1 else epsilon
        delta = 1.0 / (3 * (2 * I + 1)) if I >= 1 else 1.0 / 3
        return cls(I=I, b=b, xi=xi, delta=delta)


def bucket_radius(n: int, k: int, b: float) -> int:
    """a = floor(15 k log(4 n b)) + 1; buckets span [2^-a, 2^a)."""
    return math.floor(15.0 * k * math.log2(4.0 * n * b)) + 1


def _apply_budget(ts: list[int], budget: int | None) -> list[int]:
    """Proportionally rescale sample counts so their total fits the budget."""
    if budget is None:
        return ts
    total = sum(ts)
    if total <= budget:
        return ts
    return [max(1, (t * budget) // total) for t in ts]


def trim(
    b: float,
    y: int,
    L: WeightedList,
    xi: float,
    delta: float,
    rng: np.random.Generator,
    n: int,
    k: int,
    profile: ConstantsProfile,
    stats: RunStats | None = None,
) -> WeightedList:
    """Shrink L by resampling inside dyadic w*ehat buckets; zero oracle queries.

    Buckets with at most t_i entries pass through unchanged; larger buckets
    are resampled uniformly with replacement and reweighted by |L_i|/t_i.
    Entries below the bucket range are dropped; entries at or above 2^a
    cannot occur under the input promise and are clamped into the top bucket
    with a diagnostic counter rather than silently dropped.
    """
    if not (n ** (-2.0 * k) <= xi < 1):
        raise InvalidArgument("xi must lie in [n^-2k, 1)")
    if L.y != y:
        raise InvalidArgument("list level mismatch")
    a = bucket_radius(n, k, b)
    W = L.total_weight_estimate()
    if W <= 0 or not L.entries:
        return WeightedList(y=y, entries=[])
    buckets: dict[int, list[WeightedEntry]] = {}
    for entry in L.entries:
        we = entry.w * entry.ehat
        if we < 2.0 ** (-a):
            continue
        i = math.floor(math.log2(we)) + 1
        if i > a:
            i = a
            if stats is not None:
                stats.trim_clamps += 1
        buckets.setdefault(i, []).append(entry)
    idxs = sorted(buckets)
    log2d = math.log2(2.0 / delta)
    ts = [
        scaled(
            math.ceil(16.0 * b * b * (2.0**i) * len(buckets[i]) * log2d / (xi * xi * W)),
            profile.trim_mult,
        )
        for i in idxs
    ]
    ts = _apply_budget(ts, profile.trim_budget)
    out: list[WeightedEntry] = []
    for i, t_i in zip(idxs, ts):
        group = buckets[i]
        if len(group) <= t_i:
            out.extend(group)
        else:
            picks = rng.integers(0, len(group), size=t_i)
            ratio = len(group) / t_i
            for j in picks:
                src = group[j]
                out.append(WeightedEntry(w=src.w * ratio, S=src.S, ehat=src.ehat))
    return WeightedList(y=y, entries=out)


def halve(
    oracle: IndependenceOracle,
    b: float,
    y: int,
    L: WeightedList,
    xi: float,
    delta: float,
    rng: np.random.Generator,
    profile: ConstantsProfile,
) -> WeightedList:
    """Turn a level-y list into a level-(y-1) list with Z approximately
    conserved: each entry spawns t_i uniform half-size subsets, reweighted by
    1/(p * t_i) where p is the exact survival probability of a fixed edge."""
    k = oracle.k
    log_n = ilog2(oracle.n)
    if b < 2.0 * (4.0 * k * log_n) ** k:
        raise InvalidArgument("b below the coarse accuracy bound")
    if y < 1 or (1 << (y - 1)) < 2 * k * k:
        raise InvalidArgument("need 2^(y-1) >= 2k^2")
    if L.y != y:
        raise InvalidArgument("list level mismatch")
    if not L.entries:
        return WeightedList(y=y - 1, entries=[])
    p = float(halving_survival_p(y, k))
    W = L.total_weight_estimate()
    log4d = math.log2(4.0 / delta)
    ts = [
        scaled(
            math.ceil(4.0 * b * b * e.w * e.ehat * log4d / (p * xi * xi * W)),
            profile.halve_mult,
        )
        for e in L.entries
    ]
    ts = _apply_budget(ts, profile.halve_budget)
    total_t = sum(ts)
    child_delta = delta / (2.0 * total_t)
    half = 1 << (y - 1)
    out: list[WeightedEntry] = []
    for entry, t_i in zip(L.entries, ts):
        w_new = entry.w / (p * t_i)
        for _ in range(t_i):
            S_child = random_fixed_subset(rng, entry.S, half)
            ehat = coarse(oracle, child_delta, rng, profile, universe=S_child)
            if ehat > 0:
                out.append(WeightedEntry(w=w_new, S=S_child, ehat=ehat))
    return WeightedList(y=y - 1, entries=out)


def helper_count(
    oracle: IndependenceOracle,
    epsilon: float,
    rng: np.random.Generator,
    profile: ConstantsProfile,
    exact_threshold: int = 500,
    universe: int | None = None,
) -> float:
    """Single estimation run: (1 +/- epsilon) e(G) with probability >= 2/3
    under the faithful profile. Falls back to exact enumeration when epsilon
    demands it or the instance is small (threshold configurable downward)."""
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must be in (0, 1/2)")
    if universe is None:
        universe = full_mask(oracle.n)
    n = universe.bit_count()
    k = oracle.k
    if epsilon < n ** (-float(k)) or n <= exact_threshold:
        return float(len(enumerate_edges_within(oracle, universe)))
    params = CountParams.for_instance(n, k, epsilon)
    if params.I < 1:
        return float(len(enumerate_edges_within(oracle, universe)))
    ehat0 = coarse(oracle, params.delta, rng, profile, universe=universe)
    if ehat0 == 0:
        return 0.0
    log_n = ilog2(n)
    L = WeightedList(y=log_n, entries=[WeightedEntry(w=1.0, S=universe, ehat=ehat0)])
    for i in range(1, params.I + 1):
        L = halve(oracle, params.b, log_n - (i - 1), L, params.xi, params.delta, rng, profile)
        L = trim(
            params.b,
            log_n - i,
            L,
            params.xi,
            params.delta,
            rng,
            n=n,
            k=k,
            profile=profile,
            stats=oracle.stats,
        )
    total = 0.0
    for entry in L.entries:
        total += entry.w * len(enumerate_edges_within(oracle, entry.S))
    return total


def count_query_budget(n: int, k: int, epsilon: float, profile: ConstantsProfile) -> float:
    log_n = max(1.0, math.log2(n))
    try:
        return profile.cap_factor * epsilon**-2 * float(k) ** (6 * k) * log_n ** (4 * k + 7)
    except OverflowError:
        return math.inf


def count(
    oracle: IndependenceOracle,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
    profile: ConstantsProfile,
    exact_threshold: int = 500,
    universe: int | None = None,
) -> float:
    """Median of independent estimation runs: (1 +/- epsilon) e(G) with
    probability >= 1-delta under the faithful profile. A run that exhausts
    the per-run query budget is recorded as -1 before the median."""
    if not (0 < epsilon < 1) or not (0 < delta < 1):
        raise InvalidArgument("epsilon and delta must be in (0,1)")
    if universe is None:
        oracle = pad_oracle_to_power_of_two(oracle)
        universe = full_mask(oracle.n)
    elif not (universe.bit_count() and (universe.bit_count() & (universe.bit_count() - 1)) == 0):
        raise InvalidArgument("universe size must be a power of two")
    runs_raw = 36 * math.ceil(math.log(2.0 / delta))
    runs = scaled(runs_raw, profile.count_median_mult, cap=profile.count_median_cap)
    budget = count_query_budget(universe.bit_count(), oracle.k, epsilon, profile)
    eps_run = min(epsilon, 1.0 / 3)
    stats = oracle.stats
    results = []
    for _ in range(runs):
        start = stats.queries
        old_limit = stats.query_limit
        if math.isfinite(budget):
            limit = start + int(budget)
            stats.query_limit = limit if old_limit is None else min(limit, old_limit)
        try:
            res = helper_count(
                oracle, eps_run, rng, profile, exact_threshold=exact_threshold, universe=universe
            )
        except QueryBudgetExceeded:
            res = -1.0
        finally:
            stats.query_limit = old_limit
        results.append(res)
    return float(median(results))
