"""Ground truth and statistical harnesses for testing the probabilistic
guarantees at desk scale."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import Hypergraph, InvalidArgument


def exact_count(G: Hypergraph) -> int:
    return len(G.edges)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return (max(0.0, centre - half), min(1.0, centre + half))


@dataclass(frozen=True)
class TrialReport:
    trials: int
    successes: int
    rate: float
    wilson_lo: float
    wilson_hi: float
    mean_queries: float

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "wilson95": [self.wilson_lo, self.wilson_hi],
            "mean_queries": self.mean_queries,
        }


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Per-trial generator derived from (master seed, trial index); the
    documented splittable scheme that makes results schedule-independent."""
    return np.random.default_rng([master_seed, index])


def success_rate_trial(
    runner: Callable[[np.random.Generator], tuple[bool, int]],
    trials: int,
    master_seed: int = 0,
    threads: int = 1,
) -> TrialReport:
    """Run `runner(rng) -> (passed, queries)` over independent seeded trials.

    Each trial's rng depends only on (master_seed, trial index), and results
    are joined in index order, so the report is identical for any thread
    count.
    """
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")

    def one(i: int) -> tuple[bool, int]:
        return runner(trial_rng(master_seed, i))

    if threads <= 1:
        results = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(trials)))
    successes = sum(1 for ok, _ in results if ok)
    mean_q = sum(q for _, q in results) / trials
    lo, hi = wilson_interval(successes, trials)
    return TrialReport(
        trials=trials,
        successes=successes,
        rate=successes / trials,
        wilson_lo=lo,
        wilson_hi=hi,
        mean_queries=mean_q,
    )


def tv_distance(samples: Iterable[int], edges: Sequence[int]) -> float:
    """Total-variation distance between the empirical distribution of the
    sampled edge masks and uniform over `edges`. A sample outside the edge
    set is a hard failure (the sampler returned a non-edge)."""
    edge_set = set(edges)
    counts: dict[int, int] = {}
    total = 0
    for s in samples:
        if s not in edge_set:
            raise InvalidArgument(f"sample {s:#x} is not an edge")
        counts[s] = counts.get(s, 0) + 1
        total += 1
    if total == 0:
        raise InvalidArgument("samples must be non-empty")
    uniform = 1.0 / len(edges)
    return 0.5 * sum(abs(counts.get(e, 0) / total - uniform) for e in edge_set)
