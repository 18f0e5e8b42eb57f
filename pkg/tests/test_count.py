import dataclasses
from itertools import combinations

import numpy as np
import pytest

from oraclecount import (
    ConstantsProfile,
    ExactOracle,
    Hypergraph,
    LIGHT_PROFILE,
    PAPER_PROFILE,
    WeightedEntry,
    WeightedList,
    count,
    halve,
    helper_count,
    trim,
)
from oraclecount.core import InvalidArgument, RunStats, full_mask, mask_of
from oraclecount.count import CountParams, bucket_radius, count_query_budget


def complete_graph(n):
    return Hypergraph.from_edge_lists(n, 2, list(combinations(range(n), 2)))


def random_graph(n, m, seed):
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    idx = rng.choice(len(pairs), size=m, replace=False)
    return Hypergraph.from_edge_lists(n, 2, [pairs[i] for i in idx])


def z_value(L, G):
    total = 0.0
    for entry in L.entries:
        members = {v for v in range(G.n) if entry.S >> v & 1}
        e_S = sum(1 for e in G.edges if e <= members)
        total += entry.w * e_S
    return total


def test_trim_singleton_passthrough():
    L = WeightedList(y=3, entries=[WeightedEntry(1.0, full_mask(8), 5.0)])
    rng = np.random.default_rng(0)
    out = trim(32.0, 3, L, 0.2, 0.1, rng, n=16, k=2, profile=PAPER_PROFILE)
    assert len(out.entries) == 1
    assert out.entries[0].w == 1.0 and out.entries[0].S == full_mask(8)


def test_trim_small_buckets_exact():
    rng = np.random.default_rng(1)
    entries = [WeightedEntry(1.0 + i / 7.0, 1 << i, 2.0 + i) for i in range(6)]
    L = WeightedList(y=0, entries=entries)
    out = trim(32.0, 0, L, 0.2, 0.1, rng, n=16, k=2, profile=PAPER_PROFILE)
    assert sum(e.w * e.ehat for e in out.entries) == pytest.approx(
        L.total_weight_estimate()
    )


def test_trim_validation_and_edge_cases():
    rng = np.random.default_rng(2)
    L = WeightedList(y=2, entries=[WeightedEntry(1.0, 0b1111, 1.0)])
    with pytest.raises(InvalidArgument):
        trim(32.0, 2, L, 1.5, 0.1, rng, n=16, k=2, profile=PAPER_PROFILE)
    with pytest.raises(InvalidArgument):
        trim(32.0, 3, L, 0.2, 0.1, rng, n=16, k=2, profile=PAPER_PROFILE)  # level mismatch
    empty = trim(32.0, 2, WeightedList(y=2), 0.2, 0.1, rng, n=16, k=2, profile=PAPER_PROFILE)
    assert empty.entries == []


def test_trim_drops_tiny_and_clamps_huge():
    rng = np.random.default_rng(3)
    a = bucket_radius(16, 2, 32.0)
    stats = RunStats()
    tiny = WeightedEntry(2.0 ** (-a - 2), 0b11, 1.0)
    huge = WeightedEntry(2.0 ** (a + 2), 0b1100, 1.0)
    L = WeightedList(y=1, entries=[tiny, huge])
    out = trim(32.0, 1, L, 0.2, 0.1, rng, n=16, k=2, profile=PAPER_PROFILE, stats=stats)
    assert len(out.entries) == 1 and out.entries[0].S == 0b1100
    assert stats.trim_clamps == 1


def test_trim_concentration_light():
    # heterogeneous 200-entry lists under the light budget: resampling is real
    G = complete_graph(16)
    rng0 = np.random.default_rng(4)
    subsets = [mask_of(rng0.choice(16, size=4, replace=False)) for _ in range(200)]
    ok = 0
    trials = 200
    for t in range(trials):
        rng = np.random.default_rng([5, t])
        entries = []
        for S in subsets:
            members = {v for v in range(16) if S >> v & 1}
            e_S = sum(1 for e in G.edges if e <= members)
            ehat = e_S * float(rng.uniform(0.5, 2.0))
            entries.append(WeightedEntry(float(rng.uniform(0.5, 2.0)), S, ehat))
        L = WeightedList(y=2, entries=entries)
        out = trim(2.0, 2, L, 0.2, 0.1, rng, n=16, k=2, profile=LIGHT_PROFILE)
        assert len(out.entries) < len(L.entries)  # the budget actually bites
        ok += abs(z_value(out, G) - z_value(L, G)) < 0.2 * z_value(L, G)
    assert ok / trials >= 0.80


def test_halve_empty_and_validation():
    oracle = ExactOracle(complete_graph(16))
    rng = np.random.default_rng(6)
    params = CountParams.for_instance(16, 2, 0.3)
    out = halve(oracle, params.b, 4, WeightedList(y=4), 0.2, 0.1, rng, LIGHT_PROFILE)
    assert out.y == 3 and out.entries == []
    with pytest.raises(InvalidArgument):
        halve(oracle, 1.0, 4, WeightedList(y=4), 0.2, 0.1, rng, LIGHT_PROFILE)
    with pytest.raises(InvalidArgument):
        halve(oracle, params.b, 3, WeightedList(y=3), 0.2, 0.1, rng, LIGHT_PROFILE)  # 2^2 < 2k^2


def test_halve_child_sizes():
    G = complete_graph(16)
    oracle = ExactOracle(G)
    params = CountParams.for_instance(16, 2, 0.3)
    rng = np.random.default_rng(7)
    L = WeightedList(y=4, entries=[WeightedEntry(1.0, full_mask(16), 120.0)])
    out = halve(oracle, params.b, 4, L, 0.2, 0.1, rng, LIGHT_PROFILE)
    assert out.y == 3
    assert all(e.S.bit_count() == 8 for e in out.entries)
    assert all(e.ehat > 0 for e in out.entries)


def test_halve_concentration_k16():
    G = complete_graph(16)
    oracle = ExactOracle(G)
    params = CountParams.for_instance(16, 2, 0.3)
    ok = 0
    trials = 40
    for t in range(trials):
        rng = np.random.default_rng([8, t])
        L = WeightedList(y=4, entries=[WeightedEntry(1.0, full_mask(16), 120.0)])
        out = halve(oracle, params.b, 4, L, 0.2, 0.1, rng, LIGHT_PROFILE)
        ok += abs(z_value(out, G) - 120.0) < 0.2 * 120.0
    assert ok >= (2 * trials) // 3


def test_helper_count_exact_paths():
    oracle = ExactOracle(complete_graph(8))
    rng = np.random.default_rng(9)
    assert helper_count(oracle, 0.3, rng, LIGHT_PROFILE) == 28.0
    empty = ExactOracle(Hypergraph.from_edge_lists(8, 2, []))
    assert helper_count(empty, 0.3, rng, LIGHT_PROFILE) == 0.0
    with pytest.raises(InvalidArgument):
        helper_count(oracle, 0.6, rng, LIGHT_PROFILE)


def test_count_trivial_contracts():
    rng = np.random.default_rng(10)
    empty = ExactOracle(Hypergraph.from_edge_lists(8, 2, []))
    assert count(empty, 0.3, 0.25, rng, LIGHT_PROFILE) == 0.0
    G = Hypergraph.from_edge_lists(12, 3, [[0, 1, 2], [3, 4, 5], [0, 4, 8]])
    for _ in range(5):
        assert count(ExactOracle(G), 0.3, 0.25, rng, LIGHT_PROFILE) == 3.0
    with pytest.raises(InvalidArgument):
        count(empty, 0.0, 0.25, rng, LIGHT_PROFILE)
    with pytest.raises(InvalidArgument):
        count(empty, 0.3, 1.0, rng, LIGHT_PROFILE)
    with pytest.raises(InvalidArgument):
        count(ExactOracle(G), 0.3, 0.25, rng, LIGHT_PROFILE, universe=0b111011)


def test_count_budget_exhaustion_records_minus_one():
    G = random_graph(64, 200, seed=11)
    oracle = ExactOracle(G)
    starved = dataclasses.replace(LIGHT_PROFILE, name="starved", cap_factor=1e-20)
    rng = np.random.default_rng(12)
    out = count(oracle, 0.3, 0.25, rng, starved, exact_threshold=16)
    assert out == -1.0


def test_count_accuracy_light():
    G = random_graph(64, 300, seed=13)
    oracle = ExactOracle(G)
    ok = 0
    trials = 30
    for t in range(trials):
        rng = np.random.default_rng([14, t])
        est = helper_count(oracle, 0.3, rng, LIGHT_PROFILE, exact_threshold=16)
        ok += abs(est - 300.0) < 0.3 * 300.0
    assert ok / trials >= 0.60


def test_count_query_budget_monotone():
    assert count_query_budget(64, 2, 0.3, LIGHT_PROFILE) > 0
    assert count_query_budget(64, 2, 0.1, LIGHT_PROFILE) > count_query_budget(
        64, 2, 0.3, LIGHT_PROFILE
    )
