import math

import numpy as np
import pytest

from oraclecount import (
    CoarseParams,
    ExactOracle,
    Hypergraph,
    LIGHT_PROFILE,
    coarse,
    colour_coarse,
    helper_coarse,
    verify_guess,
)
from oraclecount.core import InvalidArgument, full_mask, mask_of


def complete_graph(n):
    from itertools import combinations

    return Hypergraph.from_edge_lists(n, 2, list(combinations(range(n), 2)))


def test_verify_guess_edgeless_always_no():
    oracle = ExactOracle(Hypergraph.from_edge_lists(16, 2, []))
    classes = [mask_of(range(8)), mask_of(range(8, 16))]
    rng = np.random.default_rng(0)
    assert not any(verify_guess(oracle, 64, classes, rng) for _ in range(50))


def test_verify_guess_m1_detects_any_edge():
    G = Hypergraph.from_edge_lists(16, 2, [[0, 8]])
    oracle = ExactOracle(G)
    classes = [mask_of(range(8)), mask_of(range(8, 16))]
    rng = np.random.default_rng(1)
    # M=1: tuple (0,...,0) is admissible and Y_{i,0} = X_i
    assert all(verify_guess(oracle, 1, classes, rng) for _ in range(20))


def test_verify_guess_m_validation():
    oracle = ExactOracle(Hypergraph.from_edge_lists(4, 2, [[0, 2]]))
    rng = np.random.default_rng(0)
    with pytest.raises(InvalidArgument):
        verify_guess(oracle, 3, [0b0011, 0b1100], rng)
    with pytest.raises(InvalidArgument):
        verify_guess(oracle, 0, [0b0011, 0b1100], rng)


def test_verify_guess_completeness_rate():
    # complete bipartite 8+8, M = e(H) = 64: Yes-rate must beat p_out
    edges = [[u, 8 + v] for u in range(8) for v in range(8)]
    oracle = ExactOracle(Hypergraph.from_edge_lists(16, 2, edges))
    classes = [mask_of(range(8)), mask_of(range(8, 16))]
    params = CoarseParams.for_universe(16, 2, LIGHT_PROFILE)
    rng = np.random.default_rng(2)
    runs = 2000
    yes = sum(verify_guess(oracle, 64, classes, rng) for _ in range(runs))
    assert yes / runs >= params.p_out


def test_colour_coarse_edgeless_single_query():
    oracle = ExactOracle(Hypergraph.from_edge_lists(8, 2, []))
    rng = np.random.default_rng(0)
    out = colour_coarse(oracle, [mask_of(range(4)), mask_of(range(4, 8))], rng, LIGHT_PROFILE)
    assert out == 0.0
    assert oracle.stats.queries == 1


def test_colour_coarse_output_form():
    G = Hypergraph.from_edge_lists(8, 2, [[0, 4], [1, 5], [2, 4]])
    oracle = ExactOracle(G)
    classes = [mask_of(range(4)), mask_of(range(4, 8))]
    params = CoarseParams.for_universe(8, 2, LIGHT_PROFILE)
    rng = np.random.default_rng(3)
    for _ in range(30):
        out = colour_coarse(oracle, classes, rng, LIGHT_PROFILE)
        m = out / params.scale
        m_int = round(m)
        assert abs(m - m_int) < 1e-9
        assert m_int >= 1 and (m_int & (m_int - 1)) == 0  # power of two
        assert m_int <= 8**2


def test_colour_coarse_single_edge_accuracy():
    G = Hypergraph.from_edge_lists(8, 2, [[0, 4]])
    oracle = ExactOracle(G)
    classes = [mask_of(range(4)), mask_of(range(4, 8))]
    rng = np.random.default_rng(4)
    factor = (4 * 2 * 3) ** 2  # (4k log n)^k
    ok = 0
    trials = 200
    for _ in range(trials):
        out = colour_coarse(oracle, classes, rng, LIGHT_PROFILE)
        ok += 1 / factor <= out <= factor
    assert ok >= (2 * trials) // 3


def test_helper_coarse_edgeless_and_nonnegative():
    empty = ExactOracle(Hypergraph.from_edge_lists(8, 2, []))
    rng = np.random.default_rng(5)
    assert helper_coarse(empty, rng, LIGHT_PROFILE) == 0.0
    oracle = ExactOracle(complete_graph(8))
    assert helper_coarse(oracle, rng, LIGHT_PROFILE) >= 0.0


def test_helper_coarse_k8_accuracy():
    oracle = ExactOracle(complete_graph(8))
    rng = np.random.default_rng(6)
    factor = 2 * (4 * 2 * 3) ** 2  # 2(4k log n)^k
    ok = 0
    trials = 100
    for _ in range(trials):
        out = helper_coarse(oracle, rng, LIGHT_PROFILE)
        ok += 28 / factor <= out <= 28 * factor
    assert ok >= (2 * trials) // 3


def test_coarse_contract():
    rng = np.random.default_rng(7)
    empty = ExactOracle(Hypergraph.from_edge_lists(8, 2, []))
    assert coarse(empty, 0.2, rng, LIGHT_PROFILE) == 0.0
    assert empty.stats.coarse_calls == 1
    with pytest.raises(InvalidArgument):
        coarse(empty, 0.0, rng, LIGHT_PROFILE)
    with pytest.raises(InvalidArgument):
        coarse(empty, 1.0, rng, LIGHT_PROFILE)


def test_coarse_k8_success_rate():
    oracle = ExactOracle(complete_graph(8))
    rng = np.random.default_rng(8)
    factor = 2 * (4 * 2 * 3) ** 2
    ok = 0
    trials = 100
    for _ in range(trials):
        out = coarse(oracle, 0.2, rng, LIGHT_PROFILE)
        ok += 28 / factor <= out <= 28 * factor
    assert ok / trials >= 0.7


def test_coarse_universe_restriction():
    # edges only outside the universe must be invisible
    G = Hypergraph.from_edge_lists(8, 2, [[6, 7]])
    oracle = ExactOracle(G)
    rng = np.random.default_rng(9)
    assert coarse(oracle, 0.2, rng, LIGHT_PROFILE, universe=full_mask(4)) == 0.0


def test_coarse_params_validation():
    with pytest.raises(InvalidArgument):
        CoarseParams.for_universe(1, 2, LIGHT_PROFILE)
    with pytest.raises(InvalidArgument):
        CoarseParams.for_universe(12, 2, LIGHT_PROFILE)  # not a power of two
