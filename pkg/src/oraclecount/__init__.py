"""Approximate counting and near-uniform sampling of small witnesses using
coloured independence decision oracles."""

from .core import (
    ColourClasses,
    ConstantsProfile,
    ExactOracle,
    Hypergraph,
    IndependenceOracle,
    LIGHT_PROFILE,
    PAPER_PROFILE,
    PROFILES,
    RunStats,
    bernoulli_subset,
    degree,
    enumerate_edges_within,
    exact_cind,
    halving_survival_p,
    pad_oracle_to_power_of_two,
    random_fixed_subset,
)
from .coarse import CoarseParams, coarse, colour_coarse, helper_coarse, verify_guess
from .count import CountParams, WeightedEntry, WeightedList, count, halve, helper_count, trim
from .sample import FAIL, SampleParams, helper_sample, sample
from .verify import TrialReport, exact_count, success_rate_trial, tv_distance

__all__ = [
    "ColourClasses",
    "ConstantsProfile",
    "ExactOracle",
    "Hypergraph",
    "IndependenceOracle",
    "LIGHT_PROFILE",
    "PAPER_PROFILE",
    "PROFILES",
    "RunStats",
    "CoarseParams",
    "CountParams",
    "SampleParams",
    "TrialReport",
    "WeightedEntry",
    "WeightedList",
    "FAIL",
    "bernoulli_subset",
    "coarse",
    "colour_coarse",
    "count",
    "degree",
    "enumerate_edges_within",
    "exact_cind",
    "exact_count",
    "halve",
    "halving_survival_p",
    "helper_coarse",
    "helper_count",
    "helper_sample",
    "pad_oracle_to_power_of_two",
    "random_fixed_subset",
    "sample",
    "success_rate_trial",
    "trim",
    "tv_distance",
    "verify_guess",
]
