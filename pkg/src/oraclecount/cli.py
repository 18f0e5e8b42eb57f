"""Command-line entry point: parse a JSON instance, build the matching
adapter, run count / sample / exact / coarse / trial, and emit JSON lines."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from . import problems
from .coarse import coarse as run_coarse
from .core import (
    ConstantsProfile,
    ExactOracle,
    Hypergraph,
    IndependenceOracle,
    InvalidArgument,
    PROFILES,
    RunStats,
    bits_list,
    pad_oracle_to_power_of_two,
)
from .count import count as run_count
from .problems import (
    KSumInstance,
    KovInstance,
    Pattern,
    PatternInstance,
    WeightedGraph,
    colourful_copy_count_bruteforce,
    count_colourful_h,
    exact_weight_clique_oracle,
    ksum_oracle,
    ksum_witnesses,
    kov_oracle,
    kov_witnesses,
    zero_clique_witnesses,
)
from .sample import FAIL, sample as run_sample
from .verify import success_rate_trial


class UnsupportedInstance(ValueError):
    pass


class MalformedInstance(ValueError):
    pass


# ---------------------------------------------------------------------------
# instance parsing


def _require(obj: dict, field: str, path: str):
    if field not in obj:
        raise MalformedInstance(f"{path}.{field}: missing")
    return obj[field]


def parse_instance_dict(obj: dict) -> Any:
    itype = _require(obj, "type", "$")
    try:
        if itype == "hypergraph":
            return Hypergraph.from_edge_lists(
                n=_require(obj, "n", "$"), k=_require(obj, "k", "$"), edges=_require(obj, "edges", "$")
            )
        if itype == "ksum":
            return KSumInstance(values=tuple(_require(obj, "values", "$")), k=_require(obj, "k", "$"))
        if itype == "kov":
            d = _require(obj, "d", "$")
            sets = []
            for side in _require(obj, "sets", "$"):
                vecs = []
                for s in side:
                    if len(s) != d or any(ch not in "01" for ch in s):
                        raise MalformedInstance(f"$.sets: vector {s!r} is not a {d}-bit string")
                    vecs.append(int(s, 2))
                sets.append(tuple(vecs))
            return KovInstance(sets=tuple(sets), d=d)
        if itype == "weighted-graph":
            g = WeightedGraph(
                n=_require(obj, "n", "$"),
                edges=tuple(tuple(e) for e in _require(obj, "edges", "$")),
            )
            return (g, _require(obj, "k", "$"))
        if itype == "colourful":
            pat = _require(obj, "pattern", "$")
            graph = _require(obj, "graph", "$")
            pattern = Pattern.from_edge_lists(
                size=_require(pat, "n", "$.pattern"), edges=_require(pat, "edges", "$.pattern")
            )
            return PatternInstance(
                pattern=pattern,
                n=_require(graph, "n", "$.graph"),
                host_edges=frozenset(frozenset(e) for e in _require(graph, "edges", "$.graph")),
                colours=tuple(_require(obj, "colours", "$")),
            )
    except MalformedInstance:
        raise
    except (InvalidArgument, TypeError, ValueError) as exc:
        raise MalformedInstance(f"${{{itype}}}: {exc}") from exc
    raise UnsupportedInstance(f"unknown instance type {itype!r}")


def parse_instance(path: str | Path) -> Any:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInstance(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedInstance("top-level JSON value must be an object")
    return parse_instance_dict(obj)


def serialize_instance(inst: Any) -> dict:
    if isinstance(inst, Hypergraph):
        return {
            "type": "hypergraph",
            "n": inst.n,
            "k": inst.k,
            "edges": sorted(sorted(e) for e in inst.edges),
        }
    if isinstance(inst, KSumInstance):
        return {"type": "ksum", "k": inst.k, "values": list(inst.values)}
    if isinstance(inst, KovInstance):
        return {
            "type": "kov",
            "d": inst.d,
            "sets": [[format(v, f"0{inst.d}b") for v in side] for side in inst.sets],
        }
    if isinstance(inst, tuple) and isinstance(inst[0], WeightedGraph):
        g, k = inst
        return {"type": "weighted-graph", "k": k, "n": g.n, "edges": [list(e) for e in g.edges]}
    if isinstance(inst, PatternInstance):
        return {
            "type": "colourful",
            "pattern": {
                "n": inst.pattern.size,
                "edges": sorted(sorted(e) for e in inst.pattern.edges),
            },
            "graph": {"n": inst.n, "edges": sorted(sorted(e) for e in inst.host_edges)},
            "colours": list(inst.colours),
        }
    raise UnsupportedInstance(f"cannot serialize {type(inst).__name__}")


def build_oracle(inst: Any) -> IndependenceOracle:
    if isinstance(inst, Hypergraph):
        return ExactOracle(inst)
    if isinstance(inst, KSumInstance):
        return ksum_oracle(inst)
    if isinstance(inst, KovInstance):
        return kov_oracle(inst)
    if isinstance(inst, tuple) and isinstance(inst[0], WeightedGraph):
        return exact_weight_clique_oracle(inst[0], inst[1])
    raise UnsupportedInstance(
        "this command needs a single-oracle instance "
        "(hypergraph, ksum, kov, or weighted-graph)"
    )


def brute_force_count(inst: Any) -> int:
    if isinstance(inst, Hypergraph):
        return len(inst.edges)
    if isinstance(inst, KSumInstance):
        return len(ksum_witnesses(inst))
    if isinstance(inst, KovInstance):
        return len(kov_witnesses(inst))
    if isinstance(inst, tuple) and isinstance(inst[0], WeightedGraph):
        return len(zero_clique_witnesses(inst[0], inst[1]))
    if isinstance(inst, PatternInstance):
        return colourful_copy_count_bruteforce(inst)
    raise UnsupportedInstance("no brute-force counter for this instance")


# ---------------------------------------------------------------------------
# config and runner


@dataclasses.dataclass
class CliConfig:
    command: str
    instance: str
    epsilon: float = 0.3
    delta: float = 0.25
    seed: int = 0
    profile: str | None = None
    samples: int = 1
    trials: int = 100
    out: str | None = None
    threads: int = 1


def load_profile(spec: str | None) -> ConstantsProfile:
    if spec is None:
        print(
            "warning: using the 'light' constants profile; theoretical guarantees "
            "require --profile paper",
            file=sys.stderr,
        )
        return PROFILES["light"]
    if spec in PROFILES:
        return PROFILES[spec]
    with open(spec) as fh:
        fields = json.load(fh)
    return ConstantsProfile(**fields)


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(config: CliConfig) -> int:
    try:
        profile = load_profile(config.profile)
        inst = parse_instance(config.instance)
        if not (0 < config.epsilon < 1) or not (0 < config.delta < 1):
            raise InvalidArgument("epsilon and delta must be in (0,1)")
        rng = np.random.default_rng(config.seed)
        lines: list[str] = []
        exit_code = 0
        start = time.monotonic()

        if config.command == "count":
            if isinstance(inst, PatternInstance):
                stats = RunStats()
                estimate = count_colourful_h(
                    inst, config.epsilon, config.delta, rng, profile, stats=stats
                )
            else:
                oracle = build_oracle(inst)
                stats = oracle.stats
                estimate = run_count(oracle, config.epsilon, config.delta, rng, profile)
            stats.elapsed = time.monotonic() - start
            lines.append(
                json.dumps(
                    {
                        "estimate": estimate,
                        "epsilon": config.epsilon,
                        "delta": config.delta,
                        "stats": stats.as_dict(),
                    }
                )
            )
        elif config.command == "sample":
            oracle = build_oracle(inst)
            fails = 0
            for _ in range(config.samples):
                edge = run_sample(oracle, config.epsilon, rng, profile)
                if edge is FAIL:
                    fails += 1
                    lines.append(json.dumps({"fail": True}))
                else:
                    lines.append(json.dumps({"edge": bits_list(edge)}))
            oracle.stats.elapsed = time.monotonic() - start
            lines.append(json.dumps({"stats": oracle.stats.as_dict()}))
            if fails * 2 > config.samples:
                exit_code = 1
        elif config.command == "exact":
            stats = RunStats(elapsed=time.monotonic() - start)
            lines.append(json.dumps({"exact": brute_force_count(inst), "stats": stats.as_dict()}))
        elif config.command == "coarse":
            oracle = build_oracle(inst)
            estimate = run_coarse(
                pad_oracle_to_power_of_two(oracle), config.delta, rng, profile
            )
            oracle.stats.elapsed = time.monotonic() - start
            lines.append(
                json.dumps(
                    {"estimate": estimate, "delta": config.delta, "stats": oracle.stats.as_dict()}
                )
            )
        elif config.command == "trial":
            exact = brute_force_count(inst)

            def one(trial_rng) -> tuple[bool, int]:
                if isinstance(inst, PatternInstance):
                    stats = RunStats()
                    est = count_colourful_h(
                        inst, config.epsilon, config.delta, trial_rng, profile, stats=stats
                    )
                    queries = stats.queries
                else:
                    oracle = build_oracle(inst)
                    est = run_count(oracle, config.epsilon, config.delta, trial_rng, profile)
                    queries = oracle.stats.queries
                ok = est == 0 if exact == 0 else abs(est - exact) < config.epsilon * exact
                return ok, queries

            report = success_rate_trial(
                one, config.trials, master_seed=config.seed, threads=config.threads
            )
            lines.append(json.dumps({**report.as_dict(), "exact": exact}))
        else:
            raise UnsupportedInstance(f"unknown command {config.command!r}")

        _emit(lines, config.out)
        return exit_code
    except (MalformedInstance, UnsupportedInstance, InvalidArgument, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="oraclecount",
        description="Approximate counting and sampling of witnesses via "
        "coloured independence decision oracles.",
    )
    parser.add_argument("command", choices=["count", "sample", "exact", "coarse", "trial"])
    parser.add_argument("instance", help="path to a JSON instance file")
    parser.add_argument("--epsilon", type=float, default=0.3)
    parser.add_argument("--delta", type=float, default=0.25)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--profile",
        default=None,
        help="'paper', 'light', or a path to a profile JSON (default: light)",
    )
    parser.add_argument("--samples", type=int, default=1)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--out", default=None, help="write output lines to this file")
    parser.add_argument("--threads", type=int, default=1, help="trial parallelism")
    args = parser.parse_args(argv)
    config = CliConfig(
        command=args.command,
        instance=args.instance,
        epsilon=args.epsilon,
        delta=args.delta,
        seed=args.seed,
        profile=args.profile,
        samples=args.samples,
        trials=args.trials,
        out=args.out,
        threads=args.threads,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
