"""Reduction adapters: wrap concrete decision procedures as coloured
independence oracles over each problem's natural witness hypergraph.

Supported problems: k-SUM, k-orthogonal-vectors, exact-weight k-clique, and
colourful pattern copies. Each adapter also ships a brute-force witness
enumerator used by the verification harness and the CLI's `exact` command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import (
    IndependenceOracle,
    InvalidArgument,
    bits_list,
    iter_bits,
    mask_of,
)
from .count import count

INT128_MAX = (1 << 127) - 1


class EncodingOverflow(ValueError):
    pass


# ---------------------------------------------------------------------------
# k-SUM


@dataclass(frozen=True)
class KSumInstance:
    values: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 3:
            raise InvalidArgument("k-SUM requires k >= 3")
        if len(set(self.values)) != len(self.values):
            raise InvalidArgument("k-SUM values must be pairwise distinct")
        for x in self.values:
            ksum_encode(1, self.k, x)  # validates the 128-bit width


def ksum_encode(i: int, k: int, x: int) -> int:
    """Class-tagged injective encoding: a zero-sum of k encoded values forces
    exactly one value per class (base-(k+1) digit argument)."""
    if not (1 <= i <= k):
        raise InvalidArgument("class index out of range")
    base = (k + 1) ** k
    bound = base * abs(x) + (k + 1) ** (k - 1)
    if bound > INT128_MAX:
        raise EncodingOverflow(f"encoded |{x}| exceeds the 128-bit signed range")
    if i < k:
        return base * x + (k + 1) ** (i - 1)
    return base * x - sum((k + 1) ** (j - 1) for j in range(1, k))


def ksum_decide_bruteforce(values: Sequence[int], k: int) -> bool:
    return any(sum(c) == 0 for c in combinations(values, k))


def ksum_decide_mitm(values: Sequence[int], k: int) -> bool:
    """Meet-in-the-middle: hash sums of the larger half, scan complements of
    the smaller half, with index-disjointness bookkeeping."""
    values = list(values)
    n = len(values)
    ka = (k + 1) // 2
    kb = k - ka
    if n < k:
        return False
    table: dict[int, list[frozenset[int]]] = {}
    for idxs in combinations(range(n), ka):
        s = sum(values[i] for i in idxs)
        table.setdefault(s, []).append(frozenset(idxs))
    for idxs in combinations(range(n), kb) if kb else [()]:
        s = sum(values[i] for i in idxs)
        want = frozenset(idxs)
        for other in table.get(-s, []):
            if not (other & want):
                return True
    return False


class KSumOracle(IndependenceOracle):
    """Vertices are indices into the value list; a colourful witness is a
    zero-sum pick of one value per queried class, detected by encoding each
    class's values with its tag and handing the union to the decider."""

    def __init__(self, inst: KSumInstance, decider: Callable[[Sequence[int], int], bool]):
        super().__init__(len(inst.values), inst.k)
        self.inst = inst
        self.decider = decider

    def _has_colourful_edge(self, masks: Sequence[int]) -> bool:
        values = self.inst.values
        k = self.k
        pool: list[int] = []
        for i, m in enumerate(masks, start=1):
            pool.extend(ksum_encode(i, k, values[v]) for v in iter_bits(m))
        if len(pool) < k:
            return False
        return self.decider(pool, k)


def ksum_oracle(inst: KSumInstance, decider=ksum_decide_mitm) -> KSumOracle:
    return KSumOracle(inst, decider)


def ksum_witnesses(inst: KSumInstance) -> set[frozenset[int]]:
    return {
        frozenset(c)
        for c in combinations(range(len(inst.values)), inst.k)
        if sum(inst.values[i] for i in c) == 0
    }


# ---------------------------------------------------------------------------
# k-orthogonal-vectors


@dataclass(frozen=True)
class KovInstance:
    sets: tuple[tuple[int, ...], ...]  # vectors as D-bit ints, one tuple per side
    d: int

    def __post_init__(self):
        if len(self.sets) < 2:
            raise InvalidArgument("k-OV needs at least 2 vector sets")
        for side in self.sets:
            for v in side:
                if v < 0 or v >= (1 << self.d):
                    raise InvalidArgument("vector does not fit the declared dimension")

    @property
    def k(self) -> int:
        return len(self.sets)

    def offsets(self) -> list[int]:
        offs = [0]
        for side in self.sets:
            offs.append(offs[-1] + len(side))
        return offs


def kov_decide_bruteforce(lists: Sequence[Sequence[int]]) -> bool:
    """Is there one vector per list whose coordinatewise product is all-zero?
    DFS over partial AND-masks with memoization."""
    seen: set[tuple[int, int]] = set()

    def go(i: int, acc: int) -> bool:
        if acc == 0:
            # any completion works provided every remaining list is non-empty
            return all(lists[j] for j in range(i, len(lists)))
        if i == len(lists):
            return False
        if (i, acc) in seen:
            return False
        seen.add((i, acc))
        return any(go(i + 1, acc & v) for v in lists[i])

    width = max((v.bit_length() for side in lists for v in side), default=1)
    return go(0, (1 << max(width, 1)) - 1)


class KovOracle(IndependenceOracle):
    """Vertices are (vector, side) pairs flattened; the witness hypergraph is
    k-partite, so a general query is resolved by trying every assignment of
    query classes to sides and asking the decider about the stripped vectors."""

    def __init__(self, inst: KovInstance, decider=kov_decide_bruteforce):
        offs = inst.offsets()
        super().__init__(offs[-1], inst.k)
        self.inst = inst
        self.decider = decider
        self._offs = offs

    def _side_vectors(self, mask: int, side: int) -> list[int]:
        lo, hi = self._offs[side], self._offs[side + 1]
        side_vals = self.inst.sets[side]
        return [side_vals[v - lo] for v in iter_bits(mask) if lo <= v < hi]

    def _has_colourful_edge(self, masks: Sequence[int]) -> bool:
        k = self.k
        parts = [[self._side_vectors(m, s) for s in range(k)] for m in masks]
        for perm in permutations(range(k)):
            lists = [parts[perm[s]][s] for s in range(k)]
            if any(not l for l in lists):
                continue
            if self.decider(lists):
                return True
        return False


def kov_oracle(inst: KovInstance, decider=kov_decide_bruteforce) -> KovOracle:
    return KovOracle(inst, decider)


def kov_witnesses(inst: KovInstance) -> set[frozenset[int]]:
    offs = inst.offsets()
    out = set()
    for combo in product(*[range(len(s)) for s in inst.sets]):
        acc = ~0
        for side, idx in enumerate(combo):
            acc &= inst.sets[side][idx]
        if acc & ((1 << inst.d) - 1):
            continue
        out.add(frozenset(offs[side] + idx for side, idx in enumerate(combo)))
    return out


# ---------------------------------------------------------------------------
# exact-weight k-clique


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, int], ...]  # (u, v, weight)

    def __post_init__(self):
        seen = set()
        for u, v, _ in self.edges:
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidArgument("bad weighted edge endpoints")
            key = frozenset((u, v))
            if key in seen:
                raise InvalidArgument("duplicate weighted edge")
            seen.add(key)

    def weight_map(self) -> dict[frozenset[int], int]:
        return {frozenset((u, v)): w for u, v, w in self.edges}


def zero_clique_decide_bruteforce(
    weights: dict[frozenset[int], int], classes: Sequence[Sequence[int]]
) -> bool:
    """Is there a colourful k-clique of total weight zero using only the
    provided (inter-class) edges?"""

    def go(i: int, chosen: list[int], total: int) -> bool:
        if i == len(classes):
            return total == 0
        for v in classes[i]:
            ok = True
            add = 0
            for u in chosen:
                key = frozenset((u, v))
                if key not in weights:
                    ok = False
                    break
                add += weights[key]
            if ok:
                chosen.append(v)
                if go(i + 1, chosen, total + add):
                    return True
                chosen.pop()
        return False

    return go(0, [], 0)


class ExactWeightCliqueOracle(IndependenceOracle):
    def __init__(self, g: WeightedGraph, k: int, decider=zero_clique_decide_bruteforce):
        if k < 3:
            raise InvalidArgument("exact-weight clique adapter requires k >= 3")
        super().__init__(g.n, k)
        self.graph = g
        self.decider = decider
        self._weights = g.weight_map()

    def _has_colourful_edge(self, masks: Sequence[int]) -> bool:
        classes = [bits_list(m) for m in masks]
        if any(not c for c in classes):
            return False
        union = set().union(*classes)
        cls_of = {}
        for i, c in enumerate(classes):
            for v in c:
                cls_of[v] = i
        # keep only inter-class edges among the queried classes
        kept = {
            e: w
            for e, w in self._weights.items()
            if e <= union and len({cls_of[v] for v in e}) == 2
        }
        return self.decider(kept, classes)


def exact_weight_clique_oracle(
    g: WeightedGraph, k: int, decider=zero_clique_decide_bruteforce
) -> ExactWeightCliqueOracle:
    return ExactWeightCliqueOracle(g, k, decider)


def zero_clique_witnesses(g: WeightedGraph, k: int) -> set[frozenset[int]]:
    weights = g.weight_map()
    out = set()
    for combo in combinations(range(g.n), k):
        total = 0
        ok = True
        for pair in combinations(combo, 2):
            key = frozenset(pair)
            if key not in weights:
                ok = False
                break
            total += weights[key]
        if ok and total == 0:
            out.add(frozenset(combo))
    return out


# ---------------------------------------------------------------------------
# colourful pattern copies


@dataclass(frozen=True)
class Pattern:
    """A simple pattern graph on vertices 0..size-1."""

    size: int
    edges: frozenset[frozenset[int]]

    @classmethod
    def from_edge_lists(cls, size: int, edges: Iterable[Iterable[int]]) -> "Pattern":
        fe = frozenset(frozenset(e) for e in edges)
        for e in fe:
            if len(e) != 2 or any(not (0 <= v < size) for v in e):
                raise InvalidArgument("pattern edges must be simple pairs in range")
        return cls(size=size, edges=fe)


@dataclass(frozen=True)
class PatternInstance:
    pattern: Pattern
    n: int
    host_edges: frozenset[frozenset[int]]
    colours: tuple[int, ...]  # c: V(G) -> [k], 0-based colours

    def __post_init__(self):
        k = self.pattern.size
        if len(self.colours) != self.n:
            raise InvalidArgument("colouring must cover every host vertex")
        if any(not (0 <= c < k) for c in self.colours):
            raise InvalidArgument("colour out of range")
        for e in self.host_edges:
            if len(e) != 2 or any(not (0 <= v < self.n) for v in e):
                raise InvalidArgument("host edges must be simple pairs in range")

    @property
    def k(self) -> int:
        return self.pattern.size


def automorphism_count(H: Pattern) -> int:
    if H.size > 10:
        raise InvalidArgument("pattern too large for brute-force automorphisms")
    count_auto = 0
    for perm in permutations(range(H.size)):
        if all(frozenset((perm[u], perm[v])) in H.edges for e in H.edges for u, v in [tuple(e)]):
            count_auto += 1
    return count_auto


class ColourfulPatternOracle(IndependenceOracle):
    """Oracle for the hypergraph G_d whose edges are the colourful k-sets
    hosting a copy of the pattern with colours matching the bijection d
    (d maps pattern vertex -> colour)."""

    def __init__(self, inst: PatternInstance, d: Sequence[int], decider=None):
        k = inst.k
        if sorted(d) != list(range(k)):
            raise InvalidArgument("d must be a bijection onto the colours")
        super().__init__(inst.n, k)
        self.inst = inst
        self.d = tuple(d)
        self._host = inst.host_edges
        self._by_colour = [
            [v for v in range(inst.n) if inst.colours[v] == c] for c in range(k)
        ]

    def _witness_in(self, pools: Sequence[Sequence[int]]) -> bool:
        """pools[c] = allowed host vertices of colour c; search for a copy
        where pattern vertex u sits at a vertex of colour d[u]."""
        d = self.d
        H_edges = self.inst.pattern.edges
        k = self.k
        assign: list[int | None] = [None] * k  # by pattern vertex

        def go(u: int) -> bool:
            if u == k:
                return True
            for v in pools[d[u]]:
                ok = True
                for e in H_edges:
                    if u in e:
                        other = next(x for x in e if x != u)
                        if other < u and assign[other] is not None:
                            if frozenset((assign[other], v)) not in self._host:
                                ok = False
                                break
                if ok:
                    assign[u] = v
                    if go(u + 1):
                        return True
                    assign[u] = None
            return False

        return go(0)

    def _has_colourful_edge(self, masks: Sequence[int]) -> bool:
        k = self.k
        # split each queried class by host colour; the hypergraph is k-partite
        # in the colours, so try every assignment of classes to colours
        split = [
            [[v for v in bits_list(m) if self.inst.colours[v] == c] for c in range(k)]
            for m in masks
        ]
        for perm in permutations(range(k)):
            pools = [split[perm[c]][c] for c in range(k)]
            if any(not p for p in pools):
                continue
            if self._witness_in(pools):
                return True
        return False


def colourful_h_oracle(inst: PatternInstance, d: Sequence[int], decider=None):
    return ColourfulPatternOracle(inst, d, decider)


def colourful_h_edges_bruteforce(inst: PatternInstance, d: Sequence[int]) -> set[frozenset[int]]:
    """Direct definition check of G_d's edge set: colourful k-sets S such
    that placing pattern vertex u on the colour-d[u] member of S maps every
    pattern edge to a host edge."""
    k = inst.k
    by_colour = [[v for v in range(inst.n) if inst.colours[v] == c] for c in range(k)]
    out = set()
    for combo in product(*by_colour):
        placed = [combo[d[u]] for u in range(k)]
        if all(
            frozenset((placed[u], placed[v])) in inst.host_edges
            for e in inst.pattern.edges
            for u, v in [tuple(e)]
        ):
            out.add(frozenset(combo))
    return out


def colourful_copy_count_bruteforce(inst: PatternInstance) -> int:
    """Number of colourful pattern copies: injective colour-respecting
    placements divided by the automorphism count."""
    k = inst.k
    homs = 0
    for d in permutations(range(k)):
        homs += len(colourful_h_edges_bruteforce(inst, d))
    return homs // automorphism_count(inst.pattern)


def count_colourful_h(
    inst: PatternInstance,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
    profile,
    exact_threshold: int = 500,
    stats=None,
) -> float:
    """Sum the per-bijection counts and divide by the automorphism count."""
    k = inst.k
    fact = math.factorial(k)
    total = 0.0
    for d in permutations(range(k)):
        oracle = ColourfulPatternOracle(inst, d)
        if stats is not None:
            oracle.stats = stats
        total += count(
            oracle, epsilon, delta / fact, rng, profile, exact_threshold=exact_threshold
        )
    return total / automorphism_count(inst.pattern)


# ---------------------------------------------------------------------------
# randomized-decider amplification


class MajorityVoteOracle(IndependenceOracle):
    """Wraps a (possibly randomized) oracle; answers by majority over an odd
    number of repetitions. Inner queries are counted on the inner oracle's
    stats (x reps); this wrapper's own counter advances once per query."""

    def __init__(self, inner: IndependenceOracle, reps: int):
        if reps % 2 == 0 or reps < 1:
            raise InvalidArgument("reps must be odd")
        super().__init__(inner.n, inner.k)
        self.inner = inner
        self.reps = reps

    def _has_colourful_edge(self, masks: Sequence[int]) -> bool:
        yes = sum(1 for _ in range(self.reps) if self.inner.query(masks))
        return yes * 2 > self.reps


def majority_vote_oracle(inner: IndependenceOracle, reps: int) -> MajorityVoteOracle:
    return MajorityVoteOracle(inner, reps)
