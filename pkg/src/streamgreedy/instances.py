"""Seeded generators for desk-scale instances with integer weights.

Size envelopes keep exact enumeration cheap: every generator here stays at
or below 12 elements unless asked otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .ground import DirectedCut, Modular, SubmodularOracle, WeightedCoverage
from .matchoid import GraphicMatroid, Matchoid, PartitionMatroid, UniformMatroid

#: Largest generated ground set that --verify will still brute-force.
VERIFY_ENVELOPE = 16


@dataclass
class Instance:
    kind: str
    oracle: SubmodularOracle
    matchoid: Matchoid

    @property
    def ground(self) -> List[int]:
        return sorted(self.matchoid.ground)

    @property
    def monotone(self) -> bool:
        return self.oracle.is_monotone


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_coverage(rng, ids, universe: int = 8, max_set: int = 4, max_weight: int = 5) -> WeightedCoverage:
    sets = {}
    for e in ids:
        size = int(rng.integers(1, max_set + 1))
        sets[e] = sorted(int(u) for u in rng.choice(universe, size=size, replace=False))
    weights = {u: int(rng.integers(1, max_weight + 1)) for u in range(universe)}
    return WeightedCoverage(sets, weights)


def random_cut(rng, n: int, density: float = 0.4, max_weight: int = 5) -> DirectedCut:
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < density:
                arcs.append((u, v, int(rng.integers(1, max_weight + 1))))
    return DirectedCut(range(n), arcs)


def random_partition(rng, ids, blocks: int, max_capacity: int = 2) -> PartitionMatroid:
    assignment = {b: [] for b in range(blocks)}
    for e in ids:
        assignment[int(rng.integers(blocks))].append(e)
    return PartitionMatroid([(g, int(rng.integers(1, max_capacity + 1))) for g in assignment.values() if g])


def coverage_uniform(n: int = 8, k: int = 3, seed: int = 0, universe: int = 8) -> Instance:
    rng = _rng(seed)
    ids = list(range(n))
    return Instance("coverage-uniform", random_coverage(rng, ids, universe), Matchoid([UniformMatroid(ids, k)], k=k))


def coverage_partition(n: int = 8, blocks: int = 3, seed: int = 0, universe: int = 8) -> Instance:
    rng = _rng(seed)
    ids = list(range(n))
    f = random_coverage(rng, ids, universe)
    pm = random_partition(rng, ids, blocks)
    return Instance("coverage-partition", f, Matchoid([pm], k=pm.rank_hint))


def _bipartite_edges(rng, left: int, right: int, n: int):
    pairs = [(u, v) for u in range(left) for v in range(right)]
    picks = rng.choice(len(pairs), size=min(n, len(pairs)), replace=False)
    return {i: pairs[int(p)] for i, p in enumerate(sorted(picks))}


def coverage_2matroid(n: int = 8, seed: int = 0, vertices: int = 5, universe: int = 8) -> Instance:
    """Graphic matroid on a random multigraph intersected with a partition matroid (p = 2)."""
    rng = _rng(seed)
    ids = list(range(n))
    edges = {}
    for e in ids:
        u, v = rng.choice(vertices, size=2, replace=False)
        edges[e] = (int(u), int(v))
    gm = GraphicMatroid(range(vertices), edges)
    pm = random_partition(rng, ids, blocks=3)
    f = random_coverage(rng, ids, universe)
    return Instance("coverage-2matroid", f, Matchoid([gm, pm], k=min(gm.rank_hint, pm.rank_hint)))


def matching_matchoid(left: int, right: int, edges) -> Matchoid:
    """One rank-1 uniform matroid per vertex over its incident edges: a 2-matchoid."""
    matroids = []
    for side, count in ((0, left), (1, right)):
        for v in range(count):
            incident = [e for e, uv in edges.items() if uv[side] == v]
            if incident:
                matroids.append(UniformMatroid(incident, 1))
    return Matchoid(matroids, k=min(left, right))


def matching_partitions(left: int, right: int, edges) -> Matchoid:
    """Bipartite matching as two partition matroids (one per side)."""
    sides = []
    for side, count in ((0, left), (1, right)):
        blocks = [([e for e, uv in edges.items() if uv[side] == v], 1) for v in range(count)]
        sides.append(PartitionMatroid([b for b in blocks if b[0]]))
    return Matchoid(sides, k=min(left, right))


def coverage_matching(n: int = 8, seed: int = 0, left: int = 3, right: int = 4, universe: int = 8) -> Instance:
    rng = _rng(seed)
    edges = _bipartite_edges(rng, left, right, n)
    ids = sorted(edges)
    return Instance("coverage-matching", random_coverage(rng, ids, universe), matching_matchoid(left, right, edges))


def modular_matching(left: int = 3, right: int = 3, seed: int = 0, max_weight: int = 9) -> Instance:
    """Complete bipartite graph, modular weights, two partition matroids."""
    rng = _rng(seed)
    edges = {i: (u, v) for i, (u, v) in enumerate((u, v) for u in range(left) for v in range(right))}
    weights = {e: int(rng.integers(1, max_weight + 1)) for e in edges}
    return Instance("modular-matching", Modular(weights), matching_partitions(left, right, edges))


def cut_cardinality(n: int = 6, k: int = 2, seed: int = 0, density: float = 0.4) -> Instance:
    rng = _rng(seed)
    f = random_cut(rng, n, density)
    return Instance("cut-cardinality", f, Matchoid([UniformMatroid(range(n), k)], k=k))


def cut_matchoid(n: int = 8, seed: int = 0, density: float = 0.4) -> Instance:
    """Directed cut over vertices constrained by two random partition matroids (p = 2)."""
    rng = _rng(seed)
    f = random_cut(rng, n, density)
    ids = list(range(n))
    a = random_partition(rng, ids, blocks=3)
    b = random_partition(rng, ids, blocks=3)
    return Instance("cut-matchoid", f, Matchoid([a, b], k=min(a.rank_hint, b.rank_hint)))


def cut_matching(n: int = 8, seed: int = 0, left: int = 3, right: int = 3) -> Instance:
    """Directed cut whose vertices are the edges of a bipartite graph, under the matching 2-matchoid."""
    rng = _rng(seed)
    edges = _bipartite_edges(rng, left, right, n)
    return Instance("cut-matching", random_cut(rng, len(edges)), matching_matchoid(left, right, edges))


GENERATORS = {
    "coverage-uniform": coverage_uniform,
    "coverage-partition": coverage_partition,
    "coverage-2matroid": coverage_2matroid,
    "coverage-matching": coverage_matching,
    "modular-matching": modular_matching,
    "cut-cardinality": cut_cardinality,
    "cut-matchoid": cut_matchoid,
    "cut-matching": cut_matching,
}


def generate(kind: str, seed: int = 0, **size) -> Instance:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown instance kind {kind!r}; choose from {sorted(GENERATORS)}") from None
    return gen(seed=seed, **size)
