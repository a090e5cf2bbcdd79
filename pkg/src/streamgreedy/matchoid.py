"""Matroid membership oracles, p-matchoids, and exchange-candidate selection."""
from __future__ import annotations

import itertools
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .ground import ExhaustiveLimitError

MATROID_AXIOM_LIMIT = 10


class UnknownElementError(KeyError):
    pass


class NoFeasibleExchangeError(RuntimeError):
    """A matroid reported S + e dependent but no single swap restores independence."""


class MatroidOracle:
    """Independence oracle over a finite sub-groundset."""

    def __init__(self, ground: Iterable[int]):
        self.ground = frozenset(ground)

    def is_independent(self, items: Iterable[int]) -> bool:
        raise NotImplementedError

    @property
    def rank_hint(self) -> Optional[int]:
        return None

    def restrict(self, keep: Iterable[int]) -> "MatroidOracle":
        return RestrictedMatroid(self, keep)


class RestrictedMatroid(MatroidOracle):
    def __init__(self, inner: MatroidOracle, keep: Iterable[int]):
        super().__init__(inner.ground & frozenset(keep))
        self.inner = inner

    def is_independent(self, items):
        return self.inner.is_independent(items)

    @property
    def rank_hint(self):
        return self.inner.rank_hint


class UniformMatroid(MatroidOracle):
    def __init__(self, ground: Iterable[int], rank: int):
        super().__init__(ground)
        if rank < 0:
            raise ValueError("rank must be non-negative")
        self.rank = rank

    def is_independent(self, items):
        return len(frozenset(items)) <= self.rank

    @property
    def rank_hint(self):
        return min(self.rank, len(self.ground))

    def to_spec(self):
        return {"type": "uniform", "ground": sorted(self.ground), "rank": self.rank}

    def __repr__(self):
        return f"UniformMatroid(n={len(self.ground)}, rank={self.rank})"


class PartitionMatroid(MatroidOracle):
    """Disjoint blocks, each with its own capacity."""

    def __init__(self, blocks: Sequence[Tuple[Iterable[int], int]]):
        self.blocks = [(frozenset(g), int(c)) for g, c in blocks]
        self._block_of: Dict[int, int] = {}
        for i, (g, _) in enumerate(self.blocks):
            for e in g:
                if e in self._block_of:
                    raise ValueError(f"element {e} appears in two partition blocks")
                self._block_of[e] = i
        super().__init__(self._block_of)

    def is_independent(self, items):
        counts: Dict[int, int] = {}
        for e in items:
            b = self._block_of[e]
            counts[b] = counts.get(b, 0) + 1
            if counts[b] > self.blocks[b][1]:
                return False
        return True

    @property
    def rank_hint(self):
        return sum(min(c, len(g)) for g, c in self.blocks)

    def to_spec(self):
        return {
            "type": "partition",
            "blocks": [{"ground": sorted(g), "capacity": c} for g, c in self.blocks],
        }

    def __repr__(self):
        return f"PartitionMatroid(blocks={len(self.blocks)})"


class GraphicMatroid(MatroidOracle):
    """Edges of a multigraph; a set is independent iff it is a forest."""

    def __init__(self, vertices: Iterable, edges: Mapping[int, Tuple]):
        self.vertices = frozenset(vertices)
        self.edges = {int(e): tuple(uv) for e, uv in edges.items()}
        for e, (u, v) in self.edges.items():
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {e} references an unknown vertex")
        super().__init__(self.edges)

    def is_independent(self, items):
        parent: Dict = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != root:
                parent[x], x = root, parent[x]
            return root

        for e in items:
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    @property
    def rank_hint(self):
        # |V| - (number of components) of the full edge set
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        rank = 0
        for u, v in self.edges.values():
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                rank += 1
        return rank

    def to_spec(self):
        return {
            "type": "graphic",
            "vertices": sorted(self.vertices, key=repr),
            "edges": {str(e): list(uv) for e, uv in sorted(self.edges.items())},
        }

    def __repr__(self):
        return f"GraphicMatroid(V={len(self.vertices)}, E={len(self.edges)})"


class PredicateMatroid(MatroidOracle):
    """Wraps an arbitrary independence predicate; it need not satisfy the axioms."""

    def __init__(self, ground: Iterable[int], predicate: Callable[[frozenset], bool]):
        super().__init__(ground)
        self._predicate = predicate

    def is_independent(self, items):
        return self._predicate(frozenset(items))


class Matchoid:
    """A collection of matroids over overlapping grounds.

    ``p`` is the largest number of matroids any element belongs to. ``k``
    bounds the size of every independent set; when omitted it is set to the
    sum of the matroid ranks, which is always a valid bound.
    """

    def __init__(self, matroids: Sequence[MatroidOracle], k: Optional[int] = None):
        self.matroids = list(matroids)
        self.membership: Dict[int, List[int]] = {}
        for ell, m in enumerate(self.matroids):
            for e in sorted(m.ground):
                self.membership.setdefault(e, []).append(ell)
        self.p = max((len(v) for v in self.membership.values()), default=0)
        if k is None:
            hints = [m.rank_hint for m in self.matroids]
            k = sum(hints) if all(h is not None for h in hints) else len(self.membership)
        if k < 1 and self.membership:
            raise ValueError("k must be at least 1")
        self.k = k

    @property
    def ground(self) -> frozenset:
        return frozenset(self.membership)

    def _restriction(self, items: frozenset, ell: int) -> frozenset:
        return items & self.matroids[ell].ground

    def is_independent(self, items: Iterable[int]) -> bool:
        items = frozenset(items)
        touched = set()
        for e in items:
            try:
                touched.update(self.membership[e])
            except KeyError:
                raise UnknownElementError(f"unknown element {e}: not in any matroid ground") from None
        return all(self.matroids[ell].is_independent(self._restriction(items, ell)) for ell in sorted(touched))

    def restrict(self, keep: Iterable[int]) -> "Matchoid":
        keep = frozenset(keep)
        return Matchoid([m.restrict(keep) for m in self.matroids], k=self.k)

    def to_spec(self):
        return {"k": self.k, "matroids": [m.to_spec() for m in self.matroids]}

    def __repr__(self):
        return f"Matchoid(q={len(self.matroids)}, p={self.p}, k={self.k})"


def matchoid_independent(m: Matchoid, items: Iterable[int]) -> bool:
    return m.is_independent(items)


def exchange_candidates(
    m: Matchoid,
    members: Sequence[int],
    e: int,
    nu: Mapping[int, object],
    prefer_last: bool = False,
) -> frozenset:
    """Elements of ``members`` to drop so that ``members - C + e`` stays independent.

    For every matroid containing ``e`` in which ``S + e`` is dependent, the
    swap set ``X = {s : S_l - s + e independent}`` is formed against the
    original S and its minimum-``nu`` member is taken. ``members`` must be in
    solution order; ties go to the earliest member (``prefer_last`` flips
    this, and exists only to show the tie-break does not affect correctness).
    """
    if e not in m.membership:
        raise UnknownElementError(f"unknown element {e}: not in any matroid ground")
    position = {s: i for i, s in enumerate(members)}
    chosen = []
    for ell in m.membership[e]:
        matroid = m.matroids[ell]
        s_ell = [s for s in members if s in matroid.ground]
        s_set = frozenset(s_ell)
        if matroid.is_independent(s_set | {e}):
            continue
        swap = [s for s in s_ell if matroid.is_independent((s_set - {s}) | {e})]
        if not swap:
            raise NoFeasibleExchangeError(f"no feasible exchange for element {e} in matroid {ell}")
        if prefer_last:
            c = min(swap, key=lambda s: (nu[s], -position[s]))
        else:
            c = min(swap, key=lambda s: (nu[s], position[s]))
        chosen.append(c)
    return frozenset(chosen)


def verify_matroid_axioms(oracle: MatroidOracle, limit: int = MATROID_AXIOM_LIMIT) -> bool:
    """Exhaustively check non-emptiness, downward closure and the exchange axiom."""
    ground = sorted(oracle.ground)
    if len(ground) > limit:
        raise ExhaustiveLimitError(f"exhaustive limit exceeded: {len(ground)} > {limit} elements")
    if not oracle.is_independent(frozenset()):
        return False
    independent = []
    for r in range(len(ground) + 1):
        for combo in itertools.combinations(ground, r):
            s = frozenset(combo)
            if oracle.is_independent(s):
                independent.append(s)
                if any(not oracle.is_independent(s - {x}) for x in s):
                    return False
    indep_set = set(independent)
    for a in independent:
        for b in independent:
            if len(a) < len(b) and not any((a | {x}) in indep_set for x in b - a):
                return False
    return True


def matroid_from_spec(spec: Mapping) -> MatroidOracle:
    kind = spec.get("type")
    if kind == "uniform":
        return UniformMatroid([int(e) for e in spec["ground"]], int(spec["rank"]))
    if kind == "partition":
        return PartitionMatroid([([int(e) for e in b["ground"]], int(b["capacity"])) for b in spec["blocks"]])
    if kind == "graphic":
        return GraphicMatroid(spec["vertices"], {int(e): tuple(uv) for e, uv in spec["edges"].items()})
    raise ValueError(f"unknown matroid type: {kind!r}")


def matchoid_from_spec(spec: Mapping) -> Matchoid:
    if "k" not in spec:
        raise ValueError("constraint file must declare the rank bound 'k'")
    return Matchoid([matroid_from_spec(s) for s in spec["matroids"]], k=int(spec["k"]))
