"""Ground-set elements, value oracles and a small library of exact set functions.

Every function in the library is integer valued so that identities such as
``f(S) == sum of incremental values`` can be checked with ``==``.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

Value = Union[int, Fraction]

#: Largest ground set :func:`verify_submodular` will enumerate by default.
EXHAUSTIVE_LIMIT = 12


class ExhaustiveLimitError(ValueError):
    """Raised when a brute-force routine is asked to enumerate too much."""


class Element(NamedTuple):
    """A ground-set member as delivered by a stream: its id and arrival index."""

    id: int
    stream_pos: int


class SubmodularOracle:
    """Value-oracle contract. Subclasses implement :meth:`_eval` on frozensets of ids."""

    is_monotone = False

    def eval(self, items: Iterable[Hashable]) -> Value:
        return self._eval(frozenset(items))

    __call__ = eval

    def _eval(self, items: frozenset) -> Value:
        raise NotImplementedError

    @property
    def domain(self) -> frozenset:
        """Ids the function is defined over."""
        raise NotImplementedError


class WeightedCoverage(SubmodularOracle):
    """f(S) = total weight of universe items covered by the sets indexed by S."""

    is_monotone = True

    def __init__(self, sets: Mapping[int, Iterable[Hashable]], universe_weights: Optional[Mapping[Hashable, int]] = None):
        self.sets = {int(e): frozenset(items) for e, items in sets.items()}
        universe = sorted(set().union(*self.sets.values()), key=repr) if self.sets else []
        if universe_weights is None:
            universe_weights = {u: 1 for u in universe}
        missing = [u for u in universe if u not in universe_weights]
        if missing:
            raise ValueError(f"universe items without weight: {missing}")
        self.universe_weights = dict(universe_weights)
        # bitmask per element; item weights by bit index
        self._bit = {u: i for i, u in enumerate(universe)}
        self._weights = [int(self.universe_weights[u]) for u in universe]
        if any(w < 0 for w in self._weights):
            raise ValueError("coverage weights must be non-negative")
        self._mask = {e: sum(1 << self._bit[u] for u in items) for e, items in self.sets.items()}

    @property
    def domain(self):
        return frozenset(self.sets)

    def _eval(self, items):
        mask = 0
        for e in items:
            mask |= self._mask[e]
        total = 0
        w = self._weights
        while mask:
            low = mask & -mask
            total += w[low.bit_length() - 1]
            mask ^= low
        return total

    def to_spec(self):
        return {
            "type": "coverage",
            "universe_weights": {str(u): w for u, w in self.universe_weights.items()},
            "sets": {str(e): sorted(items, key=repr) for e, items in sorted(self.sets.items())},
        }


class DirectedCut(SubmodularOracle):
    """f(S) = total weight of arcs leaving S. Non-monotone, non-negative."""

    is_monotone = False

    def __init__(self, vertices: Iterable[int], arcs: Iterable[Tuple[int, int, int]]):
        self.vertices = frozenset(int(v) for v in vertices)
        self.arcs = [(int(u), int(v), int(w)) for u, v, w in arcs]
        for u, v, w in self.arcs:
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"arc ({u}, {v}) references an unknown vertex")
            if w < 0:
                raise ValueError("cut weights must be non-negative")
        self._out: Dict[int, List[Tuple[int, int]]] = {v: [] for v in self.vertices}
        for u, v, w in self.arcs:
            self._out[u].append((v, w))

    @property
    def domain(self):
        return self.vertices

    def _eval(self, items):
        return sum(w for u in items for v, w in self._out[u] if v not in items)

    def to_spec(self):
        return {"type": "cut", "vertices": sorted(self.vertices), "arcs": [list(a) for a in self.arcs]}


class Modular(SubmodularOracle):
    """f(S) = sum of element weights."""

    def __init__(self, weights: Mapping[int, Value]):
        self.weights = {int(e): w for e, w in weights.items()}
        self.is_monotone = all(w >= 0 for w in self.weights.values())

    @property
    def domain(self):
        return frozenset(self.weights)

    def _eval(self, items):
        return sum((self.weights[e] for e in items), 0)

    def to_spec(self):
        return {"type": "modular", "weights": {str(e): w for e, w in sorted(self.weights.items())}}


class FunctionOracle(SubmodularOracle):
    """Adapter for a plain callable; used in tests for deliberately broken functions."""

    def __init__(self, fn, domain: Iterable[int], is_monotone: bool = False):
        self._fn = fn
        self._domain = frozenset(domain)
        self.is_monotone = is_monotone

    @property
    def domain(self):
        return self._domain

    def _eval(self, items):
        return self._fn(items)


class Contracted(SubmodularOracle):
    """The contraction f_Z(A) = f(Z | A) - f(Z)."""

    def __init__(self, inner: SubmodularOracle, base: Iterable[int]):
        self.inner = inner
        self.base = frozenset(base)
        self._base_value = inner.eval(self.base)
        self.is_monotone = inner.is_monotone

    @property
    def domain(self):
        return self.inner.domain

    def _eval(self, items):
        return self.inner.eval(self.base | items) - self._base_value


class InstrumentedOracle(SubmodularOracle):
    """Counts evaluations reaching ``inner``; optionally memoizes by sorted id tuple.

    Counters are guarded by a lock so several algorithm instances may share one.
    """

    def __init__(self, inner: SubmodularOracle, memoize: bool = False):
        self.inner = inner
        self.is_monotone = inner.is_monotone
        self.memoize = memoize
        self.call_count = 0
        self.cache_hits = 0
        self._cache: Dict[Tuple, Value] = {}
        self._lock = threading.Lock()

    @property
    def domain(self):
        return self.inner.domain

    def _eval(self, items):
        if self.memoize:
            key = tuple(sorted(items))
            with self._lock:
                if key in self._cache:
                    self.cache_hits += 1
                    return self._cache[key]
        value = self.inner._eval(items)
        with self._lock:
            self.call_count += 1
            if self.memoize:
                self._cache[tuple(sorted(items))] = value
        return value

    def reset(self):
        with self._lock:
            self.call_count = 0
            self.cache_hits = 0
            self._cache.clear()


def marginal(oracle: SubmodularOracle, base: Iterable[int], e: int) -> Value:
    """f(base + e) - f(base)."""
    base = frozenset(base)
    if e in base:
        raise ValueError(f"marginal precondition violated: element {e} already in base")
    return oracle.eval(base | {e}) - oracle.eval(base)


def _subsets(ground: Sequence[int]):
    for r in range(len(ground) + 1):
        for combo in itertools.combinations(ground, r):
            yield frozenset(combo)


def verify_submodular(oracle: SubmodularOracle, ground: Iterable[int], limit: int = EXHAUSTIVE_LIMIT) -> bool:
    """Exhaustively check f(A | B) + f(A & B) <= f(A) + f(B) over all pairs of subsets of ``ground``."""
    ground = sorted(set(ground))
    if len(ground) > limit:
        raise ExhaustiveLimitError(f"exhaustive limit exceeded: {len(ground)} > {limit} elements")
    values = {s: oracle.eval(s) for s in _subsets(ground)}
    subsets = list(values)
    for i, a in enumerate(subsets):
        fa = values[a]
        for b in subsets[i + 1:]:
            if values[a | b] + values[a & b] > fa + values[b]:
                return False
    return True


def function_from_spec(spec: Mapping) -> SubmodularOracle:
    """Build a library function from its JSON description."""
    kind = spec.get("type")
    if kind == "coverage":
        sets = {int(e): items for e, items in spec["sets"].items()}
        weights = spec.get("universe_weights")
        if weights is not None:
            # JSON keys are strings; universe items in "sets" may be ints or strings
            items = set().union(*map(set, sets.values())) if sets else set()
            lookup = {str(u): w for u, w in weights.items()}
            weights = {u: int(lookup[str(u)]) for u in items if str(u) in lookup}
        return WeightedCoverage(sets, weights)
    if kind == "cut":
        return DirectedCut(spec["vertices"], spec["arcs"])
    if kind == "modular":
        return Modular({int(e): _int_or_fraction(w) for e, w in spec["weights"].items()})
    raise ValueError(f"unknown function type: {kind!r}")


def _int_or_fraction(w):
    if isinstance(w, dict):
        return Fraction(w["num"], w["den"])
    if isinstance(w, float):
        return Fraction(w)
    return int(w)
