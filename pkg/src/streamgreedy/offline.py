"""Offline black boxes used to post-process buffers and taken sets."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from .ground import ExhaustiveLimitError, SubmodularOracle, Value
from .matchoid import Matchoid, RestrictedMatroid, UniformMatroid

#: Largest ground the pruned exhaustive search accepts by default.
EXACT_LIMIT = 16
#: e as an exact rational (the closest double), for bound arithmetic.
E_CONST = Fraction(math.e)


def offline_greedy(ground: Iterable[int], m: Matchoid, oracle: SubmodularOracle) -> frozenset:
    """Pick the feasible element of largest positive marginal until none remains.

    Ties go to the smallest id.
    """
    remaining = sorted(set(ground))
    chosen = set()
    value = oracle.eval(frozenset())
    while remaining:
        best, best_gain, best_value = None, 0, None
        for e in remaining:
            if not m.is_independent(chosen | {e}):
                continue
            v = oracle.eval(frozenset(chosen | {e}))
            if v - value > best_gain:
                best, best_gain, best_value = e, v - value, v
        if best is None:
            break
        chosen.add(best)
        value = best_value
        remaining.remove(best)
    return frozenset(chosen)


def offline_random_greedy(
    ground: Iterable[int],
    m: Matchoid,
    oracle: SubmodularOracle,
    seed: int = 0,
    repeats: int = 1,
) -> frozenset:
    """Randomized greedy: each step picks uniformly among the top-k feasible marginals.

    The top-k list is padded with dummy (no-op) entries when fewer than k
    feasible elements remain, and a pick with non-positive marginal adds
    nothing. Runs ``repeats`` times and keeps the best set.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    ground = sorted(set(ground))
    k = m.k
    best_set, best_value = frozenset(), oracle.eval(frozenset())
    for _ in range(repeats):
        chosen = frozenset()
        value = oracle.eval(chosen)
        for _step in range(k):
            scored = []
            for e in ground:
                if e in chosen or not m.is_independent(chosen | {e}):
                    continue
                v = oracle.eval(chosen | {e})
                scored.append((-(v - value), e, v))
            scored.sort()
            top = scored[:k]
            pick = int(rng.integers(k))
            if pick >= len(top):
                continue
            neg_gain, e, v = top[pick]
            if -neg_gain <= 0:
                continue
            chosen = chosen | {e}
            value = v
        if value > best_value:
            best_set, best_value = chosen, value
    return best_set


def exact_bruteforce(
    ground: Iterable[int],
    m: Matchoid,
    oracle: SubmodularOracle,
    limit: int = EXACT_LIMIT,
) -> Tuple[Value, frozenset]:
    """Maximum of f over independent subsets of ``ground``.

    Depth-first over sorted ids, only extending independent sets (downward
    closure makes this complete). The visit order is lexicographic on sorted
    id tuples, so keeping the first strict maximum gives the lexicographically
    smallest optimum.
    """
    ground = sorted(set(ground))
    if len(ground) > limit:
        raise ExhaustiveLimitError(f"exhaustive limit exceeded: {len(ground)} > {limit} elements")
    best_value = oracle.eval(frozenset())
    best_set = frozenset()
    stack = [((), 0)]
    while stack:
        current, start = stack.pop()
        # push children in reverse so the smallest id is explored first
        children = []
        for i in range(start, len(ground)):
            cand = current + (ground[i],)
            if m.is_independent(cand):
                children.append((cand, i + 1))
        for cand, nxt in reversed(children):
            stack.append((cand, nxt))
        if current:
            v = oracle.eval(frozenset(current))
            if v > best_value:
                best_value, best_set = v, frozenset(current)
    return best_value, best_set


def exact_unpruned(ground: Iterable[int], m: Matchoid, oracle: SubmodularOracle, limit: int = 12):
    """Reference enumeration over every subset, for validating the pruned search."""
    ground = sorted(set(ground))
    if len(ground) > limit:
        raise ExhaustiveLimitError(f"exhaustive limit exceeded: {len(ground)} > {limit} elements")
    best = None
    for r in range(len(ground) + 1):
        for combo in itertools.combinations(ground, r):
            if not m.is_independent(combo):
                continue
            v = oracle.eval(frozenset(combo))
            if best is None or v > best[0] or (v == best[0] and combo < best[1]):
                best = (v, combo)
    return best[0], frozenset(best[1])


@dataclass(frozen=True)
class OfflineSolver:
    """A named offline routine plus the ratio gamma attached to it for bound checks."""

    name: str
    gamma: Optional[Value]
    seed: int = 0
    repeats: int = 1

    def __call__(self, ground, m: Matchoid, oracle: SubmodularOracle) -> frozenset:
        ground = list(ground)
        if not ground:
            return frozenset()
        if self.name == "exact":
            return exact_bruteforce(ground, m, oracle)[1]
        if self.name == "greedy":
            return offline_greedy(ground, m, oracle)
        if self.name == "random-greedy":
            return offline_random_greedy(ground, m, oracle, seed=self.seed, repeats=self.repeats)
        raise ValueError(f"unknown offline solver {self.name!r}")

    def with_seed(self, seed: int) -> "OfflineSolver":
        return OfflineSolver(self.name, self.gamma, seed, self.repeats)


def is_cardinality(m: Matchoid) -> bool:
    """True when ``m`` is a single uniform matroid."""
    if len(m.matroids) != 1:
        return False
    inner = m.matroids[0]
    while isinstance(inner, RestrictedMatroid):
        inner = inner.inner
    return isinstance(inner, UniformMatroid)


def default_gamma(name: str, m: Matchoid, monotone: bool) -> Optional[Value]:
    """Ratio assumed for ``name`` on constraint ``m``; None when no guarantee applies."""
    if name == "exact":
        return Fraction(1)
    if name == "greedy":
        return Fraction(1, m.p + 1) if monotone else None
    if name == "random-greedy":
        return 1 / E_CONST if is_cardinality(m) else None
    raise ValueError(f"unknown offline solver {name!r}")


def make_offline(name: str, m: Matchoid, monotone: bool, gamma: Optional[Value] = None, seed: int = 0, repeats: int = 1) -> OfflineSolver:
    if gamma is None:
        gamma = default_gamma(name, m, monotone)
    return OfflineSolver(name, gamma, seed, repeats)


EXACT = OfflineSolver("exact", Fraction(1))
