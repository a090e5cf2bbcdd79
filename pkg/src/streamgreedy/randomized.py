"""Buffer-randomized streaming greedy for non-monotone objectives.

The buffer sits upstream of a :class:`~streamgreedy.greedy.StreamingGreedy`
instance: good elements wait in the buffer, and each time it fills one of
them is drawn uniformly and committed. Drawing uses numpy's PCG64 generator
and ``Generator.integers(K)`` (Lemire's bounded-integer method), so a seed
reproduces the same run on every platform.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .greedy import Assessment, GreedyParams, ProtocolViolation, StreamingGreedy, TraceEvent
from .ground import SubmodularOracle, Value
from .matchoid import Matchoid, UniformMatroid
from .offline import EXACT, OfflineSolver
from .result import RunResult, best_of
from .state import InvariantError, SolutionState


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def matchoid_buffer_size(k: int, epsilon) -> int:
    """ceil(4k / eps^2)."""
    return math.ceil(Fraction(4 * k) / Fraction(epsilon) ** 2)


def cardinality_buffer_size(k: int, epsilon) -> int:
    """ceil(k / eps)."""
    return math.ceil(Fraction(k) / Fraction(epsilon))


class RandomizedStreamingGreedy:
    """Randomized buffer in front of a deterministic streaming greedy instance.

    Every buffered element carries its latest assessment against the inner
    solution. The inner state only changes on a commit, and each commit is
    followed by a refilter that re-assesses the whole buffer, so the stored
    assessment of a drawn element is always current. Commit checks that and
    raises :class:`InvariantError` otherwise.
    """

    def __init__(
        self,
        m: Matchoid,
        oracle: SubmodularOracle,
        params: GreedyParams,
        K: int,
        seed=0,
        offline: OfflineSolver = EXACT,
        on_mutation: Optional[Callable[[SolutionState], None]] = None,
        prefer_last: bool = False,
    ):
        if K < 1:
            raise ValueError("buffer capacity K must be at least 1")
        self.m = m
        self.oracle = oracle
        self.params = params
        self.K = K
        self.rng = make_rng(seed)
        self.offline = offline
        self.inner = StreamingGreedy(m, oracle, params, on_mutation=on_mutation, prefer_last=prefer_last)
        self.buffer: List[int] = []
        self._assessed: Dict[int, Tuple[int, Assessment]] = {}
        self.selections = 0
        self.evictions = 0
        self.buffer_peak = 0
        self._seen = set()

    @property
    def state(self) -> SolutionState:
        return self.inner.state

    @property
    def trace(self) -> List[TraceEvent]:
        return self.inner.trace

    def _version(self):
        return len(self.inner.state.taken_log)

    def process(self, e: int) -> None:
        if e in self._seen:
            raise ProtocolViolation(f"element {e} delivered twice to the same instance")
        self._seen.add(e)
        a = self.inner.assess(e)
        if a.accepted:
            self.buffer.append(e)
            self._assessed[e] = (self._version(), a)
            self.buffer_peak = max(self.buffer_peak, len(self.buffer))
        else:
            self.inner.reject(e)
        if len(self.buffer) == self.K:
            self._select()

    def _select(self):
        x = self.buffer.pop(int(self.rng.integers(len(self.buffer))))
        version, a = self._assessed.pop(x)
        if version != self._version() or not a.accepted:
            raise InvariantError(f"drawn element {x} is no longer good against the current solution")
        self.inner._mark_seen(x)
        self.inner._commit(x, a.candidates, a.value_with_e)
        self.selections += 1
        kept = []
        for y in self.buffer:
            b = self.inner.assess(y)
            if b.accepted:
                kept.append(y)
                self._assessed[y] = (self._version(), b)
            else:
                del self._assessed[y]
                self.inner.reject(y)
                self.evictions += 1
        self.buffer = kept

    def retained(self) -> int:
        return len(self.inner.state) + len(self.buffer)

    def taken(self) -> List[int]:
        return self.inner.taken()

    def finish(self) -> RunResult:
        offline_set = self.offline(self.buffer, self.m, self.oracle)
        return best_of(
            {
                "stream": (self.inner.solution, self.inner.value),
                "offline": (offline_set, self.oracle.eval(offline_set)),
            },
            stats={
                "selections": self.selections,
                "evictions": self.evictions,
                "final_buffer": len(self.buffer),
                "buffer_peak": self.buffer_peak,
                "taken": len(self.taken()),
            },
        )


def run_randomized(
    stream: Iterable[int],
    m: Matchoid,
    params: GreedyParams,
    oracle: SubmodularOracle,
    K: int,
    seed=0,
    offline: OfflineSolver = EXACT,
    **kwargs,
) -> Tuple[frozenset, RunResult, RandomizedStreamingGreedy]:
    alg = RandomizedStreamingGreedy(m, oracle, params, K, seed=seed, offline=offline, **kwargs)
    for e in stream:
        alg.process(e)
    result = alg.finish()
    return result.solution, result, alg


class RandomizedCardinalityGreedy:
    """The infinite-beta specialization for a single cardinality constraint.

    While fewer than k elements are held, an element whose marginal exceeds
    ``alpha`` strictly is buffered; draws only ever add, never exchange.
    """

    def __init__(
        self,
        k: int,
        oracle: SubmodularOracle,
        alpha: Value,
        K: int,
        seed=0,
        offline: OfflineSolver = EXACT,
        on_mutation: Optional[Callable[[SolutionState], None]] = None,
    ):
        if K < 1:
            raise ValueError("buffer capacity K must be at least 1")
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self.oracle = oracle
        self.alpha = alpha
        self.K = K
        self.rng = make_rng(seed)
        self.offline = offline
        self.state = SolutionState(oracle, on_mutation=on_mutation)
        self.buffer: List[int] = []
        self.trace: List[TraceEvent] = []
        self.evicted: List[int] = []
        self.selections = 0
        self.buffer_peak = 0
        self._seen = set()

    def process(self, e: int) -> None:
        if e in self._seen:
            raise ProtocolViolation(f"element {e} delivered twice to the same instance")
        self._seen.add(e)
        if len(self.state) < self.k and self.state.marginal(e) > self.alpha:
            self.buffer.append(e)
            self.buffer_peak = max(self.buffer_peak, len(self.buffer))
        else:
            self.trace.append(TraceEvent(e, False, ()))
        if len(self.buffer) == self.K:
            x = self.buffer.pop(int(self.rng.integers(len(self.buffer))))
            self.state.add(x)
            self.trace.append(TraceEvent(x, True, ()))
            self.selections += 1
            kept = []
            for y in self.buffer:
                if self.state.marginal(y) > self.alpha:
                    kept.append(y)
                else:
                    self.evicted.append(y)
                    self.trace.append(TraceEvent(y, False, ()))
            self.buffer = kept

    @property
    def solution(self) -> frozenset:
        return self.state.member_set

    def retained(self) -> int:
        return len(self.state) + len(self.buffer)

    def taken(self) -> List[int]:
        return self.state.taken()

    def buffer_matchoid(self) -> Matchoid:
        return Matchoid([UniformMatroid(self.buffer, self.k)], k=self.k)

    def finish(self) -> RunResult:
        offline_set = self.offline(self.buffer, self.buffer_matchoid(), self.oracle) if self.buffer else frozenset()
        return best_of(
            {
                "stream": (self.state.member_set, self.state.current_value),
                "offline": (offline_set, self.oracle.eval(offline_set)),
            },
            stats={
                "selections": self.selections,
                "evictions": len(self.evicted),
                "final_buffer": len(self.buffer),
                "buffer_peak": self.buffer_peak,
                "taken": len(self.taken()),
            },
        )


def run_randomized_cardinality(
    stream: Iterable[int],
    k: int,
    alpha: Value,
    K: int,
    seed,
    oracle: SubmodularOracle,
    offline: OfflineSolver = EXACT,
    **kwargs,
) -> Tuple[frozenset, RunResult, RandomizedCardinalityGreedy]:
    alg = RandomizedCardinalityGreedy(k, oracle, alpha, K, seed=seed, offline=offline, **kwargs)
    for e in stream:
        alg.process(e)
    result = alg.finish()
    return result.solution, result, alg
