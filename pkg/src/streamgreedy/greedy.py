"""Deterministic single-pass threshold-exchange greedy."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, NamedTuple, Optional, Tuple, Union

from .ground import SubmodularOracle, Value
from .matchoid import Matchoid, exchange_candidates
from .result import RunResult
from .state import InvariantError, SolutionState

INFINITE_BETA = math.inf


class ProtocolViolation(RuntimeError):
    """An algorithm instance saw the same element twice."""


@dataclass(frozen=True)
class GreedyParams:
    """``alpha`` is the additive threshold, ``beta`` the multiplicative slack."""

    alpha: Value = 0
    beta: Union[Value, float] = 1

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if isinstance(self.alpha, float):
            object.__setattr__(self, "alpha", Fraction(self.alpha))
        if isinstance(self.beta, float) and not math.isinf(self.beta):
            object.__setattr__(self, "beta", Fraction(self.beta))

    @property
    def beta_is_infinite(self) -> bool:
        return isinstance(self.beta, float) and math.isinf(self.beta)


class TraceEvent(NamedTuple):
    element: int
    accepted: bool
    candidates: Tuple[int, ...]


def _threshold(params: GreedyParams, candidate_weight: Value, has_candidates: bool):
    if params.beta_is_infinite:
        return None if has_candidates else params.alpha
    return params.alpha + (1 + params.beta) * candidate_weight


class Assessment(NamedTuple):
    accepted: bool
    candidates: frozenset
    gain: Value
    value_with_e: Value


def assess(
    state: SolutionState,
    e: int,
    m: Matchoid,
    params: GreedyParams,
    prefer_last: bool = False,
) -> Assessment:
    """Evaluate the accept condition for ``e`` against the current state (read-only).

    With infinite ``beta`` an element needing any exchange is refused.
    """
    candidates = exchange_candidates(m, state.members, e, state.nu, prefer_last=prefer_last)
    with_e = state.oracle.eval(state.member_set | {e})
    gain = with_e - state.current_value
    threshold = _threshold(params, sum((state.nu[c] for c in candidates), 0), bool(candidates))
    return Assessment(threshold is not None and gain >= threshold, candidates, gain, with_e)


def accept_test(state, e, m, params, prefer_last=False) -> Tuple[bool, frozenset]:
    a = assess(state, e, m, params, prefer_last)
    return a.accepted, a.candidates


def is_good(state, e, m, params, prefer_last=False) -> bool:
    return assess(state, e, m, params, prefer_last).accepted


class StreamingGreedy:
    """One running instance; feed it elements with :meth:`process`.

    ``on_mutation`` is called with the state after every exchange, which is
    how the test-suite checks bookkeeping invariants mid-run.
    """

    def __init__(
        self,
        m: Matchoid,
        oracle: SubmodularOracle,
        params: GreedyParams = GreedyParams(),
        on_mutation: Optional[Callable[[SolutionState], None]] = None,
        prefer_last: bool = False,
    ):
        self.m = m
        self.oracle = oracle
        self.params = params
        self.state = SolutionState(oracle, on_mutation=on_mutation)
        self.trace: List[TraceEvent] = []
        self.prefer_last = prefer_last
        self._seen = set()

    def _mark_seen(self, e):
        if e in self._seen:
            raise ProtocolViolation(f"element {e} delivered twice to the same instance")
        self._seen.add(e)

    def assess(self, e: int) -> Assessment:
        return assess(self.state, e, self.m, self.params, prefer_last=self.prefer_last)

    def process(self, e: int) -> bool:
        """Run the accept test on ``e`` and perform the exchange if it passes."""
        self._mark_seen(e)
        a = self.assess(e)
        if a.accepted:
            self._commit(e, a.candidates, a.value_with_e)
        else:
            self.trace.append(TraceEvent(e, False, ()))
        return a.accepted

    def reject(self, e: int) -> None:
        """Record an element known to fail the accept test without re-evaluating it."""
        self._mark_seen(e)
        self.trace.append(TraceEvent(e, False, ()))

    def _commit(self, e, candidates, with_e):
        self.state.apply_exchange(e, candidates, value_with_e=with_e)
        if len(self.state) > self.m.k:
            raise InvariantError(f"solution size {len(self.state)} exceeds rank bound k={self.m.k}")
        if not self.m.is_independent(self.state.members):
            raise InvariantError("exchange produced a dependent set")
        self.trace.append(TraceEvent(e, True, tuple(sorted(candidates))))

    @property
    def solution(self) -> frozenset:
        return self.state.member_set

    @property
    def value(self) -> Value:
        return self.state.current_value

    def taken(self) -> List[int]:
        return self.state.taken()

    def retained(self) -> int:
        return len(self.state)

    def finish(self) -> RunResult:
        return RunResult(
            self.solution,
            self.value,
            "stream",
            candidates={"stream": (self.solution, self.value)},
            stats={"taken": len(self.state.taken_log)},
        )


def run_streaming_greedy(
    stream: Iterable[int],
    m: Matchoid,
    params: GreedyParams,
    oracle: SubmodularOracle,
    **kwargs,
) -> Tuple[frozenset, StreamingGreedy]:
    """Single pass over ``stream``; returns the final set and the instance (state, trace)."""
    g = StreamingGreedy(m, oracle, params, **kwargs)
    for e in stream:
        g.process(e)
    return g.solution, g
