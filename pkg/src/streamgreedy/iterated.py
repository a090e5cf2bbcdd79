"""Deterministic pipeline of two streaming greedy instances plus an offline pass."""
from __future__ import annotations

from typing import Callable, Iterable, List, Optional, Tuple

from .greedy import GreedyParams, ProtocolViolation, StreamingGreedy
from .ground import SubmodularOracle, Value
from .matchoid import Matchoid
from .offline import EXACT, OfflineSolver
from .result import RunResult, best_of
from .state import SolutionState


class BudgetExceeded(RuntimeError):
    """The first instance took more elements than its alpha allows."""


class IteratedStreamingGreedy:
    """Instance one runs at (alpha, beta); whatever it rejects outright goes to
    instance two at (0, beta); the offline solver sees instance one's taken set.

    ``budget`` caps ``|U1|``: once exceeded the instance is marked dead and
    ignores the rest of the stream.
    """

    def __init__(
        self,
        m: Matchoid,
        oracle: SubmodularOracle,
        alpha: Value = 0,
        beta: Value = 1,
        offline: OfflineSolver = EXACT,
        budget: Optional[float] = None,
        on_mutation: Optional[Callable[[SolutionState], None]] = None,
    ):
        self.m = m
        self.oracle = oracle
        self.offline = offline
        self.first = StreamingGreedy(m, oracle, GreedyParams(alpha, beta), on_mutation=on_mutation)
        self.second = StreamingGreedy(m, oracle, GreedyParams(0, beta), on_mutation=on_mutation)
        self.budget = budget
        self.alive = True
        self.forwarded: List[int] = []
        self._seen = set()

    def process(self, e: int) -> None:
        if not self.alive:
            return
        if e in self._seen:
            raise ProtocolViolation(f"element {e} delivered twice to the same instance")
        self._seen.add(e)
        if not self.first.process(e):
            self.forwarded.append(e)
            self.second.process(e)
        elif self.budget is not None and len(self.first.state.taken_log) > self.budget:
            self.alive = False

    def taken_first(self) -> List[int]:
        return self.first.taken()

    def taken(self) -> List[int]:
        return self.first.taken()

    def retained(self) -> int:
        # U1 ids are held until the offline pass
        return len(self.first.state.taken_log) + len(self.second.state)

    def finish(self) -> RunResult:
        u1 = self.taken_first()
        s3 = self.offline(u1, self.m, self.oracle)
        return best_of(
            {
                "S1": (self.first.solution, self.first.value),
                "S2": (self.second.solution, self.second.value),
                "S3": (s3, self.oracle.eval(s3)),
            },
            stats={"taken_first": len(u1), "forwarded": len(self.forwarded), "alive": self.alive},
        )


def run_iterated(
    stream: Iterable[int],
    m: Matchoid,
    alpha: Value,
    beta: Value,
    offline: OfflineSolver,
    oracle: SubmodularOracle,
    two_pass: bool = False,
    **kwargs,
) -> Tuple[frozenset, RunResult, IteratedStreamingGreedy]:
    """Pipelined single pass by default. ``two_pass`` replays the stream for
    instance two after instance one has finished (debug only; same output)."""
    alg = IteratedStreamingGreedy(m, oracle, alpha, beta, offline, **kwargs)
    if not two_pass:
        for e in stream:
            alg.process(e)
        result = alg.finish()
        return result.solution, result, alg
    elements = list(stream)
    for e in elements:
        alg._seen.add(e)
        alg.first.process(e)
    taken = set(alg.taken_first())
    for e in elements:
        if e not in taken:
            alg.forwarded.append(e)
            alg.second.process(e)
    result = alg.finish()
    result.stats["two_pass"] = True
    return result.solution, result, alg
