"""The running solution S with cached incremental values and exchange ledgers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .ground import SubmodularOracle, Value


class InvariantError(AssertionError):
    """Internal bookkeeping disagrees with a fresh evaluation of the oracle."""


@dataclass(frozen=True)
class TakeRecord:
    element: int
    gain: Value
    candidates: Tuple[int, ...]


@dataclass(frozen=True)
class ExitRecord:
    element: int
    exit_value: Value
    replacement: int


def rational_json(x: Value):
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def incremental_value(
    oracle: SubmodularOracle,
    members: Sequence[int],
    e: int,
    order: Optional[Mapping[int, int]] = None,
) -> Value:
    """Marginal of ``e`` over the members of S that precede it.

    Precedence comes from ``order`` when given, otherwise from position in
    ``members``; an ``e`` outside S with no ``order`` counts as the newest.
    """
    if order is not None:
        prefix = [s for s in members if order[s] < order[e]]
    elif e in members:
        prefix = list(members[: list(members).index(e)])
    else:
        prefix = list(members)
    base = frozenset(prefix)
    return oracle.eval(base | {e}) - oracle.eval(base)


class SolutionState:
    """An ordered independent set with prefix values f(S_1), ..., f(S_n).

    Members are kept in delivery order. New elements always arrive last, so
    an insertion appends; a deletion invalidates the prefix values from the
    earliest deleted position onward, which are recomputed with one oracle
    call per surviving suffix member.
    """

    def __init__(self, oracle: SubmodularOracle, on_mutation: Optional[Callable[["SolutionState"], None]] = None):
        self.oracle = oracle
        self.members: List[int] = []
        self.empty_value = oracle.eval(frozenset())
        self._prefix: List[Value] = [self.empty_value]
        self.nu: Dict[int, Value] = {}
        self.taken_log: List[TakeRecord] = []
        self.exit_log: List[ExitRecord] = []
        self.delivery_index: Dict[int, int] = {}
        self._next_index = 0
        self.on_mutation = on_mutation

    @property
    def current_value(self) -> Value:
        return self._prefix[-1]

    @property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, e):
        return e in self.nu

    def marginal(self, e: int) -> Value:
        """f_S(e), using the cached f(S)."""
        return self.oracle.eval(self.member_set | {e}) - self.current_value

    def apply_exchange(self, e: int, candidates: Iterable[int], value_with_e: Optional[Value] = None) -> Value:
        """S <- S - C + e. Returns the gain f(S after) - f(S before).

        ``value_with_e`` may carry an already computed f(S + e); it is only
        used when C is empty.
        """
        candidates = frozenset(candidates)
        if e in self.nu:
            raise ValueError(f"element {e} is already in the solution")
        if not candidates <= self.nu.keys():
            raise ValueError("exchange candidates must be members of the solution")
        before = self.current_value
        for d in sorted(candidates, key=self.members.index):
            self.exit_log.append(ExitRecord(d, self.nu[d], e))
        if candidates:
            start = min(self.members.index(d) for d in candidates)
            survivors = [s for s in self.members if s not in candidates]
            for d in candidates:
                del self.nu[d]
            del self._prefix[start + 1:]
            self.members = survivors
            prefix_set = set(survivors[:start])
            for s in survivors[start:]:
                prefix_set.add(s)
                self._prefix.append(self.oracle.eval(frozenset(prefix_set)))
                self.nu[s] = self._prefix[-1] - self._prefix[-2]
        if candidates or value_with_e is None:
            value_with_e = self.oracle.eval(self.member_set | {e})
        self.members.append(e)
        self._prefix.append(value_with_e)
        self.nu[e] = self._prefix[-1] - self._prefix[-2]
        self.delivery_index[e] = self._next_index
        self._next_index += 1

        if self.empty_value + sum(self.nu.values()) != self.current_value:
            raise InvariantError("cached incremental values do not sum to f(S)")
        gain = self.current_value - before
        self.taken_log.append(TakeRecord(e, gain, tuple(sorted(candidates))))
        if self.on_mutation is not None:
            self.on_mutation(self)
        return gain

    def add(self, e: int) -> Value:
        return self.apply_exchange(e, ())

    def exit_value_sum(self) -> Value:
        return sum((r.exit_value for r in self.exit_log), 0)

    def taken(self) -> List[int]:
        """U, the elements ever added, reconstructed from the take log."""
        return [r.element for r in self.taken_log]

    def check(self, oracle: Optional[SubmodularOracle] = None) -> None:
        """Recompute every incremental value from scratch and compare.

        ``oracle`` lets tests route these calls through a separate counter.
        """
        oracle = oracle or self.oracle
        fresh_total = oracle.eval(self.member_set)
        if fresh_total != self.current_value:
            raise InvariantError(f"cached f(S)={self.current_value} but f(S)={fresh_total}")
        running = oracle.eval(frozenset())
        for i, s in enumerate(self.members):
            fresh_nu = incremental_value(oracle, self.members, s)
            if fresh_nu != self.nu[s]:
                raise InvariantError(f"stale incremental value for {s}: {self.nu[s]} != {fresh_nu}")
            running += fresh_nu
        if running != fresh_total:
            raise InvariantError("incremental values do not sum to f(S)")
        indices = [self.delivery_index[s] for s in self.members]
        if indices != sorted(indices) or len(set(indices)) != len(indices):
            raise InvariantError("members are not in delivery order")

    def logs_to_json(self) -> dict:
        return {
            "taken_log": [
                {"element": r.element, "gain": rational_json(r.gain), "candidates": list(r.candidates)}
                for r in self.taken_log
            ],
            "exit_log": [
                {"element": r.element, "exit_value": rational_json(r.exit_value), "replacement": r.replacement}
                for r in self.exit_log
            ],
        }
