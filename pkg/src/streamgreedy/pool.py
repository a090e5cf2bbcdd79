"""Single-pass threshold guessing: one algorithm instance per alpha on a geometric grid.

The grid tracks the best singleton value seen so far, f(z). Instances whose
alpha falls below the grid are dropped; new grid points get fresh instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from .ground import SubmodularOracle, Value
from .offline import E_CONST
from .result import RunResult


@dataclass(frozen=True)
class AlphaGrid:
    """Powers of ``base`` inside [low_coef * f(z), high_coef * f(z)]."""

    base: Fraction
    low_coef: Fraction
    high_coef: Fraction

    def points(self, fz: Value) -> List[Fraction]:
        if fz <= 0:
            return []
        low, high = self.low_coef * fz, self.high_coef * fz
        i = math.floor(math.log(float(low)) / math.log(float(self.base)))
        # the float estimate may be off by one either way
        while Fraction(self.base) ** i >= low:
            i -= 1
        while Fraction(self.base) ** i < low:
            i += 1
        out = []
        while Fraction(self.base) ** i <= high:
            out.append(Fraction(self.base) ** i)
            i += 1
        return out

    def max_points(self) -> int:
        """Most grid points any f(z) can produce: floor(log_base(high / low)) + 1."""
        ratio = self.high_coef / self.low_coef
        j, power = 0, Fraction(self.base)
        while power <= ratio:
            j += 1
            power *= self.base
        return j + 1


def matchoid_grid(epsilon, k: int) -> AlphaGrid:
    """Powers of two in [eps f(z) / 4k, eps f(z) / 2]."""
    eps = Fraction(epsilon)
    return AlphaGrid(Fraction(2), eps / (4 * k), eps / 2)


def cardinality_grid(epsilon, k: int) -> AlphaGrid:
    """Powers of (1 + eps) covering every alpha with (1-eps) OPT <= (2+e) k alpha <= (1+eps) OPT."""
    eps = Fraction(epsilon)
    return AlphaGrid(1 + eps, (1 - eps) / ((2 + E_CONST) * k), (1 + eps) / (2 + E_CONST))


def sub_seed(master: int, alpha: Fraction) -> np.random.Generator:
    """Independent generator per (master seed, alpha), unaffected by pool composition."""
    alpha = Fraction(alpha)
    seq = np.random.SeedSequence([int(master), alpha.numerator, alpha.denominator])
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class InstanceRecord:
    alpha: Fraction
    created_at: int
    retired_at: Optional[int] = None
    reason: Optional[str] = None
    value_at_retirement: Optional[Value] = None
    earlier_max_singleton: Value = 0


@dataclass
class PoolReport:
    result: RunResult
    best_alpha: Optional[Fraction]
    outcomes: Dict[Fraction, Value]
    records: List[InstanceRecord]
    trajectory: List[dict]
    peak_live: int
    peak_retained: int
    z: Optional[int]
    fz: Value
    singleton_log: List[Value] = field(default_factory=list)

    def unsafe_creations(self) -> List[InstanceRecord]:
        """Instances created after an earlier element already had f(e) >= alpha."""
        return [r for r in self.records if r.created_at > 0 and r.earlier_max_singleton >= r.alpha]


class InstancePool:
    """Runs ``factory(alpha)`` instances for every alpha in the live grid.

    ``k`` feeds the eager kill rule: an instance whose taken set exceeds
    ``k * f(z) / alpha`` cannot have the right alpha and is dropped.
    ``on_step`` is called after each element with the pool, for audits.
    """

    def __init__(
        self,
        factory: Callable[[Fraction], object],
        grid: AlphaGrid,
        oracle: SubmodularOracle,
        k: int,
        on_step: Optional[Callable[["InstancePool"], None]] = None,
    ):
        self.factory = factory
        self.grid = grid
        self.oracle = oracle
        self.k = k
        self.on_step = on_step
        self.live: Dict[Fraction, object] = {}
        self.records: Dict[Fraction, InstanceRecord] = {}
        self.retired: List[InstanceRecord] = []
        self.z: Optional[int] = None
        self.fz: Value = 0
        self.position = 0
        self.singleton_log: List[Value] = []
        self.trajectory: List[dict] = []
        self.peak_live = 0
        self.peak_retained = 0

    def retained(self) -> int:
        return sum(inst.retained() for inst in self.live.values()) + (1 if self.z is not None else 0)

    def step(self, e: int) -> None:
        fe = self.oracle.eval(frozenset([e]))
        earlier_max = self.fz
        if fe > self.fz:
            self.z, self.fz = e, fe
            grid = self.grid.points(self.fz)
            wanted = set(grid)
            for alpha in sorted(self.live):
                if alpha not in wanted:
                    self._retire(alpha, "below grid")
            created = []
            for alpha in grid:
                if alpha not in self.live and alpha not in self.records:
                    self.live[alpha] = self.factory(alpha)
                    self.records[alpha] = InstanceRecord(alpha, self.position, earlier_max_singleton=earlier_max)
                    created.append(alpha)
            self.trajectory.append(
                {"position": self.position, "z": e, "fz": fe, "live": sorted(self.live), "created": created}
            )
        self.singleton_log.append(fe)
        for alpha, inst in list(self.live.items()):
            inst.process(e)
            if len(inst.taken()) > self.k * self.fz / alpha or not getattr(inst, "alive", True):
                self._retire(alpha, "budget")
        self.position += 1
        self.peak_live = max(self.peak_live, len(self.live))
        self.peak_retained = max(self.peak_retained, self.retained())
        if self.on_step is not None:
            self.on_step(self)

    def _retire(self, alpha, reason):
        inst = self.live.pop(alpha)
        rec = self.records[alpha]
        rec.retired_at, rec.reason = self.position, reason
        state = getattr(inst, "state", None)
        rec.value_at_retirement = state.current_value if state is not None else None
        self.retired.append(rec)

    def finish(self) -> PoolReport:
        outcomes: Dict[Fraction, Value] = {}
        best: Optional[RunResult] = None
        best_alpha = None
        for alpha in sorted(self.live):
            res = self.live[alpha].finish()
            outcomes[alpha] = res.value
            if best is None or res.value > best.value:
                best, best_alpha = res, alpha
        if best is None:
            empty = frozenset()
            v = self.oracle.eval(empty)
            best = RunResult(empty, v, "empty", {"empty": (empty, v)})
        return PoolReport(
            result=best,
            best_alpha=best_alpha,
            outcomes=outcomes,
            records=sorted(self.records.values(), key=lambda r: r.alpha),
            trajectory=self.trajectory,
            peak_live=self.peak_live,
            peak_retained=self.peak_retained,
            z=self.z,
            fz=self.fz,
            singleton_log=list(self.singleton_log),
        )

    def run(self, stream) -> PoolReport:
        for e in stream:
            self.step(e)
        return self.finish()


pool_step = InstancePool.step
pool_finish = InstancePool.finish
