"""Executable checks binding the analysis inequalities to concrete runs.

Every check is an exact comparison on integer-valued functions. A
:class:`LemmaLedger` counts passes and failures per named property; each
failure stores a serializable reproducer, shrunk to a minimal element set
when possible.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .greedy import GreedyParams, StreamingGreedy
from .ground import Contracted, SubmodularOracle
from .instances import GENERATORS, Instance
from .matchoid import Matchoid
from .offline import exact_bruteforce, is_cardinality
from .randomized import RandomizedCardinalityGreedy, RandomizedStreamingGreedy
from .state import InvariantError, SolutionState, incremental_value

DEFAULT_KINDS = ("coverage-uniform", "coverage-partition", "coverage-2matroid", "coverage-matching")


@dataclass
class LemmaLedger:
    passed: Dict[str, int] = field(default_factory=lambda: defaultdict(int))
    failed: Dict[str, int] = field(default_factory=lambda: defaultdict(int))
    failures: List[dict] = field(default_factory=list)

    def record(self, name: str, ok: bool, reproducer: Optional[dict] = None):
        if ok:
            self.passed[name] += 1
        else:
            self.failed[name] += 1
            self.failures.append({"lemma": name, **(reproducer or {})})

    def merge(self, other: "LemmaLedger"):
        for k, v in other.passed.items():
            self.passed[k] += v
        for k, v in other.failed.items():
            self.failed[k] += v
        self.failures.extend(other.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def lemmas(self) -> List[str]:
        return sorted(set(self.passed) | set(self.failed))

    def summary(self) -> Dict[str, Dict[str, int]]:
        return {k: {"passed": self.passed.get(k, 0), "failed": self.failed.get(k, 0)} for k in self.lemmas()}


class MutationWatch:
    """on_mutation hook: fresh recomputation of every incremental value, plus
    non-negativity and monotone growth of each member's cached value."""

    def __init__(self, ledger: LemmaLedger, reproducer: dict, verifier: Optional[SubmodularOracle] = None):
        self.ledger = ledger
        self.reproducer = reproducer
        self.verifier = verifier
        self.last_nu: Dict[int, object] = {}
        self.mutations = 0

    def __call__(self, state: SolutionState):
        self.mutations += 1
        try:
            state.check(self.verifier)
            ok = True
        except InvariantError:
            ok = False
        self.ledger.record("sum-incremental-values", ok, self.reproducer)
        self.ledger.record("nonnegative-incremental-values", all(v >= 0 for v in state.nu.values()), self.reproducer)
        grew = all(state.nu[s] >= self.last_nu[s] for s in state.members if s in self.last_nu)
        self.ledger.record("incremental-values-only-increase", grew, self.reproducer)
        self.last_nu = dict(state.nu)


def _repro(inst: Instance, order, alpha, beta, seed=None, algorithm="greedy", K=None) -> dict:
    out = {
        "algorithm": algorithm,
        "kind": inst.kind,
        "function": inst.oracle.to_spec() if hasattr(inst.oracle, "to_spec") else None,
        "constraint": inst.matchoid.to_spec() if _serializable(inst.matchoid) else None,
        "order": list(order),
        "alpha": str(alpha),
        "beta": str(beta),
    }
    if seed is not None:
        out["seed"] = seed
    if K is not None:
        out["K"] = K
    return out


def _serializable(m: Matchoid) -> bool:
    return all(hasattr(x, "to_spec") for x in m.matroids)


def check_streaming_logs(
    ledger: LemmaLedger,
    state: SolutionState,
    f: SubmodularOracle,
    m: Matchoid,
    params: GreedyParams,
    opt: Optional[object],
    opt_set: Optional[frozenset],
    repro: dict,
    final_buffer: Sequence[int] = (),
    competitors: Sequence[frozenset] = (),
):
    """Post-run inequalities for one streaming greedy state (possibly behind a buffer)."""
    alpha, beta = params.alpha, params.beta
    final = state.member_set
    f_final = state.current_value - state.empty_value
    taken = state.taken()
    u = frozenset(taken)
    p, k = m.p, m.k

    exits_by_replacement = defaultdict(list)
    for r in state.exit_log:
        exits_by_replacement[r.replacement].append(r)

    gains_ok = True
    for rec in state.taken_log:
        lost = sum((x.exit_value for x in exits_by_replacement[rec.element]), 0)
        if not params.beta_is_infinite and rec.gain < alpha + beta * lost:
            gains_ok = False
        if rec.gain < alpha:
            gains_ok = False
    ledger.record("gain-over-incremental-value-lost", gains_ok, repro)
    ledger.record("gains-sum-to-final-value", sum((r.gain for r in state.taken_log), 0) == f_final, repro)

    # candidate sets partition U \ S~
    seen = []
    for rec in state.taken_log:
        seen.extend(rec.candidates)
    ledger.record("candidate-partition", len(seen) == len(set(seen)) and set(seen) == set(u - final), repro)
    ledger.record("taken-distinct", len(taken) == len(u), repro)

    if opt is not None and alpha > 0:
        ledger.record("size-of-tokens", len(u) * alpha <= opt, repro)

    if not params.beta_is_infinite and beta > 0:
        ledger.record("sum-exit-values", state.exit_value_sum() * beta <= f_final - alpha * len(u), repro)
        f_u = f.eval(u) - state.empty_value
        ledger.record("takens-bound", f_u * beta <= (beta + 1) * f_final - alpha * len(u), repro)
        coef = Fraction((1 + beta) ** 2) / beta * p
        buffered = frozenset(final_buffer)
        targets = list(competitors)
        if opt_set is not None:
            targets.append(opt_set)
        for t in targets:
            lhs = f.eval(u | (t - buffered)) - state.empty_value
            ledger.record("takens-union-competitor-bound", lhs <= k * alpha + coef * f_final, repro)


def random_independent_sets(m: Matchoid, ground: Sequence[int], rng, count: int) -> List[frozenset]:
    """Random maximal independent sets built by scanning a shuffled ground."""
    out = []
    for _ in range(count):
        chosen = set()
        for e in rng.permutation(list(ground)):
            e = int(e)
            if m.is_independent(chosen | {e}):
                chosen.add(e)
        out.append(frozenset(chosen))
    return out


def check_static_lemmas(ledger: LemmaLedger, inst: Instance, order: Sequence[int], rng, samples: int = 20):
    """Decreasing incremental values and the contraction inequality on random sets."""
    f = inst.oracle
    pos = {e: i for i, e in enumerate(order)}
    ground = list(order)
    repro = {"kind": inst.kind, "order": list(order)}
    for _ in range(samples):
        t = [e for e in ground if rng.random() < 0.5]
        s = [e for e in t if rng.random() < 0.5]
        e = ground[int(rng.integers(len(ground)))]
        ordered_t = sorted(t, key=pos.get)
        ordered_s = sorted(s, key=pos.get)
        ok = incremental_value(f, ordered_t, e, pos) <= incremental_value(f, ordered_s, e, pos)
        ledger.record("decreasing-incremental-values", ok, repro)

        z = [x for x in ground if rng.random() < 0.4]
        if not s:
            continue
        e_in = ordered_s[int(rng.integers(len(ordered_s)))]
        lhs = incremental_value(Contracted(f, z), ordered_s, e_in, pos)
        union = sorted(set(z) | set(s), key=pos.get)
        rhs = incremental_value(f, union, e_in, pos) if e_in not in z else None
        if rhs is not None:
            ledger.record("marginal-incremental-values-ineq", lhs <= rhs, repro)


def run_checked_greedy(inst: Instance, order, params, ledger, opt, opt_set, competitors=(), prefer_last=False):
    repro = _repro(inst, order, params.alpha, params.beta)
    watch = MutationWatch(ledger, repro)
    g = StreamingGreedy(inst.matchoid, inst.oracle, params, on_mutation=watch, prefer_last=prefer_last)
    for e in order:
        g.process(e)
    check_streaming_logs(ledger, g.state, inst.oracle, inst.matchoid, params, opt, opt_set, repro, competitors=competitors)
    if inst.monotone and params.alpha == 0 and params.beta == 1 and opt is not None:
        ledger.record("monotone-one-over-4p", 4 * inst.matchoid.p * g.value >= opt, repro)
    return g


def run_checked_randomized(inst: Instance, order, params, K, seed, ledger, opt, opt_set, competitors=()):
    repro = _repro(inst, order, params.alpha, params.beta, seed=seed, algorithm="randomized", K=K)
    watch = MutationWatch(ledger, repro)
    alg = RandomizedStreamingGreedy(inst.matchoid, inst.oracle, params, K, seed=seed, on_mutation=watch)
    for e in order:
        alg.process(e)
    alg.finish()
    check_streaming_logs(
        ledger, alg.state, inst.oracle, inst.matchoid, params, opt, opt_set, repro,
        final_buffer=alg.buffer, competitors=competitors,
    )
    if opt is not None and params.alpha > 0:
        ledger.record("selections-within-budget", alg.selections * params.alpha <= opt, repro)
    return alg


def run_checked_cardinality(inst: Instance, order, alpha, K, seed, ledger, competitors=()):
    k = inst.matchoid.k
    repro = _repro(inst, order, alpha, "inf", seed=seed, algorithm="randomized-cardinality", K=K)
    watch = MutationWatch(ledger, repro)
    alg = RandomizedCardinalityGreedy(k, inst.oracle, alpha, K, seed=seed, on_mutation=watch)
    for e in order:
        alg.process(e)
    alg.finish()
    f = inst.oracle
    final = alg.solution
    f_final = alg.state.current_value
    if len(final) == k:
        ledger.record("full-set-cardinality-bound", f_final >= k * alpha, repro)
    else:
        buffered = frozenset(alg.buffer)
        for t in competitors:
            lhs = f.eval(final | t)
            ledger.record(
                "unfull-set-cardinality-bound", lhs <= f_final + f.eval(t & buffered) + alpha * len(t), repro
            )
    return alg


def shrink(elements: Sequence[int], fails: Callable[[List[int]], bool]) -> List[int]:
    """Greedy one-at-a-time deletion while the failure persists (ddmin with n = len)."""
    current = list(elements)
    changed = True
    while changed:
        changed = False
        for i in range(len(current)):
            trial = current[:i] + current[i + 1:]
            if trial and fails(trial):
                current = trial
                changed = True
                break
    return current


def _auto_alpha(opt, k: int, epsilon=Fraction(1, 2)):
    """The power of two in [eps OPT / 4k, eps OPT / 2k]."""
    if opt <= 0:
        return Fraction(0)
    low = Fraction(epsilon) * opt / (4 * k)
    a = Fraction(1)
    while a < low:
        a *= 2
    while a / 2 >= low:
        a /= 2
    return a


def check_instance(
    inst: Instance,
    rng,
    ledger: LemmaLedger,
    orders: int = 3,
    prefer_last: bool = False,
    randomized_seeds: int = 2,
) -> List[tuple]:
    """Run every check on one instance; returns the greedy output per (order, alpha)."""
    ground = inst.ground
    opt, opt_set = exact_bruteforce(ground, inst.matchoid, inst.oracle)
    competitors = random_independent_sets(inst.matchoid, ground, rng, 3)
    order_list = [list(ground), list(reversed(ground))]
    while len(order_list) < orders:
        order_list.append([int(x) for x in rng.permutation(ground)])
    outputs = []
    for order in order_list:
        check_static_lemmas(ledger, inst, order, rng, samples=5)
        for alpha in (Fraction(0), _auto_alpha(opt, inst.matchoid.k)):
            params = GreedyParams(alpha, 1)
            g = run_checked_greedy(inst, order, params, ledger, opt, opt_set, competitors, prefer_last=prefer_last)
            outputs.append((tuple(order), alpha, g.solution))
            for s in range(randomized_seeds):
                seed = int(rng.integers(2**32))
                run_checked_randomized(inst, order, params, 3, seed, ledger, opt, opt_set, competitors)
        if is_cardinality(inst.matchoid) and len(inst.matchoid.matroids[0].ground) == len(ground):
            alpha = Fraction(opt, 5 * inst.matchoid.k) if opt else Fraction(0)
            seed = int(rng.integers(2**32))
            run_checked_cardinality(inst, order, alpha, 3, seed, ledger, competitors + [opt_set])
    return outputs


def check_lemma_suite(
    kinds: Iterable[str] = DEFAULT_KINDS,
    trials: int = 200,
    seed: int = 0,
    n: int = 8,
    prefer_last: bool = False,
    shrink_failures: bool = True,
) -> LemmaLedger:
    """Generate ``trials`` instances per kind and run every check on each."""
    ledger = LemmaLedger()
    rng = np.random.Generator(np.random.PCG64(seed))
    for kind in kinds:
        for t in range(trials):
            inst_seed = int(rng.integers(2**32))
            size = {"n": n} if kind != "modular-matching" else {}
            inst = GENERATORS[kind](seed=inst_seed, **size)
            local = LemmaLedger()
            check_instance(inst, rng, local, prefer_last=prefer_last)
            if local.failures and shrink_failures:
                for failure in local.failures:
                    failure["instance_seed"] = inst_seed
                    failure["shrunk_ground"] = _shrink_failure(inst, failure)
            ledger.merge(local)
    return ledger


def _shrink_failure(inst: Instance, failure: dict) -> List[int]:
    """Smallest sub-ground (by deletion) on which the greedy checks still fail."""
    if failure.get("algorithm") != "greedy":
        return failure.get("order", [])
    alpha, beta = Fraction(failure["alpha"]), Fraction(failure["beta"])

    def fails(keep):
        sub = Instance(inst.kind, inst.oracle, inst.matchoid.restrict(keep))
        order = [e for e in failure["order"] if e in set(keep)]
        led = LemmaLedger()
        opt, opt_set = exact_bruteforce(keep, sub.matchoid, sub.oracle)
        try:
            run_checked_greedy(sub, order, GreedyParams(alpha, beta), led, opt, opt_set)
        except Exception:
            return True
        return not led.ok

    return shrink(failure["order"], fails)


def ledger_json(ledger: LemmaLedger) -> str:
    return json.dumps({"summary": ledger.summary(), "failures": ledger.failures[:20]}, indent=2, default=str)
