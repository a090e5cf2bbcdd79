"""Instance loading, stream orders, algorithm dispatch and JSON run reports."""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

import jsonschema
import numpy as np

from .greedy import GreedyParams, ProtocolViolation, StreamingGreedy
from .ground import InstrumentedOracle, SubmodularOracle, Value, function_from_spec
from .instances import GENERATORS, VERIFY_ENVELOPE
from .iterated import IteratedStreamingGreedy
from .matchoid import Matchoid, matchoid_from_spec
from .offline import E_CONST, EXACT_LIMIT, exact_bruteforce, is_cardinality, make_offline, offline_greedy
from .pool import InstancePool, cardinality_grid, matchoid_grid, sub_seed
from .randomized import (
    RandomizedCardinalityGreedy,
    RandomizedStreamingGreedy,
    cardinality_buffer_size,
    matchoid_buffer_size,
)
from .state import rational_json

REPORT_VERSION = "1.0"
ALGORITHMS = ("greedy", "randomized", "iterated", "offline-greedy", "exact")

#: c in the retained-element audit c * k * log2(2k) / eps^2 (log2(2k) so k = 1 is covered).
SPACE_CONSTANT = 12


class BundleError(ValueError):
    """A spec file is unreadable, malformed or inconsistent."""


@dataclass
class InstanceBundle:
    oracle: SubmodularOracle
    matchoid: Matchoid
    function_spec: dict
    constraint_spec: dict

    @property
    def ground(self) -> List[int]:
        return sorted(self.matchoid.ground)


def _read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise BundleError(f"{path}: cannot read: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def bundle_from_specs(function_spec: dict, constraint_spec: dict, where: str = "") -> InstanceBundle:
    try:
        oracle = function_from_spec(function_spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"{where}function spec: {exc}") from None
    try:
        m = matchoid_from_spec(constraint_spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"{where}constraint spec: {exc}") from None
    if m.k < 1:
        raise BundleError(f"{where}constraint spec: k must be at least 1, got {m.k}")
    missing = sorted(m.ground - oracle.domain)
    if missing:
        raise BundleError(f"{where}constraint references ids missing from the function domain: {missing}")
    return InstanceBundle(oracle, m, function_spec, constraint_spec)


def load_bundle(function_path, constraint_path) -> InstanceBundle:
    return bundle_from_specs(_read_json(function_path), _read_json(constraint_path))


def generate_instance(kind: str, seed: int, out_dir, verify: bool = False, **size) -> dict:
    """Write function.json and constraint.json for a generated instance; returns paths and warnings."""
    if kind not in GENERATORS:
        raise BundleError(f"unknown instance kind {kind!r}; choose from {sorted(GENERATORS)}")
    inst = GENERATORS[kind](seed=seed, **size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fpath, cpath = out / "function.json", out / "constraint.json"
    fpath.write_text(json.dumps(inst.oracle.to_spec(), indent=2, sort_keys=True) + "\n")
    cpath.write_text(json.dumps(inst.matchoid.to_spec(), indent=2, sort_keys=True) + "\n")
    warnings = []
    if verify and len(inst.ground) > VERIFY_ENVELOPE:
        warnings.append(f"{len(inst.ground)} elements exceeds the exhaustive envelope of {VERIFY_ENVELOPE}")
    return {
        "function": str(fpath),
        "constraint": str(cpath),
        "elements": len(inst.ground),
        "p": inst.matchoid.p,
        "k": inst.matchoid.k,
        "monotone": inst.monotone,
        "warnings": warnings,
    }


# ---------------------------------------------------------------- stream orders


@dataclass(frozen=True)
class StreamOrder:
    """given (ascending ids), reversed, shuffled(seed) or adversarial-script(path)."""

    mode: str = "given"
    seed: int = 0
    script: Optional[str] = None

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "StreamOrder":
        if text.startswith("adversarial-script:"):
            return cls("adversarial-script", seed, text.split(":", 1)[1])
        if text in ("given", "reversed", "shuffled"):
            return cls(text, seed)
        raise BundleError(f"unknown stream order {text!r}")

    def arrange(self, ground: Iterable[int]) -> List[int]:
        ground = sorted(ground)
        if self.mode == "given":
            return ground
        if self.mode == "reversed":
            return ground[::-1]
        if self.mode == "shuffled":
            rng = np.random.Generator(np.random.PCG64(self.seed))
            return [ground[int(i)] for i in rng.permutation(len(ground))]
        if self.mode == "adversarial-script":
            ids = _read_script(self.script)
            if sorted(ids) != ground:
                extra = sorted(set(ids) - set(ground))
                lost = sorted(set(ground) - set(ids))
                dup = len(ids) != len(set(ids))
                raise BundleError(
                    f"{self.script}: script must list every ground id once (unknown {extra}, missing {lost}, duplicates {dup})"
                )
            return ids
        raise BundleError(f"unknown stream order {self.mode!r}")

    def label(self) -> str:
        if self.mode == "shuffled":
            return f"shuffled({self.seed})"
        if self.mode == "adversarial-script":
            return f"adversarial-script({self.script})"
        return self.mode


def _read_script(path) -> List[int]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BundleError(f"{path}: cannot read: {exc.strerror or exc}") from None
    if text.lstrip().startswith("["):
        try:
            return [int(x) for x in json.loads(text)]
        except json.JSONDecodeError as exc:
            raise BundleError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    ids = []
    for lineno, line in enumerate(text.splitlines(), 1):
        for tok in line.split("#", 1)[0].replace(",", " ").split():
            try:
                ids.append(int(tok))
            except ValueError:
                raise BundleError(f"{path}:{lineno}: not an element id: {tok!r}") from None
    return ids


class SinglePassStream:
    """Iterable that can be consumed once and never yields an id twice."""

    def __init__(self, order: Sequence[int]):
        self._order = list(order)
        self._used = False

    def __iter__(self) -> Iterator[int]:
        if self._used:
            raise ProtocolViolation("the stream was requested a second time")
        self._used = True
        seen = set()
        for e in self._order:
            if e in seen:
                raise ProtocolViolation(f"element {e} would be delivered twice")
            seen.add(e)
            yield e

    def __len__(self):
        return len(self._order)


# ---------------------------------------------------------------- run reports

_RATIONAL = {
    "type": "object",
    "properties": {"num": {"type": "integer"}, "den": {"type": "integer", "minimum": 1}},
    "required": ["num", "den"],
    "additionalProperties": False,
}
_RATIONAL_OR_NULL = {"oneOf": [_RATIONAL, {"type": "null"}]}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "algorithm", "params", "order", "value", "solution", "oracle_calls", "space"],
    "properties": {
        "version": {"const": REPORT_VERSION},
        "algorithm": {"enum": list(ALGORITHMS)},
        "params": {
            "type": "object",
            "required": ["alpha", "beta", "K", "epsilon", "seed", "gamma", "offline", "cardinality"],
            "properties": {
                "alpha": {"oneOf": [_RATIONAL, {"const": "auto"}, {"type": "null"}]},
                "beta": {"oneOf": [_RATIONAL, {"const": "inf"}, {"type": "null"}]},
                "K": {"type": ["integer", "null"]},
                "epsilon": _RATIONAL_OR_NULL,
                "seed": {"type": "integer"},
                "gamma": _RATIONAL_OR_NULL,
                "offline": {"type": ["string", "null"]},
                "cardinality": {"type": "boolean"},
            },
        },
        "order": {"type": "string"},
        "p": {"type": "integer"},
        "k": {"type": "integer"},
        "elements": {"type": "integer"},
        "value": _RATIONAL,
        "solution": {"type": "array", "items": {"type": "integer"}},
        "source": {"type": "string"},
        "taken": {"type": ["integer", "null"]},
        "buffer_peak": {"type": ["integer", "null"]},
        "oracle_calls": {
            "type": "object",
            "required": ["algorithm", "verification"],
            "properties": {"algorithm": {"type": "integer"}, "verification": {"type": "integer"}},
        },
        "space": {
            "type": "object",
            "required": ["peak_retained"],
            "properties": {
                "peak_retained": {"type": "integer"},
                "peak_live_instances": {"type": ["integer", "null"]},
                "live_bound": {"type": ["integer", "null"]},
                "retained_bound": _RATIONAL_OR_NULL,
            },
        },
        "pool": {"type": "object"},
        "trials": {
            "type": "object",
            "required": ["count", "values", "mean", "std", "min"],
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "values": {"type": "array", "items": _RATIONAL},
                "mean": _RATIONAL,
                "std": {"type": "number"},
                "min": _RATIONAL,
            },
        },
        "per_trial": {"type": "array"},
        "bound_check": {
            "type": "object",
            "required": ["OPT", "ratio", "bound", "satisfied", "checks"],
            "properties": {
                "OPT": _RATIONAL,
                "ratio": {"type": "number", "minimum": 0, "maximum": 1},
                "bound": {"type": ["number", "null"]},
                "satisfied": {"type": "boolean"},
                "checks": {"type": "array"},
            },
        },
        "two_pass": {"type": "boolean"},
        "wall_time": {"type": "number"},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def dump_report(report: dict) -> str:
    validate_report(report)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- dispatch


@dataclass
class RunConfig:
    algorithm: str = "greedy"
    alpha: object = Fraction(0)  # Fraction or "auto"
    beta: object = Fraction(1)
    epsilon: Fraction = Fraction(1, 4)
    seed: int = 0
    trials: int = 1
    order: StreamOrder = field(default_factory=StreamOrder)
    offline: str = "exact"
    gamma: Optional[Fraction] = None
    verify: bool = False
    cardinality: bool = False
    timing: bool = False
    workers: int = 1
    two_pass: bool = False

    @property
    def auto(self) -> bool:
        return self.alpha == "auto"


@dataclass
class _Outcome:
    value: Value
    solution: frozenset
    source: str
    taken: Optional[int]
    buffer_peak: Optional[int]
    peak_retained: int
    calls: int
    K: Optional[int] = None
    selections: Optional[int] = None
    final_buffer: Optional[int] = None
    pool: Optional[dict] = None
    peak_live: Optional[int] = None
    token_checks: List[dict] = field(default_factory=list)
    two_pass: bool = False


def _buffer_size(cfg: RunConfig, k: int) -> int:
    return cardinality_buffer_size(k, cfg.epsilon) if cfg.cardinality else matchoid_buffer_size(k, cfg.epsilon)


def _factory(cfg: RunConfig, m: Matchoid, f: SubmodularOracle, offline, seed: int):
    k = m.k
    if cfg.algorithm == "greedy":
        return lambda a: StreamingGreedy(m, f, GreedyParams(a, cfg.beta))
    if cfg.algorithm == "iterated":
        return lambda a: IteratedStreamingGreedy(m, f, a, cfg.beta, offline)
    if cfg.algorithm == "randomized":
        K = _buffer_size(cfg, k)
        if cfg.cardinality:
            return lambda a: RandomizedCardinalityGreedy(k, f, a, K, seed=sub_seed(seed, a), offline=offline)
        return lambda a: RandomizedStreamingGreedy(m, f, GreedyParams(a, cfg.beta), K, seed=sub_seed(seed, a), offline=offline)
    raise ValueError(cfg.algorithm)


def _run_once(bundle: InstanceBundle, cfg: RunConfig, seed: int) -> _Outcome:
    """One trial of the configured algorithm on a fresh instrumented oracle."""
    f = InstrumentedOracle(bundle.oracle)
    m = bundle.matchoid
    order = cfg.order.arrange(bundle.ground)
    stream = SinglePassStream(order)
    offline = make_offline(cfg.offline, m, bundle.oracle.is_monotone, cfg.gamma, seed=seed)

    if cfg.algorithm == "exact":
        list(stream)
        _, sol = exact_bruteforce(order, m, f)
        return _Outcome(f.eval(sol), sol, "exact", None, None, len(order), f.call_count)
    if cfg.algorithm == "offline-greedy":
        sol = offline_greedy(list(stream), m, f)
        return _Outcome(f.eval(sol), sol, "offline-greedy", None, None, len(order), f.call_count)

    if cfg.auto:
        grid = cardinality_grid(cfg.epsilon, m.k) if (cfg.algorithm == "randomized" and cfg.cardinality) else matchoid_grid(cfg.epsilon, m.k)
        pool = InstancePool(_factory(cfg, m, f, offline, seed), grid, f, m.k)
        rep = pool.run(stream)
        res = rep.result
        records = [
            {
                "alpha": rational_json(r.alpha),
                "created_at": r.created_at,
                "retired_at": r.retired_at,
                "reason": r.reason,
                "outcome": rational_json(rep.outcomes[r.alpha]) if r.alpha in rep.outcomes else None,
            }
            for r in rep.records
        ]
        pool_block = {
            "best_alpha": rational_json(rep.best_alpha) if rep.best_alpha is not None else None,
            "instances": records,
            "trajectory": [
                {"position": t["position"], "z": t["z"], "fz": rational_json(t["fz"]), "live": [rational_json(a) for a in t["live"]]}
                for t in rep.trajectory
            ],
            "z": rep.z,
            "fz": rational_json(rep.fz),
        }
        return _Outcome(
            res.value, res.solution, res.source, res.stats.get("taken"), res.stats.get("buffer_peak"),
            rep.peak_retained, f.call_count,
            K=_buffer_size(cfg, m.k) if cfg.algorithm == "randomized" else None,
            pool=pool_block, peak_live=rep.peak_live,
        )

    alpha = Fraction(cfg.alpha)
    if cfg.algorithm == "greedy":
        alg = StreamingGreedy(m, f, GreedyParams(alpha, cfg.beta))
    elif cfg.algorithm == "iterated":
        alg = IteratedStreamingGreedy(m, f, alpha, cfg.beta, offline)
    elif cfg.cardinality:
        alg = RandomizedCardinalityGreedy(m.k, f, alpha, _buffer_size(cfg, m.k), seed=seed, offline=offline)
    else:
        alg = RandomizedStreamingGreedy(m, f, GreedyParams(alpha, cfg.beta), _buffer_size(cfg, m.k), seed=seed, offline=offline)

    peak = 0
    two_pass = False
    if cfg.algorithm == "iterated" and cfg.two_pass:
        from .iterated import run_iterated

        _, res, alg = run_iterated(stream, m, alpha, cfg.beta, offline, f, two_pass=True)
        peak = alg.retained()
        two_pass = True
    else:
        for e in stream:
            alg.process(e)
            peak = max(peak, alg.retained())
        res = alg.finish()
    out = _Outcome(
        res.value, res.solution, res.source, len(alg.taken()), res.stats.get("buffer_peak"), peak, f.call_count,
        K=getattr(alg, "K", None), selections=res.stats.get("selections"), final_buffer=res.stats.get("final_buffer"),
        two_pass=two_pass,
    )
    out.token_checks.append({"taken": len(alg.taken()), "alpha": alpha})
    return out


def _trial_worker(payload):
    fspec, cspec, cfg, seed = payload
    return _run_once(bundle_from_specs(fspec, cspec), cfg, seed)


def _primary_bound(cfg: RunConfig, bundle: InstanceBundle, gamma: Optional[Value]):
    """(coef, factor, offset) for the guarantee coef * f(result) >= factor * OPT - offset,
    or None when no guarantee applies to this configuration."""
    m = bundle.matchoid
    p, k = m.p, m.k
    beta = cfg.beta
    monotone = bundle.oracle.is_monotone
    eps = Fraction(cfg.epsilon)
    alpha_offset = 0 if cfg.auto else k * Fraction(cfg.alpha)
    if cfg.algorithm == "exact":
        return Fraction(1), Fraction(1), 0
    if cfg.algorithm == "offline-greedy":
        return (1 / Fraction(gamma), Fraction(1), 0) if monotone and gamma else None
    if cfg.algorithm == "randomized" and cfg.cardinality:
        return ((2 + E_CONST) / (1 - 2 * eps), Fraction(1), 0) if cfg.auto and eps < Fraction(1, 2) else None
    if beta == "inf":
        return None
    beta = Fraction(beta)
    if cfg.algorithm == "greedy":
        if monotone and cfg.alpha == 0 and beta > 0:
            return (1 + beta) ** 2 / beta * p, Fraction(1), 0
        return None
    if gamma is None or beta == 0:
        return None
    if cfg.algorithm == "iterated":
        coef = 2 * (1 + beta) ** 2 / beta * p + 1 / Fraction(gamma)
        return (coef, 1 - eps, 0) if cfg.auto else (coef, Fraction(1), alpha_offset)
    if cfg.algorithm == "randomized":
        return ((1 + beta) ** 2 / beta * p + 1 / Fraction(gamma), 1 - eps, 0) if cfg.auto else None
    return None


def run(bundle: InstanceBundle, cfg: RunConfig) -> dict:
    """Run trials, optionally verify against brute force, and build the report."""
    if cfg.algorithm not in ALGORITHMS:
        raise BundleError(f"unknown algorithm {cfg.algorithm!r}")
    if cfg.cardinality and not is_cardinality(bundle.matchoid):
        raise BundleError("--cardinality needs a constraint made of a single uniform matroid")
    if cfg.cardinality and cfg.algorithm == "randomized":
        cfg.beta = "inf"
    warnings = []
    started = time.perf_counter()
    seeds = [cfg.seed + t for t in range(cfg.trials)]
    if cfg.workers > 1 and cfg.trials > 1:
        payload = [(bundle.function_spec, bundle.constraint_spec, cfg, s) for s in seeds]
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            outcomes = list(ex.map(_trial_worker, payload))
    else:
        outcomes = [_run_once(bundle, cfg, s) for s in seeds]
    wall = time.perf_counter() - started

    first = outcomes[0]
    m = bundle.matchoid
    gamma = make_offline(cfg.offline, m, bundle.oracle.is_monotone, cfg.gamma).gamma
    k = m.k
    retained_bound = None
    live_bound = None
    if cfg.auto:
        eps = Fraction(cfg.epsilon)
        retained_bound = SPACE_CONSTANT * k * Fraction(math.log2(2 * k)) / eps**2
        if cfg.algorithm == "randomized" and cfg.cardinality:
            live_bound = cardinality_grid(eps, k).max_points()
        else:
            live_bound = math.ceil(math.log2(2 * k)) + 1

    report = {
        "version": REPORT_VERSION,
        "algorithm": cfg.algorithm,
        "params": {
            "alpha": "auto" if cfg.auto else (rational_json(cfg.alpha) if cfg.algorithm not in ("exact", "offline-greedy") else None),
            "beta": "inf" if cfg.beta == "inf" else (rational_json(cfg.beta) if cfg.algorithm not in ("exact", "offline-greedy") else None),
            "K": first.K,
            "epsilon": rational_json(cfg.epsilon) if cfg.algorithm in ("randomized", "iterated") or cfg.auto else None,
            "seed": cfg.seed,
            "gamma": rational_json(gamma) if gamma is not None else None,
            "offline": cfg.offline if cfg.algorithm in ("randomized", "iterated") else None,
            "cardinality": cfg.cardinality,
        },
        "order": cfg.order.label(),
        "p": m.p,
        "k": k,
        "elements": len(bundle.ground),
        "value": rational_json(first.value),
        "solution": sorted(first.solution),
        "source": first.source,
        "taken": first.taken,
        "buffer_peak": first.buffer_peak,
        "oracle_calls": {"algorithm": sum(o.calls for o in outcomes), "verification": 0},
        "space": {
            "peak_retained": max(o.peak_retained for o in outcomes),
            "peak_live_instances": max(o.peak_live for o in outcomes) if cfg.auto else None,
            "live_bound": live_bound,
            "retained_bound": rational_json(retained_bound) if retained_bound is not None else None,
        },
    }
    if first.pool is not None:
        report["pool"] = first.pool
    if first.two_pass:
        report["two_pass"] = True
    values = [Fraction(o.value) for o in outcomes]
    mean = sum(values, Fraction(0)) / len(values)
    # sample standard deviation via sum and sum of squares
    sq = sum((v * v for v in values), Fraction(0))
    var = (sq - len(values) * mean * mean) / (len(values) - 1) if len(values) > 1 else Fraction(0)
    std = math.sqrt(max(float(var), 0.0))
    if cfg.trials > 1 or cfg.algorithm == "randomized":
        report["trials"] = {
            "count": len(values),
            "values": [rational_json(v) for v in values],
            "mean": rational_json(mean),
            "std": std,
            "min": rational_json(min(values)),
        }
        report["per_trial"] = [
            {
                "seed": s,
                "value": rational_json(o.value),
                "selections": o.selections,
                "final_buffer": o.final_buffer,
                "oracle_calls": o.calls,
            }
            for s, o in zip(seeds, outcomes)
        ]

    if live_bound is not None and report["space"]["peak_live_instances"] > live_bound:
        warnings.append("peak live instances above the grid bound")
    if retained_bound is not None and report["space"]["peak_retained"] > retained_bound:
        warnings.append("peak retained elements above the space bound")

    if cfg.verify:
        n = len(bundle.ground)
        if n > EXACT_LIMIT:
            warnings.append(f"verification skipped: {n} elements exceeds the exhaustive limit {EXACT_LIMIT}")
        else:
            report["bound_check"], calls = _verify(bundle, cfg, outcomes, mean, std, gamma)
            report["oracle_calls"]["verification"] = calls
    if cfg.timing:
        report["wall_time"] = wall
    if warnings:
        report["warnings"] = warnings
    validate_report(report)
    return report


def _verify(bundle, cfg, outcomes, mean, std, gamma):
    vf = InstrumentedOracle(bundle.oracle)
    opt, _ = exact_bruteforce(bundle.ground, bundle.matchoid, vf)
    opt = Fraction(opt)
    checks = []
    for i, o in enumerate(outcomes):
        for tc in o.token_checks:
            if tc["alpha"] > 0:
                checks.append(
                    {"name": "taken-budget", "trial": i, "lhs": tc["taken"] * float(tc["alpha"]), "rhs": float(opt),
                     "satisfied": tc["taken"] * tc["alpha"] <= opt}
                )
    bound = _primary_bound(cfg, bundle, gamma)
    ratio_bound = None
    randomized = cfg.algorithm == "randomized"
    if bound is not None:
        coef, factor, offset = bound
        slack = Fraction(3 * std / math.sqrt(len(outcomes))) if randomized and len(outcomes) > 1 else Fraction(0)
        if randomized:
            lhs = coef * (mean + slack)
        else:
            lhs = coef * Fraction(min(o.value for o in outcomes))
        rhs = factor * opt - offset
        checks.append({"name": "approximation", "lhs": float(lhs), "rhs": float(rhs), "satisfied": lhs >= rhs})
        if offset == 0:
            ratio_bound = float(factor / coef)
    value = Fraction(mean if randomized else outcomes[0].value)
    ratio = float(value / opt) if opt > 0 else 1.0
    ratio = min(max(ratio, 0.0), 1.0)
    block = {
        "OPT": rational_json(opt),
        "ratio": ratio,
        "bound": ratio_bound,
        "satisfied": all(c["satisfied"] for c in checks),
        "checks": checks,
    }
    return block, vf.call_count
