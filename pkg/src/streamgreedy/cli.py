"""Command line front end: ``streamgreedy --function F.json --constraint C.json ...``.

Exit status: 0 on success, 2 when ``--verify`` finds a violated bound, 1 on
usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from .ground import ExhaustiveLimitError
from .greedy import ProtocolViolation
from .harness import ALGORITHMS, BundleError, RunConfig, StreamOrder, dump_report, generate_instance, load_bundle, run
from .instances import GENERATORS
from .state import InvariantError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return value


def _alpha(text: str):
    return "auto" if text == "auto" else _rational(text)


def _beta(text: str):
    return "inf" if text in ("inf", "infinity") else _rational(text)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="streamgreedy", description="Single-pass submodular maximization under matchoid constraints.")
    ap.add_argument("--function", help="function spec JSON")
    ap.add_argument("--constraint", help="constraint spec JSON")
    ap.add_argument("--algorithm", choices=ALGORITHMS, default="greedy")
    ap.add_argument("--alpha", type=_alpha, default=Fraction(0), help="rational threshold or 'auto' for the alpha pool")
    ap.add_argument("--beta", type=_beta, default=Fraction(1))
    ap.add_argument("--epsilon", type=_rational, default=Fraction(1, 4))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=1)
    ap.add_argument(
        "--stream-order", default="given",
        help="given | reversed | shuffled | adversarial-script:FILE (FILE lists ids, JSON array or whitespace separated)",
    )
    ap.add_argument("--offline", choices=("greedy", "random-greedy", "exact"), default="exact")
    ap.add_argument("--gamma", type=_rational, default=None, help="override the offline ratio used in bound checks")
    ap.add_argument("--cardinality", action="store_true", help="use the infinite-beta variant (single uniform matroid)")
    ap.add_argument("--two-pass", action="store_true", help="iterated only: replay the stream for instance two (debug)")
    ap.add_argument("--verify", action="store_true", help="brute-force OPT and check the applicable bound")
    ap.add_argument("--report", help="also write the report to this file")
    ap.add_argument("--timing", action="store_true", help="include wall time (reports are then not byte-stable)")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--generate", metavar="KIND", choices=sorted(GENERATORS), help="write a generated instance and exit")
    ap.add_argument("--out", default=".", help="output directory for --generate")
    ap.add_argument("--size", action="append", default=[], metavar="NAME=INT", help="generator size parameter, repeatable")
    ap.add_argument("--selftest", action="store_true", help="run the lemma suite and exit")
    ap.add_argument("--selftest-trials", type=int, default=20)
    return ap


def _size_params(pairs: List[str]) -> dict:
    out = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise UsageError(f"--size expects NAME=INT, got {pair!r}")
        try:
            out[name] = int(value)
        except ValueError:
            raise UsageError(f"--size {name}: not an integer: {value!r}") from None
    return out


def main(argv: Optional[List[str]] = None) -> int:
    try:
        return _main(argv)
    except UsageError as exc:
        print(f"streamgreedy: error: {exc}", file=sys.stderr)
        return 1
    except (BundleError, ExhaustiveLimitError, OSError) as exc:
        print(f"streamgreedy: error: {exc}", file=sys.stderr)
        return 1
    except (ProtocolViolation, InvariantError) as exc:
        print(f"streamgreedy: internal check failed: {exc}", file=sys.stderr)
        return 1


def _main(argv) -> int:
    args = build_parser().parse_args(argv)
    if args.selftest:
        from .lemmas import check_lemma_suite, ledger_json

        ledger = check_lemma_suite(trials=args.selftest_trials, seed=args.seed)
        print(ledger_json(ledger))
        return 0 if ledger.ok else 2
    if args.generate:
        info = generate_instance(args.generate, args.seed, args.out, verify=args.verify, **_size_params(args.size))
        for w in info["warnings"]:
            print(f"streamgreedy: warning: {w}", file=sys.stderr)
        print(json.dumps(info, indent=2, sort_keys=True))
        return 0
    if not args.function or not args.constraint:
        raise UsageError("--function and --constraint are required")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    if not 0 < args.epsilon < 1:
        raise UsageError("--epsilon must lie strictly between 0 and 1")
    if args.alpha != "auto" and args.alpha < 0:
        raise UsageError("--alpha must be non-negative")
    if args.beta != "inf" and args.beta < 0:
        raise UsageError("--beta must be non-negative")
    if args.beta == "inf" and not (args.algorithm == "randomized" and args.cardinality):
        raise UsageError("--beta inf is only available with --algorithm randomized --cardinality")
    if args.gamma is not None and not 0 < args.gamma <= 1:
        raise UsageError("--gamma must lie in (0, 1]")

    bundle = load_bundle(args.function, args.constraint)
    cfg = RunConfig(
        algorithm=args.algorithm,
        alpha=args.alpha,
        beta=args.beta,
        epsilon=args.epsilon,
        seed=args.seed,
        trials=args.trials,
        order=StreamOrder.parse(args.stream_order, args.seed),
        offline=args.offline,
        gamma=args.gamma,
        verify=args.verify,
        cardinality=args.cardinality,
        timing=args.timing,
        workers=args.workers,
        two_pass=args.two_pass,
    )
    report = run(bundle, cfg)
    text = dump_report(report)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    for w in report.get("warnings", []):
        print(f"streamgreedy: warning: {w}", file=sys.stderr)
    if args.verify and "bound_check" in report and not report["bound_check"]["satisfied"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
