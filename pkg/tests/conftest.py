import itertools
import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def reference_greedy(order, m, f, alpha=0, beta=1):
    """Cache-free streaming greedy: every quantity recomputed from the oracle.

    Returns (final list, trace) with trace entries (element, accepted, sorted candidates).
    """
    members = []
    trace = []

    def nu(s):
        prefix = frozenset(members[: members.index(s)])
        return f.eval(prefix | {s}) - f.eval(prefix)

    for e in order:
        S = frozenset(members)
        cands = set()
        for mat in [m.matroids[i] for i in range(len(m.matroids)) if e in m.matroids[i].ground]:
            s_l = S & mat.ground
            if mat.is_independent(s_l | {e}):
                continue
            swap = [s for s in members if s in s_l and mat.is_independent((s_l - {s}) | {e})]
            cands.add(min(swap, key=lambda s: (nu(s), members.index(s))))
        gain = f.eval(S | {e}) - f.eval(S)
        if gain >= alpha + (1 + beta) * sum(nu(c) for c in cands):
            members = [s for s in members if s not in cands] + [e]
            trace.append((e, True, tuple(sorted(cands))))
        else:
            trace.append((e, False, ()))
    return members, trace


def matching_optimum(edges, weight_of):
    """Best vertex-disjoint edge set by plain enumeration (no matroid code involved)."""
    best = 0
    for combo in subsets(edges):
        ends = [v for e in combo for v in ((0, edges[e][0]), (1, edges[e][1]))]
        if len(ends) == len(set(ends)):
            best = max(best, weight_of(combo))
    return best


def brute_opt(ground, is_feasible, value):
    return max(value(s) for s in subsets(ground) if is_feasible(s))


@pytest.fixture
def two_sets():
    from streamgreedy import WeightedCoverage

    return WeightedCoverage({1: [1, 2], 2: [2, 3]})


F = Fraction
