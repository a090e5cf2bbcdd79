import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from streamgreedy import (
    GreedyParams,
    Matchoid,
    Modular,
    SolutionState,
    StreamingGreedy,
    UniformMatroid,
    accept_test,
    is_good,
    run_streaming_greedy,
)
from streamgreedy.greedy import INFINITE_BETA, ProtocolViolation
from streamgreedy.instances import GENERATORS
from streamgreedy.offline import exact_bruteforce

from conftest import reference_greedy

A, B = 0, 1


def rank_one(weights):
    return Modular(weights), Matchoid([UniformMatroid(list(weights), 1)])


def test_accept_empty_solution():
    f, m = rank_one({A: 0, B: 3})
    s = SolutionState(f)
    assert accept_test(s, A, m, GreedyParams(0, 1)) == (True, frozenset())


def test_accept_exchange_examples():
    f, m = rank_one({A: 1, B: 3})
    s = SolutionState(f)
    s.add(A)
    assert accept_test(s, B, m, GreedyParams(0, 1)) == (True, {A})
    f2, m2 = rank_one({A: 1, B: Fraction(3, 2)})
    s2 = SolutionState(f2)
    s2.add(A)
    assert accept_test(s2, B, m2, GreedyParams(0, 1)) == (False, {A})
    assert not is_good(s2, B, m2, GreedyParams(0, 1))


def test_accept_test_is_pure():
    f, m = rank_one({A: 1, B: 3})
    s = SolutionState(f)
    s.add(A)
    accept_test(s, B, m, GreedyParams(0, 1))
    assert s.members == [A] and len(s.taken_log) == 1


def test_accept_ties_accept():
    f, m = rank_one({A: 1, B: 2})
    s = SolutionState(f)
    s.add(A)
    assert accept_test(s, B, m, GreedyParams(0, 1))[0]


def test_two_step_trace():
    f, m = rank_one({A: 1, B: 3})
    final, g = run_streaming_greedy([A, B], m, GreedyParams(0, 1), f)
    assert final == {B}
    assert g.value == 3
    assert g.taken() == [A, B]


def test_alpha_above_singletons_takes_nothing():
    inst = GENERATORS["coverage-uniform"](seed=4)
    top = max(inst.oracle.eval({e}) for e in inst.ground)
    final, g = run_streaming_greedy(inst.ground, inst.matchoid, GreedyParams(top + 1, 1), inst.oracle)
    assert final == frozenset() and g.taken() == []


def test_negative_marginal_rejected_at_zero_alpha():
    from streamgreedy import DirectedCut

    f = DirectedCut([0, 1], [(0, 1, 1)])
    m = Matchoid([UniformMatroid([0, 1], 2)])
    final, g = run_streaming_greedy([0, 1], m, GreedyParams(0, 1), f)
    assert final == {0}


def test_beta_zero_allowed():
    f, m = rank_one({A: 1, B: 1})
    final, _ = run_streaming_greedy([A, B], m, GreedyParams(0, 0), f)
    assert final == {B}


def test_infinite_beta_never_exchanges():
    f, m = rank_one({A: 1, B: 100})
    final, _ = run_streaming_greedy([A, B], m, GreedyParams(0, INFINITE_BETA), f)
    assert final == {A}


def test_params_validation():
    with pytest.raises(ValueError):
        GreedyParams(-1, 1)
    with pytest.raises(ValueError):
        GreedyParams(0, -1)
    assert GreedyParams(0.5, 0.25).alpha == Fraction(1, 2)
    assert GreedyParams(0, math.inf).beta_is_infinite


def test_duplicate_delivery_is_a_protocol_violation():
    f, m = rank_one({A: 1, B: 3})
    g = StreamingGreedy(m, f)
    g.process(A)
    with pytest.raises(ProtocolViolation):
        g.process(A)


def test_monotone_quarter_bound_uniform():
    for seed in range(40):
        inst = GENERATORS["coverage-uniform"](seed=seed, n=10)
        opt, _ = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
        _, g = run_streaming_greedy(inst.ground, inst.matchoid, GreedyParams(0, 1), inst.oracle)
        assert 4 * g.value >= opt


@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from(sorted(GENERATORS)),
    st.sampled_from([Fraction(0), Fraction(1), Fraction(3)]),
    st.sampled_from([Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)]),
)
def test_matches_cache_free_reference(seed, kind, alpha, beta):
    inst = GENERATORS[kind](seed=seed)
    order = [int(x) for x in np.random.default_rng(seed).permutation(inst.ground)]
    g = StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(alpha, beta), on_mutation=lambda s: s.check())
    for e in order:
        g.process(e)
    members, trace = reference_greedy(order, inst.matchoid, inst.oracle, alpha, beta)
    assert g.state.members == members
    assert [tuple(t) for t in g.trace] == trace
    assert inst.matchoid.is_independent(g.solution)
