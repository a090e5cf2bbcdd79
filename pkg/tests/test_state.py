import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from streamgreedy import InstrumentedOracle, Modular, SolutionState, WeightedCoverage, incremental_value
from streamgreedy.ground import FunctionOracle
from streamgreedy.instances import random_coverage, random_cut
from streamgreedy.state import InvariantError


def test_modular_incremental_value_is_weight():
    f = Modular({0: 4, 1: 7, 2: 1})
    for members in ([], [0], [0, 2], [2, 0, 1]):
        assert incremental_value(f, members, 1) == 7


def test_coverage_incremental_values(two_sets):
    assert incremental_value(two_sets, [1, 2], 2) == 1
    assert incremental_value(two_sets, [2], 2) == 2  # predecessor gone, value rises


def test_incremental_value_explicit_order(two_sets):
    # e2 given before e1 in the order map: e2 has no predecessor
    assert incremental_value(two_sets, [1, 2], 2, order={2: 0, 1: 1}) == 2


def test_first_take():
    st_ = SolutionState(Modular({0: 5}))
    assert st_.add(0) == 5
    assert st_.nu == {0: 5}


def test_modular_exchange_and_exit_value():
    s = SolutionState(Modular({0: 1, 1: 3}))
    s.add(0)
    assert s.apply_exchange(1, {0}) == 2
    assert [(r.element, r.exit_value, r.replacement) for r in s.exit_log] == [(0, 1, 1)]
    assert s.exit_value_sum() == 1


def test_no_deletions_exit_sum_zero():
    s = SolutionState(Modular({0: 1, 1: 3}))
    s.add(0)
    s.add(1)
    assert s.exit_value_sum() == 0


def test_gain_matches_fresh_difference():
    f = WeightedCoverage({0: [1, 2], 1: [2, 3], 2: [3, 4], 3: [1, 4]}, {1: 2, 2: 1, 3: 3, 4: 1})
    s = SolutionState(f)
    for e in (0, 1, 2):
        s.add(e)
    before = f.eval({0, 1, 2})
    gain = s.apply_exchange(3, {1})
    assert gain == f.eval({0, 2, 3}) - before
    s.check()


def test_nonzero_empty_value():
    f = FunctionOracle(lambda S: 10 + 2 * len(S), range(3), is_monotone=True)
    s = SolutionState(f)
    s.add(0)
    s.add(1)
    s.apply_exchange(2, {0})
    assert s.current_value == 14 == s.empty_value + sum(s.nu.values())
    s.check()


def test_exchange_recomputes_with_one_call_per_suffix_member():
    f = InstrumentedOracle(Modular({i: i + 1 for i in range(5)}))
    s = SolutionState(f)
    for e in range(4):
        s.add(e)
    f.reset()
    s.apply_exchange(4, {1})
    # members 2, 3 get new prefix values, then f(S + 4)
    assert f.call_count == 3


def test_precondition_errors():
    s = SolutionState(Modular({0: 1, 1: 1}))
    s.add(0)
    with pytest.raises(ValueError):
        s.add(0)
    with pytest.raises(ValueError):
        s.apply_exchange(1, {7})


def test_check_catches_tampering():
    s = SolutionState(Modular({0: 1, 1: 3}))
    s.add(0)
    s.add(1)
    s.nu[0] = 2
    with pytest.raises(InvariantError):
        s.check()


def test_logs_serialize():
    s = SolutionState(Modular({0: Fraction(1, 2), 1: 3}))
    s.add(0)
    s.apply_exchange(1, {0})
    data = json.loads(json.dumps(s.logs_to_json()))
    assert data["exit_log"][0]["exit_value"] == {"num": 1, "den": 2}
    assert data["taken_log"][1] == {"element": 1, "gain": {"num": 5, "den": 2}, "candidates": [0]}


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_random_exchanges_keep_identity(seed, cut):
    rng = np.random.default_rng(seed)
    n = 8
    f = random_cut(rng, n) if cut else random_coverage(rng, range(n))
    last_nu = {}
    monotone_growth = True

    def watch(state):
        nonlocal last_nu, monotone_growth
        state.check()
        for s, v in state.nu.items():
            if s in last_nu and v < last_nu[s]:
                monotone_growth = False
        last_nu = dict(state.nu)

    s = SolutionState(f, on_mutation=watch)
    for e in rng.permutation(n):
        e = int(e)
        members = list(s.members)
        k = int(rng.integers(0, min(2, len(members)) + 1))
        c = set(int(x) for x in rng.choice(members, size=k, replace=False)) if k else set()
        s.apply_exchange(e, c)
    assert f.eval(s.member_set) == s.current_value
    # ν of a survivor only grows when predecessors disappear (submodularity)
    assert monotone_growth


@given(st.integers(0, 2**32 - 1))
def test_decreasing_incremental_values(seed):
    rng = np.random.default_rng(seed)
    f = random_coverage(rng, range(8))
    t = [e for e in range(8) if rng.random() < 0.6]
    s = [e for e in t if rng.random() < 0.5]
    e = int(rng.integers(8))
    order = {i: i for i in range(8)}
    assert incremental_value(f, t, e, order) <= incremental_value(f, s, e, order)
