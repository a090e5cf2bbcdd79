import math
from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from streamgreedy import (
    AlphaGrid,
    GreedyParams,
    InstancePool,
    Matchoid,
    Modular,
    StreamingGreedy,
    UniformMatroid,
    cardinality_grid,
    exact_bruteforce,
    matchoid_grid,
)
from streamgreedy.instances import GENERATORS, coverage_uniform
from streamgreedy.offline import E_CONST
from streamgreedy.pool import sub_seed

F = Fraction


def greedy_pool(inst, eps, on_step=None):
    return InstancePool(
        lambda a: StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(a, 1)),
        matchoid_grid(eps, inst.matchoid.k), inst.oracle, inst.matchoid.k, on_step=on_step,
    )


class _Inst:
    def __init__(self, weights, k):
        self.oracle = Modular(weights)
        self.matchoid = Matchoid([UniformMatroid(list(weights), k)], k=k)
        self.ground = sorted(weights)


def test_grid_points():
    g = matchoid_grid(F(1, 2), 2)  # [f/16, f/4]
    assert g.points(16) == [1, 2, 4]
    assert g.points(32) == [2, 4, 8]
    assert g.points(17) == [2, 4]
    assert g.points(0) == []
    assert AlphaGrid(F(2), F(1, 3), F(1)).points(3) == [1, 2]
    small = matchoid_grid(F(1, 10), 4).points(1)
    assert small == [F(1, 128), F(1, 64), F(1, 32)]  # [1/160, 1/20]


def test_scripted_grid_changes():
    inst = _Inst({0: 16, 1: 3, 2: 32}, 2)
    pool = greedy_pool(inst, F(1, 2))
    pool.step(0)
    assert sorted(pool.live) == [1, 2, 4]
    before = dict(pool.live)
    pool.step(1)  # f(e) <= f(z): broadcast only
    assert pool.live == before
    pool.step(2)
    assert sorted(pool.live) == [2, 4, 8]
    rep = pool.finish()
    retired = {r.alpha: r.reason for r in rep.records if r.retired_at is not None}
    assert retired == {1: "below grid"}
    assert [r.alpha for r in rep.records if r.created_at == 2] == [8]


def test_single_instance_pool_returns_its_result():
    inst = _Inst({0: 4, 1: 2}, 1)
    grid = AlphaGrid(F(2), F(1, 4), F(1, 4))  # exactly one point, f(z)/4
    pool = InstancePool(lambda a: StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(a, 1)), grid, inst.oracle, 1)
    rep = pool.run([0, 1])
    assert list(rep.outcomes) == [1]
    g = StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(1, 1))
    for e in (0, 1):
        g.process(e)
    assert rep.result.solution == g.solution


def test_empty_stream():
    inst = _Inst({0: 4}, 1)
    rep = greedy_pool(inst, F(1, 4)).run([])
    assert rep.result.solution == frozenset() and rep.best_alpha is None


def test_cardinality_grid_brackets_opt():
    eps = F(1, 4)
    for seed in range(30):
        inst = coverage_uniform(n=8, k=3, seed=seed)
        opt, _ = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
        fz = max(inst.oracle.eval({e}) for e in inst.ground)
        live = cardinality_grid(eps, 3).points(fz)
        assert any((1 - eps) * opt <= (2 + E_CONST) * 3 * a <= (1 + eps) * opt for a in live)


@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(GENERATORS)))
def test_matchoid_pool_properties(seed, kind):
    eps = F(1, 5)
    inst = GENERATORS[kind](seed=seed)
    k = inst.matchoid.k
    order = [int(x) for x in np.random.default_rng(seed).permutation(inst.ground)]
    opt, _ = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
    live_bound = math.ceil(math.log2(2 * k)) + 1
    seen_sizes = []

    def audit(pool):
        seen_sizes.append(len(pool.live))
        assert len(pool.live) <= live_bound
        assert sorted(pool.live) == [a for a in pool.grid.points(pool.fz) if a in pool.live]

    rep = greedy_pool(inst, eps, on_step=audit).run(order)
    if opt == 0:
        return
    # OPT bracketing by the best singleton
    assert rep.fz <= opt <= k * rep.fz
    # the final grid holds a correctly guessed alpha
    final = matchoid_grid(eps, k).points(rep.fz)
    assert any(eps * opt / (4 * k) <= a <= eps * opt / (2 * k) for a in final)
    # so does the record of every alpha ever run
    assert any(eps * opt / (4 * k) <= r.alpha <= eps * opt / (2 * k) for r in rep.records)
    assert rep.peak_live == max(seen_sizes)


@given(st.integers(0, 2**32 - 1))
def test_creation_log_matches_recomputation(seed):
    inst = GENERATORS["coverage-2matroid"](seed=seed)
    order = [int(x) for x in np.random.default_rng(seed).permutation(inst.ground)]
    rep = greedy_pool(inst, F(1, 5)).run(order)
    singles = [inst.oracle.eval({e}) for e in order]
    assert rep.singleton_log == singles
    for r in rep.records:
        assert r.earlier_max_singleton == max(singles[: r.created_at], default=0)
    flagged = {r.alpha for r in rep.unsafe_creations()}
    assert flagged == {r.alpha for r in rep.records if r.created_at > 0 and max(singles[: r.created_at]) >= r.alpha}


def test_late_instance_can_follow_a_larger_singleton():
    # the top of the new grid, eps f(z_new) / 2, can sit below an earlier singleton value
    eps = F(1, 5)
    inst = _Inst({0: 10, 1: 20}, 2)
    rep = greedy_pool(inst, eps).run([0, 1])
    late = [r for r in rep.records if r.created_at == 1]
    assert late and all(r.earlier_max_singleton == 10 for r in late)
    assert rep.unsafe_creations() == late


class _Hoarder:
    """Takes everything; real instances never exceed the budget since |U| <= OPT / alpha."""

    def __init__(self):
        self.seen = []

    def process(self, e):
        self.seen.append(e)

    def taken(self):
        return self.seen

    def retained(self):
        return len(self.seen)


def test_budget_kill():
    inst = _Inst({i: 4 for i in range(6)}, 1)
    pool = InstancePool(lambda a: _Hoarder(), AlphaGrid(F(2), F(1, 2), F(1, 2)), inst.oracle, 1)
    rep = pool.run(range(6))
    # alpha = 2, budget k f(z) / alpha = 2: the third take kills the instance
    assert [(r.alpha, r.retired_at, r.reason) for r in rep.records] == [(2, 2, "budget")]


def test_genuine_instances_stay_within_budget():
    for seed in range(20):
        inst = GENERATORS["coverage-uniform"](seed=seed)
        rep = greedy_pool(inst, F(1, 4)).run(inst.ground)
        assert all(r.reason != "budget" for r in rep.records)


def test_sub_seeds_depend_only_on_master_and_alpha():
    a = sub_seed(7, F(1, 4)).integers(1 << 30, size=4)
    b = sub_seed(7, F(1, 4)).integers(1 << 30, size=4)
    c = sub_seed(7, F(1, 2)).integers(1 << 30, size=4)
    assert (a == b).all() and not (a == c).all()


@given(st.integers(1, 10**6), st.integers(1, 6), st.sampled_from([F(1, 5), F(1, 4), F(1, 2), F(3, 4)]))
def test_max_points_bounds_every_grid(fz, k, eps):
    for grid in (matchoid_grid(eps, k), cardinality_grid(eps, k)):
        assert len(grid.points(F(fz, 7))) <= grid.max_points()
    assert matchoid_grid(eps, k).max_points() <= math.ceil(math.log2(2 * k)) + 1
