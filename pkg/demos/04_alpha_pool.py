# %% [markdown]
# Without knowing OPT, a pool runs one instance per alpha on a geometric grid
# pinned to the best singleton seen so far.

# %%
from fractions import Fraction

from streamgreedy import GreedyParams, InstancePool, StreamingGreedy, matchoid_grid
from streamgreedy.instances import coverage_matching

inst = coverage_matching(n=12, seed=5)
eps, k = Fraction(1, 4), inst.matchoid.k


def show(pool):
    print(f"f(z)={pool.fz}  live={[str(a) for a in sorted(pool.live)]}  retained={pool.retained()}")


pool = InstancePool(
    lambda a: StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(a, 1)),
    matchoid_grid(eps, k), inst.oracle, k, on_step=show,
)
rep = pool.run(inst.ground)
print("best alpha", rep.best_alpha, "value", rep.result.value, "peak live", rep.peak_live)
for r in rep.records:
    print(r)
