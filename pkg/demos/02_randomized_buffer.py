# %% [markdown]
# The randomized variant holds good elements in a buffer of size K and commits
# a uniformly random one whenever it fills. K = 1 is the deterministic run.

# %%
import numpy as np

from streamgreedy import GreedyParams, RandomizedStreamingGreedy, StreamingGreedy, exact_bruteforce
from streamgreedy.instances import cut_matchoid

inst = cut_matchoid(n=9, seed=11)  # directed cut: non-monotone
opt, _ = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
print("OPT", opt)

# %% K = 1 replays the deterministic trace exactly
g = StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(0, 1))
r = RandomizedStreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(0, 1), 1, seed=0)
for e in inst.ground:
    g.process(e)
    r.process(e)
print("same trace:", g.trace == r.trace)

# %% larger buffers: the value over seeds
for K in (1, 2, 3, 5):
    vals = []
    for s in range(300):
        alg = RandomizedStreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(0, 1), K, seed=s)
        for e in inst.ground:
            alg.process(e)
        vals.append(float(alg.finish().value))
    print(f"K={K}  mean={np.mean(vals):.2f}  min={min(vals):.0f}  max={max(vals):.0f}")
