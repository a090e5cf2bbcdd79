# %% [markdown]
# Two greedy instances in a pipeline: the second one only sees what the first
# rejected. An offline solver then runs over the first instance's taken set.

# %%
from fractions import Fraction

from streamgreedy import exact_bruteforce, run_iterated
from streamgreedy.instances import cut_matching
from streamgreedy.offline import EXACT

inst = cut_matching(n=9, seed=2)
opt, _ = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
eps = Fraction(1, 4)
alpha = eps * opt / inst.matchoid.k

sol, res, alg = run_iterated(inst.ground, inst.matchoid, alpha, 1, EXACT, inst.oracle)
for name, (s, v) in res.candidates.items():
    print(name, sorted(s), v)
print("picked", res.source, "value", res.value, "OPT", opt)
print("forwarded to the second instance:", alg.forwarded)
print("(8p + 1) f >= (1 - eps) OPT:", (8 * inst.matchoid.p + 1) * res.value >= (1 - eps) * opt)
