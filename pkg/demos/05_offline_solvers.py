# %% [markdown]
# Offline routines used on buffers and taken sets.

# %%
from streamgreedy import exact_bruteforce, offline_greedy, offline_random_greedy
from streamgreedy.instances import cut_cardinality, modular_matching

inst = modular_matching(seed=4)
opt, best = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
greedy = offline_greedy(inst.ground, inst.matchoid, inst.oracle)
print("matching: OPT", opt, "greedy", inst.oracle.eval(greedy))

# %% random greedy on a non-monotone cut, k = 3
cut = cut_cardinality(n=8, k=3, seed=1)
opt, _ = exact_bruteforce(cut.ground, cut.matchoid, cut.oracle)
vals = [cut.oracle.eval(offline_random_greedy(cut.ground, cut.matchoid, cut.oracle, seed=s)) for s in range(200)]
print("cut: OPT", opt, "random greedy mean", sum(vals) / len(vals))
