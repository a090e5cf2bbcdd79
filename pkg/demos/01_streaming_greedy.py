# %% [markdown]
# Deterministic streaming greedy on a small weighted coverage instance under
# two matroids (a graphic matroid and a partition matroid, so p = 2).

# %%
from streamgreedy import GreedyParams, StreamingGreedy, exact_bruteforce
from streamgreedy.instances import coverage_2matroid

inst = coverage_2matroid(n=10, seed=3)
opt, best = exact_bruteforce(inst.ground, inst.matchoid, inst.oracle)
print("OPT", opt, "at", sorted(best), " p =", inst.matchoid.p)

# %% one pass, alpha = 0, beta = 1
g = StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(0, 1))
for e in inst.ground:
    g.process(e)
for ev in g.trace:
    print(ev)
print("final", sorted(g.solution), "value", g.value)
print("ratio", float(g.value / opt), ">= 1/4p =", 1 / (4 * inst.matchoid.p))

# %% the running state keeps one cached incremental value per member
print({s: g.state.nu[s] for s in g.state.members})
print("sum of nu", sum(g.state.nu.values()), "f(S)", inst.oracle.eval(g.solution))

# %% a positive alpha trades value for a smaller taken set
for alpha in (0, 1, 3):
    g = StreamingGreedy(inst.matchoid, inst.oracle, GreedyParams(alpha, 1))
    for e in inst.ground:
        g.process(e)
    print(f"alpha={alpha}  |U|={len(g.taken())}  f={g.value}")
