# %% [markdown]
# The command line harness: generate an instance, run it, check the bound.

# %%
import json
import tempfile

from streamgreedy.cli import main

out = tempfile.mkdtemp()
main(["--generate", "coverage-2matroid", "--seed", "1", "--out", out])

# %%
report = f"{out}/report.json"
code = main([
    "--function", f"{out}/function.json", "--constraint", f"{out}/constraint.json",
    "--algorithm", "randomized", "--alpha", "auto", "--epsilon", "0.25",
    "--trials", "20", "--verify", "--report", report,
])
rep = json.load(open(report))
print("exit", code)
print(json.dumps(rep["bound_check"], indent=1))
print(json.dumps(rep["space"], indent=1))
