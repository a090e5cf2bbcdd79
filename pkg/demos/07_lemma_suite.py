# %% [markdown]
# Every structural inequality the analysis uses, checked on random instances.

# %%
from streamgreedy.lemmas import check_lemma_suite

ledger = check_lemma_suite(trials=25)
for name, counts in ledger.summary().items():
    print(f"{name:36s} {counts['passed']:7d} passed  {counts['failed']} failed")
print("ok:", ledger.ok)
