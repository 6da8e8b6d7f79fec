# %% [markdown]
# How many features does forward selection keep?
#
# Friedman data has five informative inputs, and x3 enters only through a
# small quadratic term. Two stopping rules are compared over a few datasets:
# the permutation test, and the older rule of stopping when the estimate
# first drops.

# %%
from collections import Counter

from mifs import choose_k, forward_select, generate_friedman

N_DATASETS = 20
permutation, legacy = Counter(), Counter()
for s in range(N_DATASETS):
    d = generate_friedman(100, seed=s)
    k = choose_k(d, k_min=2, k_max=25, n_folds=20, seed=10_000 + s).chosen_k
    permutation[len(forward_select(d, k, seed=10_000 + s).final_set)] += 1
    legacy[len(forward_select(d, k, legacy_stop=True).final_set)] += 1

# %%
print("size  permutation  legacy")
for size in range(1, 11):
    if permutation[size] or legacy[size]:
        print(f"{size:4d}  {permutation[size]:11d}  {legacy[size]:6d}")

# %% [markdown]
# One trace in detail.

# %%
trace = forward_select(generate_friedman(100, seed=0), k=10, seed=1)
print("\n".join(trace.log_lines()))
print("selected:", trace.selected_names)
