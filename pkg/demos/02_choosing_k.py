# %% [markdown]
# Choosing K by comparing real and permuted estimates.
#
# Each K gets a score t_K: how far the cross-validated MI on the real data
# sits above the MI after the target has been shuffled, in units of their
# spread. Usage: ``python3 02_choosing_k.py [curve.csv]``.

# %%
import sys

from mifs import choose_k, generate_friedman
from mifs.reports import rows_to_csv

d = generate_friedman(100, seed=1)
report = choose_k(d, k_min=2, k_max=30, n_folds=20, seed=10_001)
print("chosen K:", report.chosen_k)
print("best K per feature:", report.per_feature_best_k())

# %% [markdown]
# The curve for x4, a strong linear input. Irrelevant inputs such as x6 hover
# around zero.

# %%
for name in ("x4", "x6"):
    row = report.feature_names.index(name)
    print(name, " ".join(f"{t:5.1f}" for t in report.tk[row]))

# %%
out = sys.argv[1] if len(sys.argv) > 1 else "tk_curve.csv"
with open(out, "w", encoding="utf-8") as fh:
    fh.write(rows_to_csv(["feature", "K", "t_K"], report.tk_rows()))
print("wrote", out)
