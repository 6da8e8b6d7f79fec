# %% [markdown]
# Grouping redundant features by how they predict the target.
#
# Thirty columns are noisy copies of three hidden signals, ten copies each.
# Features whose false-neighbor counts agree are merged first; each final
# cluster is represented by its member with the largest MI.

# %%
import numpy as np

from mifs import Dataset, cluster_features

rng = np.random.default_rng(3)
n = 200
s = rng.uniform(size=(n, 3))
y = np.sin(2 * np.pi * s[:, 0]) + 2 * s[:, 1] ** 2 + 3 * np.abs(s[:, 2] - 0.5) + 0.1 * rng.standard_normal(n)
cols = [s[:, g] + 0.01 * rng.standard_normal(n) for g in range(3) for _ in range(10)]
names = [f"s{g + 1}_{c}" for g in range(3) for c in range(10)]
d = Dataset(np.column_stack(cols), y, names)

# %%
dendro = cluster_features(d, n_clusters=3)
for members, rep in zip(dendro.final_clusters, dendro.representatives):
    print(f"{names[rep]:>6} represents", ", ".join(names[j] for j in members))

# %% [markdown]
# The first few merges, with the similarity at which they happened.

# %%
for step, a, b, sim, rep in list(dendro.merge_rows())[:5]:
    print(step, a, b, f"{sim:.3f}", names[rep])
