"""Supervised feature clustering driven by false-neighbor counts.

For a feature ``x`` and target ``y`` (both z-scored), each sample ``n`` has a
nearest neighbor ``m`` in the Euclidean ``(x, y)`` plane. Its false-neighbor
count is the number of other samples that are strictly closer to ``n`` than
``m`` along ``x`` alone. Two features whose count vectors are strongly
correlated support the prediction of ``y`` in the same places, and are
merged first by :func:`cluster_features`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dataset import Dataset, add_jitter, zscore
from .estimators import EstimatorConfig, mi_knn
from .exceptions import DataError
from .neighbors import Norm, distance_matrix, nearest_neighbor_indices


class RepresentativeRule(str, Enum):
    MAX_MI = "max_mi"
    MEAN = "mean"


@dataclass(frozen=True)
class FalseNeighborVector:
    counts: np.ndarray
    feature: int | None = None


def false_neighbor_counts(xi, y, feature: int | None = None) -> FalseNeighborVector:
    """False-neighbor count of every sample for feature ``xi`` against ``y``.

    Both inputs are z-scored first so the joint distance mixes commensurate
    scales. The anchor sample itself is never counted.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if xi.shape != y.shape:
        raise ValueError("feature and target lengths differ")
    if xi.size < 3:
        raise ValueError("false-neighbor counts need at least 3 samples")
    xs = zscore(xi, "feature")
    ys = zscore(y, "target")
    dx = distance_matrix(xs, Norm.EUCLIDEAN)
    joint = distance_matrix(np.column_stack([xs, ys]), Norm.EUCLIDEAN)
    m = nearest_neighbor_indices(joint)
    rows = np.arange(xs.size)
    radius = dx[rows, m]
    counts = np.count_nonzero(dx < radius[:, None], axis=1)
    # the anchor has x-distance 0 and is inside every positive radius
    counts -= radius > 0
    counts.setflags(write=False)
    return FalseNeighborVector(counts, feature)


def count_similarity(ca, cb) -> float:
    """Pearson correlation of two count vectors, with fixed values for constants."""
    a = np.asarray(ca, dtype=float)
    b = np.asarray(cb, dtype=float)
    a_const = np.all(a == a[0])
    b_const = np.all(b == b[0])
    if a_const and b_const:
        return 1.0 if np.array_equal(a, b) else 0.0
    if a_const or b_const:
        return 0.0
    if np.array_equal(a, b):
        return 1.0
    a = a - a.mean()
    b = b - b.mean()
    r = math.fsum(a * b) / math.sqrt(math.fsum(a * a) * math.fsum(b * b))
    return float(min(1.0, max(-1.0, r)))


def similarity(xi, xj, y) -> float:
    """Supervised similarity of two features with respect to ``y``."""
    return count_similarity(false_neighbor_counts(xi, y).counts, false_neighbor_counts(xj, y).counts)


def similarity_matrix(d: Dataset, unsupervised: bool = False) -> np.ndarray:
    """Pairwise similarity of all features; symmetric with a unit diagonal."""
    cols = [d.features[:, j] for j in range(d.n_features)]
    keys = cols if unsupervised else [false_neighbor_counts(c, d.target).counts for c in cols]
    m = d.n_features
    out = np.eye(m)
    for a in range(m):
        for b in range(a + 1, m):
            out[a, b] = out[b, a] = count_similarity(keys[a], keys[b])
    return out


@dataclass
class Merge:
    item_a: int
    item_b: int
    similarity: float
    new_item: int
    representative: int | None
    members: list[int]

    def to_dict(self) -> dict:
        return {
            "item_a": self.item_a,
            "item_b": self.item_b,
            "similarity": self.similarity,
            "new_item": self.new_item,
            "representative": self.representative,
            "members": list(self.members),
        }


@dataclass
class FeatureDendrogram:
    """Merge history and final partition of the features.

    Items ``0..M-1`` are the original features; merge number ``i`` creates
    item ``M + i``.
    """

    merges: list[Merge]
    final_clusters: list[list[int]]
    representatives: list[int | None]
    feature_names: list[str]
    config: dict = field(default_factory=dict)

    def labels(self) -> np.ndarray:
        out = np.empty(len(self.feature_names), dtype=int)
        for c, members in enumerate(self.final_clusters):
            out[members] = c
        return out

    def to_dict(self) -> dict:
        return {
            "merges": [m.to_dict() for m in self.merges],
            "final_clusters": [list(c) for c in self.final_clusters],
            "representatives": list(self.representatives),
            "feature_names": list(self.feature_names),
            "config": dict(self.config),
        }

    def merge_rows(self):
        """Flat ``(step, item_a, item_b, similarity, representative)`` rows."""
        for i, m in enumerate(self.merges, 1):
            yield i, m.item_a, m.item_b, m.similarity, m.representative


@dataclass
class _Item:
    members: list[int]
    representative: int | None
    column: np.ndarray
    key: np.ndarray


def cluster_features(
    d: Dataset,
    n_clusters: int | None = None,
    min_similarity: float | None = None,
    representative: RepresentativeRule | str = RepresentativeRule.MAX_MI,
    k: int = 6,
    seed: int | None = None,
    unsupervised: bool = False,
) -> FeatureDendrogram:
    """Agglomerative clustering of features by supervised similarity.

    Repeatedly merges the most similar pair of current items (original
    features or cluster representatives), ties broken lexicographically on
    item ids, until ``n_clusters`` items remain or the best similarity
    drops below ``min_similarity``. At least one stop rule is required;
    with both, the first one reached wins.

    Parameters
    ----------
    representative : {"max_mi", "mean"}
        ``max_mi`` elects the member feature with the largest single-feature
        MI with the target (estimator neighbor count ``k``), so every
        representative is an original feature. ``mean`` represents a
        cluster by the average of its z-scored members and reports no
        representative index.
    seed : int, optional
        When given, adds seeded 1e-10 jitter before anything else; useful
        when columns contain repeated values.
    unsupervised : bool
        Baseline mode: similarity is the plain correlation of the columns
        and ``y`` is ignored.
    """
    m = d.n_features
    if m < 2:
        raise ValueError("clustering needs at least 2 features")
    if n_clusters is None and min_similarity is None:
        raise ValueError("give n_clusters, min_similarity, or both")
    if n_clusters is not None and not 1 <= n_clusters <= m:
        raise ValueError(f"n_clusters must lie in [1, {m}], got {n_clusters}")
    if min_similarity is not None and not -1.0 <= min_similarity <= 1.0:
        raise ValueError("min_similarity must lie in [-1, 1]")
    rule = RepresentativeRule(representative)
    if seed is not None:
        d = add_jitter(d, seed)

    y = d.target
    z = np.column_stack([zscore(d.features[:, j], repr(d.feature_names[j])) for j in range(m)])
    mi_cache: dict[int, float] = {}

    def feature_mi(j):
        if j not in mi_cache:
            mi_cache[j] = mi_knn(z[:, j], y, EstimatorConfig(k)).value
        return mi_cache[j]

    def make_item(members, column, rep):
        key = column if unsupervised else false_neighbor_counts(column, y).counts
        return _Item(sorted(members), rep, column, key)

    items = {j: make_item([j], z[:, j], j) for j in range(m)}
    sims: dict[tuple[int, int], float] = {}
    for a in range(m):
        for b in range(a + 1, m):
            sims[a, b] = count_similarity(items[a].key, items[b].key)

    merges: list[Merge] = []
    next_id = m
    while len(items) > 1:
        if n_clusters is not None and len(items) <= n_clusters:
            break
        best = max(sims.values())
        if min_similarity is not None and best < min_similarity:
            break
        a, b = min(pair for pair, v in sims.items() if v == best)
        members = items[a].members + items[b].members
        if rule is RepresentativeRule.MAX_MI:
            rep = max(sorted(members), key=lambda j: (feature_mi(j), -j))
            column = z[:, rep]
        else:
            rep = None
            column = z[:, sorted(members)].mean(axis=1)
        new = make_item(members, column, rep)
        del items[a], items[b]
        sims = {p: v for p, v in sims.items() if a not in p and b not in p}
        for other, item in items.items():
            sims[other, next_id] = count_similarity(item.key, new.key)
        items[next_id] = new
        merges.append(Merge(a, b, float(best), next_id, rep, new.members))
        next_id += 1

    final = sorted(items.values(), key=lambda it: it.members[0])
    return FeatureDendrogram(
        merges=merges,
        final_clusters=[it.members for it in final],
        representatives=[it.representative for it in final],
        feature_names=list(d.feature_names),
        config={
            "n_clusters": n_clusters,
            "min_similarity": min_similarity,
            "representative": rule.value,
            "k": int(k),
            "seed": seed,
            "unsupervised": bool(unsupervised),
        },
    )
