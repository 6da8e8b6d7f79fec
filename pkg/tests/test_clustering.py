import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score

from mifs.clustering import (
    cluster_features,
    count_similarity,
    false_neighbor_counts,
    similarity,
    similarity_matrix,
)
from mifs.dataset import Dataset, zscore


def brute_counts(x, y):
    """Double-loop reference on the z-scored inputs.

    The z-scoring itself is shared with the library so that exact distance
    ties land on the same side in both computations.
    """
    n = len(x)
    x, y = zscore(x).tolist(), zscore(y).tolist()
    out = []
    for i in range(n):
        best, m = math.inf, None
        for j in range(n):
            if j != i:
                dist = math.sqrt((x[j] - x[i]) ** 2 + (y[j] - y[i]) ** 2)
                if dist < best:
                    best, m = dist, j
        r = abs(x[m] - x[i])
        out.append(sum(1 for j in range(n) if j != i and abs(x[j] - x[i]) < r))
    return out


def planted(seed, n=200, copies=10, copy_noise=0.01):
    rng = np.random.default_rng(seed)
    s = rng.uniform(size=(n, 3))
    y = (
        np.sin(2 * np.pi * s[:, 0])
        + 2 * s[:, 1] ** 2
        + 3 * np.abs(s[:, 2] - 0.5)
        + 0.1 * rng.standard_normal(n)
    )
    cols, groups = [], []
    for g in range(3):
        for _ in range(copies):
            cols.append(s[:, g] + copy_noise * rng.standard_normal(n))
            groups.append(g)
    return Dataset(np.column_stack(cols), y), groups


def complementary(seed, n=200):
    rng = np.random.default_rng(seed)
    y = rng.uniform(size=n)
    low = y < 0.5
    xi = np.where(low, y, rng.uniform(size=n)) + 0.02 * rng.standard_normal(n)
    xj = np.where(low, rng.uniform(size=n), y) + 0.02 * rng.standard_normal(n)
    return xi, xj, y


def test_diagonal_gives_zero_counts():
    x = np.random.default_rng(0).normal(size=50)
    assert not false_neighbor_counts(x, 3 * x + 1).counts.any()


def test_three_point_fixture():
    # point 0's joint nearest neighbor is point 2, its farthest along x;
    # point 1 sits in between along x
    x, y = [0.0, 0.6, 1.0], [0.0, 1.0, 0.0]
    assert brute_counts(x, y) == [1, 0, 0]
    assert false_neighbor_counts(x, y).counts.tolist() == [1, 0, 0]


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 60), st.integers(0, 2**32 - 1), st.booleans())
def test_counts_match_brute_force(n, seed, rounded):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=n), rng.normal(size=n)
    if rounded:
        x = np.round(x, 1) + np.arange(n) * 1e-9
    counts = false_neighbor_counts(x, y).counts
    assert counts.tolist() == brute_counts(x, y)
    assert counts.min() >= 0 and counts.max() <= n - 2


def test_counts_errors():
    with pytest.raises(ValueError):
        false_neighbor_counts([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        false_neighbor_counts([1.0, 2.0, 3.0], [1.0, 2.0])


def test_count_similarity_rules():
    assert count_similarity([1, 1, 1], [1, 1, 1]) == 1.0
    assert count_similarity([1, 1, 1], [2, 2, 2]) == 0.0
    assert count_similarity([1, 1, 1], [0, 1, 2]) == 0.0
    assert count_similarity([0, 1, 2], [0, 1, 2]) == 1.0
    assert count_similarity([0, 1, 2], [2, 1, 0]) == pytest.approx(-1.0)
    a, b = [0, 3, 1, 4, 2], [1, 2, 0, 4, 4]
    assert count_similarity(a, b) == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-14)


def test_similarity_duplicate_and_symmetry():
    rng = np.random.default_rng(1)
    x, z = rng.normal(size=(2, 80))
    y = x + 0.5 * z + 0.1 * rng.normal(size=80)
    assert similarity(x, x.copy(), y) == 1.0
    assert similarity(x, z, y) == similarity(z, x, y)
    assert -1.0 <= similarity(x, z, y) <= 1.0


def test_similarity_complementary_features():
    vals = [similarity(*complementary(s)) for s in range(20)]
    assert np.mean(vals) < 0.5


def test_similarity_matrix_properties():
    d, _ = planted(0, n=80, copies=2)
    s = similarity_matrix(d)
    assert np.array_equal(s, s.T)
    assert np.all(np.diag(s) == 1.0)
    assert np.all((s >= -1) & (s <= 1))
    u = similarity_matrix(d, unsupervised=True)
    np.testing.assert_allclose(u, np.corrcoef(d.features.T), atol=1e-12)


def test_no_merges_when_target_is_m():
    d, _ = planted(0, n=60, copies=2)
    dendro = cluster_features(d, n_clusters=d.n_features)
    assert dendro.merges == []
    assert dendro.final_clusters == [[j] for j in range(d.n_features)]
    assert dendro.representatives == list(range(d.n_features))


def test_duplicate_pair_merges_at_one():
    rng = np.random.default_rng(2)
    x = rng.normal(size=50)
    d = Dataset(np.column_stack([x, x]), x**2 + rng.normal(size=50))
    dendro = cluster_features(d, n_clusters=1)
    assert len(dendro.merges) == 1
    m = dendro.merges[0]
    assert (m.item_a, m.item_b, m.similarity, m.new_item) == (0, 1, 1.0, 2)
    assert dendro.final_clusters == [[0, 1]]


@pytest.mark.parametrize("target", [1, 2, 3, 5, 7])
def test_exact_cluster_count_and_forest(target):
    d, _ = planted(3, n=80, copies=3)
    dendro = cluster_features(d, n_clusters=target)
    assert len(dendro.final_clusters) == target
    assert sorted(j for c in dendro.final_clusters for j in c) == list(range(9))
    assert len(dendro.merges) == 9 - target
    consumed = set()
    for i, m in enumerate(dendro.merges):
        assert m.new_item == 9 + i
        assert m.item_a < m.new_item and m.item_b < m.new_item
        assert m.item_a not in consumed and m.item_b not in consumed
        consumed |= {m.item_a, m.item_b}
    for c, rep in zip(dendro.final_clusters, dendro.representatives):
        assert rep in c


def test_planted_groups_recovered():
    scores = []
    for s in range(20):
        d, groups = planted(s)
        dendro = cluster_features(d, n_clusters=3)
        scores.append(adjusted_rand_score(groups, dendro.labels()))
    assert min(scores) >= 0.9


def test_min_similarity_stop():
    d, _ = planted(4, n=100, copies=3)
    dendro = cluster_features(d, min_similarity=0.5)
    assert all(m.similarity >= 0.5 for m in dendro.merges)
    both = cluster_features(d, n_clusters=5, min_similarity=0.5)
    assert len(both.final_clusters) >= 5


def test_scale_invariance():
    d, _ = planted(5, n=80, copies=3)
    scaled = np.array(d.features)
    scaled[:, 2] *= 7.5
    scaled[:, 4] *= 0.01
    a = cluster_features(d, n_clusters=3).to_dict()
    b = cluster_features(Dataset(scaled, d.target), n_clusters=3).to_dict()
    assert [(m["item_a"], m["item_b"], m["members"]) for m in a["merges"]] == [
        (m["item_a"], m["item_b"], m["members"]) for m in b["merges"]
    ]
    assert a["final_clusters"] == b["final_clusters"]


def test_mean_rule_and_unsupervised():
    d, groups = planted(6, n=120, copies=3)
    mean = cluster_features(d, n_clusters=3, representative="mean")
    assert all(r is None for r in mean.representatives)
    assert adjusted_rand_score(groups, mean.labels()) >= 0.9
    unsup = cluster_features(d, n_clusters=3, unsupervised=True)
    assert unsup.config["unsupervised"] is True
    assert adjusted_rand_score(groups, unsup.labels()) >= 0.9


def test_max_mi_representative_is_best_member():
    from mifs.estimators import EstimatorConfig, mi_knn
    from mifs.dataset import zscore

    d, _ = planted(7, n=100, copies=3)
    dendro = cluster_features(d, n_clusters=3)
    for c, rep in zip(dendro.final_clusters, dendro.representatives):
        mis = {j: mi_knn(zscore(d.features[:, j]), d.target, EstimatorConfig(6)).value for j in c}
        assert mis[rep] == max(mis.values())


def test_deterministic_and_jitter():
    d, _ = planted(8, n=60, copies=2)
    assert cluster_features(d, n_clusters=2).to_dict() == cluster_features(d, n_clusters=2).to_dict()
    a = cluster_features(d, n_clusters=2, seed=3).to_dict()
    assert a == cluster_features(d, n_clusters=2, seed=3).to_dict()
    assert a["config"]["seed"] == 3


@pytest.mark.parametrize(
    "kwargs",
    [{}, {"n_clusters": 0}, {"n_clusters": 7}, {"min_similarity": 1.5}, {"n_clusters": 2, "representative": "median"}],
)
def test_stop_configuration_errors(kwargs):
    d, _ = planted(0, n=30, copies=2)
    with pytest.raises(ValueError):
        cluster_features(d, **kwargs)


def test_merge_rows():
    d, _ = planted(0, n=60, copies=2)
    dendro = cluster_features(d, n_clusters=2)
    rows = list(dendro.merge_rows())
    assert [r[0] for r in rows] == list(range(1, 5))
