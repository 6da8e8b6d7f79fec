import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from mifs.dataset import (
    Dataset,
    add_jitter,
    friedman_target,
    generate_friedman,
    load_csv,
    make_cv_partition,
    make_permutation,
    standardize,
    write_csv,
)
from mifs.exceptions import DataError


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_with_header(tmp_path):
    p = write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
    d = load_csv(p, target_column="y")
    assert d.feature_names == ("a", "b")
    assert d.n_samples == 3
    np.testing.assert_array_equal(d.target, [3, 6, 9])
    np.testing.assert_array_equal(d.features, [[1, 2], [4, 5], [7, 8]])


def test_load_target_in_middle(tmp_path):
    p = write(tmp_path, "a,y,b\n1,2,3\n4,5,6\n")
    d = load_csv(p, target_column="y")
    assert d.feature_names == ("a", "b")
    np.testing.assert_array_equal(d.target, [2, 5])


def test_load_nan_cell_names_row_and_column(tmp_path):
    p = write(tmp_path, "a,b,y\n1,2,3\n4,NaN,6\n")
    with pytest.raises(DataError, match=r"line 3, column 2"):
        load_csv(p, target_column="y")


def test_load_headerless_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    values = rng.normal(size=(100, 11))
    p = tmp_path / "raw.csv"
    p.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in values) + "\n")
    d = load_csv(p, has_header=False, target_column=10)
    assert d.n_features == 10
    assert d.feature_names == tuple(f"x{j}" for j in range(1, 11))
    np.testing.assert_array_equal(d.features, values[:, :10])
    np.testing.assert_array_equal(d.target, values[:, 10])


@pytest.mark.parametrize(
    "text, kwargs, match",
    [
        ("a,b,y\n1,2,3\n4,5\n", {"target_column": "y"}, "expected 3 fields"),
        ("a,b,y\n1,2,3\n4,5,6\n", {"target_column": "z"}, "not found"),
        ("a,b,y\n1,2,3\n", {"target_column": "y"}, "at least 2 samples"),
        ("a,b,y\n1,x,3\n4,5,6\n", {"target_column": "y"}, "non-numeric"),
        ("a,b,y\n1,inf,3\n4,5,6\n", {"target_column": "y"}, "non-finite"),
    ],
)
def test_load_errors(tmp_path, text, kwargs, match):
    with pytest.raises(DataError, match=match):
        load_csv(write(tmp_path, text), **kwargs)


def test_load_missing_file(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        load_csv(tmp_path / "nope.csv")


def test_write_then_load_is_exact(tmp_path):
    d = generate_friedman(20, 5)
    write_csv(d, tmp_path / "f.csv")
    back = load_csv(tmp_path / "f.csv", target_column="y")
    np.testing.assert_array_equal(back.features, d.features)
    np.testing.assert_array_equal(back.target, d.target)


def test_dataset_is_immutable():
    d = generate_friedman(5, 0)
    with pytest.raises(ValueError):
        d.features[0, 0] = 1.0


def test_dataset_rejects_duplicate_names():
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 2)), np.zeros(3), ("a", "a"))


def test_standardize_symmetric_three_points():
    d = Dataset(np.array([[1.0], [2.0], [3.0]]), np.array([0.0, 1.0, 5.0]))
    s, rec = standardize(d)
    np.testing.assert_allclose(s.features[:, 0], [-1, 0, 1], atol=1e-15)
    assert rec.feature_std[0] == 1.0


def test_standardize_idempotent():
    d, _ = standardize(generate_friedman(50, 1))
    again, _ = standardize(d)
    np.testing.assert_allclose(again.features, d.features, atol=1e-9)
    np.testing.assert_allclose(again.target, d.target, atol=1e-9)


def test_standardize_zero_variance_names_column():
    d = Dataset(np.array([[0.0, 1.0], [0.0, 2.0], [0.0, 4.0]]), np.array([1.0, 2.0, 3.0]), ("c", "v"))
    with pytest.raises(DataError, match="'c'"):
        standardize(d)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(3, 30), st.integers(1, 4)),
           elements=st.floats(-1e3, 1e3, allow_nan=False)),
)
def test_standardize_roundtrip_and_moments(x):
    if np.any(x.std(axis=0) < 1e-3):
        return
    y = x.sum(axis=1) + np.arange(x.shape[0])
    d = Dataset(x, y)
    s, rec = standardize(d)
    np.testing.assert_allclose(s.features.mean(axis=0), 0, atol=1e-9)
    np.testing.assert_allclose(s.features.std(axis=0, ddof=1), 1, atol=1e-9)
    back = rec.invert(s)
    np.testing.assert_allclose(back.features, x, atol=1e-9, rtol=0)
    np.testing.assert_allclose(back.target, y, atol=1e-9, rtol=0)


def test_friedman_formula_noise_free():
    x = np.array([[1.0, 1.0, 0.5, 0, 0, 0, 0, 0, 0, 0]])
    assert friedman_target(x)[0] == pytest.approx(10 * math.sin(1.0), abs=1e-15)
    assert friedman_target(x)[0] == pytest.approx(8.414709848078965)


def test_friedman_zero_noise_matches_formula():
    d = generate_friedman(50, 11, noise_std=0.0)
    np.testing.assert_array_equal(d.target, friedman_target(d.features))


def test_friedman_shape_and_determinism():
    a = generate_friedman(100, 42)
    b = generate_friedman(100, 42)
    assert a.features.shape == (100, 10)
    assert a.feature_names == tuple(f"x{j}" for j in range(1, 11))
    assert a.features.tobytes() == b.features.tobytes()
    assert a.target.tobytes() == b.target.tobytes()
    assert generate_friedman(100, 43).target.tobytes() != a.target.tobytes()


def test_friedman_rejects_empty():
    with pytest.raises(ValueError):
        generate_friedman(0, 1)


def test_friedman_marginals_uniform():
    d = generate_friedman(10000, 2024)
    for j in range(10):
        assert stats.kstest(d.features[:, j], "uniform").pvalue > 0.01


def test_friedman_noise_is_standard_normal():
    d = generate_friedman(10000, 99)
    resid = d.target - friedman_target(d.features)
    assert stats.kstest(resid, "norm").pvalue > 0.01


@pytest.mark.parametrize("n, s, sizes", [(6, 3, [2, 2, 2]), (7, 3, [2, 2, 3]), (100, 20, [5] * 20)])
def test_partition_sizes(n, s, sizes):
    part = make_cv_partition(n, s, seed=0)
    assert sorted(part.fold_sizes().tolist()) == sizes
    assert part.train_indices(0).size == n - part.fold_sizes()[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 200).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n))),
       st.integers(0, 2**64 - 1))
def test_partition_property(ns, seed):
    n, s = ns
    part = make_cv_partition(n, s, seed)
    folds = [set(part.test_indices(i).tolist()) for i in range(s)]
    assert set().union(*folds) == set(range(n))
    assert sum(len(f) for f in folds) == n
    sizes = part.fold_sizes()
    assert sizes.min() >= 1 and sizes.max() - sizes.min() <= 1


@pytest.mark.parametrize("n, s", [(5, 1), (5, 6)])
def test_partition_range(n, s):
    with pytest.raises(ValueError):
        make_cv_partition(n, s, 0)


def test_partition_deterministic():
    a = make_cv_partition(50, 7, 123).fold_assignment
    b = make_cv_partition(50, 7, 123).fold_assignment
    assert np.array_equal(a, b)


def test_permutation_identity_and_bijection():
    assert make_permutation(1, 5).tolist() == [0]
    assert sorted(make_permutation(50, 5).tolist()) == list(range(50))


def test_permutation_uniform_positions():
    # chi-square on the position of each element across 10000 draws
    counts = np.zeros((5, 5))
    for seed in range(10000):
        perm = make_permutation(5, seed)
        counts[np.arange(5), perm] += 1
    for row in counts:
        assert stats.chisquare(row).pvalue > 0.01 / 5


def test_jitter_breaks_duplicates_and_is_tiny():
    d = Dataset(np.array([[1.0], [1.0], [2.0]]), np.array([0.0, 0.0, 1.0]))
    j = add_jitter(d, seed=1)
    assert j.features[0, 0] != j.features[1, 0]
    assert np.max(np.abs(j.features - d.features)) < 1e-9
    assert np.array_equal(add_jitter(d, seed=1).features, j.features)
