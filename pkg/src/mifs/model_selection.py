"""Resampling tools: choosing K and testing whether a feature adds information.

``choose_k`` compares cross-validated MI estimates on the real data with
estimates on data whose target has been permuted once; the K giving the
largest standardized gap ``t_K`` wins. ``permutation_stop_test`` turns
repeated permutations of one candidate column into a p-value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dataset import Dataset, _partition, make_rng, standardize
from .estimators import EstimatorConfig, mi_knn, mi_knn_grid
from .neighbors import Norm

DEFAULT_PERMUTATIONS = 100
DEFAULT_ALPHA = 0.05


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Order-preserving map, optionally on a thread pool."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def t_statistic(sample_a, sample_b) -> float:
    """Standardized mean difference ``(mean_a - mean_b) / sqrt(var_a + var_b)``.

    Variances use divisor ``n - 1``. When both variances vanish the result
    is 0 for equal means and a signed infinity otherwise (maximal
    significance).
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 values")
    diff = a.mean() - b.mean()
    denom = math.sqrt(a.var(ddof=1) + b.var(ddof=1))
    if denom == 0:
        if diff == 0:
            return 0.0
        return math.copysign(math.inf, diff)
    return float(diff / denom)


def default_k_grid(n_samples: int) -> tuple[int, int]:
    """Default search range ``2..min(30, N // 4)``."""
    return 2, max(2, min(30, n_samples // 4))


def max_k_for_folds(n_samples: int, n_folds: int) -> int:
    """Largest K usable on every leave-one-fold-out subset."""
    return n_samples - math.ceil(n_samples / n_folds) - 1


@dataclass
class KSelectionReport:
    """Outcome of :func:`choose_k`.

    Per-feature arrays have shape ``(len(features), len(k_grid))``.
    """

    k_grid: list[int]
    features: list[int]
    feature_names: list[str]
    tk: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    mu_perm: np.ndarray
    sigma_perm: np.ndarray
    aggregate: np.ndarray
    chosen_k: int
    aggregation: str = "max"
    n_folds: int = 20
    seed: int = 0

    def per_feature_best_k(self) -> dict[str, int]:
        return {
            name: self.k_grid[int(np.argmax(self.tk[i]))]
            for i, name in enumerate(self.feature_names)
        }

    def to_dict(self) -> dict:
        return {
            "k_grid": list(self.k_grid),
            "features": list(self.features),
            "feature_names": list(self.feature_names),
            "tk": self.tk.tolist(),
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "mu_perm": self.mu_perm.tolist(),
            "sigma_perm": self.sigma_perm.tolist(),
            "aggregate": self.aggregate.tolist(),
            "chosen_k": self.chosen_k,
            "aggregation": self.aggregation,
            "n_folds": self.n_folds,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KSelectionReport":
        arr = lambda v: np.array(v, dtype=float)  # noqa: E731
        return cls(
            k_grid=list(d["k_grid"]),
            features=list(d["features"]),
            feature_names=list(d["feature_names"]),
            tk=arr(d["tk"]),
            mu=arr(d["mu"]),
            sigma=arr(d["sigma"]),
            mu_perm=arr(d["mu_perm"]),
            sigma_perm=arr(d["sigma_perm"]),
            aggregate=arr(d["aggregate"]),
            chosen_k=int(d["chosen_k"]),
            aggregation=d["aggregation"],
            n_folds=int(d["n_folds"]),
            seed=int(d["seed"]),
        )

    def tk_rows(self):
        """Flat ``(feature name, K, t_K)`` rows for plotting."""
        for i, name in enumerate(self.feature_names):
            for j, k in enumerate(self.k_grid):
                yield name, k, float(self.tk[i, j])


def choose_k(
    d: Dataset,
    features: Sequence[int] | None = None,
    k_min: int = 2,
    k_max: int = 30,
    n_folds: int = 20,
    seed: int = 0,
    aggregation: str = "max",
    norm: Norm = Norm.EUCLIDEAN,
    standardize_data: bool = True,
    threads: int = 1,
) -> KSelectionReport:
    """Pick the neighbor count K by cross-validation against a permuted baseline.

    One random partition into ``n_folds`` folds and one permutation of the
    target are drawn up front. For every K in ``k_min..k_max`` and every
    feature, MI(X_j, Y) and MI(X_j, pi(Y)) are estimated on each
    leave-one-fold-out subset and compared with :func:`t_statistic`. Per-K
    scores are aggregated across features (``"max"`` or ``"mean"``) and the
    smallest K with the largest score is returned.
    """
    n = d.n_samples
    if k_min < 1 or k_max < k_min:
        raise ValueError(f"empty K grid {k_min}..{k_max}")
    if n_folds < 2 or n_folds > n:
        raise ValueError(f"fold count must lie in [2, {n}], got {n_folds}")
    bound = max_k_for_folds(n, n_folds)
    if k_max > bound:
        raise ValueError(
            f"k_max={k_max} too large: folds leave {bound + 1} samples, so K <= {bound}"
        )
    if aggregation not in ("max", "mean"):
        raise ValueError(f"unknown aggregation {aggregation!r}")
    if features is None:
        features = list(range(d.n_features))
    features = [int(j) for j in features]
    if not features:
        raise ValueError("no candidate features")
    for j in features:
        if not 0 <= j < d.n_features:
            raise IndexError(f"feature index {j} out of range")
    if standardize_data:
        d, _ = standardize(d)

    rng = make_rng(seed)
    partition = _partition(n, n_folds, rng)
    perm = rng.permutation(n)
    ks = np.arange(k_min, k_max + 1)
    y = d.target
    y_perm = y[perm]
    folds = [partition.train_indices(s) for s in range(n_folds)]

    def run(j):
        x = d.features[:, j]
        true = np.stack([mi_knn_grid(x[rows], y[rows], ks, norm) for rows in folds])
        shuffled = np.stack([mi_knn_grid(x[rows], y_perm[rows], ks, norm) for rows in folds])
        return true, shuffled

    results = parallel_map(run, features, threads)
    shape = (len(features), ks.size)
    tk, mu, sigma, mu_p, sigma_p = (np.empty(shape) for _ in range(5))
    for i, (true, shuffled) in enumerate(results):
        mu[i] = true.mean(axis=0)
        sigma[i] = true.std(axis=0, ddof=1)
        mu_p[i] = shuffled.mean(axis=0)
        sigma_p[i] = shuffled.std(axis=0, ddof=1)
        tk[i] = [t_statistic(true[:, c], shuffled[:, c]) for c in range(ks.size)]
    agg = tk.max(axis=0) if aggregation == "max" else tk.mean(axis=0)
    # np.argmax returns the first maximum, i.e. the smallest K among ties
    chosen = int(ks[int(np.argmax(agg))])
    return KSelectionReport(
        k_grid=[int(k) for k in ks],
        features=features,
        feature_names=[d.feature_names[j] for j in features],
        tk=tk,
        mu=mu,
        sigma=sigma,
        mu_perm=mu_p,
        sigma_perm=sigma_p,
        aggregate=agg,
        chosen_k=chosen,
        aggregation=aggregation,
        n_folds=n_folds,
        seed=int(seed),
    )


@dataclass
class PermutationTestResult:
    reference_mi: float
    permuted_mi: list[float] = field(default_factory=list)
    p_value: float = 1.0

    @property
    def n_permutations(self) -> int:
        return len(self.permuted_mi)

    def to_dict(self) -> dict:
        return {
            "reference_mi": self.reference_mi,
            "permuted_mi": list(self.permuted_mi),
            "p_value": self.p_value,
        }


def permutation_stop_test(
    d: Dataset,
    selected: Sequence[int],
    candidate: int,
    k: int,
    n_permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
    norm: Norm = Norm.EUCLIDEAN,
    cv_folds: int | None = None,
    threads: int = 1,
) -> PermutationTestResult:
    """p-value for "the candidate adds nothing to the selected set".

    The reference is MI(selected + [candidate], Y). Each of the
    ``n_permutations`` replicates shuffles only the candidate column and
    re-estimates; the p-value is the fraction of replicates reaching the
    reference (``>=``). With ``cv_folds`` set, every estimate is replaced
    by its mean over leave-one-fold-out subsets of one shared partition.

    The dataset is used as given; standardize beforehand if needed.
    """
    selected = [int(j) for j in selected]
    candidate = int(candidate)
    for j in (*selected, candidate):
        if not 0 <= j < d.n_features:
            raise IndexError(f"feature index {j} out of range")
    if candidate in selected:
        raise ValueError(f"candidate {candidate} is already selected")
    if len(set(selected)) != len(selected):
        raise ValueError("selected features contain duplicates")
    if n_permutations < 1:
        raise ValueError("need at least one permutation")

    rng = make_rng(seed)
    perms = [rng.permutation(d.n_samples) for _ in range(n_permutations)]
    folds = None
    if cv_folds is not None:
        if not 2 <= cv_folds <= d.n_samples:
            raise ValueError(f"fold count must lie in [2, {d.n_samples}]")
        part = _partition(d.n_samples, cv_folds, rng)
        folds = [part.train_indices(s) for s in range(cv_folds)]

    base = d.features[:, selected]
    cand = d.features[:, candidate]
    config = EstimatorConfig(k, norm)

    def estimate(column):
        x = np.column_stack([base, column])
        if folds is None:
            return mi_knn(x, d.target, config).value
        return math.fsum(mi_knn(x[r], d.target[r], config).value for r in folds) / len(folds)

    ref = estimate(cand)
    permuted = parallel_map(lambda p: estimate(cand[p]), perms, threads)
    exceed = sum(1 for v in permuted if v >= ref)
    return PermutationTestResult(ref, [float(v) for v in permuted], exceed / n_permutations)
