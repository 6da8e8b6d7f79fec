"""Exact nearest-neighbor queries under the Chebyshev and Euclidean norms.

Everything here is brute force. Distances are accumulated one coordinate at
a time in a fixed order, so ``dist(a, b)`` is bit-identical to
``dist(b, a)`` and to the corresponding entry of :func:`distance_matrix`.
Distance ties are broken by ascending sample index.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DataError


class Norm(str, Enum):
    CHEBYSHEV = "chebyshev"
    EUCLIDEAN = "euclidean"


def as_points(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DataError("points must be a 1-D or 2-D array")
    return a


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    norm: Norm = Norm.EUCLIDEAN

    def __post_init__(self):
        p = as_points(self.points).copy()
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise DataError("a point set needs at least one point and one dimension")
        if not np.all(np.isfinite(p)):
            raise DataError("points must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "norm", Norm(self.norm))

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class NeighborQueryResult:
    kth_distance: float
    kth_index: int


def _combine(diffs, norm: Norm) -> np.ndarray:
    # diffs: iterable of per-coordinate absolute differences, same shape
    diffs = iter(diffs)
    first = next(diffs)
    if norm is Norm.CHEBYSHEV:
        acc = first.copy()
        for d in diffs:
            np.maximum(acc, d, out=acc)
        return acc
    acc = first * first
    for d in diffs:
        acc += d * d
    return np.sqrt(acc)


def distances_from(points: np.ndarray, query: int, norm: Norm = Norm.EUCLIDEAN) -> np.ndarray:
    """Distances from point ``query`` to every point (itself included, at 0)."""
    points = as_points(points)
    q = points[query]
    return _combine((np.abs(points[:, k] - q[k]) for k in range(points.shape[1])), Norm(norm))


def distance_matrix(points, norm: Norm = Norm.EUCLIDEAN) -> np.ndarray:
    """Full symmetric N x N distance matrix with a zero diagonal."""
    points = as_points(points)
    cols = (np.abs(points[:, k, None] - points[None, :, k]) for k in range(points.shape[1]))
    return _combine(cols, Norm(norm))


def kth_neighbor(ps: PointSet, query: int, k: int) -> NeighborQueryResult:
    """K-th nearest other point of ``query``; the query itself is never returned."""
    n = len(ps)
    if not 1 <= k <= n - 1:
        raise ValueError(f"K must lie in [1, {n - 1}], got {k}")
    if not 0 <= query < n:
        raise IndexError(f"query index {query} out of range")
    d = distances_from(ps.points, query, ps.norm)
    others = np.delete(np.arange(n), query)
    order = others[np.argsort(d[others], kind="stable")]
    j = int(order[k - 1])
    return NeighborQueryResult(float(d[j]), j)


def nearest_neighbor(ps: PointSet, query: int) -> NeighborQueryResult:
    if len(ps) < 2:
        raise ValueError("nearest neighbor needs at least 2 points")
    return kth_neighbor(ps, query, 1)


def count_strictly_within(ps: PointSet, center: int, radius: float) -> int:
    """Number of points at distance strictly below ``radius``, the center included."""
    if not 0 <= center < len(ps):
        raise IndexError(f"center index {center} out of range")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    d = distances_from(ps.points, center, ps.norm)
    return int(np.count_nonzero(d < radius))


def kth_neighbor_distances(dist: np.ndarray, k: int) -> np.ndarray:
    """K-th smallest off-diagonal entry of every row of a distance matrix."""
    n = dist.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"K must lie in [1, {n - 1}], got {k}")
    d = dist.copy()
    np.fill_diagonal(d, np.inf)
    return np.partition(d, k - 1, axis=1)[:, k - 1]


def sorted_neighbor_distances(dist: np.ndarray) -> np.ndarray:
    """Row-sorted off-diagonal distances; column ``k - 1`` holds the K-th neighbor."""
    d = dist.copy()
    np.fill_diagonal(d, np.inf)
    d.sort(axis=1)
    return d[:, :-1]


def count_within_rows(dist: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Per row ``n``, the number of entries strictly below ``radii[n]``.

    ``radii`` may be 1-D (one radius per row) or 2-D ``(N, R)``, in which
    case the result has shape ``(N, R)``.
    """
    radii = np.asarray(radii)
    if radii.ndim == 1:
        return np.count_nonzero(dist < radii[:, None], axis=1)
    s = np.sort(dist, axis=1)
    return np.stack(
        [np.searchsorted(s[i], radii[i], side="left") for i in range(s.shape[0])]
    )


def nearest_neighbor_indices(dist: np.ndarray) -> np.ndarray:
    """Index of each row's nearest other point, ties to the lowest index."""
    d = dist.copy()
    np.fill_diagonal(d, np.inf)
    return np.argmin(d, axis=1)
