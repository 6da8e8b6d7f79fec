"""Tabular data model, CSV ingestion and resampling helpers.

All randomness goes through :func:`make_rng`, a PCG64 bit generator from
numpy seeded with an unsigned 64-bit integer, so runs reproduce across
platforms and numpy versions that keep the PCG64 stream stable.

Index conventions are zero-based throughout the Python API: fold labels lie
in ``0..S-1`` and permutations are bijections on ``0..N-1``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import DataError

SEED_MAX = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    """Return a PCG64 generator for an unsigned 64-bit ``seed``."""
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def spawn_seed(rng: np.random.Generator) -> int:
    """Draw a child seed from ``rng``."""
    return int(rng.integers(0, 2**63, dtype=np.int64))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """N samples of M named real features plus a real target.

    Arrays are copied and made read-only on construction.
    """

    features: np.ndarray
    target: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        features = _frozen(self.features)
        target = _frozen(self.target)
        if features.ndim == 1:
            features = _frozen(features[:, None])
        if features.ndim != 2 or features.shape[1] < 1:
            raise DataError("features must be a 2-D array with at least one column")
        if target.ndim != 1:
            raise DataError("target must be a 1-D array")
        if features.shape[0] != target.shape[0]:
            raise DataError(
                f"features have {features.shape[0]} rows but target has {target.shape[0]}"
            )
        if not (np.all(np.isfinite(features)) and np.all(np.isfinite(target))):
            raise DataError("dataset contains non-finite values")
        names = tuple(self.feature_names) or tuple(
            f"x{j + 1}" for j in range(features.shape[1])
        )
        if len(names) != features.shape[1]:
            raise DataError(
                f"{len(names)} feature names given for {features.shape[1]} columns"
            )
        if len(set(names)) != len(names):
            raise DataError("feature names must be distinct")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None

    def column(self, j: int) -> np.ndarray:
        return self.features[:, j]

    def subset_rows(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(self.features[rows], self.target[rows], self.feature_names)

    def with_features(self, features: np.ndarray) -> "Dataset":
        return Dataset(features, self.target, self.feature_names)


@dataclass(frozen=True)
class Standardization:
    """Per-column affine transform recorded by :func:`standardize`."""

    feature_mean: np.ndarray
    feature_std: np.ndarray
    target_mean: float
    target_std: float

    def invert(self, d: Dataset) -> Dataset:
        features = d.features * self.feature_std + self.feature_mean
        target = d.target * self.target_std + self.target_mean
        return Dataset(features, target, d.feature_names)


def standardize(d: Dataset) -> tuple[Dataset, Standardization]:
    """Center every feature and the target and scale them to unit sample std.

    The sample standard deviation uses divisor ``N - 1``. Zero-variance
    columns raise :class:`DataError` naming the column.
    """
    if d.n_samples < 2:
        raise DataError("standardization needs at least 2 samples")
    mean = d.features.mean(axis=0)
    std = d.features.std(axis=0, ddof=1)
    for j, s in enumerate(std):
        if not s > 0:
            raise DataError(f"feature {d.feature_names[j]!r} has zero variance")
    t_mean = float(d.target.mean())
    t_std = float(d.target.std(ddof=1))
    if not t_std > 0:
        raise DataError("target has zero variance")
    out = Dataset((d.features - mean) / std, (d.target - t_mean) / t_std, d.feature_names)
    return out, Standardization(_frozen(mean), _frozen(std), t_mean, t_std)


def zscore(v: np.ndarray, name: str = "column") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    s = v.std(ddof=1)
    if not s > 0:
        raise DataError(f"{name} has zero variance")
    return (v - v.mean()) / s


def add_jitter(d: Dataset, seed: int, magnitude: float = 1e-10) -> Dataset:
    """Perturb every column by uniform noise of ``magnitude`` times its scale.

    Breaks exact duplicates so that neighbor distances are nonzero. The
    scale of a column is its sample standard deviation, or 1 for constant
    columns.
    """
    rng = make_rng(seed)

    def scale(v):
        s = v.std(ddof=1) if v.shape[0] > 1 else 0.0
        return s if s > 0 else 1.0

    f_scale = np.array([scale(d.features[:, j]) for j in range(d.n_features)])
    noise_f = rng.uniform(-1.0, 1.0, size=d.features.shape) * magnitude * f_scale
    noise_t = rng.uniform(-1.0, 1.0, size=d.n_samples) * magnitude * scale(d.target)
    return Dataset(d.features + noise_f, d.target + noise_t, d.feature_names)


def load_csv(path, has_header: bool = True, target_column: str | int = -1) -> Dataset:
    """Read a numeric comma-separated file into a :class:`Dataset`.

    Parameters
    ----------
    path : path-like
        UTF-8 file, comma separator, ``.`` decimal point, no quoting.
    has_header : bool
        Whether the first line holds column names. Without a header the
        features are named ``x1..xM`` in file order.
    target_column : str or int
        Column name (requires a header) or zero-based column index;
        negative indices count from the end.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8") from exc

    header = None
    first_line = 1
    if has_header:
        if not rows:
            raise DataError(f"{path} is empty")
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        first_line = 2
    if not rows:
        raise DataError(f"{path} has no data rows")
    width = len(header) if header is not None else len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"line {i + first_line}: expected {width} fields, found {len(row)}"
            )
    if isinstance(target_column, str):
        if header is None:
            raise DataError("a target column name needs a header line")
        if target_column not in header:
            raise DataError(f"target column {target_column!r} not found in header")
        t = header.index(target_column)
    else:
        t = int(target_column)
        if not -width <= t < width:
            raise DataError(f"target column index {t} out of range for {width} columns")
        t %= width
    if width < 2:
        raise DataError("need at least one feature column besides the target")

    values = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"line {i + first_line}, column {j + 1}: non-numeric value {cell.strip()!r}"
                ) from None
            if not math.isfinite(v):
                raise DataError(
                    f"line {i + first_line}, column {j + 1}: non-finite value {cell.strip()!r}"
                )
            values[i, j] = v
    if values.shape[0] < 2:
        raise DataError("need at least 2 samples")

    keep = [j for j in range(width) if j != t]
    if header is not None:
        names = tuple(header[j] for j in keep)
    else:
        names = tuple(f"x{j + 1}" for j in range(len(keep)))
    return Dataset(values[:, keep], values[:, t], names)


def write_csv(d: Dataset, dest, target_name: str = "y") -> None:
    """Write ``d`` with a header line to a path or text stream.

    Values use Python's shortest round-tripping repr, so reloading is exact.
    """
    if hasattr(dest, "write"):
        _write_rows(d, dest, target_name)
        return
    with Path(dest).open("w", newline="", encoding="utf-8") as fh:
        _write_rows(d, fh, target_name)


def _write_rows(d, fh, target_name):
    fh.write(",".join((*d.feature_names, target_name)) + "\n")
    for row, t in zip(d.features, d.target):
        fh.write(",".join(repr(float(v)) for v in (*row, t)) + "\n")


def friedman_target(x: np.ndarray) -> np.ndarray:
    """Noise-free response ``10 sin(x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5``."""
    x = np.asarray(x, dtype=float)
    return (
        10.0 * np.sin(x[:, 0] * x[:, 1])
        + 20.0 * (x[:, 2] - 0.5) ** 2
        + 10.0 * x[:, 3]
        + 5.0 * x[:, 4]
    )


def generate_friedman(n: int, seed: int, noise_std: float = 1.0) -> Dataset:
    """Ten U(0,1) features; the target depends on the first five only.

    Features ``x6..x10`` are independent of the target by construction.
    The additive noise is Gaussian with zero mean and ``noise_std``.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = make_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n, 10))
    y = friedman_target(x) + noise_std * rng.standard_normal(n)
    return Dataset(x, y)


@dataclass(frozen=True)
class CvPartition:
    """Fold label per sample; labels in ``0..n_folds-1``."""

    fold_assignment: np.ndarray
    n_folds: int

    def train_indices(self, s: int) -> np.ndarray:
        """Indices of all samples outside fold ``s``."""
        return np.flatnonzero(self.fold_assignment != s)

    def test_indices(self, s: int) -> np.ndarray:
        return np.flatnonzero(self.fold_assignment == s)

    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.fold_assignment, minlength=self.n_folds)


def make_cv_partition(n: int, n_folds: int, seed: int) -> CvPartition:
    """Random partition of ``n`` samples into folds whose sizes differ by at most one."""
    if not 2 <= n_folds <= n:
        raise ValueError(f"fold count must lie in [2, {n}], got {n_folds}")
    return _partition(n, n_folds, make_rng(seed))


def _partition(n: int, n_folds: int, rng: np.random.Generator) -> CvPartition:
    labels = np.arange(n) % n_folds
    labels = labels[rng.permutation(n)]
    labels.setflags(write=False)
    return CvPartition(labels, n_folds)


def make_permutation(n: int, seed: int) -> np.ndarray:
    """Uniformly random permutation of ``0..n-1``."""
    if n < 1:
        raise ValueError(f"permutation length must be >= 1, got {n}")
    perm = make_rng(seed).permutation(n)
    perm.setflags(write=False)
    return perm


def names_to_indices(d: Dataset, names: Sequence[str | int]) -> list[int]:
    out = []
    for name in names:
        if isinstance(name, (int, np.integer)):
            if not 0 <= name < d.n_features:
                raise KeyError(f"feature index {name} out of range")
            out.append(int(name))
        else:
            out.append(d.feature_index(name))
    return out
