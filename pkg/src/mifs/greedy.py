"""Greedy forward and forward-backward feature subset search.

Each step adds the unselected feature whose addition gives the largest
estimated MI with the target (ties to the lowest index), then asks
:func:`permutation_stop_test` whether that winner is significant. The search
never stops merely because an estimate went down; estimated MI tends to
fall as the subset dimension grows, so comparing raw values across sizes is
unreliable. That behavior is available only as the ``legacy_stop`` baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .dataset import Dataset, make_rng, spawn_seed, standardize
from .estimators import EstimatorConfig, mi_knn
from .exceptions import EstimatorError
from .model_selection import DEFAULT_ALPHA, DEFAULT_PERMUTATIONS, parallel_map, permutation_stop_test
from .neighbors import Norm


class Action(str, Enum):
    ADD = "add"
    REMOVE = "remove"
    STOP = "stop"


class Reason(str, Enum):
    SIGNIFICANT = "significant"
    NOT_SIGNIFICANT = "not_significant"
    MI_INCREASED_ON_REMOVAL = "mi_increased_on_removal"
    CANDIDATES_EXHAUSTED = "candidates_exhausted"
    MAX_SIZE_REACHED = "max_size_reached"
    MI_DECREASED = "mi_decreased"


@dataclass
class SelectionStep:
    action: Action
    feature: int | None
    mi_value: float | None
    p_value: float | None
    reason: Reason
    candidate: int | None = None

    def to_dict(self) -> dict:
        return {
            "action": self.action.value,
            "feature": self.feature,
            "mi_value": self.mi_value,
            "p_value": self.p_value,
            "reason": self.reason.value,
            "candidate": self.candidate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionStep":
        return cls(
            Action(d["action"]),
            d["feature"],
            d["mi_value"],
            d["p_value"],
            Reason(d["reason"]),
            d.get("candidate"),
        )


@dataclass
class SelectionTrace:
    steps: list[SelectionStep]
    final_set: list[int]
    feature_names: list[str]
    config: dict = field(default_factory=dict)

    def replay(self) -> list[int]:
        """Apply the Add/Remove steps to the empty set."""
        current: list[int] = []
        for step in self.steps:
            if step.action is Action.ADD:
                if step.feature in current:
                    raise ValueError(f"feature {step.feature} added twice")
                current.append(step.feature)
            elif step.action is Action.REMOVE:
                current.remove(step.feature)
        return current

    @property
    def selected_names(self) -> list[str]:
        return [self.feature_names[j] for j in self.final_set]

    def log_lines(self) -> list[str]:
        lines = []
        for i, s in enumerate(self.steps, 1):
            name = self.feature_names[s.feature] if s.feature is not None else "-"
            mi = "" if s.mi_value is None else f" mi={s.mi_value:.6g}"
            p = "" if s.p_value is None else f" p={s.p_value:.4g}"
            lines.append(f"{i:3d} {s.action.value:<6} {name:<12}{mi}{p} ({s.reason.value})")
        return lines

    def to_dict(self) -> dict:
        return {
            "steps": [s.to_dict() for s in self.steps],
            "final_set": list(self.final_set),
            "final_names": self.selected_names,
            "feature_names": list(self.feature_names),
            "config": dict(self.config),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionTrace":
        return cls(
            [SelectionStep.from_dict(s) for s in d["steps"]],
            list(d["final_set"]),
            list(d["feature_names"]),
            dict(d["config"]),
        )


def evaluate_subset(
    d: Dataset, subset: Sequence[int], k: int, norm: Norm = Norm.EUCLIDEAN
) -> float:
    """MI between the given feature columns (in the given order) and the target."""
    subset = [int(j) for j in subset]
    if not subset:
        raise ValueError("subset must be nonempty")
    for j in subset:
        if not 0 <= j < d.n_features:
            raise IndexError(f"feature index {j} out of range")
    return mi_knn(d.features[:, subset], d.target, EstimatorConfig(k, norm)).value


def _argmax(scores: dict[int, float]) -> int:
    # lowest feature index among equal maxima
    best = max(scores.values())
    return min(j for j, v in scores.items() if v == best)


class _Search:
    def __init__(self, d, k, alpha, n_permutations, max_size, seed, norm,
                 legacy_stop, cv_folds, threads, backward):
        self.d = d
        self.k = k
        self.alpha = alpha
        self.n_permutations = n_permutations
        self.max_size = d.n_features if max_size is None else int(max_size)
        self.norm = norm
        self.legacy_stop = legacy_stop
        self.cv_folds = cv_folds
        self.threads = threads
        self.backward = backward
        self.rng = make_rng(seed)
        self.steps: list[SelectionStep] = []
        self.selected: list[int] = []
        self.visited = {frozenset()}
        self.current_mi = None

    def mi(self, columns):
        try:
            return evaluate_subset(self.d, columns, self.k, self.norm)
        except EstimatorError as exc:
            names = ", ".join(self.d.feature_names[j] for j in columns)
            raise EstimatorError(f"estimating MI of ({names}): {exc}") from exc

    def stop(self, reason, mi_value=None, p_value=None, candidate=None):
        self.steps.append(SelectionStep(Action.STOP, None, mi_value, p_value, reason, candidate))

    def run(self):
        while True:
            if len(self.selected) >= self.max_size:
                return self.stop(Reason.MAX_SIZE_REACHED)
            candidates = [
                j for j in range(self.d.n_features)
                if j not in self.selected
                and frozenset((*self.selected, j)) not in self.visited
            ]
            if not candidates:
                return self.stop(Reason.CANDIDATES_EXHAUSTED)
            values = parallel_map(lambda j: self.mi([*self.selected, j]), candidates, self.threads)
            scores = dict(zip(candidates, values))
            winner = _argmax(scores)
            mi_value = scores[winner]

            if self.legacy_stop:
                if self.current_mi is not None and not mi_value > self.current_mi:
                    return self.stop(Reason.MI_DECREASED, mi_value, None, winner)
                p_value = None
            else:
                test = permutation_stop_test(
                    self.d, self.selected, winner, self.k, self.n_permutations,
                    spawn_seed(self.rng), self.norm, self.cv_folds, self.threads,
                )
                p_value = test.p_value
                if p_value > self.alpha:
                    return self.stop(Reason.NOT_SIGNIFICANT, mi_value, p_value, winner)

            self.selected.append(winner)
            self.visited.add(frozenset(self.selected))
            self.current_mi = mi_value
            self.steps.append(SelectionStep(Action.ADD, winner, mi_value, p_value, Reason.SIGNIFICANT))
            if self.backward and len(self.selected) >= 3:
                self.try_removal(winner)

    def try_removal(self, just_added):
        options = [
            j for j in self.selected
            if j != just_added
            and frozenset(self.selected) - {j} not in self.visited
        ]
        if not options:
            return
        reduced = {j: self.mi([f for f in self.selected if f != j]) for j in options}
        drop = _argmax(reduced)
        if reduced[drop] > self.current_mi:
            self.selected.remove(drop)
            self.visited.add(frozenset(self.selected))
            self.current_mi = reduced[drop]
            self.steps.append(
                SelectionStep(Action.REMOVE, drop, reduced[drop], None, Reason.MI_INCREASED_ON_REMOVAL)
            )


def _select(d, k, alpha, n_permutations, max_size, seed, norm, legacy_stop,
            cv_folds, standardize_data, threads, backward):
    if d.n_features < 1:
        raise ValueError("dataset has no features")
    if max_size is not None and not 1 <= max_size <= d.n_features:
        raise ValueError(f"max_size must lie in [1, {d.n_features}], got {max_size}")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if standardize_data:
        d, _ = standardize(d)
    search = _Search(d, int(k), alpha, n_permutations, max_size, seed, Norm(norm),
                     legacy_stop, cv_folds, threads, backward)
    search.run()
    config = {
        "method": "forward_backward" if backward else "forward",
        "k": int(k),
        "alpha": alpha,
        "n_permutations": n_permutations,
        "max_size": search.max_size,
        "seed": int(seed),
        "norm": Norm(norm).value,
        "legacy_stop": bool(legacy_stop),
        "cv_folds": cv_folds,
        "standardize": bool(standardize_data),
    }
    return SelectionTrace(search.steps, list(search.selected), list(d.feature_names), config)


def forward_select(
    d: Dataset,
    k: int,
    alpha: float = DEFAULT_ALPHA,
    n_permutations: int = DEFAULT_PERMUTATIONS,
    max_size: int | None = None,
    seed: int = 0,
    norm: Norm = Norm.EUCLIDEAN,
    legacy_stop: bool = False,
    cv_folds: int | None = None,
    standardize_data: bool = True,
    threads: int = 1,
) -> SelectionTrace:
    """Greedy forward selection stopped by a permutation test.

    Parameters
    ----------
    d : Dataset
    k : int
        Neighbor count of the MI estimator.
    alpha : float
        A winner is added only when its permutation p-value is ``<= alpha``.
    n_permutations : int
        Permutations per stopping test.
    max_size : int, optional
        Cap on the number of selected features.
    seed : int
        Seeds every stopping test; one child seed is drawn per test.
    legacy_stop : bool
        Skip the permutation test and stop as soon as the best augmented
        subset does not raise the estimated MI.
    cv_folds : int, optional
        Use fold-averaged estimates inside the stopping test.
    """
    return _select(d, k, alpha, n_permutations, max_size, seed, norm, legacy_stop,
                   cv_folds, standardize_data, threads, backward=False)


def forward_backward_select(
    d: Dataset,
    k: int,
    alpha: float = DEFAULT_ALPHA,
    n_permutations: int = DEFAULT_PERMUTATIONS,
    max_size: int | None = None,
    seed: int = 0,
    norm: Norm = Norm.EUCLIDEAN,
    legacy_stop: bool = False,
    cv_folds: int | None = None,
    standardize_data: bool = True,
    threads: int = 1,
) -> SelectionTrace:
    """Forward selection that may drop one earlier feature after each addition.

    Once at least three features are selected, every single removal other
    than the feature just added is scored; the best one is applied if the
    reduced subset has strictly larger estimated MI than the full one. No
    subset may be visited twice, which guarantees termination.
    """
    return _select(d, k, alpha, n_permutations, max_size, seed, norm, legacy_stop,
                   cv_folds, standardize_data, threads, backward=True)
