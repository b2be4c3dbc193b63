"""Stratified k-fold plans and the F1 metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError

__all__ = ["FoldPlan", "make_folds", "f1_score", "confusion_counts"]


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int
    stratified: bool = True

    def splits(self):
        """Yield ``(train_index, test_index)`` for each fold in order."""
        for f in range(self.k):
            test = self.assignments == f
            yield np.flatnonzero(~test), np.flatnonzero(test)

    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


def make_folds(targets, k: int = 5, seed: int = 0, stratified: bool = True) -> FoldPlan:
    """Assign each row to one of ``k`` folds.

    Rows are shuffled (per class when stratified), concatenated class by
    class, and dealt round-robin, so fold sizes differ by at most one and
    every fold gets within one row of its share of each class.
    """
    y = np.asarray(targets)
    n = y.shape[0]
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    if k > n:
        raise DataError(f"k={k} exceeds the number of rows ({n})")
    rng = np.random.default_rng(seed)
    if stratified:
        order = []
        for c in np.unique(y):
            members = np.flatnonzero(y == c)
            if members.size < k:
                raise DataError(f"class {c} has {members.size} rows, fewer than k={k}")
            order.append(rng.permutation(members))
        order = np.concatenate(order)
    else:
        order = rng.permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[order] = np.arange(n) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed, stratified=stratified)


def confusion_counts(predicted, actual, positive_class=1):
    p = np.asarray(predicted) == positive_class
    a = np.asarray(actual) == positive_class
    tp = int(np.sum(p & a))
    fp = int(np.sum(p & ~a))
    fn = int(np.sum(~p & a))
    tn = int(np.sum(~p & ~a))
    return tp, fp, fn, tn


def f1_score(predicted, actual, positive_class=1) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise DataError(f"length mismatch: {predicted.shape} vs {actual.shape}")
    tp, fp, fn, _ = confusion_counts(predicted, actual, positive_class)
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)
