"""Exhaustive hyperparameter search scored by k-fold F1."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import clone

from ..exceptions import EyeStateError
from ..scoring import FoldPlan, f1_score, make_folds


def expand_grid(grid) -> list[dict]:
    """Cells of ``grid`` in declaration order.

    ``grid`` is either a mapping of parameter name to candidate values
    (expanded as a product, first key varying slowest) or a list of
    explicit parameter dicts.
    """
    if isinstance(grid, dict):
        keys = list(grid)
        return [dict(zip(keys, combo)) for combo in itertools.product(*grid.values())]
    return [dict(cell) for cell in grid]


@dataclass
class GridResult:
    best_params: dict
    best_score: float
    cells: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"best_params": self.best_params, "best_score": self.best_score,
                "cells": self.cells}


def cross_val_f1(estimator, X, y, plan: FoldPlan) -> list[float]:
    scores = []
    for train, test in plan.splits():
        model = clone(estimator).fit(X[train], y[train])
        scores.append(f1_score(model.predict(X[test]), y[test]))
    return scores


def grid_search(estimator, X, y, grid, folds: int = 5, seed: int = 0,
                plan: FoldPlan | None = None) -> GridResult:
    """Evaluate every cell of ``grid`` and return the best by mean F1.

    Cells whose training fails are recorded with their error and skipped.
    Ties keep the earliest declared cell.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    cells = expand_grid(grid)
    if not cells:
        raise EyeStateError("empty parameter grid")
    if plan is None:
        plan = make_folds(y, k=folds, seed=seed)
    if plan.k < 2:
        raise EyeStateError("folds must be >= 2")
    records = []
    best, best_score = None, -np.inf
    for params in cells:
        try:
            scores = cross_val_f1(clone(estimator).set_params(**params), X, y, plan)
        except Exception as exc:  # a failing cell must not end the search
            records.append({"params": params, "mean_f1": None, "fold_f1": None,
                            "error": f"{type(exc).__name__}: {exc}"})
            continue
        mean = float(np.mean(scores))
        records.append({"params": params, "mean_f1": mean, "fold_f1": scores,
                        "error": None})
        if mean > best_score:
            best, best_score = params, mean
    if best is None:
        raise EyeStateError("every grid cell failed: " + "; ".join(r["error"] for r in records))
    return GridResult(best_params=best, best_score=best_score, cells=records)
