"""Outlier removal and per-channel zero-centring."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import _io
from .exceptions import DataError
from .recording import Recording

__all__ = ["OutlierReport", "remove_outliers", "center", "ChannelCenterer"]


@dataclass(frozen=True)
class OutlierReport:
    removed_indices: tuple[int, ...]
    trigger_channels: tuple[str, ...]
    factor: float
    passes: int = 1
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.factor <= 1:
            raise DataError(f"factor must be > 1, got {self.factor}")
        idx = self.removed_indices
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DataError("removed_indices must be strictly increasing")

    @property
    def n_removed(self) -> int:
        return len(self.removed_indices)

    def to_dict(self) -> dict:
        return {
            "factor": self.factor,
            "passes": self.passes,
            "n_removed": self.n_removed,
            "removed": [{"index": i, "channel": c}
                        for i, c in zip(self.removed_indices, self.trigger_channels)],
            "thresholds": self.thresholds,
        }

    def to_json(self, config: dict | None = None) -> str:
        d = self.to_dict()
        if config is not None:
            d["config"] = config
        return _io.dumps(d)


def _one_pass(values: np.ndarray, factor: float):
    absv = np.abs(values)
    thresholds = factor * absv.mean(axis=0)
    over = absv > thresholds
    rows = np.flatnonzero(over.any(axis=1))
    # trigger = first channel (declaration order) that exceeded its threshold
    trigger = over[rows].argmax(axis=1)
    return rows, trigger, thresholds


def remove_outliers(rec: Recording, factor: float = 10.0,
                    max_passes: int = 1) -> tuple[Recording, OutlierReport]:
    """Drop every timepoint where some channel exceeds ``factor`` times its mean.

    A timepoint is removed, across all channels and the label stream, when
    ``|value| > factor * mean(|channel|)`` in any channel, with the mean
    taken over the channel before removal. ``max_passes > 1`` repeats the
    rule on the reduced recording until nothing more is removed.

    Returns
    -------
    cleaned : Recording
    report : OutlierReport
        Indices refer to the input recording.
    """
    if not factor > 1:
        raise DataError(f"factor must be > 1, got {factor}")
    if max_passes < 1:
        raise DataError(f"max_passes must be >= 1, got {max_passes}")

    keep = np.arange(rec.n_samples)
    removed, triggers = [], []
    first_thresholds = None
    passes = 0
    while passes < max_passes:
        rows, trig, thresholds = _one_pass(rec.values[keep], factor)
        passes += 1
        if first_thresholds is None:
            first_thresholds = thresholds
        if rows.size == 0:
            break
        removed.extend(keep[rows].tolist())
        triggers.extend(rec.names[c] for c in trig)
        keep = np.delete(keep, rows)

    order = np.argsort(removed, kind="stable")
    report = OutlierReport(
        removed_indices=tuple(int(removed[i]) for i in order),
        trigger_channels=tuple(triggers[i] for i in order),
        factor=float(factor),
        passes=passes,
        thresholds={n: float(t) for n, t in zip(rec.names, first_thresholds)},
    )
    return rec.take_rows(keep), report


def center(rec: Recording) -> Recording:
    """Subtract each channel's arithmetic mean."""
    return rec.replace(values=rec.values - rec.values.mean(axis=0))


class ChannelCenterer(TransformerMixin, BaseEstimator):
    """Remove per-column means learned in :meth:`fit`.

    Estimator counterpart of :func:`center` for use inside pipelines.
    """

    def fit(self, X, y=None):
        X = check_array(X)
        self.mean_ = X.mean(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X - self.mean_
