"""Histogram mutual information and greedy mRMR channel ranking."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from . import _io
from .exceptions import DataError, DegenerateInputWarning, MismatchedChannels
from .recording import Recording

__all__ = ["HistogramConfig", "SelectionRanking", "discretize",
           "mutual_information", "entropy", "mi_from_counts", "mrmr_rank",
           "mrmr_from_codes", "average_ranking", "AggregateRanking",
           "MRMRSelector"]


@dataclass(frozen=True)
class HistogramConfig:
    """Equal-width binning over each variable's own min..max range."""

    bin_count: int = 16
    range_policy: str = "per-variable"

    def __post_init__(self):
        if int(self.bin_count) != self.bin_count or self.bin_count < 2:
            raise DataError(f"bin_count must be an integer >= 2, got {self.bin_count}")
        if self.range_policy != "per-variable":
            raise DataError(f"unsupported range_policy {self.range_policy!r}")


def _is_binary(v: np.ndarray) -> bool:
    return bool(np.isin(v, (0, 1)).all())


def discretize(values, bin_count: int = 16) -> tuple[np.ndarray, int]:
    """Map ``values`` to integer bin codes.

    Binary 0/1 streams keep their two natural bins. Anything else gets
    ``bin_count`` equal-width bins spanning its min..max, the maximum
    falling in the last bin. A zero-range variable maps to a single bin.

    Returns
    -------
    codes : ndarray of int64
    n_bins : int
    """
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise DataError("values must be finite")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros(v.shape, dtype=np.int64), 1
    if _is_binary(v):
        return v.astype(np.int64), 2
    codes = np.floor((v - lo) / (hi - lo) * bin_count).astype(np.int64)
    np.clip(codes, 0, bin_count - 1, out=codes)
    return codes, bin_count


def mi_from_counts(joint: np.ndarray) -> float:
    """Mutual information in nats of a joint count (or probability) table."""
    joint = np.asarray(joint, dtype=np.float64)
    # fsum is correctly rounded, so the transposed table gives the same bits
    total = math.fsum(joint.ravel().tolist())
    px = np.array([math.fsum(r) for r in joint.tolist()]) / total
    py = np.array([math.fsum(c) for c in joint.T.tolist()]) / total
    p = joint / total
    i, j = np.nonzero(p > 0)
    terms = p[i, j] * np.log(p[i, j] / (px[i] * py[j]))
    return max(math.fsum(terms.tolist()), 0.0)


def _joint_counts(cx, nx, cy, ny) -> np.ndarray:
    return np.bincount(cx * ny + cy, minlength=nx * ny).reshape(nx, ny)


def mutual_information(x, y, cfg: HistogramConfig | None = None) -> float:
    """Plug-in mutual information (nats) of two sample sequences.

    Both variables are discretized with :func:`discretize`. When either has
    zero range the result is 0 and a :class:`DegenerateInputWarning` is
    emitted.
    """
    cfg = cfg or HistogramConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"x and y must be 1-D of equal length, got {x.shape} and {y.shape}")
    if x.size < 2:
        raise DataError("need at least 2 samples")
    cx, nx = discretize(x, cfg.bin_count)
    cy, ny = discretize(y, cfg.bin_count)
    if nx == 1 or ny == 1:
        warnings.warn("zero-range variable; mutual information reported as 0",
                      DegenerateInputWarning, stacklevel=2)
        return 0.0
    return mi_from_counts(_joint_counts(cx, nx, cy, ny))


def entropy(x, cfg: HistogramConfig | None = None) -> float:
    """Histogram entropy (nats) under the same binning as mutual_information."""
    cfg = cfg or HistogramConfig()
    codes, n = discretize(x, cfg.bin_count)
    p = np.bincount(codes, minlength=n) / codes.size
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


@dataclass(frozen=True)
class SelectionRanking:
    """Channels in the order mRMR picked them, with the winning score per step.

    Scores are in nats: step one is pure relevance, later steps are
    relevance minus mean redundancy with the channels already chosen.
    """

    order: tuple[int, ...]
    scores: tuple[float, ...]
    n_select: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.order)) != len(self.order) or len(self.order) != self.n_select:
            raise DataError("order must hold n_select distinct channels")
        if len(self.scores) != len(self.order):
            raise DataError("scores and order differ in length")

    @property
    def selected_names(self) -> list[str]:
        return [self.names[i] for i in self.order]

    def to_dict(self) -> dict:
        return {"order": list(self.order),
                "selected": self.selected_names if self.names else None,
                "scores": list(self.scores),
                "n_select": self.n_select,
                "channels": list(self.names)}

    def to_json(self, config: dict | None = None) -> str:
        d = self.to_dict()
        if config is not None:
            d["config"] = config
        return _io.dumps(d)


def mrmr_from_codes(feature_codes: list[tuple[np.ndarray, int]],
                    target: tuple[np.ndarray, int], n_select: int):
    """Greedy difference-form mRMR over pre-discretized variables.

    Returns ``(order, scores, relevance, redundancy)`` where ``redundancy``
    is the full pairwise MI matrix between features.
    """
    n = len(feature_codes)
    if not 1 <= n_select <= n:
        raise DataError(f"n_select must be in [1, {n}], got {n_select}")
    tc, tn = target
    rel = np.array([mi_from_counts(_joint_counts(c, k, tc, tn)) if k > 1 else 0.0
                    for c, k in feature_codes])
    red = np.full((n, n), np.nan)

    def pair(i, j):
        if np.isnan(red[i, j]):
            (ci, ki), (cj, kj) = feature_codes[i], feature_codes[j]
            v = mi_from_counts(_joint_counts(ci, ki, cj, kj)) if ki > 1 and kj > 1 else 0.0
            red[i, j] = red[j, i] = v
        return red[i, j]

    first = int(np.argmax(rel))  # argmax returns the lowest index on ties
    order, scores = [first], [float(rel[first])]
    redundancy_sum = np.zeros(n)
    while len(order) < n_select:
        last = order[-1]
        for f in range(n):
            if f not in order:
                redundancy_sum[f] += pair(f, last)
        best, best_score = -1, -np.inf
        for f in range(n):
            if f in order:
                continue
            score = rel[f] - redundancy_sum[f] / len(order)
            if score > best_score:
                best, best_score = f, score
        order.append(best)
        scores.append(float(best_score))
    return order, scores, rel, red


def mrmr_rank(rec: Recording, cfg: HistogramConfig | None = None,
              n_select: int = 9) -> SelectionRanking:
    """Rank the channels of ``rec`` against its labels by greedy mRMR."""
    cfg = cfg or HistogramConfig()
    codes = [discretize(col, cfg.bin_count) for col in rec.values.T]
    order, scores, _, _ = mrmr_from_codes(codes, discretize(rec.labels, cfg.bin_count),
                                          n_select)
    return SelectionRanking(tuple(order), tuple(scores), n_select, rec.names)


@dataclass(frozen=True)
class AggregateRanking:
    """Per-channel averages over several rankings.

    ``mean_score[c]`` is the mean score channel ``c`` attained at its
    selection step and ``mean_position[c]`` its mean 0-based step, both over
    the rankings that selected it (``times_selected[c]`` of them).
    """

    names: tuple[str, ...]
    mean_score: tuple[float, ...]
    mean_position: tuple[float, ...]
    times_selected: tuple[int, ...]
    n_rankings: int
    score_matrix: tuple[tuple[float, ...], ...] = ()

    def top(self, k: int) -> list[int]:
        """The ``k`` channels with the highest mean score (ties: lowest index)."""
        keyed = sorted(range(len(self.names)),
                       key=lambda c: (-self._score_or_floor(c), c))
        return keyed[:k]

    def _score_or_floor(self, c):
        s = self.mean_score[c]
        return -np.inf if np.isnan(s) else s

    def to_dict(self) -> dict:
        return {"channels": list(self.names),
                "mean_score": [None if np.isnan(s) else s for s in self.mean_score],
                "mean_position": [None if np.isnan(p) else p for p in self.mean_position],
                "times_selected": list(self.times_selected),
                "n_rankings": self.n_rankings}

    def to_json(self, config: dict | None = None) -> str:
        d = self.to_dict()
        if config is not None:
            d["config"] = config
        return _io.dumps(d)

    def matrix_csv(self, config: dict | None = None) -> str:
        """Steps x channels table of averaged scores.

        Row ``s`` holds, for every channel, the mean score it had at step
        ``s`` across rankings; columns are ordered by mean position so the
        scores at selection sit on the diagonal.
        """
        cols = sorted(range(len(self.names)),
                      key=lambda c: (np.inf if np.isnan(self.mean_position[c])
                                     else self.mean_position[c], c))
        rows = []
        for s, step in enumerate(self.score_matrix):
            rows.append([s + 1] + ["" if np.isnan(step[c]) else repr(step[c]) for c in cols])
        return _io.csv_text(rows, header=["step"] + [self.names[c] for c in cols],
                            config=config)


def average_ranking(rankings: list[SelectionRanking]) -> AggregateRanking:
    """Average per-channel selection scores and positions over ``rankings``."""
    if not rankings:
        raise DataError("no rankings to average")
    names = rankings[0].names
    if any(r.names != names for r in rankings):
        raise MismatchedChannels("rankings cover different channel sets")
    C = len(names)
    score_sum, pos_sum = np.zeros(C), np.zeros(C)
    hits = np.zeros(C, dtype=int)
    steps = max(r.n_select for r in rankings)
    step_sum = np.zeros((steps, C))
    step_hits = np.zeros((steps, C), dtype=int)
    for r in rankings:
        for pos, (c, s) in enumerate(zip(r.order, r.scores)):
            score_sum[c] += s
            pos_sum[c] += pos
            hits[c] += 1
            step_sum[pos, c] += s
            step_hits[pos, c] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_score = np.where(hits > 0, score_sum / hits, np.nan)
        mean_pos = np.where(hits > 0, pos_sum / hits, np.nan)
        step_mean = np.where(step_hits > 0, step_sum / step_hits, np.nan)
    return AggregateRanking(
        names=names,
        mean_score=tuple(float(v) for v in mean_score),
        mean_position=tuple(float(v) for v in mean_pos),
        times_selected=tuple(int(h) for h in hits),
        n_rankings=len(rankings),
        score_matrix=tuple(tuple(float(v) for v in row) for row in step_mean),
    )


class MRMRSelector(SelectorMixin, BaseEstimator):
    """Keep the ``n_features_to_select`` columns chosen by greedy mRMR.

    Parameters
    ----------
    n_features_to_select : int, default=9
    bin_count : int, default=16
        Equal-width bins per feature for the mutual information estimate.

    Attributes
    ----------
    ranking_ : SelectionRanking
    support_ : ndarray of bool
    """

    def __init__(self, n_features_to_select=9, bin_count=16):
        self.n_features_to_select = n_features_to_select
        self.bin_count = bin_count

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if not _is_binary(y):
            raise DataError("y must be binary 0/1")
        cfg = HistogramConfig(self.bin_count)
        codes = [discretize(col, cfg.bin_count) for col in X.T]
        order, scores, _, _ = mrmr_from_codes(codes, discretize(y, cfg.bin_count),
                                              self.n_features_to_select)
        names = tuple(f"x{i}" for i in range(X.shape[1]))
        self.ranking_ = SelectionRanking(tuple(order), tuple(scores),
                                         self.n_features_to_select, names)
        self.support_ = np.zeros(X.shape[1], dtype=bool)
        self.support_[order] = True
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "support_")
        return self.support_
