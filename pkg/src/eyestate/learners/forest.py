"""Gini CART trees and a bootstrap random forest built from them."""

import math

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import DataError
from ._base import check_query, check_training_data

_MAX_SEED = 2**31 - 1


@numba.njit(cache=True)
def _build(X, y, idx, max_features, seed, min_samples_split, max_depth):
    """Grow one tree on the rows ``idx`` (repeats allowed) of ``X``.

    Node arrays are returned in creation order; node 0 is the root.
    A split maximizes ``sum_L c^2 / n_L + sum_R c^2 / n_R``, which is the
    same as minimizing size-weighted Gini impurity. Ties go to the lowest
    feature index, then the lowest threshold.
    """
    np.random.seed(seed)
    n, d = X.shape
    m_all = idx.shape[0]
    cap = 2 * m_all + 1
    feature = -np.ones(cap, dtype=np.int64)
    threshold = np.zeros(cap)
    left = -np.ones(cap, dtype=np.int64)
    right = -np.ones(cap, dtype=np.int64)
    counts = np.zeros((cap, 2), dtype=np.int64)

    work = idx.copy()
    buf = np.empty_like(work)
    st_node = np.empty(cap, dtype=np.int64)
    st_lo = np.empty(cap, dtype=np.int64)
    st_hi = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    top = 0
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = m_all
    st_depth[0] = 0
    top = 1
    n_nodes = 1
    vals = np.empty(m_all)

    while top > 0:
        top -= 1
        node = st_node[top]
        lo = st_lo[top]
        hi = st_hi[top]
        depth = st_depth[top]
        m = hi - lo
        c1 = 0
        for p in range(lo, hi):
            c1 += y[work[p]]
        c0 = m - c1
        counts[node, 0] = c0
        counts[node, 1] = c1
        if c0 == 0 or c1 == 0 or m < min_samples_split:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        perm = np.random.permutation(d)
        best_f = -1
        best_thr = 0.0
        best_crit = -np.inf
        eps = 1e-12 * m
        evaluated = 0
        for r in range(d):
            if evaluated >= max_features and best_f >= 0:
                break
            f = perm[r]
            for p in range(m):
                vals[p] = X[work[lo + p], f]
            order = np.argsort(vals[:m], kind="mergesort")
            if vals[order[0]] == vals[order[m - 1]]:
                continue
            evaluated += 1
            l0 = 0
            l1 = 0
            for p in range(m - 1):
                if y[work[lo + order[p]]] == 1:
                    l1 += 1
                else:
                    l0 += 1
                v = vals[order[p]]
                v_next = vals[order[p + 1]]
                if v == v_next:
                    continue
                nl = p + 1
                nr = m - nl
                r0 = c0 - l0
                r1 = c1 - l1
                crit = (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr
                thr = 0.5 * (v + v_next)
                if thr >= v_next:
                    thr = v
                if crit > best_crit + eps:
                    take = True
                elif crit >= best_crit - eps:
                    take = f < best_f or (f == best_f and thr < best_thr)
                else:
                    take = False
                if take:
                    best_crit = crit
                    best_f = f
                    best_thr = thr
        if best_f < 0:
            continue

        # stable partition of work[lo:hi]
        nl = 0
        for p in range(lo, hi):
            if X[work[p], best_f] <= best_thr:
                buf[lo + nl] = work[p]
                nl += 1
        k = lo + nl
        for p in range(lo, hi):
            if X[work[p], best_f] > best_thr:
                buf[k] = work[p]
                k += 1
        for p in range(lo, hi):
            work[p] = buf[p]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        n_nodes += 2
        st_node[top] = right[node]
        st_lo[top] = lo + nl
        st_hi[top] = hi
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = left[node]
        st_lo[top] = lo
        st_hi[top] = lo + nl
        st_depth[top] = depth + 1
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(), counts[:n_nodes].copy())


@numba.njit(cache=True)
def _apply(X, feature, threshold, left, right):
    out = np.empty(X.shape[0], dtype=np.int64)
    for q in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[q, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[q] = node
    return out


def _resolve_max_features(max_features, d):
    if max_features in ("sqrt", "auto"):
        return int(math.ceil(math.sqrt(d)))
    if max_features is None:
        return d
    k = int(max_features)
    if not 1 <= k <= d:
        raise DataError(f"max_features must be in [1, {d}], got {max_features}")
    return k


class DecisionTree(ClassifierMixin, BaseEstimator):
    """Binary CART classifier with Gini splits.

    Parameters
    ----------
    max_features : {"sqrt", "auto"}, int or None, default=None
        Features drawn (without replacement) as split candidates per node;
        ``"sqrt"``/``"auto"`` mean ``ceil(sqrt(n_features))``, None means all.
        When every drawn feature is constant, more are drawn.
    min_samples_split : int, default=2
    max_depth : int or None, default=None
    random_state : int, default=0
    """

    kind = "tree"

    def __init__(self, max_features=None, min_samples_split=2, max_depth=None,
                 random_state=0):
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.max_depth = max_depth
        self.random_state = random_state

    def fit(self, X, y, sample_indices=None):
        X, y = check_training_data(X, y)
        self._fit_validated(X, y, sample_indices)
        return self

    def _fit_validated(self, X, y, sample_indices=None):
        idx = (np.arange(X.shape[0], dtype=np.int64) if sample_indices is None
               else np.asarray(sample_indices, dtype=np.int64))
        mf = _resolve_max_features(self.max_features, X.shape[1])
        depth = -1 if self.max_depth is None else int(self.max_depth)
        (self.feature_, self.threshold_, self.left_, self.right_,
         self.value_) = _build(np.ascontiguousarray(X), y, idx, mf,
                               int(self.random_state), int(self.min_samples_split), depth)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def node_count(self):
        return self.feature_.shape[0]

    def apply(self, X):
        check_is_fitted(self, "feature_")
        X = np.ascontiguousarray(check_query(X, self.n_features_in_))
        return _apply(X, self.feature_, self.threshold_, self.left_, self.right_)

    def predict(self, X):
        counts = self.value_[self.apply(X)]
        # an even leaf goes to 0
        return (counts[:, 1] > counts[:, 0]).astype(np.int64)

    def _get_state(self):
        return {"feature": self.feature_, "threshold": self.threshold_,
                "left": self.left_, "right": self.right_, "value": self.value_,
                "n_features_in": self.n_features_in_}

    def _set_state(self, state):
        self.feature_ = np.asarray(state["feature"], dtype=np.int64)
        self.threshold_ = np.asarray(state["threshold"], dtype=np.float64)
        self.left_ = np.asarray(state["left"], dtype=np.int64)
        self.right_ = np.asarray(state["right"], dtype=np.int64)
        self.value_ = np.asarray(state["value"], dtype=np.int64).reshape(-1, 2)
        self.n_features_in_ = int(state["n_features_in"])
        self.classes_ = np.array([0, 1])


class RandomForest(ClassifierMixin, BaseEstimator):
    """Majority vote over Gini trees grown on bootstrap resamples.

    Parameters
    ----------
    n_estimators : int, default=100
    max_features : {"sqrt", "auto"}, int or None, default="sqrt"
        ``"sqrt"`` (alias ``"auto"``) draws ``ceil(sqrt(n_features))``
        candidates per split.
    bootstrap : bool, default=True
        Resample rows with replacement for each tree. With False every
        tree sees the full training set.
    min_samples_split : int, default=2
    max_depth : int or None, default=None
    random_state : int, default=0
        Root seed; per-tree seeds are spawned from it.

    Attributes
    ----------
    estimators_ : list of DecisionTree
    estimators_samples_ : list of ndarray
        Bootstrap row indices used by each tree.
    """

    kind = "rf"

    def __init__(self, n_estimators=100, max_features="sqrt", bootstrap=True,
                 min_samples_split=2, max_depth=None, random_state=0):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.min_samples_split = min_samples_split
        self.max_depth = max_depth
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        if self.n_estimators < 1:
            raise DataError(f"n_estimators must be >= 1, got {self.n_estimators}")
        n = X.shape[0]
        seeds = np.random.SeedSequence(self.random_state).spawn(self.n_estimators)
        self.estimators_, self.estimators_samples_ = [], []
        for ss in seeds:
            rng = np.random.default_rng(ss)
            tree_seed = int(rng.integers(_MAX_SEED))
            idx = rng.integers(0, n, n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(max_features=self.max_features,
                                min_samples_split=self.min_samples_split,
                                max_depth=self.max_depth, random_state=tree_seed)
            tree._fit_validated(X, y, idx)
            self.estimators_.append(tree)
            self.estimators_samples_.append(np.sort(idx))
        self.n_samples_fit_ = n
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def oob_indices(self, k):
        """Training rows not drawn for tree ``k``."""
        mask = np.ones(self.n_samples_fit_, dtype=bool)
        mask[self.estimators_samples_[k]] = False
        return np.flatnonzero(mask)

    def tree_votes(self, X):
        """Per-tree predicted labels, shape (n_estimators, n_rows)."""
        check_is_fitted(self, "estimators_")
        X = check_query(X, self.n_features_in_)
        return np.array([t.predict(X) for t in self.estimators_])

    def predict(self, X):
        votes = self.tree_votes(X)
        ones = votes.sum(axis=0)
        return (ones > votes.shape[0] - ones).astype(np.int64)

    def _get_state(self):
        return {"trees": [t._get_state() for t in self.estimators_],
                "n_samples_fit": self.n_samples_fit_}

    def _set_state(self, state):
        self.estimators_ = []
        for ts in state["trees"]:
            t = DecisionTree(max_features=self.max_features)
            t._set_state(ts)
            self.estimators_.append(t)
        self.estimators_samples_ = []
        self.n_samples_fit_ = int(state["n_samples_fit"])
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = self.estimators_[0].n_features_in_
