"""Brute-force k-nearest-neighbour classification."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import DataError
from ._base import check_query, check_training_data

_CHUNK = 256


class KNNClassifier(ClassifierMixin, BaseEstimator):
    """Majority vote among the ``n_neighbors`` closest training rows.

    Distances are Euclidean. Every training row tied with the k-th nearest
    distance joins the vote, and an even vote goes to label 0.

    Parameters
    ----------
    n_neighbors : int, default=5
    """

    kind = "knn"

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        if not 1 <= self.n_neighbors <= X.shape[0]:
            raise DataError(f"n_neighbors must be in [1, {X.shape[0]}], got {self.n_neighbors}")
        self.X_train_ = X
        self.y_train_ = y
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def _sq_distances(self, Q):
        Xt = self.X_train_
        d2 = np.zeros((Q.shape[0], Xt.shape[0]))
        for f in range(Xt.shape[1]):
            diff = Q[:, f, None] - Xt[None, :, f]
            d2 += diff * diff
        return d2

    def vote_counts(self, X):
        """Number of neighbours voting 0 and 1 for every row of ``X``."""
        check_is_fitted(self, "X_train_")
        X = check_query(X, self.n_features_in_)
        k = self.n_neighbors
        votes = np.zeros((X.shape[0], 2), dtype=np.int64)
        is_one = self.y_train_ == 1
        for s in range(0, X.shape[0], _CHUNK):
            d2 = self._sq_distances(X[s:s + _CHUNK])
            kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
            within = d2 <= kth[:, None]
            ones = (within & is_one).sum(axis=1)
            votes[s:s + _CHUNK, 1] = ones
            votes[s:s + _CHUNK, 0] = within.sum(axis=1) - ones
        return votes

    def predict(self, X):
        votes = self.vote_counts(X)
        return (votes[:, 1] > votes[:, 0]).astype(np.int64)

    def _get_state(self):
        return {"X_train": self.X_train_, "y_train": self.y_train_}

    def _set_state(self, state):
        self.X_train_ = np.asarray(state["X_train"], dtype=np.float64)
        self.y_train_ = np.asarray(state["y_train"], dtype=np.int64)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = self.X_train_.shape[1]
