from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array, check_X_y

from ..exceptions import DataError, InvalidLabel, SingleClass


def check_training_data(X, y):
    """Validate a binary training set and return float X, int y copies."""
    X, y = check_X_y(X, y, dtype=np.float64, copy=True)
    if X.shape[0] < 2:
        raise DataError(f"need at least 2 rows, got {X.shape[0]}")
    if not np.isin(y, (0, 1)).all():
        raise InvalidLabel("targets must be 0 or 1")
    y = y.astype(np.int64)
    if np.unique(y).size < 2:
        raise SingleClass(f"only class {int(y[0])} present in training targets")
    return X, y


def check_query(X, n_features: int):
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != n_features:
        raise DataError(f"X has {X.shape[1]} features, model was trained on {n_features}")
    return X
