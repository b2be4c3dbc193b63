"""RBF-kernel soft-margin SVM solved by sequential minimal optimization.

The dual ``min 1/2 a'Qa - e'a`` subject to ``0 <= a <= C`` and ``y'a = 0``
is solved two variables at a time. Each step takes the maximal violating
pair (first-order working-set selection) and stops once the violation gap
``max_{I_up} -y G - min_{I_low} -y G`` falls below ``tol``.
"""

import warnings

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ConvergenceWarning
from ._base import check_query, check_training_data

_TAU = 1e-12


@numba.njit(cache=True)
def _kernel_row(X, i, gamma, out):
    n, d = X.shape
    for t in range(n):
        s = 0.0
        for f in range(d):
            diff = X[i, f] - X[t, f]
            s += diff * diff
        out[t] = np.exp(-gamma * s)


@numba.njit(cache=True)
def _get_row(X, i, gamma, cache, slot_of, owner, stamp, clock):
    s = slot_of[i]
    if s < 0:
        # evict least recently used slot
        s = 0
        for k in range(1, stamp.shape[0]):
            if stamp[k] < stamp[s]:
                s = k
        if owner[s] >= 0:
            slot_of[owner[s]] = -1
        owner[s] = i
        slot_of[i] = s
        _kernel_row(X, i, gamma, cache[s])
    stamp[s] = clock
    return cache[s]


@numba.njit(cache=True)
def _smo(X, y, C, gamma, tol, max_iter, cache_rows):
    n = X.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    cache = np.empty((cache_rows, n))
    slot_of = -np.ones(n, dtype=np.int64)
    owner = -np.ones(cache_rows, dtype=np.int64)
    stamp = -np.ones(cache_rows, dtype=np.int64)
    gap = np.inf
    it = 0
    while it < max_iter:
        # working-set selection
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(n):
            v = -y[t] * G[t]
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            low = (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)
            if up and v > gmax:
                gmax = v
                i = t
            if low and v < gmin:
                gmin = v
                j = t
        gap = gmax - gmin
        if gap < tol or i < 0 or j < 0:
            break
        it += 1
        Ki = _get_row(X, i, gamma, cache, slot_of, owner, stamp, 2 * it)
        Kj = _get_row(X, j, gamma, cache, slot_of, owner, stamp, 2 * it + 1)
        Kij = Ki[j]
        ai_old = alpha[i]
        aj_old = alpha[j]
        if y[i] != y[j]:
            quad = 2.0 - 2.0 * Kij
            if quad <= 0:
                quad = _TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = 2.0 - 2.0 * Kij
            if quad <= 0:
                quad = _TAU
            delta = (G[i] - G[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        dai = (alpha[i] - ai_old) * y[i]
        daj = (alpha[j] - aj_old) * y[j]
        for t in range(n):
            G[t] += y[t] * (Ki[t] * dai + Kj[t] * daj)

    # offset: mean of y*G over free variables, else midpoint of the bounds
    ub = np.inf
    lb = -np.inf
    nfree = 0
    sfree = 0.0
    for t in range(n):
        yg = y[t] * G[t]
        if alpha[t] >= C:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            nfree += 1
            sfree += yg
    rho = sfree / nfree if nfree > 0 else 0.5 * (ub + lb)
    return alpha, G, rho, it, gap


@numba.njit(cache=True)
def _decision(Xq, SV, coef, rho, gamma):
    m, d = Xq.shape
    out = np.empty(m)
    for q in range(m):
        acc = 0.0
        for s in range(SV.shape[0]):
            dist = 0.0
            for f in range(d):
                diff = Xq[q, f] - SV[s, f]
                dist += diff * diff
            acc += coef[s] * np.exp(-gamma * dist)
        out[q] = acc - rho
    return out


class RBFSVC(ClassifierMixin, BaseEstimator):
    """Soft-margin SVM with kernel ``exp(-gamma * ||x - z||^2)``.

    Parameters
    ----------
    C : float, default=10
        Upper bound on each dual variable.
    gamma : float, default=0.001
        Kernel width, applied to features at their given scale.
    tol : float, default=1e-3
        Stopping threshold on the maximal KKT violation gap.
    max_iter : int, default=1_000_000
        Cap on pair updates. Hitting it raises a ConvergenceWarning and
        the partially optimized model is kept.
    cache_mb : float, default=256
        Memory budget for cached kernel rows.

    Attributes
    ----------
    dual_coef_ : ndarray
        All dual variables, one per training row, in ``[0, C]``.
    support_ : ndarray of int
        Rows with a non-zero dual variable.
    intercept_ : float
        Decision offset; the decision function is
        ``sum_s a_s y_s K(x_s, x) + intercept_``.
    kkt_gap_ : float
        Violation gap at termination.
    """

    kind = "svc"

    def __init__(self, C=10.0, gamma=0.001, tol=1e-3, max_iter=1_000_000, cache_mb=256):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter
        self.cache_mb = cache_mb

    def fit(self, X, y):
        X, y01 = check_training_data(X, y)
        X = np.ascontiguousarray(X)
        ys = np.where(y01 == 1, 1.0, -1.0)
        n = X.shape[0]
        rows = int(max(2, min(n, self.cache_mb * 2**20 // (8 * n))))
        alpha, G, rho, n_iter, gap = _smo(X, ys, float(self.C), float(self.gamma),
                                          float(self.tol), int(self.max_iter), rows)
        self.converged_ = bool(gap < self.tol)
        if not self.converged_:
            warnings.warn(f"SMO stopped after {n_iter} pair updates with KKT gap {gap:.3g}",
                          ConvergenceWarning, stacklevel=2)
        self.dual_coef_ = alpha
        self.support_ = np.flatnonzero(alpha > 0)
        self.support_vectors_ = X[self.support_]
        self.sv_coef_ = alpha[self.support_] * ys[self.support_]
        self.intercept_ = -float(rho)
        self.gradient_ = G
        self.n_iter_ = int(n_iter)
        self.kkt_gap_ = float(gap)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "support_vectors_")
        X = np.ascontiguousarray(check_query(X, self.n_features_in_))
        return _decision(X, self.support_vectors_, self.sv_coef_,
                         -self.intercept_, float(self.gamma))

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(np.int64)

    def _get_state(self):
        return {"support_vectors": self.support_vectors_, "sv_coef": self.sv_coef_,
                "support": self.support_, "intercept": self.intercept_,
                "n_iter": self.n_iter_, "kkt_gap": self.kkt_gap_,
                "converged": self.converged_}

    def _set_state(self, state):
        self.support_vectors_ = np.asarray(state["support_vectors"], dtype=np.float64)
        self.sv_coef_ = np.asarray(state["sv_coef"], dtype=np.float64)
        self.support_ = np.asarray(state["support"], dtype=np.int64)
        self.intercept_ = float(state["intercept"])
        self.n_iter_ = int(state["n_iter"])
        self.kkt_gap_ = float(state["kkt_gap"])
        self.converged_ = bool(state["converged"])
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = self.support_vectors_.shape[1]
