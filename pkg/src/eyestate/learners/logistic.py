"""L2-regularized logistic regression fitted by accelerated gradient descent."""

import warnings

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ConvergenceWarning
from ._base import check_query, check_training_data


def logistic_loss_grad(params, X, y, l2):
    """Mean negative log-likelihood plus ``l2/2 * ||w||^2`` and its gradient.

    ``params`` is ``[w_1, ..., w_D, bias]``; the bias is not penalized.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    # log(1 + e^z) - y*z, stable for large |z|
    loss = np.mean(np.maximum(z, 0) + np.log1p(np.exp(-np.abs(z))) - y * z)
    loss += 0.5 * l2 * np.dot(w, w)
    r = (expit(z) - y) / X.shape[0]
    grad = np.empty_like(params)
    grad[:-1] = X.T @ r + l2 * w
    grad[-1] = r.sum()
    return loss, grad


def _minimize(fun, x0, precond, max_iter, tol):
    """Nesterov-accelerated gradient with backtracking and restarts.

    Steps are taken along ``precond * grad``; convergence is judged on the
    max-norm of the unpreconditioned gradient.
    """
    x = x0.copy()
    f, g = fun(x)
    step = 1.0
    momentum_x, t = x.copy(), 1.0
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        if np.max(np.abs(g)) < tol:
            return x, f, g, n_iter - 1, True
        y_pt = momentum_x
        fy, gy = fun(y_pt)
        d = precond * gy
        gd = np.dot(gy, d)
        while True:
            x_new = y_pt - step * d
            f_new, g_new = fun(x_new)
            if f_new <= fy - 0.5 * step * gd or step < 1e-20:
                break
            step *= 0.5
        if f_new > f:
            # objective went up: restart momentum from the last iterate
            t = 1.0
            momentum_x = x.copy()
            step *= 0.5
            continue
        t_next = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        momentum_x = x_new + ((t - 1) / t_next) * (x_new - x)
        x, f, g, t = x_new, f_new, g_new, t_next
        step *= 1.5
    return x, f, g, n_iter, bool(np.max(np.abs(g)) < tol)


class LogisticClassifier(ClassifierMixin, BaseEstimator):
    """Binary logistic regression.

    Minimizes the mean negative log-likelihood plus ``l2/2 * ||w||^2``
    with accelerated gradient descent, diagonally preconditioned by the
    feature variances. Stops when the gradient max-norm drops below
    ``tol`` or after ``max_iter`` iterations.

    Parameters
    ----------
    l2 : float, default=1e-4
    max_iter : int, default=1000
    tol : float, default=1e-6

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    intercept_ : float
    converged_ : bool
    n_iter_ : int
    """

    kind = "logreg"

    def __init__(self, l2=1e-4, max_iter=1000, tol=1e-6):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        n, d = X.shape
        scale = np.ones(d + 1)
        var = X.var(axis=0) + (X.mean(axis=0) ** 2)
        scale[:-1] = 1.0 / np.maximum(var + self.l2, 1e-12)
        params, _, grad, n_iter, ok = _minimize(
            lambda p: logistic_loss_grad(p, X, y.astype(np.float64), self.l2),
            np.zeros(d + 1), scale, self.max_iter, self.tol)
        if not ok:
            warnings.warn(f"logistic regression stopped after {n_iter} iterations "
                          f"with gradient max-norm {np.max(np.abs(grad)):.3g}",
                          ConvergenceWarning, stacklevel=2)
        self.coef_ = params[:-1]
        self.intercept_ = float(params[-1])
        self.converged_ = ok
        self.n_iter_ = n_iter
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_query(X, self.n_features_in_)
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack([1 - p, p])

    def predict(self, X):
        # probability exactly 0.5 (z == 0) maps to 0
        return (self.decision_function(X) > 0).astype(np.int64)

    def _get_state(self):
        return {"coef": self.coef_, "intercept": self.intercept_,
                "converged": self.converged_, "n_iter": self.n_iter_}

    def _set_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        self.converged_ = bool(state["converged"])
        self.n_iter_ = int(state["n_iter"])
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = self.coef_.shape[0]
