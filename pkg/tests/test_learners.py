from fractions import Fraction

import numpy as np
import pytest

from eyestate.exceptions import DataError, InvalidLabel, SingleClass
from eyestate.learners import (KINDS, DecisionTree, KNNClassifier, LogisticClassifier,
                               RandomForest, RBFSVC, grid_search, logistic_loss_grad,
                               make_classifier, model_from_json, model_to_json)


def _blobs(rng, n=200, d=2, sep=2.0, scale=1.0):
    y = np.repeat([0, 1], n // 2)
    X = rng.normal(size=(n, d)) + sep * y[:, None]
    return X * scale, y


# --- KNN -------------------------------------------------------------------

def test_knn_self_prediction(rng):
    X, y = _blobs(rng)
    assert np.array_equal(KNNClassifier(1).fit(X, y).predict(X), y)


def test_knn_nearest_point():
    X, y = np.array([[0.0], [10.0]]), np.array([0, 1])
    assert KNNClassifier(1).fit(X, y).predict([[2.0]]).tolist() == [0]
    assert KNNClassifier(1).fit(X, y).predict([[8.0]]).tolist() == [1]


def test_knn_tie_goes_to_zero():
    X, y = np.array([[-1.0], [1.0]]), np.array([1, 0])
    assert KNNClassifier(2).fit(X, y).predict([[0.0], [5.0]]).tolist() == [0, 0]


def test_knn_distance_ties_all_vote():
    X = np.array([[0.0], [1.0], [-1.0], [1.0]])
    y = np.array([0, 1, 1, 0])
    model = KNNClassifier(2).fit(X, y)
    # neighbours of 0.5: x=0 and x=1 (twice, tied at the 2nd distance)
    assert model.vote_counts([[0.5]]).tolist() == [[2, 1]]


def test_knn_permutation_invariance(rng):
    X, y = _blobs(rng, sep=0.5)
    Q = rng.normal(size=(50, 2))
    perm = rng.permutation(len(y))
    a = KNNClassifier(7).fit(X, y).predict(Q)
    b = KNNClassifier(7).fit(X[perm], y[perm]).predict(Q)
    assert np.array_equal(a, b)


def test_knn_k_range(rng):
    X, y = _blobs(rng, n=10)
    with pytest.raises(DataError):
        KNNClassifier(11).fit(X, y)
    with pytest.raises(DataError):
        KNNClassifier(0).fit(X, y)


# --- logistic regression ----------------------------------------------------

def _fd_gradient(params, X, y, l2, h=1e-6):
    g = np.empty_like(params)
    for i in range(params.size):
        e = np.zeros_like(params)
        e[i] = h
        g[i] = (logistic_loss_grad(params + e, X, y, l2)[0]
                - logistic_loss_grad(params - e, X, y, l2)[0]) / (2 * h)
    return g


def test_logistic_gradient_check(rng):
    for _ in range(10):
        n, d = rng.integers(5, 40), rng.integers(1, 6)
        X, y = rng.normal(size=(n, d)), rng.integers(0, 2, n)
        params = rng.normal(size=d + 1)
        _, g = logistic_loss_grad(params, X, y, 0.1)
        fd = _fd_gradient(params, X, y, 0.1)
        assert np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12) < 1e-5


def test_logistic_zero_model_ties_to_zero(rng):
    X, y = _blobs(rng)
    model = LogisticClassifier().fit(X, y)
    model.coef_ = np.zeros(2)
    model.intercept_ = 0.0
    np.testing.assert_array_equal(model.predict_proba(X)[:, 1], 0.5)
    assert model.predict(X).sum() == 0


def test_logistic_separable_1d():
    X = np.linspace(-3, 3, 40)[:, None]
    y = (X[:, 0] > 0.1).astype(int)
    model = LogisticClassifier(l2=1e-6, max_iter=5000).fit(X, y)
    assert np.array_equal(model.predict(X), y)


def test_logistic_symmetric_bias(rng):
    Z = rng.normal(size=(60, 3)) + 1.0
    X = np.vstack([Z, -Z])
    y = np.r_[np.ones(60, int), np.zeros(60, int)]
    model = LogisticClassifier(l2=1e-2).fit(X, y)
    assert model.converged_
    assert abs(model.intercept_) < 1e-6


def test_logistic_on_raw_microvolt_scale(prepared_rec):
    X, y = prepared_rec.values[:3000], prepared_rec.labels[:3000]
    model = LogisticClassifier().fit(X, y)
    assert model.n_iter_ <= 1000
    assert (model.predict(X) == y).mean() > 0.9


# --- SVC ----------------------------------------------------------------------

def kkt_residual(model, X, y):
    ys = 2.0 * y - 1
    alpha = model.dual_coef_
    margin = ys * model.decision_function(X)
    C = model.C
    res = np.where(alpha <= 0, np.maximum(0, 1 - margin),
                   np.where(alpha >= C, np.maximum(0, margin - 1), np.abs(margin - 1)))
    return res.max()


def test_svc_xor():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    model = RBFSVC(C=10, gamma=2.0).fit(X, y)
    assert np.array_equal(model.predict(X), y)


def test_svc_duals_and_kkt(rng):
    X, y = _blobs(rng, n=200, sep=1.5, scale=20.0)
    model = RBFSVC(C=10, gamma=0.001).fit(X, y)
    assert model.converged_
    assert np.all(model.dual_coef_ >= 0) and np.all(model.dual_coef_ <= 10)
    assert kkt_residual(model, X, y) < 1e-3
    d = model.decision_function(X)
    assert np.array_equal(model.predict(X), (d > 0).astype(int))


def test_svc_duplicate_interior_point(rng):
    X, y = _blobs(rng, n=100, sep=4.0)
    model = RBFSVC(C=10, gamma=0.5).fit(X, y)
    interior = int(np.flatnonzero(model.dual_coef_ == 0)[0])
    X2 = np.vstack([X, X[interior]])
    y2 = np.r_[y, y[interior]]
    model2 = RBFSVC(C=10, gamma=0.5).fit(X2, y2)
    assert model2.predict(X[interior:interior + 1])[0] == model.predict(X[interior:interior + 1])[0]


def test_svc_matches_sklearn_decision(rng):
    from sklearn.svm import SVC
    X, y = _blobs(rng, n=120, sep=1.0, scale=10.0)
    ours = RBFSVC(C=10, gamma=0.01, tol=1e-6).fit(X, y)
    ref = SVC(C=10, gamma=0.01, tol=1e-6).fit(X, y)
    np.testing.assert_allclose(ours.decision_function(X), ref.decision_function(X), atol=1e-3)


# --- trees and forests ----------------------------------------------------------

def plain_tree(X, y):
    """Recursive CART, exact Gini arithmetic, ties to lowest feature then threshold."""
    def grow(rows):
        ones = sum(int(y[r]) for r in rows)
        zeros = len(rows) - ones
        if ones == 0 or zeros == 0:
            return ("leaf", 1 if ones > zeros else 0)
        best = None
        for f in range(X.shape[1]):
            values = sorted(set(float(X[r, f]) for r in rows))
            for lo, hi in zip(values, values[1:]):
                thr = 0.5 * (lo + hi)
                if thr >= hi:
                    thr = lo
                left = [r for r in rows if X[r, f] <= thr]
                right = [r for r in rows if X[r, f] > thr]
                impurity = Fraction(0)
                for side in (left, right):
                    k1 = sum(int(y[r]) for r in side)
                    k0 = len(side) - k1
                    impurity += Fraction(len(side)) - Fraction(k0 * k0 + k1 * k1, len(side))
                key = (impurity, f, thr)
                if best is None or key < best[0]:
                    best = (key, f, thr, left, right)
        if best is None:
            return ("leaf", 1 if ones > zeros else 0)
        _, f, thr, left, right = best
        return ("split", f, thr, grow(left), grow(right))

    return grow(list(range(len(y))))


def plain_predict(node, x):
    while node[0] == "split":
        node = node[3] if x[node[1]] <= node[2] else node[4]
    return node[1]


def test_single_tree_forest_matches_plain_tree():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n, d = int(rng.integers(40, 120)), int(rng.integers(2, 6))
        X = rng.normal(size=(n, d)).round(2)
        y = ((X[:, 0] + 0.5 * X[:, 1] + rng.normal(0, 0.7, n)) > 0).astype(int)
        rf = RandomForest(n_estimators=1, bootstrap=False, max_features=None, random_state=3).fit(X, y)
        oracle = plain_tree(X, y)
        Q = np.vstack([X, rng.normal(size=(200, d))])
        expected = [plain_predict(oracle, q) for q in Q]
        assert rf.predict(Q).tolist() == expected


def test_forest_oob_disjoint(rng):
    X, y = _blobs(rng, n=100, d=4, sep=1.0)
    rf = RandomForest(n_estimators=10, random_state=1).fit(X, y)
    for k in range(10):
        assert np.intersect1d(rf.oob_indices(k), rf.estimators_samples_[k]).size == 0
        assert np.union1d(rf.oob_indices(k), rf.estimators_samples_[k]).size == 100


def test_forest_deterministic(rng):
    X, y = _blobs(rng, n=150, d=5, sep=0.8)
    Q = rng.normal(size=(100, 5))
    a = RandomForest(n_estimators=15, random_state=11).fit(X, y).predict(Q)
    b = RandomForest(n_estimators=15, random_state=11).fit(X, y).predict(Q)
    assert np.array_equal(a, b)


def test_forest_majority_recount(rng):
    X, y = _blobs(rng, n=150, d=5, sep=0.5)
    Q = rng.normal(size=(100, 5))
    rf = RandomForest(n_estimators=10, random_state=2).fit(X, y)
    votes = np.array([[t.predict(q[None])[0] for t in rf.estimators_] for q in Q])
    recount = [1 if v.sum() > len(v) - v.sum() else 0 for v in votes]
    assert rf.predict(Q).tolist() == recount


def test_forest_sqrt_features():
    from eyestate.learners.forest import _resolve_max_features
    assert _resolve_max_features("sqrt", 14) == 4
    assert _resolve_max_features("sqrt", 9) == 3
    assert _resolve_max_features(None, 9) == 9


# --- shared contracts -------------------------------------------------------------

@pytest.mark.parametrize("kind", ["knn", "logreg", "svc", "rf", "tree"])
def test_training_contracts(kind, rng):
    X, y = _blobs(rng, n=60, d=3)
    X0, y0 = X.copy(), y.copy()
    model = make_classifier(kind).fit(X, y)
    assert np.array_equal(X, X0) and np.array_equal(y, y0)
    with pytest.raises(SingleClass):
        make_classifier(kind).fit(X, np.zeros(60, int))
    with pytest.raises(InvalidLabel):
        make_classifier(kind).fit(X, np.r_[y[:-1], 2])
    with pytest.raises(ValueError):
        model.predict(rng.normal(size=(3, 4)))
    p1 = model.predict(X)
    p2 = model.predict(X)
    assert np.array_equal(p1, p2) and set(np.unique(p1)) <= {0, 1}


@pytest.mark.parametrize("kind", sorted(KINDS))
def test_model_json_round_trip(kind, rng):
    X, y = _blobs(rng, n=80, d=3, sep=1.0)
    model = make_classifier(kind).fit(X, y)
    text = model_to_json(model)
    back = model_from_json(text)
    Q = rng.normal(size=(50, 3))
    assert np.array_equal(back.predict(Q), model.predict(Q))
    assert back.get_params() == model.get_params()
    assert model_to_json(back) == text


def test_sklearn_clone_and_params():
    from sklearn.base import clone
    m = KNNClassifier(n_neighbors=3)
    assert clone(m).get_params() == {"n_neighbors": 3}
    assert RBFSVC().get_params()["C"] == 10.0


# --- grid search -----------------------------------------------------------------------

def test_grid_single_cell(rng):
    X, y = _blobs(rng, n=40)
    res = grid_search(KNNClassifier(), X, y, {"n_neighbors": [3]})
    assert res.best_params == {"n_neighbors": 3}


def test_grid_separating_cell_wins():
    from eyestate.scoring import f1_score, make_folds
    X = np.r_[np.linspace(0, 1, 20), np.linspace(10, 11, 20)][:, None]
    y = np.r_[np.zeros(20, int), np.ones(20, int)]
    grid = {"n_neighbors": [32, 1]}
    res = grid_search(KNNClassifier(), X, y, grid, folds=5, seed=0)
    plan = make_folds(y, 5, seed=0)
    oracle = {}
    for k in grid["n_neighbors"]:
        fold = []
        for f in range(5):
            tr, te = plan.assignments != f, plan.assignments == f
            fold.append(f1_score(KNNClassifier(k).fit(X[tr], y[tr]).predict(X[te]), y[te]))
        oracle[k] = np.mean(fold)
    assert oracle == {32: 0.0, 1: 1.0}
    assert res.best_params == {"n_neighbors": 1}
    assert [c["mean_f1"] for c in res.cells] == [oracle[32], oracle[1]]


def test_grid_tie_keeps_first(rng):
    X, y = _blobs(rng, n=40, sep=10)
    res = grid_search(KNNClassifier(), X, y, {"n_neighbors": [3, 1]})
    assert res.cells[0]["mean_f1"] == res.cells[1]["mean_f1"] == 1.0
    assert res.best_params == {"n_neighbors": 3}


def test_grid_failed_cell_recorded(rng):
    X, y = _blobs(rng, n=20)
    res = grid_search(KNNClassifier(), X, y, {"n_neighbors": [1000, 1]})
    assert res.cells[0]["error"] is not None
    assert res.best_params == {"n_neighbors": 1}
