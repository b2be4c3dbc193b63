import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eyestate import (HistogramConfig, MRMRSelector, Recording, average_ranking, entropy,
                      mrmr_rank, mutual_information)
from eyestate.exceptions import DataError, DegenerateInputWarning, MismatchedChannels
from eyestate.selection import SelectionRanking, discretize, mi_from_counts


def brute_mi(x, y, bins):
    """Plug-in mutual information evaluated cell by cell with Python floats over the shared joint histogram."""
    cx, nx = discretize(x, bins)
    cy, ny = discretize(y, bins)
    counts = [[0] * ny for _ in range(nx)]
    for a, b in zip(cx.tolist(), cy.tolist()):
        counts[a][b] += 1
    n = len(cx)
    px = [sum(row) / n for row in counts]
    py = [sum(counts[i][j] for i in range(nx)) / n for j in range(ny)]
    total = 0.0
    for i in range(nx):
        for j in range(ny):
            if counts[i][j]:
                p = counts[i][j] / n
                total += p * math.log(p / (px[i] * py[j]))
    return total


def test_diagonal_joint_is_ln2():
    assert mi_from_counts(np.array([[0.5, 0], [0, 0.5]])) == pytest.approx(math.log(2), abs=1e-15)
    x = np.array([0, 1] * 10)
    assert mutual_information(x, x) == pytest.approx(math.log(2), abs=1e-15)


def test_independent_product_is_zero():
    x = np.repeat([0.0, 1.0, 2.0], 4)
    y = np.tile([0.0, 1.0, 2.0, 3.0], 3)
    assert mutual_information(x, y, HistogramConfig(3)) == pytest.approx(0.0, abs=1e-15)


def test_uniform_four_values_is_ln4():
    x = np.array([0.0, 1.0, 2.0, 3.0] * 5)
    assert mutual_information(x, x, HistogramConfig(4)) == pytest.approx(math.log(4), abs=1e-12)


def test_binary_labels_keep_two_bins():
    codes, n = discretize(np.array([0, 1, 1, 0]), 16)
    assert n == 2 and codes.tolist() == [0, 1, 1, 0]


def test_degenerate_input_warns():
    with pytest.warns(DegenerateInputWarning):
        assert mutual_information(np.ones(10), np.arange(10.0)) == 0.0
    with pytest.raises(DataError):
        mutual_information(np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        HistogramConfig(1)


def test_bins_agree_with_numpy_histogram(rng):
    for _ in range(50):
        x = rng.normal(size=200)
        codes, n = discretize(x, 16)
        hist, _ = np.histogram(x, bins=16)
        assert np.abs(np.bincount(codes, minlength=16) - hist).sum() <= 2


def test_brute_force_oracle(rng):
    for _ in range(100):
        n = int(rng.integers(2, 80))
        bins = int(rng.integers(2, 20))
        x, y = rng.normal(size=n), rng.normal(size=n)
        if rng.random() < 0.3:
            y = rng.integers(0, 2, n).astype(float)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateInputWarning)
            got = mutual_information(x, y, HistogramConfig(bins))
        assert abs(got - brute_mi(x, y, bins)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=60),
       st.integers(2, 20))
def test_self_information_is_entropy(xs, bins):
    x = np.array(xs)
    if x.max() == x.min():
        return
    cfg = HistogramConfig(bins)
    assert abs(mutual_information(x, x, cfg) - entropy(x, cfg)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2**32 - 1), st.floats(0.5, 4), st.floats(-5, 5))
def test_symmetry_and_affine_invariance(n, seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = rng.integers(0, 8, n).astype(float), rng.integers(0, 8, n).astype(float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return
    cfg = HistogramConfig(8)
    assert mutual_information(x, y, cfg) == mutual_information(y, x, cfg)
    # integer-valued samples keep bin edges exact under the affine map
    assert mutual_information(a * x + b, y, cfg) == pytest.approx(mutual_information(x, y, cfg), abs=1e-15)
    assert mutual_information(2 * x + 3, y, cfg) == mutual_information(x, y, cfg)


def exhaustive_mrmr(X, y, n_select, cfg):
    C = X.shape[1]
    rel = [mutual_information(X[:, c], y, cfg) for c in range(C)]
    order, scores = [], []
    for _ in range(n_select):
        best, best_score = None, None
        for f in range(C):
            if f in order:
                continue
            if order:
                red = 0.0
                for s in order:
                    red += mutual_information(X[:, f], X[:, s], cfg)
                score = rel[f] - red / len(order)
            else:
                score = rel[f]
            if best is None or score > best_score:
                best, best_score = f, score
        for f in range(C):
            if f not in order and f != best:
                red = sum(mutual_information(X[:, f], X[:, s], cfg) for s in order)
                other = rel[f] - red / len(order) if order else rel[f]
                assert best_score >= other - 1e-12
        order.append(best)
        scores.append(best_score)
    return order, scores


def _rec(X, y):
    return Recording(names=tuple(f"c{i}" for i in range(X.shape[1])), values=X, labels=y)


def test_exhaustive_mrmr_oracle(rng):
    for _ in range(50):
        C = int(rng.integers(2, 6))
        n = int(rng.integers(20, 200))
        y = rng.integers(0, 2, n)
        X = rng.normal(size=(n, C)) + y[:, None] * rng.uniform(0, 2, C)
        k = int(rng.integers(1, C + 1))
        cfg = HistogramConfig(int(rng.integers(2, 17)))
        ranking = mrmr_rank(_rec(X, y), cfg, k)
        order, scores = exhaustive_mrmr(X, y, k, cfg)
        assert list(ranking.order) == order
        assert list(ranking.scores) == scores


def test_duplicate_channel_loses_to_equal_relevance():
    rng = np.random.default_rng(3)
    y = np.repeat([0, 1], 50)
    a = rng.normal(size=100) + y
    b = a[::-1].copy()[np.r_[50:100, 0:50]]  # same values per class, different pairing
    X = np.column_stack([a, a, b])
    cfg = HistogramConfig(8)
    assert mutual_information(X[:, 2], y, cfg) == mutual_information(X[:, 0], y, cfg)
    ranking = mrmr_rank(_rec(X, y), cfg, 3)
    assert ranking.order[0] == 0
    assert ranking.order[1] == 2


def test_full_ranking_is_permutation(prepared_rec):
    r = mrmr_rank(prepared_rec, n_select=14)
    assert sorted(r.order) == list(range(14))
    rel = [mutual_information(prepared_rec.values[:, c], prepared_rec.labels) for c in range(14)]
    assert r.order[0] == int(np.argmax(rel))
    with pytest.raises(DataError):
        mrmr_rank(prepared_rec, n_select=15)


def test_average_ranking():
    names = ("a", "b", "c")
    r1 = SelectionRanking((0, 1), (0.5, 0.2), 2, names)
    r2 = SelectionRanking((0, 1), (0.3, 0.4), 2, names)
    agg = average_ranking([r1])
    assert agg.mean_score[:2] == (0.5, 0.2)
    agg = average_ranking([r1, r2])
    assert agg.mean_score[1] == pytest.approx(0.3)
    assert agg.mean_score[0] == pytest.approx(0.4)
    assert np.isnan(agg.mean_score[2])
    assert agg.top(2) == [0, 1]
    with pytest.raises(MismatchedChannels):
        average_ranking([r1, SelectionRanking((0,), (0.1,), 1, ("x", "y", "z"))])


def test_matrix_csv_diagonal():
    names = ("a", "b", "c")
    agg = average_ranking([SelectionRanking((2, 0, 1), (0.9, 0.1, -0.2), 3, names)])
    lines = agg.matrix_csv().splitlines()
    assert lines[0] == "step,c,a,b"
    assert lines[1].split(",")[1] == "0.9"
    assert lines[2].split(",")[2] == "0.1"
    assert lines[3].split(",")[3] == "-0.2"


def test_selector_estimator(prepared_rec):
    sel = MRMRSelector(n_features_to_select=9).fit(prepared_rec.values, prepared_rec.labels)
    Xs = sel.transform(prepared_rec.values)
    assert Xs.shape == (prepared_rec.n_samples, 9)
    expected = sorted(mrmr_rank(prepared_rec, n_select=9).order)
    assert np.flatnonzero(sel.get_support()).tolist() == expected
