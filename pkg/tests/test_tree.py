import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leptovar.dataset import DataError, Dataset
from leptovar.embedded import FOUR_POINT, EIGHT_DAY
from leptovar.oracle import enumerate_splits
from leptovar.tree import (average_leaf_depth, best_split, best_split_for_feature, fit, fit_self,
                           grow, node_stats, predict)


def naive_sse(v):
    m = sum(v) / len(v)
    return sum((a - m) ** 2 for a in v)


def naive_greedy(X, y, depth):
    """Residual SSE of a greedy tree grown by trying every threshold on every column."""
    idx = list(range(len(y)))

    def rec(idx, d):
        vals = [y[i] for i in idx]
        here = naive_sse(vals)
        if d == 0 or len(idx) < 2 or here == 0:
            return here
        best = None
        for j in range(len(X[0])):
            xs = sorted({X[i][j] for i in idx})
            for a, b in zip(xs, xs[1:]):
                c = (a + b) / 2
                left = [i for i in idx if X[i][j] < c]
                right = [i for i in idx if X[i][j] >= c]
                s = naive_sse([y[i] for i in left]) + naive_sse([y[i] for i in right])
                if best is None or s < best[0] - 1e-12:
                    best = (s, left, right)
        if best is None:
            return here
        return rec(best[1], d - 1) + rec(best[2], d - 1)

    return rec(idx, depth)


# ---- node_stats

def test_node_stats_example(y1):
    assert node_stats(y1) == (0.625, 3.171875)


@pytest.mark.parametrize("vals,expected", [([2.5], (2.5, 0.0)), ([-1.0, 1.0], (0.0, 1.0))])
def test_node_stats_small(vals, expected):
    assert node_stats(vals) == expected


def test_node_stats_empty():
    with pytest.raises(ValueError):
        node_stats([])


# ---- best_split_for_feature

@pytest.mark.parametrize("feat,thr,mse", [
    ("f1", 4.9, 1.421), ("f2", 4.5, 1.609), ("t", 5.5, 1.896),
])
def test_depth1_split_per_feature(t1, y1, feat, thr, mse):
    c = best_split_for_feature(t1[feat], y1)
    assert c.threshold == thr
    assert c.weighted_children_mse == pytest.approx(mse, abs=5e-4)
    assert c.mse_drop == pytest.approx(3.171875 - c.weighted_children_mse, abs=1e-15)


def test_f1_drop_fraction(t1, y1):
    c = best_split_for_feature(t1["f1"], y1)
    assert 100 * c.mse_drop / 3.171875 == pytest.approx(55.21, abs=0.01)
    assert c.left_count == 5  # t = 1, 2, 6, 7, 8


def test_self_split_exact(y1):
    c = best_split_for_feature(y1, y1)
    assert c.threshold == 0.5
    assert c.weighted_children_mse == 0.921875
    assert c.left_count == 4


def test_constant_feature_has_no_split(y1):
    assert best_split_for_feature(np.ones(8), y1) is None


def test_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        best_split_for_feature([1.0, 2.0], [1.0])


def test_threshold_between_adjacent_doubles():
    a = 1.0
    b = np.nextafter(a, 2.0)
    c = best_split_for_feature([a, b], [0.0, 1.0])
    assert a < c.threshold <= b
    assert c.left_count == 1


def test_tie_prefers_lower_threshold():
    # {0}|{1, 0} and {0, 1}|{0} both leave SSE 0.5
    c = best_split_for_feature([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    assert c.threshold == 0.5
    c = best_split_for_feature([0.0, 1.0, 2.0], [0.0, 5.0, 10.0])
    assert c.threshold == 0.5


def test_min_leaf_restricts_candidates(y1):
    c = best_split_for_feature(y1, y1, min_leaf=4)
    assert c.left_count == 4
    assert best_split_for_feature(y1, y1, min_leaf=5) is None


@pytest.mark.parametrize("seed", range(40))
def test_scan_equals_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 60))
    x = np.round(rng.normal(size=n), int(rng.integers(0, 3)))
    y = rng.standard_t(3, n)
    cands = enumerate_splits(x, y)
    got = best_split_for_feature(x, y)
    if not cands:
        assert got is None
        return
    want = min(cands, key=lambda c: (c.weighted_children_mse, c.threshold))
    assert got.weighted_children_mse == want.weighted_children_mse
    assert got.threshold == want.threshold
    assert got.left_count == want.left_count


# ---- best_split

def test_best_split_two_factors(t1, y1):
    X = np.column_stack([t1["f1"], t1["f2"]])
    c = best_split(np.arange(8), X, y1)
    assert (c.feature_index, c.threshold) == (0, 4.9)


def test_best_split_f2_only(t1, y1):
    c = best_split(np.arange(8), t1["f2"], y1)
    assert (c.feature_index, c.threshold) == (0, 4.5)


def test_best_split_all_constant(y1):
    assert best_split(np.arange(8), np.ones((8, 3)), y1) is None


def test_best_split_tie_prefers_lower_feature_index(y1):
    X = np.column_stack([y1 * 2, y1])  # same partitions, bit-identical scores
    c = best_split(np.arange(8), X, y1)
    assert c.feature_index == 0


def test_best_split_threaded_matches_sequential(rng):
    X = rng.normal(size=(200, 6))
    y = X[:, 2] + rng.normal(size=200)
    idx = np.arange(200)
    assert best_split(idx, X, y, workers=4) == best_split(idx, X, y)


# ---- fit

def test_fit_f2_depth2(t1):
    tree = fit(t1, "y", ["f2"], 2)
    assert tree.residual_mse == pytest.approx(0.70833, abs=5e-5)
    assert [nd.split.threshold for nd in tree.nodes() if not nd.is_leaf] == [4.5, 1.4, 5.4]


def test_fit_f1_depth2(t1):
    tree = fit(t1, "y", ["f1"], 2)
    assert tree.residual_mse == pytest.approx(0.60, abs=5e-3)
    assert [nd.split.threshold for nd in tree.nodes() if not nd.is_leaf] == [4.9, 2.1, 5.5]


def test_fit_both_factors_depth2(t1):
    tree = fit(t1, "y", ["f1", "f2"], 2)
    # leaves {0, 1.5}, {-1, -.5, -2}, {4}, {2, 1}: 67/192 exactly
    assert tree.residual_mse == pytest.approx(67 / 192, abs=1e-15)
    root = tree.root
    assert (root.split.feature_index, root.split.threshold) == (0, 4.9)
    assert tree.feature_names[root.left.split.feature_index] == "f2"
    assert [nd.id for nd in tree.nodes() if not nd.is_leaf] == [0, 1, 4]


def test_node_ids_preorder(t1):
    tree = fit(t1, "y", ["f2"], 2)
    assert [nd.id for nd in tree.nodes()] == list(range(7))
    assert (tree.root.left.id, tree.root.right.id) == (1, 4)


def test_constant_target_single_leaf():
    ds = Dataset.from_columns({"y": [2.0] * 5, "x": [1.0, 2.0, 3.0, 4.0, 5.0]})
    tree = fit(ds, "y", ["x"], 1)
    assert tree.root.is_leaf and tree.residual_mse == 0.0 and tree.root.depth == 0


def test_single_row():
    tree = fit_self([3.0], 2)
    assert tree.root.is_leaf and tree.residual_mse == 0.0 and tree.average_leaf_depth == 0.0


def test_fit_errors(t1):
    with pytest.raises(DataError):
        fit(t1, "y", ["zz"], 1)
    with pytest.raises(DataError):
        fit(t1, "zz", ["f1"], 1)
    with pytest.raises(ValueError):
        fit(t1, "y", ["f1"], 0)
    with pytest.raises(ValueError):
        fit_self([], 1)


def test_min_leaf(t1):
    tree = fit(t1, "y", ["f1", "f2"], 3, min_leaf=2)
    assert all(nd.n_samples >= 2 for nd in tree.leaves())


# ---- fit_self

def test_self_depth1(y1):
    tree = fit_self(y1, 1)
    assert tree.residual_mse == 0.921875
    left, right = (sorted(y1[nd.sample_indices]) for nd in tree.leaves())
    assert left == [-2.0, -1.0, -0.5, 0.0]
    assert right == [1.0, 1.5, 2.0, 4.0]


def test_self_depth2_isolates_extremes(y1):
    tree = fit_self(y1, 2)
    assert tree.residual_mse == 0.125
    singletons = sorted(y1[nd.sample_indices][0] for nd in tree.leaves() if nd.n_samples == 1)
    assert singletons == [-2.0, 4.0]


def test_four_point_sample():
    tree = fit_self(FOUR_POINT, 2)
    assert tree.residual_mse == 0.125
    assert tree.average_leaf_depth == 1.75
    # 4 is isolated at depth 1
    assert [list(np.array(FOUR_POINT)[nd.sample_indices]) for nd in tree.leaves()][-1] == [4.0]
    assert tree.root.right.is_leaf


# ---- predict / average depth

def test_predict_self_tree(y1):
    tree = fit_self(y1, 1)
    assert predict(tree, {"y": -3.0}) == -0.875
    assert predict(tree, [-3.0]) == -0.875


def test_predict_single_leaf():
    tree = fit_self([1.0, 1.0], 1)
    assert predict(tree, {"y": 100.0}) == 1.0
    assert predict(tree, {}) == 1.0


def test_predict_boundary_goes_right(t1):
    tree = fit(t1, "y", ["f1"], 1)
    assert predict(tree, {"f1": 4.9}) == tree.root.right.mean
    assert predict(tree, {"f1": 4.8999}) == tree.root.left.mean


def test_predict_missing_feature(t1):
    tree = fit(t1, "y", ["f1"], 1)
    with pytest.raises(KeyError):
        predict(tree, {"f2": 1.0})


def test_average_leaf_depth_full_tree():
    tree = fit_self([1.0, 2.0, 10.0, 11.0], 2)
    assert average_leaf_depth(tree) == 2.0
    assert average_leaf_depth(fit_self([1.0, 1.0], 2)) == 0.0


# ---- properties

@pytest.mark.parametrize("seed", range(25))
def test_matches_naive_greedy(seed):
    rng = np.random.default_rng(seed)
    n, p = int(rng.integers(2, 25)), int(rng.integers(1, 4))
    X = rng.normal(size=(n, p))
    y = X[:, 0] + rng.normal(size=n)
    depth = int(rng.integers(1, 4))
    tree = grow(X, y, depth)
    want = naive_greedy(X.tolist(), y.tolist(), depth) / n
    assert tree.residual_mse == pytest.approx(want, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_structural_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    X = rng.normal(size=(n, 3))
    y = rng.standard_t(3, n)
    tree = grow(X, y, 3)
    for nd in tree.nodes():
        assert nd.depth <= 3
        if nd.is_leaf:
            assert nd.left is None and nd.right is None
            continue
        both = np.concatenate([nd.left.sample_indices, nd.right.sample_indices])
        assert sorted(both) == sorted(nd.sample_indices)
        assert nd.left.depth == nd.depth + 1
        x = X[:, nd.split.feature_index]
        assert np.all(x[nd.left.sample_indices] < nd.split.threshold)
        assert np.all(x[nd.right.sample_indices] >= nd.split.threshold)
        weighted = (nd.left.n_samples * nd.left.mse + nd.right.n_samples * nd.right.mse) / nd.n_samples
        assert weighted <= nd.mse * (1 + 1e-12)
        assert 1 <= nd.split.left_count <= nd.n_samples - 1
    leaves = tree.leaves()
    assert tree.residual_mse == pytest.approx(
        sum(nd.n_samples / n * nd.mse for nd in leaves), rel=1e-12, abs=1e-15)
    assert 0 <= tree.residual_mse <= tree.total_mse
    preds = np.array([tree.predict(row) for row in X])
    assert abs(np.mean((y - preds) ** 2) - tree.residual_mse) <= 1e-12 * max(1.0, tree.total_mse)


@pytest.mark.parametrize("seed", range(20))
def test_row_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    X = np.round(rng.normal(size=(n, 2)), 1)
    y = rng.normal(size=n)
    perm = rng.permutation(n)
    a, b = grow(X, y, 3), grow(X[perm], y[perm], 3)
    assert a.residual_mse == b.residual_mse
    for na, nb in zip(a.nodes(), b.nodes()):
        assert na.id == nb.id and na.split == nb.split
        assert sorted(na.sample_indices) == sorted(perm[nb.sample_indices])


def test_self_split_dominance_random():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        n = int(rng.integers(2, 51))
        y = rng.normal(size=n) if trial % 2 else rng.standard_cauchy(n)
        x = rng.normal(size=n)
        own = best_split_for_feature(y, y)
        other = best_split_for_feature(x, y)
        assert other.mse_drop <= own.mse_drop + 1e-12 * node_stats(y)[1]


@pytest.mark.parametrize("a,b", [(0.5, -3.0), (2.0, 1.0), (10.0, 100.0)])
def test_affine_equivariance(a, b):
    rng = np.random.default_rng(7)
    for _ in range(20):
        y = rng.normal(size=int(rng.integers(2, 40)))
        t0, t1_ = fit_self(y, 3), fit_self(a * y + b, 3)
        assert t1_.residual_mse == pytest.approx(a * a * t0.residual_mse, rel=1e-9, abs=1e-15)
        for n0, n1 in zip(t0.nodes(), t1_.nodes()):
            assert np.array_equal(n0.sample_indices, n1.sample_indices)
            if not n0.is_leaf:
                assert n1.split.threshold == pytest.approx(a * n0.split.threshold + b, rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=25),
       st.integers(1, 4))
def test_deeper_never_worse(vals, depth):
    a, b = fit_self(vals, depth), fit_self(vals, depth + 1)
    assert b.residual_mse <= a.residual_mse
    assert a.residual_mse <= a.total_mse


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([-1.5, 0.0, 2.25]), min_size=2, max_size=20))
def test_two_distinct_values_resolved_at_depth1(vals):
    if len(set(vals)) == 2:
        assert fit_self(vals, 1).residual_mse == 0.0
