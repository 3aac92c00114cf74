"""Exact greedy least-squares regression trees.

Splits are scored by the sample-weighted population MSE of the two
children. Candidate thresholds sit halfway between adjacent distinct sorted
feature values and rows with ``x < threshold`` go left.

Scanning uses prefix sums of centred targets. The few candidates that come
within rounding distance of the best prefix-sum score are re-scored with
correctly rounded sums (:func:`math.fsum`), so the reported MSE of a given
partition is bit-identical however the rows are ordered or whichever
feature induced it. Ties then resolve by lower MSE, lower feature index,
lower threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .dataset import DataError, Dataset, select

# relative width of the prefix-sum band that gets exact re-scoring
_SCREEN_RTOL = 1e-9


def sse(values) -> float:
    """Sum of squared deviations from the mean, correctly rounded sums."""
    v = np.asarray(values, dtype=np.float64)
    if len(v) == 0:
        return 0.0
    d = v - math.fsum(v.tolist()) / len(v)
    return math.fsum((d * d).tolist())


def node_stats(values) -> tuple[float, float]:
    """Mean and population MSE (divide by n) of ``values``."""
    v = np.asarray(values, dtype=np.float64)
    if len(v) == 0:
        raise ValueError("node_stats of an empty sample")
    return math.fsum(v.tolist()) / len(v), sse(v) / len(v)


def _midpoint(a: float, b: float) -> float:
    mid = (a + b) / 2
    if not math.isfinite(mid):
        mid = a / 2 + b / 2
    # adjacent doubles: the midpoint may round onto ``a``
    return mid if a < mid <= b else b


@dataclass(frozen=True)
class SplitCandidate:
    feature_index: int
    threshold: float
    left_count: int
    weighted_children_mse: float
    mse_drop: float

    def sort_key(self):
        return (self.weighted_children_mse, self.feature_index, self.threshold)


def best_split_for_feature(x, y, min_leaf: int = 1, feature_index: int = 0) -> SplitCandidate | None:
    """Best threshold on one feature, or ``None`` when no admissible boundary exists."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {len(x)} feature values, {len(y)} targets")
    n = len(y)
    if n < 2:
        return None

    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    node_sse = sse(ys)

    yc = ys - ys.mean()
    cs = np.cumsum(yc)
    cs2 = np.cumsum(yc * yc)
    nl = np.arange(1, n, dtype=np.float64)
    sl, sl2 = cs[:-1], cs2[:-1]
    sr, sr2 = cs[-1] - sl, cs2[-1] - sl2
    scale = max(cs2[-1], node_sse)
    total = np.maximum(sl2 - sl * sl / nl, 0.0) + np.maximum(sr2 - sr * sr / (n - nl), 0.0)

    ok = xs[:-1] < xs[1:]
    counts = np.arange(1, n)
    ok &= (counts >= min_leaf) & (counts <= n - min_leaf)
    if not ok.any():
        return None
    best = total[ok].min()
    near = np.flatnonzero(ok & (total <= best + _SCREEN_RTOL * scale + 1e-300))

    winner = None
    for i in near:
        k = int(i) + 1
        weighted = (sse(ys[:k]) + sse(ys[k:])) / n
        key = (weighted, xs[k - 1])
        if winner is None or key < winner[0]:
            winner = (key, k)
    (weighted, _), k = winner
    return SplitCandidate(
        feature_index=feature_index,
        threshold=_midpoint(xs[k - 1], xs[k]),
        left_count=k,
        weighted_children_mse=weighted,
        mse_drop=max(node_sse / n - weighted, 0.0),
    )


def best_split(samples, features, y, min_leaf: int = 1, workers: int = 1) -> SplitCandidate | None:
    """Best (feature, threshold) pair over all columns of ``features`` restricted to ``samples``.

    ``workers > 1`` scans features on a thread pool; the reduction uses the
    same deterministic ordering, so the result matches the sequential scan.
    """
    samples = np.asarray(samples, dtype=np.intp)
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    ys = np.asarray(y, dtype=np.float64)[samples]

    def scan(j):
        return best_split_for_feature(X[samples, j], ys, min_leaf=min_leaf, feature_index=j)

    cols = range(X.shape[1])
    if workers > 1 and X.shape[1] > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(scan, cols))
    else:
        found = [scan(j) for j in cols]
    found = [c for c in found if c is not None]
    return min(found, key=SplitCandidate.sort_key) if found else None


@dataclass(frozen=True, eq=False)
class Node:
    id: int
    depth: int
    sample_indices: np.ndarray
    mean: float
    mse: float
    split: SplitCandidate | None = None
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None

    @property
    def n_samples(self) -> int:
        return len(self.sample_indices)

    def walk(self) -> Iterator["Node"]:
        """Nodes in pre-order (the id order)."""
        yield self
        if not self.is_leaf:
            yield from self.left.walk()
            yield from self.right.walk()


@dataclass(frozen=True, eq=False)
class Tree:
    root: Node
    max_depth: int
    feature_names: tuple[str, ...]
    n_samples: int
    residual_mse: float
    average_leaf_depth: float
    min_leaf: int = 1
    target_name: str = field(default="y")

    @property
    def total_mse(self) -> float:
        return self.root.mse

    def nodes(self) -> list[Node]:
        return list(self.root.walk())

    def leaves(self) -> list[Node]:
        return [nd for nd in self.root.walk() if nd.is_leaf]

    def apply(self, row) -> Node:
        """Leaf reached by ``row`` (a mapping by feature name, or a sequence in feature order)."""
        node = self.root
        while not node.is_leaf:
            name = self.feature_names[node.split.feature_index]
            if isinstance(row, Mapping):
                if name not in row:
                    raise KeyError(f"missing feature value {name!r}")
                v = row[name]
            else:
                if node.split.feature_index >= len(row):
                    raise KeyError(f"missing feature value {name!r}")
                v = row[node.split.feature_index]
            node = node.left if v < node.split.threshold else node.right
        return node

    def predict(self, row) -> float:
        return self.apply(row).mean


def grow(X, y, max_depth: int, feature_names: Sequence[str] | None = None,
         min_leaf: int = 1, target_name: str = "y", workers: int = 1) -> Tree:
    """Grow a greedy tree on a feature matrix ``X`` (rows are samples)."""
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = len(y)
    if n == 0:
        raise ValueError("empty target")
    if X.shape[0] != n:
        raise ValueError(f"feature matrix has {X.shape[0]} rows, target has {n}")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(X.shape[1])]
    if len(feature_names) != X.shape[1]:
        raise ValueError("feature_names does not match feature matrix width")

    next_id = 0

    def build(idx: np.ndarray, depth: int) -> Node:
        nonlocal next_id
        node_id = next_id
        next_id += 1
        idx.setflags(write=False)
        mean, mse = node_stats(y[idx])
        split = None
        if depth < max_depth and mse > 0 and len(idx) >= 2 * min_leaf:
            split = best_split(idx, X, y, min_leaf=min_leaf, workers=workers)
        if split is None:
            return Node(node_id, depth, idx, mean, mse)
        go_left = X[idx, split.feature_index] < split.threshold
        left = build(idx[go_left], depth + 1)
        right = build(idx[~go_left], depth + 1)
        return Node(node_id, depth, idx, mean, mse, split, left, right)

    root = build(np.arange(n), 0)
    leaves = [nd for nd in root.walk() if nd.is_leaf]
    residual = math.fsum(sse(y[nd.sample_indices]) for nd in leaves) / n
    avg_depth = sum(nd.n_samples * nd.depth for nd in leaves) / n
    return Tree(root, max_depth, tuple(feature_names), n, residual, avg_depth,
                min_leaf, target_name)


def fit(ds: Dataset, target: str, features: Sequence[str], max_depth: int,
        min_leaf: int = 1, workers: int = 1) -> Tree:
    y, X = select(ds, target, features)
    if len(y) == 0:
        raise DataError("empty target")
    return grow(X, y, max_depth, feature_names=features, min_leaf=min_leaf,
                target_name=target, workers=workers)


def fit_self(y, max_depth: int, name: str = "y") -> Tree:
    """Regress ``y`` on itself: the target is its own (only) feature."""
    y = np.asarray(y, dtype=np.float64)
    if len(y) == 0:
        raise ValueError("empty target")
    return grow(y[:, None], y, max_depth, feature_names=[name], target_name=name)


def predict(tree: Tree, row) -> float:
    return tree.predict(row)


def average_leaf_depth(tree: Tree) -> float:
    return tree.average_leaf_depth
