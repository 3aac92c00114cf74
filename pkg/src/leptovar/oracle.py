"""Brute-force references for the greedy engine.

Nothing here reuses the prefix-sum scan of :mod:`leptovar.tree`:

* :func:`enumerate_splits` scores every boundary by direct summation;
* :func:`best_partition_brute` tries every bipartition of the target, sorted
  or not, so sorted-split dominance is checked rather than assumed;
* :func:`optimal_tree_brute` finds the best depth-limited tree over
  contiguous groups of the sorted target (dynamic programming);
* :func:`check_conjecture` compares the greedy self-tree against every
  contiguous tree at no greater average leaf depth, in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .tree import SplitCandidate, fit_self


def _direct_sse(vals: list[float]) -> float:
    if not vals:
        return 0.0
    m = math.fsum(vals) / len(vals)
    return math.fsum((v - m) * (v - m) for v in vals)


def enumerate_splits(x, y) -> list[SplitCandidate]:
    """Every boundary between adjacent distinct sorted ``x`` values, in threshold order."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} feature values, {len(y)} targets")
    n = len(y)
    if n < 2:
        return []
    node_sse = _direct_sse(y)
    distinct = sorted(set(x))
    out = []
    for a, b in zip(distinct, distinct[1:]):
        c = (a + b) / 2
        if not a < c <= b:
            c = b
        left = [yi for xi, yi in zip(x, y) if xi < c]
        right = [yi for xi, yi in zip(x, y) if xi >= c]
        weighted = (_direct_sse(left) + _direct_sse(right)) / n
        out.append(SplitCandidate(0, c, len(left), weighted, max(node_sse / n - weighted, 0.0)))
    return out


@dataclass(frozen=True)
class PartitionResult:
    left_indices: tuple[int, ...]
    weighted_mse: float
    is_sorted: bool


def evaluate_partition(y, left_indices) -> PartitionResult:
    """Score one bipartition; the lower-mean side is reported as left."""
    y = [float(v) for v in y]
    n = len(y)
    left = sorted(set(int(i) for i in left_indices))
    right = [i for i in range(n) if i not in set(left)]
    if not left or not right:
        raise ValueError("both sides of a partition must be non-empty")
    lv, rv = [y[i] for i in left], [y[i] for i in right]
    if math.fsum(lv) / len(lv) > math.fsum(rv) / len(rv):
        left, right, lv, rv = right, left, rv, lv
    weighted = (_direct_sse(lv) + _direct_sse(rv)) / n
    return PartitionResult(tuple(left), weighted, max(lv) < min(rv))


def sorted_swap(y, left_indices) -> PartitionResult:
    """Swap the largest left value with the smallest right value (one step of the dominance argument)."""
    part = evaluate_partition(y, left_indices)
    y = [float(v) for v in y]
    left = list(part.left_indices)
    right = [i for i in range(len(y)) if i not in set(left)]
    if part.is_sorted:
        return part
    hi = max(left, key=lambda i: y[i])
    lo = min(right, key=lambda i: y[i])
    left[left.index(hi)] = lo
    return evaluate_partition(y, left)


def best_partition_brute(y) -> PartitionResult:
    """Minimum weighted-MSE bipartition over all 2**(n-1) - 1 candidates (2 <= n <= 20)."""
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if not 2 <= n <= 20:
        raise ValueError(f"best_partition_brute needs 2 <= n <= 20, got {n}")
    yc = y - y.mean()
    total_s, total_s2 = yc.sum(), (yc * yc).sum()
    bits = 1 << np.arange(n - 1)
    n_masks = (1 << (n - 1)) - 1
    scale = max(total_s2, 1e-300)

    # pass 1: vectorised screening on sums; pass 2: exact re-scoring
    chunk = 1 << 15
    best, near = math.inf, []
    for start in range(1, n_masks + 1, chunk):
        masks = np.arange(start, min(start + chunk, n_masks + 1))
        member = (masks[:, None] & bits) != 0
        cnt = member.sum(axis=1).astype(np.float64)
        s = member @ yc[:-1]
        s2 = member @ (yc[:-1] * yc[:-1])
        score = (np.maximum(s2 - s * s / cnt, 0.0)
                 + np.maximum((total_s2 - s2) - (total_s - s) ** 2 / (n - cnt), 0.0))
        cmin = score.min()
        if cmin < best - 1e-9 * scale:
            near = []
        best = min(best, cmin)
        near.extend(masks[score <= best + 1e-9 * scale].tolist())

    winner = None
    for m in near:
        part = evaluate_partition(y, [i for i in range(n - 1) if m >> i & 1])
        key = (part.weighted_mse, part.left_indices)
        if winner is None or key < winner[0]:
            winner = (key, part)
    return winner[1]


class OptimalTree(NamedTuple):
    residual_mse: float
    leaves: tuple[tuple[int, int], ...]
    sorted_values: tuple[float, ...]

    def leaf_values(self) -> list[tuple[float, ...]]:
        return [self.sorted_values[a:b] for a, b in self.leaves]


def optimal_tree_brute(y, k: int) -> OptimalTree:
    """Best tree of depth <= k over contiguous groups of the sorted target (n <= 500, k <= 4).

    ``OPT(i, j, d) = min(SSE(i, j), min_m OPT(i, m, d-1) + OPT(m, j, d-1))``
    on half-open ranges of the sorted values. ``leaves`` are those ranges.
    """
    ys = np.sort(np.asarray(y, dtype=np.float64))
    n = len(ys)
    if n == 0:
        raise ValueError("empty target")
    if n > 500 or not 0 <= k <= 4:
        raise ValueError(f"optimal_tree_brute bounds are n <= 500, 0 <= k <= 4 (got n={n}, k={k})")

    yc = ys - ys.mean()
    c1 = np.concatenate([[0.0], np.cumsum(yc)])
    c2 = np.concatenate([[0.0], np.cumsum(yc * yc)])
    i_idx, j_idx = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    cnt = (j_idx - i_idx).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        base = (c2[j_idx] - c2[i_idx]) - (c1[j_idx] - c1[i_idx]) ** 2 / cnt
    base = np.where(cnt > 0, np.maximum(base, 0.0), np.inf)

    levels = [base]
    choices = []
    for _ in range(k):
        prev = levels[-1]
        cur = prev.copy()
        arg = np.full(prev.shape, -1, dtype=np.intp)
        for i in range(n - 1):
            # prev[i, m] + prev[m, j] over m in (i, j); invalid ranges are inf
            sums = prev[i, i + 1:n, None] + prev[i + 1:n, :]
            m = np.argmin(sums, axis=0)
            best = sums[m, np.arange(n + 1)]
            better = best < cur[i]
            cur[i, better] = best[better]
            arg[i, better] = m[better] + i + 1
        levels.append(cur)
        choices.append(arg)

    def leaves_of(i, j, d):
        if d == 0:
            return [(i, j)]
        if choices[d - 1][i, j] < 0:
            return leaves_of(i, j, d - 1)
        m = int(choices[d - 1][i, j])
        return leaves_of(i, m, d - 1) + leaves_of(m, j, d - 1)

    leaves = tuple(leaves_of(0, n, k))
    residual = math.fsum(_direct_sse(ys[a:b].tolist()) for a, b in leaves) / n
    return OptimalTree(residual, leaves, tuple(ys.tolist()))


def _exact_sse(vals) -> Fraction:
    fr = [Fraction(v) for v in vals]
    s = sum(fr)
    return sum(v * v for v in fr) - s * s / len(fr)


def contiguous_tree_front(ys, k: int) -> dict[int, Fraction]:
    """For sorted ``ys``: map (sum of |leaf| * leaf depth) -> least exact SSE, over all trees of depth <= k.

    Dividing the key by n gives the sample-weighted average leaf depth.
    """
    n = len(ys)
    memo: dict[tuple[int, int, int], dict[int, Fraction]] = {}
    leaf_sse = {}

    def front(i, j, d):
        key = (i, j, d)
        if key in memo:
            return memo[key]
        if (i, j) not in leaf_sse:
            leaf_sse[i, j] = _exact_sse(ys[i:j])
        out = {0: leaf_sse[i, j]}
        if d > 0:
            for m in range(i + 1, j):
                lf, rf = front(i, m, d - 1), front(m, j, d - 1)
                for a, sa in lf.items():
                    for b, sb in rf.items():
                        depth = a + b + (j - i)
                        s = sa + sb
                        if depth not in out or s < out[depth]:
                            out[depth] = s
        memo[key] = out
        return out

    return front(0, n, k)


@dataclass(frozen=True)
class ConjectureReport:
    n: int
    k: int
    greedy_rss: float
    greedy_residual_mse: float
    greedy_avg_depth: float
    min_rss_at_same_avg_depth: float
    best_avg_depth: float
    holds: bool


def check_conjecture(y, k: int) -> ConjectureReport:
    """Does the greedy self-tree reach the least RSS among contiguous trees of no greater average depth?

    Trees of every maximum depth up to ``k`` are candidates (n <= 16, k <= 3).
    Comparisons are exact, so equal-RSS trees never count against the greedy tree.
    """
    y = [float(v) for v in y]
    n = len(y)
    if not 1 <= n <= 16 or not 1 <= k <= 3:
        raise ValueError(f"check_conjecture bounds are 1 <= n <= 16, 1 <= k <= 3 (got n={n}, k={k})")
    tree = fit_self(y, k)
    leaves = tree.leaves()
    g_depth = sum(nd.n_samples * nd.depth for nd in leaves)
    g_rss = sum((_exact_sse([y[i] for i in nd.sample_indices]) for nd in leaves), Fraction(0))

    front = contiguous_tree_front(sorted(y), k)
    best_depth, best_rss = min(((d, s) for d, s in front.items() if d <= g_depth),
                               key=lambda t: (t[1], t[0]))
    return ConjectureReport(
        n=n, k=k,
        greedy_rss=float(g_rss),
        greedy_residual_mse=float(g_rss / n),
        greedy_avg_depth=g_depth / n,
        min_rss_at_same_avg_depth=float(best_rss),
        best_avg_depth=best_depth / n,
        holds=not best_rss < g_rss,
    )
