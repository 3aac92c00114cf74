"""Lepto-variance / macro-variance decomposition.

The k-bit lepto-variance of a series is the residual MSE of a greedy
depth-k regression tree of the series on itself; the k-bit macro-variance
is what that tree removes. Their sum is always the total (population)
variance, and no depth-1 tree on any feature set can remove more than the
1-bit macro-variance.

Depth here is the *maximum* depth. Greedy self-trees can stop short of it
(``{0, -2, 4, 1}`` isolates 4 at depth 1), so the average leaf depth is
reported alongside every profile row.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import DataError, Dataset, select
from .tree import fit, fit_self, node_stats

log = logging.getLogger(__name__)

# explained/macro ratios up to 1 + this are rounding and clamp to 1
_FRACTION_SLACK = 1e-9


def total_variance(y) -> float:
    y = np.asarray(y, dtype=np.float64)
    if len(y) == 0:
        raise ValueError("empty target")
    return node_stats(y)[1]


def lepto_variance(y, k: int) -> float:
    if k < 0:
        raise ValueError("depth must be >= 0")
    if k == 0:
        return total_variance(y)
    return fit_self(y, k).residual_mse


def macro_variance(y, k: int) -> float:
    return total_variance(y) - lepto_variance(y, k)


@dataclass(frozen=True)
class ProfileRow:
    k: int
    lepto: float
    macro: float
    macro_fraction: float
    average_leaf_depth: float


@dataclass(frozen=True)
class DecompositionProfile:
    total_variance: float
    rows: tuple[ProfileRow, ...]
    n_samples: int
    target_name: str = "y"

    def row(self, k: int) -> ProfileRow:
        return self.rows[k]


def decompose(y, k_max: int, name: str = "y") -> DecompositionProfile:
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    y = np.asarray(y, dtype=np.float64)
    sigma2 = total_variance(y)
    rows = [ProfileRow(0, sigma2, 0.0, 0.0, 0.0)]
    for k in range(1, k_max + 1):
        tree = fit_self(y, k, name=name)
        lam = tree.residual_mse
        mu = sigma2 - lam
        rows.append(ProfileRow(k, lam, mu, mu / sigma2 if sigma2 > 0 else 0.0,
                               tree.average_leaf_depth))
    return DecompositionProfile(sigma2, tuple(rows), len(y), name)


@dataclass(frozen=True)
class FeatureSetResult:
    feature_names: tuple[str, ...]
    k: int
    residual_mse: float
    explained: float
    macro_variance: float
    macro_fraction_explained: float
    anomaly: bool = False

    @property
    def label(self) -> str:
        return "+".join(self.feature_names)


def feature_set_analysis(ds: Dataset, target: str, feature_sets: Sequence[Sequence[str]],
                         k: int, min_leaf: int = 1, workers: int = 1) -> list[FeatureSetResult]:
    """Fit one depth-k tree per feature set and express each as a share of the k-bit macro-variance.

    A share above 1 can only come from greedy truncation of the self-tree
    at ``k >= 2``; it is kept and flagged as ``anomaly`` instead of raised.
    """
    if k < 1:
        raise ValueError("depth must be >= 1")
    for fs in feature_sets:
        select(ds, target, fs)
    y = ds[target]
    if len(y) == 0:
        raise DataError("empty target")
    sigma2 = total_variance(y)
    if sigma2 == 0:
        raise DataError(f"degenerate target {target!r}: zero variance")
    mu = sigma2 - lepto_variance(y, k)

    def one(fs) -> FeatureSetResult:
        tree = fit(ds, target, list(fs), k, min_leaf=min_leaf)
        explained = sigma2 - tree.residual_mse
        frac = explained / mu
        anomaly = False
        if frac > 1:
            if frac <= 1 + _FRACTION_SLACK:
                frac = 1.0
            else:
                anomaly = True
                log.warning("feature set %s explains %.6g of the %d-bit macro-variance",
                            "+".join(fs), frac, k)
        return FeatureSetResult(tuple(fs), k, tree.residual_mse, explained, mu, frac, anomaly)

    if workers > 1 and len(feature_sets) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, feature_sets))
    return [one(fs) for fs in feature_sets]
