"""Seeded randomized checks of the greedy engine against the brute-force oracles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .oracle import best_partition_brute, check_conjecture, enumerate_splits, optimal_tree_brute
from .tree import best_split_for_feature, fit_self, node_stats


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: int = 0
    counterexample: dict | None = None
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def fail(self, **example):
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = example

    def to_dict(self) -> dict:
        return {"name": self.name, "trials": self.trials, "failures": self.failures,
                "ok": self.ok, "counterexample": self.counterexample, **self.notes}


def random_series(rng: np.random.Generator, n: int, trial: int) -> np.ndarray:
    """Uniform on even trials, heavy-tailed (Student t, 2 dof) on odd ones."""
    if trial % 2 == 0:
        return rng.uniform(-10, 10, n)
    return rng.standard_t(2, n)


def dominance(rng, trials: int, n_max: int = 50) -> SuiteResult:
    """No feature's depth-1 MSE drop beats the target's own."""
    res = SuiteResult("self-split dominance (depth 1)")
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        y = random_series(rng, n, t)
        x = random_series(rng, n, t + 1)
        own = best_split_for_feature(y, y)
        other = best_split_for_feature(x, y)
        res.trials += 1
        slack = 1e-12 * max(node_stats(y)[1], 1e-300)
        if other is not None and other.mse_drop > own.mse_drop + slack:
            res.fail(y=y.tolist(), x=x.tolist(), own=own.mse_drop, other=other.mse_drop)
    return res


def scan_matches_enumeration(rng, trials: int, n_max: int = 50) -> SuiteResult:
    res = SuiteResult("prefix-sum scan = exhaustive enumeration")
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        y = random_series(rng, n, t)
        x = random_series(rng, n, t + 1)
        if t % 5 == 4:
            x = np.round(x)  # repeated feature values
        fast = best_split_for_feature(x, y)
        cands = enumerate_splits(x, y)
        res.trials += 1
        if not cands:
            if fast is not None:
                res.fail(x=x.tolist(), y=y.tolist())
            continue
        slow = min(cands, key=lambda c: (c.weighted_children_mse, c.threshold))
        if (fast is None or fast.weighted_children_mse != slow.weighted_children_mse
                or fast.threshold != slow.threshold):
            res.fail(x=x.tolist(), y=y.tolist(), fast=None if fast is None else fast.weighted_children_mse,
                     slow=slow.weighted_children_mse)
    return res


def sorted_partitions(rng, trials: int, n_max: int = 12) -> SuiteResult:
    """Best of all bipartitions is sorted and equals the self-split."""
    res = SuiteResult("best bipartition is sorted = self-split")
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        y = random_series(rng, n, t)
        part = best_partition_brute(y)
        own = best_split_for_feature(y, y)
        res.trials += 1
        if not part.is_sorted or part.weighted_mse != own.weighted_children_mse:
            res.fail(y=y.tolist(), brute=part.weighted_mse, self_split=own.weighted_children_mse)
    return res


def greedy_vs_optimal(rng, trials: int, n_max: int = 30, k_max: int = 3) -> SuiteResult:
    res = SuiteResult("optimal tree <= greedy self-tree")
    strict = 0
    for t in range(trials):
        n = int(rng.integers(2, n_max + 1))
        y = random_series(rng, n, t)
        for k in range(1, k_max + 1):
            greedy = fit_self(y, k).residual_mse
            best = optimal_tree_brute(y, k).residual_mse
            res.trials += 1
            if best > greedy + 1e-12 * max(node_stats(y)[1], 1.0) or (k == 1 and best != greedy):
                res.fail(y=y.tolist(), k=k, greedy=greedy, optimal=best)
            elif best < greedy - 1e-12 * max(node_stats(y)[1], 1.0):
                strict += 1
    res.notes["greedy_suboptimal"] = strict
    return res


def conjecture(rng, trials: int, n_max: int = 8, k: int = 2, low: int = -2, high: int = 4) -> SuiteResult:
    """Integer-valued samples; counterexamples are reported, not failures."""
    res = SuiteResult("average-depth conjecture")
    found = []
    for _ in range(trials):
        n = int(rng.integers(2, n_max + 1))
        y = rng.integers(low, high + 1, n).astype(float)
        rep = check_conjecture(y, k)
        res.trials += 1
        if not rep.holds:
            found.append({"y": y.tolist(), "greedy_rss": rep.greedy_rss,
                          "greedy_avg_depth": rep.greedy_avg_depth,
                          "min_rss": rep.min_rss_at_same_avg_depth,
                          "at_avg_depth": rep.best_avg_depth})
    res.notes.update(counterexamples=len(found), examples=found[:5],
                     n_max=n_max, depth=k, values=[low, high])
    return res


def run(trials: int, seed: int, with_conjecture: bool = False, conj_trials: int | None = None,
        n_max: int = 8, depth: int = 2, low: int = -2, high: int = 4) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    out = [
        dominance(rng, trials),
        scan_matches_enumeration(rng, trials),
        sorted_partitions(rng, trials),
        greedy_vs_optimal(rng, max(trials // 10, 1) if trials else 0),
    ]
    if with_conjecture:
        out.append(conjecture(rng, trials if conj_trials is None else conj_trials,
                              n_max=n_max, k=depth, low=low, high=high))
    return out
