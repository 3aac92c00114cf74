"""Recompute the published worked example and compare with its printed values.

Each :class:`Check` pairs a recomputed number with the printed one and a
tolerance matched to how the printed value was rounded: +-5e-4 for values
shown to three decimals, 1e-9 for values that are exact binary fractions,
0.01 percentage points for two-decimal percentages.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .dataset import Dataset, correlations, describe
from .embedded import FOUR_POINT, eight_day
from .lepto import decompose, feature_set_analysis
from .oracle import optimal_tree_brute
from .tree import best_split_for_feature, fit, fit_self


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))

    @property
    def ok(self) -> bool:
        return bool(abs(self.value - self.expected) <= self.tol)

    def line(self) -> str:
        mark = "ok  " if self.ok else "FAIL"
        return (f"{mark} {self.name:<44} {self.value:>12.6f}  "
                f"expected {self.expected:.6f} +- {self.tol:g}")

    def to_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}


DEPTH1 = {  # feature -> (threshold, weighted mse, mse tol, info gain %)
    "t": (5.5, 1.896, 5e-4, 40.23),
    "f1": (4.9, 1.421, 5e-4, 55.21),
    "f2": (4.5, 1.609, 5e-4, 49.26),
    "y": (0.5, 0.921875, 1e-9, 70.94),
}

DEPTH2 = {  # feature set -> (residual mse, tol)
    ("f2",): (0.70833, 5e-5),
    ("f1",): (0.60, 5e-3),
    # printed value is arithmetic on 3-decimal leaf MSEs; exact tree gives 67/192
    ("f1", "f2"): (0.348875, 1e-4),
}


def worked_example_checks() -> list[Check]:
    ds = eight_day()
    y = ds["y"]
    checks = []
    sigma2 = fit_self(y, 1).total_mse
    checks.append(Check("total variance", sigma2, 3.171875, 1e-9))
    for feat, (thr, mse, tol, gain) in DEPTH1.items():
        x = y if feat == "y" else ds[feat]
        cand = best_split_for_feature(x, y)
        checks.append(Check(f"depth-1 threshold on {feat}", cand.threshold, thr, 0.0))
        checks.append(Check(f"depth-1 weighted mse on {feat}", cand.weighted_children_mse, mse, tol))
        checks.append(Check(f"depth-1 info gain % on {feat}",
                            100 * cand.mse_drop / sigma2, gain, 0.01))
    for feats, (resid, tol) in DEPTH2.items():
        tree = fit(ds, "y", list(feats), 2)
        checks.append(Check(f"depth-2 residual on {'+'.join(feats)}", tree.residual_mse, resid, tol))
    prof = decompose(y, 2)
    checks.append(Check("1-bit lepto-variance", prof.row(1).lepto, 0.921875, 1e-9))
    checks.append(Check("1-bit macro-variance", prof.row(1).macro, 2.25, 1e-9))
    checks.append(Check("2-bit lepto-variance", prof.row(2).lepto, 0.125, 1e-9))
    checks.append(Check("2-bit macro-variance", prof.row(2).macro, 3.046875, 1e-9))

    greedy = fit_self(FOUR_POINT, 2)
    checks.append(Check("four-point greedy residual", greedy.residual_mse, 0.125, 1e-9))
    checks.append(Check("four-point greedy avg leaf depth", greedy.average_leaf_depth, 1.75, 0.0))
    checks.append(Check("four-point optimal residual",
                        optimal_tree_brute(FOUR_POINT, 2).residual_mse, 0.0, 1e-9))
    return checks


# printed figures for five years of daily returns; available only with the user's data
PANEL_STATS = {  # (column, stat) -> printed value
    ("IBM", "mean"): 0.004972,
    ("IBM", "std"): 1.563978,
    ("MEx", "std"): 1.201973,
    ("SMB", "std"): 0.588960,
    ("HML", "std"): 0.666216,
}
PANEL_CORR = {("MEx", "IBM"): 0.734029, ("SMB", "IBM"): 0.045696, ("HML", "IBM"): 0.147349}
PANEL_DEPTH1 = {  # feature set -> (residual, share of 1-bit macro-variance)
    ("MEx", "SMB", "HML"): (1.937, 0.51),
    ("SMB", "HML"): (2.389, 0.055),
    ("SMB",): (2.413, 0.0312),
}
PANEL_DEPTH2 = {
    ("MEx", "SMB", "HML"): (1.466, 0.5286),
    ("SMB", "HML"): (2.325, 0.0643),
    ("SMB",): (2.380, 0.0346),
}


def panel_checks(ds: Dataset, target: str = "IBM", tol: float = 0.01) -> list[Check]:
    """Compare a user-supplied factor/stock panel with the printed daily-return analysis."""
    checks = []
    stats = describe(ds)
    for (col, stat), v in PANEL_STATS.items():
        checks.append(Check(f"{col} {stat}", getattr(stats[col], stat), v, 1e-6))
    corr = correlations(ds)
    for (a, b), v in PANEL_CORR.items():
        checks.append(Check(f"corr({a}, {b})", corr[ds.names.index(a), ds.names.index(b)], v, 1e-6))

    y = ds[target]
    prof = decompose(y, 2, name=target)
    root = fit_self(y, 1, name=target).root
    checks += [
        Check("total variance", prof.total_variance, 2.444, tol),
        Check("1-bit self-split threshold", root.split.threshold, -0.365, tol),
        Check("1-bit lepto-variance", prof.row(1).lepto, 1.449, tol),
        Check("1-bit macro-variance", prof.row(1).macro, 0.995, tol),
        Check("2-bit lepto-variance", prof.row(2).lepto, 0.594, tol),
        Check("2-bit macro-variance", prof.row(2).macro, 1.85, tol),
        Check("2-bit macro share of total", prof.row(2).macro_fraction, 0.757, tol),
    ]
    for k, table in ((1, PANEL_DEPTH1), (2, PANEL_DEPTH2)):
        results = feature_set_analysis(ds, target, [list(fs) for fs in table], k)
        for res, (resid, share) in zip(results, table.values()):
            checks.append(Check(f"depth-{k} residual on {res.label}", res.residual_mse, resid, tol))
            checks.append(Check(f"depth-{k} macro share of {res.label}",
                                res.macro_fraction_explained, share, tol))
    return checks
