"""Text, JSON and DOT renderings of trees and variance decompositions."""

from __future__ import annotations

import json
import math
from typing import Sequence

from .lepto import DecompositionProfile, FeatureSetResult
from .tree import Tree

EXPORT_FIELDS = ("id", "depth", "n_samples", "sample_fraction", "mean", "mse",
                 "split_feature", "threshold", "left_id", "right_id")


def tree_export(tree: Tree) -> list[dict]:
    """Flat node records in id (pre-order) order."""
    out = []
    for nd in tree.nodes():
        rec = {
            "id": nd.id,
            "depth": nd.depth,
            "n_samples": nd.n_samples,
            "sample_fraction": nd.n_samples / tree.n_samples,
            "mean": nd.mean,
            "mse": nd.mse,
            "split_feature": None,
            "threshold": None,
            "left_id": None,
            "right_id": None,
        }
        if not nd.is_leaf:
            rec.update(split_feature=tree.feature_names[nd.split.feature_index],
                       threshold=nd.split.threshold,
                       left_id=nd.left.id, right_id=nd.right.id)
        out.append(rec)
    return out


def _num(v) -> str:
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"cannot serialise {v!r}")
        s = "%.17g" % v
        # keep the JSON type a number that parses back to float
        return s if any(ch in s for ch in ".e") else s + ".0"
    return json.dumps(v)


def _obj(pairs) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {v}" for k, v in pairs) + "}"


def tree_to_json(tree: Tree) -> str:
    nodes = [_obj((k, _num(rec[k])) for k in EXPORT_FIELDS) for rec in tree_export(tree)]
    header = [
        ("target", json.dumps(tree.target_name)),
        ("features", json.dumps(list(tree.feature_names))),
        ("max_depth", _num(tree.max_depth)),
        ("min_leaf", _num(tree.min_leaf)),
        ("n_samples", _num(tree.n_samples)),
        ("total_mse", _num(tree.total_mse)),
        ("residual_mse", _num(tree.residual_mse)),
        ("average_leaf_depth", _num(float(tree.average_leaf_depth))),
    ]
    body = ",\n".join(f"  {json.dumps(k)}: {v}" for k, v in header)
    return "{\n" + body + ',\n  "nodes": [\n' + ",\n".join("    " + n for n in nodes) + "\n  ]\n}\n"


def tree_to_dot(tree: Tree, digits: int = 4) -> str:
    lines = ["digraph Tree {", "node [shape=box, fontname=\"helvetica\"];",
             "edge [fontname=\"helvetica\"];"]
    for nd in tree.nodes():
        label = []
        if not nd.is_leaf:
            label.append(f"{tree.feature_names[nd.split.feature_index]} < {nd.split.threshold:.6g}")
        label += [f"#{nd.id}", f"n = {nd.n_samples}",
                  f"mse = {nd.mse:.{digits}g}", f"mean = {nd.mean:.{digits}g}"]
        text = "\\n".join(label).replace('"', '\\"')
        lines.append(f'{nd.id} [label="{text}"];')
    for nd in tree.nodes():
        if not nd.is_leaf:
            lines.append(f'{nd.id} -> {nd.left.id} [label="true"];')
            lines.append(f'{nd.id} -> {nd.right.id} [label="false"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_text(tree: Tree) -> str:
    out = [f"target {tree.target_name} on {', '.join(tree.feature_names) or '(none)'}, "
           f"max depth {tree.max_depth}, n = {tree.n_samples}"]
    for nd in tree.nodes():
        pad = "  " * nd.depth
        stats = f"n={nd.n_samples} mean={nd.mean:.6g} mse={nd.mse:.6g}"
        if nd.is_leaf:
            out.append(f"{pad}#{nd.id} leaf {stats}")
        else:
            feat = tree.feature_names[nd.split.feature_index]
            out.append(f"{pad}#{nd.id} {feat} < {nd.split.threshold:.6g}  {stats}")
    drop = 1 - tree.residual_mse / tree.total_mse if tree.total_mse > 0 else 0.0
    out.append(f"total mse     {tree.total_mse:.6f}")
    out.append(f"residual mse  {tree.residual_mse:.6f}")
    out.append(f"info gain     {100 * drop:.2f}%")
    out.append(f"avg leaf depth {tree.average_leaf_depth:.4f}")
    return "\n".join(out) + "\n"


def analysis_to_text(profile: DecompositionProfile,
                     results: Sequence[FeatureSetResult] = ()) -> str:
    """Plain-text table: the decomposition profile, then one line per feature set."""
    s2 = profile.total_variance
    out = [f"target {profile.target_name}: n = {profile.n_samples}, total variance {s2:.6f}",
           "",
           f"{'k':>3} {'lepto':>12} {'macro':>12} {'macro %':>9} {'avg depth':>10}"]
    for r in profile.rows:
        out.append(f"{r.k:>3} {r.lepto:>12.6f} {r.macro:>12.6f} "
                   f"{100 * r.macro_fraction:>8.2f}% {r.average_leaf_depth:>10.4f}")
    if results:
        out += ["", f"{'features':<24} {'k':>3} {'residual':>10} {'explained':>10} {'% of macro':>11}"]
        for res in results:
            flag = "  (exceeds macro-variance)" if res.anomaly else ""
            out.append(f"{res.label:<24} {res.k:>3} {res.residual_mse:>10.4f} "
                       f"{res.explained:>10.4f} {100 * res.macro_fraction_explained:>10.2f}%{flag}")
    return "\n".join(out) + "\n"


def analysis_to_json(profile: DecompositionProfile,
                     results: Sequence[FeatureSetResult] = ()) -> str:
    doc = {
        "target": profile.target_name,
        "n_samples": profile.n_samples,
        "total_variance": profile.total_variance,
        "profile": [vars(r) for r in profile.rows],
        "feature_sets": [
            {"features": list(r.feature_names), "k": r.k, "residual_mse": r.residual_mse,
             "explained": r.explained, "macro_variance": r.macro_variance,
             "macro_fraction_explained": r.macro_fraction_explained, "anomaly": r.anomaly}
            for r in results
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
