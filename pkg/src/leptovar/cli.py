"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
``--input`` accepts a CSV path or one of the bundled datasets ``@example``
(the default) and ``@panel``. ``LEPTOVAR_THREADS`` caps the worker threads
used to scan features and feature sets (default 1).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources

from . import report
from .dataset import DataError, Dataset, correlations, describe, load_csv
from .embedded import synthetic_panel_path, eight_day, write_example_csv
from .lepto import decompose, feature_set_analysis
from .reproduce import panel_checks, worked_example_checks
from .tree import fit
from . import verify as verify_mod

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("leptovar")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _workers() -> int:
    raw = os.environ.get("LEPTOVAR_THREADS")
    if not raw:
        return 1
    try:
        return max(int(raw), 1)
    except ValueError:
        raise UsageError(f"LEPTOVAR_THREADS must be an integer, got {raw!r}") from None


def _names(text: str | None) -> list[str]:
    if not text:
        return []
    return [s.strip() for s in text.split(",") if s.strip()]


def _load_source(src: str, delimiter: str = ",", has_header: bool = True,
                 index_column: str | None = None) -> Dataset:
    if src == "@example":
        return eight_day()
    if src == "@panel":
        with resources.as_file(synthetic_panel_path()) as path:
            return load_csv(path, index_column="date")
    return load_csv(src, delimiter=delimiter, has_header=has_header,
                    index_column=index_column or None)


def _load(args) -> Dataset:
    return _load_source(args.input, args.delimiter, not args.no_header, args.index_column)


def _check_format(args, allowed):
    if args.format not in allowed:
        raise UsageError(f"--format {args.format} is not available for {args.command} "
                         f"(choose from {', '.join(allowed)})")


def _check_depth(depth: int, minimum: int = 1):
    if depth < minimum:
        raise UsageError(f"depth must be ≥ {minimum}")


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_describe(args) -> int:
    _check_format(args, ("text", "json"))
    ds = _load(args)
    stats = describe(ds)
    corr = correlations(ds) if ds.n_rows > 1 else None
    if args.format == "json":
        doc = {"stats": {k: vars(v) for k, v in stats.items()},
               "correlations": None if corr is None else corr.tolist(), "columns": list(ds.names)}
        _emit(args, json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    rows = ["count", "mean", "std", "min", "q25", "median", "q75", "max"]
    labels = {"q25": "25%", "median": "50%", "q75": "75%"}
    w = max(12, *(len(n) + 2 for n in ds.names))
    lines = [" " * 8 + "".join(f"{n:>{w}}" for n in ds.names)]
    for r in rows:
        lines.append(f"{labels.get(r, r):<8}" + "".join(f"{getattr(stats[n], r):>{w}.6f}" for n in ds.names))
    if corr is not None:
        lines += ["", "correlations", " " * 8 + "".join(f"{n:>{w}}" for n in ds.names)]
        for i, n in enumerate(ds.names):
            lines.append(f"{n:<8}" + "".join(f"{v:>{w}.6f}" for v in corr[i]))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fit(args) -> int:
    _check_format(args, ("text", "json", "dot"))
    _check_depth(args.depth)
    if args.min_leaf < 1:
        raise UsageError("min-leaf must be ≥ 1")
    ds = _load(args)
    tree = fit(ds, args.target, _names(args.features), args.depth,
               min_leaf=args.min_leaf, workers=_workers())
    render = {"text": report.tree_to_text, "json": report.tree_to_json, "dot": report.tree_to_dot}
    _emit(args, render[args.format](tree))
    return EXIT_OK


def cmd_lepto(args) -> int:
    _check_format(args, ("text", "json"))
    _check_depth(args.depth)
    ds = _load(args)
    if args.target not in ds:
        raise DataError(f"unknown column {args.target!r}")
    prof = decompose(ds[args.target], args.depth, name=args.target)
    out = report.analysis_to_json(prof) if args.format == "json" else report.analysis_to_text(prof)
    _emit(args, out)
    return EXIT_OK


def cmd_rank(args) -> int:
    _check_format(args, ("text", "json"))
    _check_depth(args.depth)
    sets = [_names(s) for s in (args.sets or "").split(";") if _names(s)]
    if not sets:
        raise UsageError("--sets needs at least one feature set, e.g. 'f1;f2;f1,f2'")
    ds = _load(args)
    results = feature_set_analysis(ds, args.target, sets, args.depth,
                                   min_leaf=args.min_leaf, workers=_workers())
    results.sort(key=lambda r: -r.macro_fraction_explained)
    prof = decompose(ds[args.target], args.depth, name=args.target)
    if args.format == "json":
        _emit(args, report.analysis_to_json(prof, results))
    else:
        _emit(args, report.analysis_to_text(prof, results))
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_format(args, ("text", "json"))
    if args.trials < 0:
        raise UsageError("--trials must be ≥ 0")
    if args.conjecture and not (1 <= args.depth <= 3 and 2 <= args.n <= 16):
        raise UsageError("conjecture trials need 1 ≤ depth ≤ 3 and 2 ≤ n ≤ 16")
    suites = verify_mod.run(args.trials, args.seed, with_conjecture=args.conjecture,
                            n_max=args.n, depth=args.depth, low=args.low, high=args.high)
    ok = all(s.ok for s in suites)
    if args.format == "json":
        doc = {"seed": args.seed, "trials": args.trials, "ok": ok,
               "suites": [s.to_dict() for s in suites]}
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        lines = []
        for s in suites:
            mark = "PASS" if s.ok else "FAIL"
            extra = ""
            if "counterexamples" in s.notes:
                extra = f", counterexamples {s.notes['counterexamples']}"
            elif "greedy_suboptimal" in s.notes:
                extra = f", greedy strictly suboptimal {s.notes['greedy_suboptimal']}"
            lines.append(f"{mark} {s.name}: {s.trials} trials, {s.failures} failures{extra}")
            if s.counterexample is not None:
                lines.append(f"     counterexample: {json.dumps(s.counterexample)}")
        lines.append(f"{'all checks passed' if ok else 'verification FAILED'} (seed {args.seed})")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_paper_demo(args) -> int:
    _check_format(args, ("text", "json"))
    if args.emit_csv:
        write_example_csv(args.emit_csv)
    checks = worked_example_checks()
    panel = []
    if args.panel:
        ds = _load_source(args.panel, args.delimiter, True, args.index_column)
        panel = panel_checks(ds, target=args.target)
    ok = all(c.ok for c in checks + panel)

    if args.format == "json":
        doc = {"ok": ok, "worked_example": [c.to_dict() for c in checks],
               "panel": [c.to_dict() for c in panel]}
        _emit(args, json.dumps(doc, indent=2) + "\n")
        return EXIT_OK if ok else EXIT_VERIFY

    by = {c.name: c for c in checks}
    lines = ["eight-day example", ""]
    for feat in ("t", "f1", "f2", "y"):
        thr = by[f"depth-1 threshold on {feat}"].value
        mse = by[f"depth-1 weighted mse on {feat}"].value
        gain = by[f"depth-1 info gain % on {feat}"].value
        lines.append(f"split on {feat:<2} < {thr:<4g}  weighted mse {mse:.6f}  info gain {gain:.2f}%")
    greedy = by["four-point greedy residual"].value
    optimal = by["four-point optimal residual"].value
    depth = by["four-point greedy avg leaf depth"].value
    lines += ["", f"sample {{0, -2, 4, 1}} at depth 2: greedy {greedy:.3f} / optimal {optimal:.3f} "
                  f"(greedy average leaf depth {depth:.2f})", "", "checks"]
    lines += [c.line() for c in checks]
    if panel:
        lines += ["", f"panel {args.panel}"] + [c.line() for c in panel]
    lines.append("")
    lines.append("all values reproduced" if ok else "MISMATCH against printed values")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="leptovar", description="Lepto-variance and macro-variance via regression trees.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_opts(sp, fmt_default="text"):
        sp.add_argument("--input", default="@example",
                        help="CSV path, or @example / @panel for bundled data (default @example)")
        sp.add_argument("--delimiter", default=",")
        sp.add_argument("--no-header", action="store_true")
        sp.add_argument("--index-column", default=None, help="name of a date/index column to skip")
        sp.add_argument("--format", default=fmt_default)
        sp.add_argument("--out", default=None, help="write output here instead of stdout")

    sp = sub.add_parser("describe", help="descriptive statistics and correlations")
    data_opts(sp)
    sp.set_defaults(func=cmd_describe)

    sp = sub.add_parser("fit", help="fit one regression tree")
    data_opts(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("--features", default="", help="comma-separated feature names")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--min-leaf", type=int, default=1)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("lepto", help="lepto/macro-variance profile of a column")
    data_opts(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.set_defaults(func=cmd_lepto)

    sp = sub.add_parser("rank", help="rank feature sets by share of macro-variance explained")
    data_opts(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("--sets", required=True, help="feature sets separated by ';', names by ','")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--min-leaf", type=int, default=1)
    sp.set_defaults(func=cmd_rank)

    sp = sub.add_parser("verify", help="randomized checks against brute-force oracles")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--conjecture", action="store_true",
                    help="also test the average-depth conjecture on integer samples")
    sp.add_argument("--n", type=int, default=8, help="largest sample size for conjecture trials")
    sp.add_argument("--depth", type=int, default=2, help="tree depth for conjecture trials")
    sp.add_argument("--low", type=int, default=-2)
    sp.add_argument("--high", type=int, default=4)
    sp.add_argument("--format", default="text")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("paper-demo", help="recompute the worked example (and optionally a real panel)")
    sp.add_argument("--format", default="text")
    sp.add_argument("--out", default=None)
    sp.add_argument("--emit-csv", default=None, metavar="PATH", help="also write the eight-day table")
    sp.add_argument("--panel", default=None, metavar="PATH",
                    help="CSV with MEx, SMB, HML and the stock column (@panel: bundled synthetic data)")
    sp.add_argument("--target", default="IBM")
    sp.add_argument("--index-column", default="date", help="date column to skip (empty for none)")
    sp.add_argument("--delimiter", default=",")
    sp.set_defaults(func=cmd_paper_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _workers()  # reject a malformed LEPTOVAR_THREADS for every subcommand
        return args.func(args)
    except UsageError as exc:
        print(f"leptovar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"leptovar: {msg}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
