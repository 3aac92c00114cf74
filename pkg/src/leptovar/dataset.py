"""Numeric panels: CSV ingestion, validation, descriptive statistics.

A :class:`Dataset` is an immutable, ordered collection of equally long
float64 columns. Missing values are rejected rather than imputed, and a
date/index column is only skipped when named explicitly.

Note the two variance conventions in this package: :func:`describe` reports
the sample standard deviation (n - 1 denominator, as statistics packages
print it) while every tree computation uses the population variance
(n denominator).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when input data cannot be turned into a valid :class:`Dataset`."""


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Dataset:
    names: tuple[str, ...]
    columns: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.names) != len(self.columns):
            raise DataError("names and columns differ in length")
        seen = set()
        for name in self.names:
            if not isinstance(name, str) or not name.strip():
                raise DataError("column names must be non-empty")
            if name in seen:
                raise DataError(f"duplicate column name {name!r}")
            seen.add(name)
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise DataError(f"columns have unequal lengths {sorted(lengths)}")
        for name, col in zip(self.names, self.columns):
            if not np.all(np.isfinite(col)):
                raise DataError(f"column {name!r} contains non-finite values")

    @classmethod
    def from_columns(cls, data: Mapping[str, Iterable[float]]) -> "Dataset":
        names = tuple(data)
        cols = tuple(_frozen(np.array(list(data[n]), dtype=np.float64)) for n in names)
        return cls(names, cols)

    @property
    def n_rows(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[self.names.index(name)]
        except ValueError:
            raise KeyError(f"unknown column {name!r}") from None

    def to_dict(self) -> dict[str, list[float]]:
        return {n: c.tolist() for n, c in zip(self.names, self.columns)}


@dataclass(frozen=True)
class ColumnStats:
    count: int
    mean: float
    std: float
    min: float
    q25: float
    median: float
    q75: float
    max: float


def load_csv(path, delimiter: str = ",", has_header: bool = True,
             index_column: str | None = None) -> Dataset:
    """Read a delimited numeric file into a :class:`Dataset`.

    Errors name the offending 1-based data row and column. Without a header
    row, columns are named ``c0, c1, ...``.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise DataError(f"file not found: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r]
    if not rows:
        raise DataError("empty file")

    if has_header:
        header, body = [h.strip() for h in rows[0]], rows[1:]
    else:
        header, body = [f"c{i}" for i in range(len(rows[0]))], rows
    if index_column is not None and index_column not in header:
        raise DataError(f"index column {index_column!r} not in header")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"duplicate column names: {', '.join(dupes)}")
    if not body:
        raise DataError("empty dataset")

    keep = [i for i, h in enumerate(header) if h != index_column]
    values = np.empty((len(body), len(keep)), dtype=np.float64)
    for r, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise DataError(f"ragged row {r}: expected {len(header)} fields, got {len(row)}")
        for j, i in enumerate(keep):
            cell = row[i].strip()
            try:
                v = float(cell)
            except ValueError:
                v = math.nan
            if not math.isfinite(v):
                raise DataError(f"non-numeric value {cell!r} at ({r}, {header[i]})")
            values[r - 1, j] = v
    names = tuple(header[i] for i in keep)
    cols = tuple(_frozen(values[:, j].copy()) for j in range(len(keep)))
    return Dataset(names, cols)


def write_csv(ds: Dataset, path, delimiter: str = ",") -> None:
    """Write ``ds`` with 17 significant digits so :func:`load_csv` round-trips exactly."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(ds.names)
        for i in range(ds.n_rows):
            w.writerow(["%.17g" % c[i] for c in ds.columns])


def describe(ds: Dataset) -> dict[str, ColumnStats]:
    out = {}
    for name, col in zip(ds.names, ds.columns):
        if len(col) == 0:
            raise DataError(f"column {name!r} is empty")
        q25, q50, q75 = np.percentile(col, [25, 50, 75])
        std = float(np.std(col, ddof=1)) if len(col) > 1 else 0.0
        out[name] = ColumnStats(
            count=len(col), mean=math.fsum(col.tolist()) / len(col), std=std,
            min=float(col.min()), q25=float(q25), median=float(q50),
            q75=float(q75), max=float(col.max()),
        )
    return out


def correlations(ds: Dataset) -> np.ndarray:
    """Pearson correlation matrix, exactly symmetric with a unit diagonal."""
    for name, col in zip(ds.names, ds.columns):
        if len(col) < 2 or np.all(col == col[0]):
            raise DataError(f"column {name!r} has zero variance")
    corr = np.corrcoef(np.vstack(ds.columns))
    corr = np.clip((corr + corr.T) / 2, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def select(ds: Dataset, target: str, features: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """Return read-only ``(y, X)`` with ``X`` of shape ``(n_rows, len(features))``."""
    for name in [target, *features]:
        if name not in ds:
            raise DataError(f"unknown column {name!r}")
    if target in features:
        raise DataError(f"target {target!r} listed among features")
    y = ds[target]
    if features:
        X = np.column_stack([ds[f] for f in features])
    else:
        X = np.empty((ds.n_rows, 0))
    return y, _frozen(X)
