import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leptovar.dataset import DataError, Dataset, correlations, describe, load_csv, select, write_csv
from leptovar.embedded import EIGHT_DAY, synthetic_panel_path

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_example(tmp_path, t1):
    p = tmp_path / "example.csv"
    write_csv(t1, p)
    ds = load_csv(p)
    assert ds.n_rows == 8
    assert ds.names == ("t", "f1", "f2", "y")
    assert ds["y"].tolist() == EIGHT_DAY["y"]


def test_header_only_is_empty_dataset(tmp_path):
    with pytest.raises(DataError, match="empty dataset"):
        load_csv(write(tmp_path, "MEx,SMB\n"))


def test_empty_file(tmp_path):
    with pytest.raises(DataError, match="empty file"):
        load_csv(write(tmp_path, ""))


def test_non_numeric_cell_names_row_and_column(tmp_path):
    text = "MEx,SMB\n1,2\n3,4\n5,n/a\n"
    with pytest.raises(DataError, match=r"\(3, SMB\)"):
        load_csv(write(tmp_path, text))


@pytest.mark.parametrize("text,msg", [
    ("a,b\n1,2\n3\n", "ragged row 2"),
    ("a,a\n1,2\n", "duplicate column"),
    ("a,b\n1,inf\n", r"\(1, b\)"),
    ("a,b\n1,\n", r"\(1, b\)"),
])
def test_validation_errors(tmp_path, text, msg):
    with pytest.raises(DataError, match=msg):
        load_csv(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="file not found"):
        load_csv(tmp_path / "missing.csv")


def test_index_column_skipped(tmp_path):
    ds = load_csv(write(tmp_path, "date;x;y\n2020-01-02;1;2\n2020-01-03;3;4\n"),
                  delimiter=";", index_column="date")
    assert ds.names == ("x", "y")
    assert ds["y"].tolist() == [2.0, 4.0]


def test_index_column_never_inferred(tmp_path):
    with pytest.raises(DataError, match="non-numeric"):
        load_csv(write(tmp_path, "date,x\n2020-01-02,1\n"))


def test_no_header(tmp_path):
    ds = load_csv(write(tmp_path, "1,2\n3,4\n"), has_header=False)
    assert ds.names == ("c0", "c1") and ds.n_rows == 2


def test_dataset_is_read_only(t1):
    with pytest.raises(ValueError):
        t1["y"][0] = 10.0


def test_dataset_invariants():
    with pytest.raises(DataError):
        Dataset.from_columns({"a": [1.0, 2.0], "b": [1.0]})
    with pytest.raises(DataError):
        Dataset.from_columns({"": [1.0]})
    with pytest.raises(DataError):
        Dataset.from_columns({"a": [1.0, math.nan]})


def test_describe_example_y(t1):
    s = describe(t1)["y"]
    assert s.count == 8
    assert s.mean == 0.625  # (1.5 - 1 + 4 + 2 + 1 - 0.5 - 2 + 0) / 8 = 5 / 8
    # sample std: population variance 3.171875 * 8 / 7
    assert s.std == pytest.approx(math.sqrt(3.171875 * 8 / 7), rel=1e-15)
    # linear interpolation: sorted y = -2,-1,-.5,0,1,1.5,2,4, position 1.75 -> -0.625
    assert (s.min, s.q25, s.median, s.q75, s.max) == (-2.0, -0.625, 0.5, 1.625, 4.0)


def test_describe_constant():
    s = describe(Dataset.from_columns({"c": [5.0] * 4}))["c"]
    assert (s.mean, s.std, s.min, s.max) == (5.0, 0.0, 5.0, 5.0)


def test_describe_is_pure(t1):
    assert describe(t1) == describe(t1)


def test_correlations(t1):
    c = correlations(t1)
    assert np.all(np.diag(c) == 1.0)
    assert np.array_equal(c, c.T)


def test_affine_correlation_is_one():
    x = np.array([0.3, 1.2, -0.7, 2.5, 0.0])
    c = correlations(Dataset.from_columns({"a": x, "b": 2 * x + 3}))
    assert c[0, 1] == pytest.approx(1.0, abs=1e-15)


def test_zero_variance_column_named():
    with pytest.raises(DataError, match="'k'"):
        correlations(Dataset.from_columns({"a": [1.0, 2.0], "k": [3.0, 3.0]}))


def test_select(t1):
    y, X = select(t1, "y", ["f1", "f2"])
    assert y.tolist() == EIGHT_DAY["y"]
    assert X.shape == (8, 2) and X[:, 0].tolist() == EIGHT_DAY["f1"]
    with pytest.raises(ValueError):
        X[0, 0] = 1.0
    y, X = select(t1, "y", [])
    assert X.shape == (8, 0)
    with pytest.raises(DataError, match="among features"):
        select(t1, "y", ["y"])
    with pytest.raises(DataError, match="unknown column"):
        select(t1, "y", ["nope"])


def test_bundled_panel_loads():
    ds = load_csv(synthetic_panel_path(), index_column="date")
    assert ds.names == ("MEx", "SMB", "HML", "IBM")
    assert ds.n_rows == 1259


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=30))
def test_csv_round_trip_exact(tmp_path_factory, rows):
    ds = Dataset.from_columns({"a": [r[0] for r in rows], "b": [r[1] for r in rows]})
    p = tmp_path_factory.mktemp("rt") / "x.csv"
    write_csv(ds, p)
    back = load_csv(p)
    assert back.names == ds.names
    for a, b in zip(back.columns, ds.columns):
        assert np.array_equal(a, b)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(finite, finite, finite), min_size=3, max_size=30))
def test_correlation_symmetry(rows):
    cols = {k: [r[i] for r in rows] for i, k in enumerate("abc")}
    if any(len(set(v)) < 2 for v in cols.values()):
        return
    c = correlations(Dataset.from_columns(cols))
    assert np.all(np.diag(c) == 1.0)
    assert np.max(np.abs(c - c.T)) <= 1e-12
