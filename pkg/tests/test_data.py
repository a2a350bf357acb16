import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mmfs.data import DataError, DataMatrix, LabeledDataset, load_csv, save_csv, standardize


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_plain_numeric_file(tmp_path):
    ds = load_csv(write(tmp_path, "1,2\n3,4\n5,6\n"))
    assert (ds.data.d, ds.data.N) == (2, 3)
    assert ds.data.feature_names == ("f0", "f1")
    assert ds.labels is None
    np.testing.assert_array_equal(ds.data.values, [[1, 3, 5], [2, 4, 6]])


def test_header_and_label_column(tmp_path):
    ds = load_csv(write(tmp_path, "a,b,y\n1,2,x\n3,4,x\n5,6,z\n7,8,w\n"), label_column="y")
    assert (ds.data.d, ds.data.N) == (2, 4)
    assert ds.data.feature_names == ("a", "b")
    assert ds.labels == ("x", "x", "z", "w")
    assert ds.class_count == 3


def test_numeric_label_column_does_not_force_header(tmp_path):
    ds = load_csv(write(tmp_path, "1,2,0\n3,4,1\n"), label_column=2)
    assert ds.data.d == 2 and ds.labels == ("0", "1")


def test_scientific_notation(tmp_path):
    ds = load_csv(write(tmp_path, "1e-3,2.5E2\n-4,0\n"))
    assert ds.data.values[0, 0] == pytest.approx(1e-3)
    assert ds.data.values[1, 0] == 250.0


def test_rows_are_features(tmp_path):
    ds = load_csv(write(tmp_path, "1,2,3\n4,5,6\n"), orientation="rows-are-features")
    assert (ds.data.d, ds.data.N) == (2, 3)


def test_nan_cell_reported(tmp_path):
    with pytest.raises(DataError, match=r"d\.csv:2.*column 2"):
        load_csv(write(tmp_path, "1,2\n3,NaN\n"))


def test_non_numeric_cell_reported(tmp_path):
    with pytest.raises(DataError, match=r":3: non-numeric cell 'oops' in column 1"):
        load_csv(write(tmp_path, "a,b\n1,2\noops,4\n"))


@pytest.mark.parametrize(
    "text,kw,match",
    [
        ("1,2\n3\n", {}, "expected 2 columns"),
        ("a,b\n1,2\n3,4\n", {"label_column": "y"}, "not found"),
        ("1,2\n", {}, "at least two instances"),
    ],
)
def test_bad_files(tmp_path, text, kw, match):
    with pytest.raises(DataError, match=match):
        load_csv(write(tmp_path, text), **kw)


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "nope.csv")


def test_matrix_invariants():
    with pytest.raises(DataError):
        DataMatrix(np.ones((2, 1)))
    with pytest.raises(DataError):
        DataMatrix(np.array([[1.0, np.inf]]))
    with pytest.raises(DataError, match="unique"):
        DataMatrix(np.ones((2, 3)), ["a", "a"])
    with pytest.raises(DataError):
        LabeledDataset(DataMatrix(np.ones((2, 3))), [0, 1])


@given(
    arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(2, 8)),
           elements=st.floats(-1e6, 1e6, allow_nan=False)),
    st.booleans(),
)
def test_csv_round_trip(tmp_path_factory, values, with_labels):
    X = DataMatrix(values, [f"col{i}" for i in range(values.shape[0])])
    labels = [f"c{i % 2}" for i in range(X.N)] if with_labels else None
    path = tmp_path_factory.mktemp("rt") / "x.csv"
    save_csv(LabeledDataset(X, labels), path)
    back = load_csv(path, label_column="label" if with_labels else None)
    assert back.data == X
    assert back.labels == (tuple(labels) if labels else None)


def test_standardize_none_is_identity():
    X = DataMatrix(np.arange(6.0).reshape(2, 3))
    assert standardize(X, "none") is X


def test_zscore_simple_row():
    Z = standardize(DataMatrix(np.array([[1.0, 2.0, 3.0], [5.0, 5.0, 5.0]])), "zscore").values
    assert Z[0].mean() == pytest.approx(0.0, abs=1e-12)
    assert Z[0].std() == pytest.approx(1.0)
    np.testing.assert_array_equal(Z[1], [0.0, 0.0, 0.0])


@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(2, 10)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_zscore_properties(values):
    Z = standardize(DataMatrix(values), "zscore").values
    assert np.all(np.abs(Z.mean(axis=1)) <= 1e-10)
    std = Z.std(axis=1)
    for s, row in zip(std, values):
        if np.ptp(row) == 0:
            assert s == 0.0
        elif row.std() < 1e-12:
            # clamped: centered but not rescaled
            assert s < 1e-12
        else:
            assert s == pytest.approx(1.0, abs=1e-9)
