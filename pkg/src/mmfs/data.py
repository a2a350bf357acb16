"""Dataset containers, CSV ingestion and optional preprocessing."""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when an input dataset is malformed."""


@dataclass(frozen=True)
class DataMatrix:
    """Feature-major data matrix: ``values`` has shape (d, N), one column per instance."""

    values: np.ndarray
    feature_names: tuple = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DataError(f"data matrix must be 2-D, got shape {values.shape}")
        d, N = values.shape
        if d < 1:
            raise DataError("need at least one feature")
        if N < 2:
            raise DataError(f"need at least two instances, got {N}")
        if not np.all(np.isfinite(values)):
            raise DataError("data matrix contains non-finite entries")
        names = tuple(self.feature_names) or tuple(f"f{i}" for i in range(d))
        if len(names) != d:
            raise DataError(f"expected {d} feature names, got {len(names)}")
        if len(set(names)) != d:
            raise DataError("feature names must be unique")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", tuple(str(n) for n in names))

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_instances(cls, rows, feature_names=()):
        """Build from an instances-by-features array (the usual ML layout)."""
        return cls(np.asarray(rows, dtype=float).T, feature_names)

    def instances(self) -> np.ndarray:
        """Instances-by-features view (N x d)."""
        return self.values.T

    def subset(self, features: Sequence[int]) -> "DataMatrix":
        idx = list(features)
        return DataMatrix(self.values[idx], [self.feature_names[i] for i in idx])

    def __eq__(self, other):
        if not isinstance(other, DataMatrix):
            return NotImplemented
        return self.feature_names == other.feature_names and np.array_equal(
            self.values, other.values
        )

    __hash__ = None


@dataclass(frozen=True)
class LabeledDataset:
    data: DataMatrix
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.data.N:
                raise DataError(
                    f"got {len(labels)} labels for {self.data.N} instances"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def class_count(self) -> Optional[int]:
        if self.labels is None:
            return None
        return len(set(self.labels))

    def label_codes(self) -> np.ndarray:
        """Labels mapped to 0..c-1 in order of first sorted appearance."""
        if self.labels is None:
            raise DataError("dataset has no labels")
        _, codes = np.unique(np.asarray(self.labels, dtype=object).astype(str), return_inverse=True)
        return codes.astype(np.int64)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column=None, orientation="rows-are-instances") -> LabeledDataset:
    """Read a numeric CSV file.

    A header row is assumed when any non-label cell of the first row fails to
    parse as a number. Without a header, ``label_column`` may be given as an
    integer column index. With ``orientation="rows-are-features"`` each row is
    a feature and each column an instance; labels are then unsupported.
    """
    if orientation not in ("rows-are-instances", "rows-are-features"):
        raise DataError(f"unknown orientation {orientation!r}")
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path} is empty")

    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DataError(
                f"{path}:{lineno}: expected {width} columns, found {len(row)}"
            )

    first = [c.strip() for c in rows[0]]
    label_idx = None
    if label_column is not None and not isinstance(label_column, int):
        if label_column in first:
            label_idx = first.index(label_column)
    elif isinstance(label_column, int):
        label_idx = label_column

    header = any(not _is_number(c) for i, c in enumerate(first) if i != label_idx)
    if header:
        names = first
        body = rows[1:]
        start_line = 2
        if label_column is not None and label_idx is None:
            raise DataError(f"label column {label_column!r} not found in header")
    else:
        names = None
        body = rows
        start_line = 1
        if label_column is not None and label_idx is None:
            raise DataError(
                f"label column {label_column!r} given but the file has no header"
            )
    if label_idx is not None and not 0 <= label_idx < width:
        raise DataError(f"label column index {label_idx} out of range")

    feat_cols = [i for i in range(width) if i != label_idx]
    if not feat_cols:
        raise DataError("no feature columns")
    values = np.empty((len(body), len(feat_cols)))
    labels = []
    for r, row in enumerate(body):
        for out_c, c in enumerate(feat_cols):
            cell = row[c].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}:{start_line + r}: non-numeric cell {cell!r} in column {c + 1}"
                ) from None
            if not math.isfinite(v):
                raise DataError(
                    f"{path}:{start_line + r}: non-finite value {cell!r} in column {c + 1}"
                )
            values[r, out_c] = v
        if label_idx is not None:
            labels.append(row[label_idx].strip())

    if orientation == "rows-are-features":
        if label_idx is not None:
            raise DataError("label column is not supported with rows-are-features")
        matrix = values
        feat_names = [f"f{i}" for i in range(matrix.shape[0])]
    else:
        matrix = values.T
        feat_names = (
            [names[c] for c in feat_cols] if names else [f"f{i}" for i in range(len(feat_cols))]
        )
    if matrix.shape[1] < 2:
        raise DataError(f"need at least two instances, got {matrix.shape[1]}")
    return LabeledDataset(DataMatrix(matrix, feat_names), labels if label_idx is not None else None)


def save_csv(dataset: LabeledDataset, path, label_name="label"):
    """Write ``dataset`` as rows-are-instances CSV with a header row."""
    X = dataset.data
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        head = list(X.feature_names)
        if dataset.labels is not None:
            head.append(label_name)
        w.writerow(head)
        for j in range(X.N):
            row = [repr(float(v)) for v in X.values[:, j]]
            if dataset.labels is not None:
                row.append(str(dataset.labels[j]))
            w.writerow(row)


def standardize(X: DataMatrix, mode="none") -> DataMatrix:
    if mode == "none":
        return X
    if mode != "zscore":
        raise ValueError(f"unknown standardize mode {mode!r}")
    v = X.values
    mean = v.mean(axis=1, keepdims=True)
    std = v.std(axis=1, keepdims=True)
    std[std < 1e-12] = 1.0
    return DataMatrix((v - mean) / std, X.feature_names)
