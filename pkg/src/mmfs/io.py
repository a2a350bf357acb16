"""Plain CSV/JSON writers for selections, reports, traces and matrices.

Floats are written with ``repr`` so repeated runs produce identical bytes.
"""

import csv
import json
from pathlib import Path

import numpy as np


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def selection_to_dict(result, feature_names):
    return {
        "variant": result.variant,
        "s": int(result.s),
        "selected": [int(i) for i in result.selected],
        "scores": [float(v) for v in result.scores],
        "feature_names": [feature_names[int(i)] for i in result.selected],
    }


def write_selection_json(result, feature_names, path):
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(selection_to_dict(result, feature_names), fh, indent=2)
        fh.write("\n")


def read_selection_json(path):
    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)


def write_selection_csv(result, feature_names, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["rank", "feature_name"])
        for rank, i in enumerate(result.selected, start=1):
            w.writerow([rank, feature_names[int(i)]])


def write_trace_csv(state, path):
    """Per-iteration objective and relative change in W."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["iteration", "objective", "delta_w"])
        deltas = state.delta_trace or (float("nan"),) * len(state.objective_trace)
        for it, (obj, dw) in enumerate(zip(state.objective_trace, deltas), start=1):
            w.writerow([it, repr(float(obj)), repr(float(dw))])


def write_matrix_triplets(M, path):
    """Nonzero entries of ``M`` as (row, col, value) lines."""
    M = np.asarray(M)
    rows, cols = np.nonzero(M)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["row", "col", "value"])
        for i, j in zip(rows, cols):
            w.writerow([int(i), int(j), repr(float(M[i, j]))])


def write_report_csv(report, path):
    """One row per feature count; values in percent, two decimals."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# variant={report.variant} repeats={report.repeats} std=population\n")
        w = _writer(fh)
        w.writerow(["feature_count", "acc_mean", "acc_std", "nmi_mean", "nmi_std"])
        for row in zip(report.feature_counts, report.acc_mean, report.acc_std,
                       report.nmi_mean, report.nmi_std):
            w.writerow([row[0]] + [f"{v:.2f}" for v in row[1:]])


def read_report_csv(path):
    with Path(path).open(encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def write_grid_csv(rows, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["lambda", "n", "acc_mean", "nmi_mean"])
        for lam, n, acc, nm in rows:
            w.writerow([repr(float(lam)), int(n), f"{acc:.2f}", f"{nm:.2f}"])


def write_projection_csv(Z, labels, path):
    """Rows of the projected data X^T W with instance id and label."""
    Z = np.asarray(Z)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["instance", "label"] + [f"z{j}" for j in range(Z.shape[1])])
        for i in range(Z.shape[0]):
            lab = "" if labels is None else labels[i]
            w.writerow([i, lab] + [repr(float(v)) for v in Z[i]])
