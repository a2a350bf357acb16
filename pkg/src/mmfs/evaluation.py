"""Clustering-based evaluation of feature subsets (k-means, ACC, NMI)."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .data import DataMatrix, LabeledDataset
from .select import Params, select_many, selections_by_count

LAMBDA_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
N_GRID = tuple(range(5, 21))
FEATURE_COUNTS = (50, 100, 150, 200, 250, 300)
# used when d == 256 (USPS-sized data)
FEATURE_COUNTS_256 = (50, 80, 110, 140, 170, 200)
DEFAULT_REPEATS = 20
KMEANS_MAX_ITER = 300


def default_feature_counts(d):
    if d == 256:
        return list(FEATURE_COUNTS_256)
    counts = [c for c in FEATURE_COUNTS if c <= d]
    return counts or [d]


@dataclass(frozen=True)
class ClusteringRun:
    predicted: np.ndarray
    seed: int
    inertia: float
    iterations: int = 0


@dataclass(frozen=True)
class EvalReport:
    """Mean/std ACC and NMI (percent) per feature count; std is the population std."""

    feature_counts: tuple
    acc_mean: tuple
    acc_std: tuple
    nmi_mean: tuple
    nmi_std: tuple
    repeats: int
    variant: str = ""


def _codes(labels):
    _, inv = np.unique(np.asarray(labels), return_inverse=True)
    return inv.astype(np.int64).ravel()


def kmeans(points, c, seed, max_iter=KMEANS_MAX_ITER) -> ClusteringRun:
    """Lloyd's algorithm from c distinct random instances.

    Stops when the assignment no longer changes or after ``max_iter`` rounds.
    A cluster that loses all its points is re-seeded at the point currently
    farthest from its own center.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    N = pts.shape[0]
    if not isinstance(c, (int, np.integer)) or not 1 <= c <= N:
        raise ValueError(f"cluster count must be in [1, {N}], got {c!r}")
    rng = np.random.default_rng(seed)
    centers = pts[rng.choice(N, size=c, replace=False)].copy()
    labels, d2 = kernels.assign(pts, centers)

    it = 0
    for it in range(1, max_iter + 1):
        counts = np.bincount(labels, minlength=c)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, pts)
        nonempty = counts > 0
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        if not nonempty.all():
            far = d2.copy()
            for j in np.flatnonzero(~nonempty):
                p = int(np.argmax(far))
                centers[j] = pts[p]
                far[p] = -1.0
        new_labels, d2 = kernels.assign(pts, centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return ClusteringRun(labels, seed, float(d2.sum()), it)


def contingency(predicted, truth):
    a, b = _codes(predicted), _codes(truth)
    if a.shape != b.shape:
        raise ValueError(f"label length mismatch: {a.size} vs {b.size}")
    return kernels.contingency(a, b, int(a.max()) + 1, int(b.max()) + 1)


def hungarian_acc(predicted, truth) -> float:
    """Fraction of points matched under the best one-to-one cluster-to-class map."""
    if len(predicted) != len(truth):
        raise ValueError(f"label length mismatch: {len(predicted)} vs {len(truth)}")
    if len(truth) == 0:
        raise ValueError("empty label vectors")
    table = contingency(predicted, truth)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / len(truth)


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(predicted, truth, average="arithmetic") -> float:
    """Normalized mutual information (natural log)."""
    if len(predicted) != len(truth):
        raise ValueError(f"label length mismatch: {len(predicted)} vs {len(truth)}")
    table = contingency(predicted, truth).astype(np.float64)
    n = table.sum()
    row, col = table.sum(axis=1), table.sum(axis=0)
    h_pred, h_true = _entropy(row, n), _entropy(col, n)
    nz = table > 0
    mi = float((table[nz] / n * np.log(table[nz] * n / np.outer(row, col)[nz])).sum())
    # identical partitions, including both constant
    if table.shape[0] == table.shape[1] and nz.sum() == table.shape[0]:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    if average == "arithmetic":
        norm = 0.5 * (h_pred + h_true)
    elif average == "geometric":
        norm = np.sqrt(h_pred * h_true)
    else:
        raise ValueError(f"unknown average {average!r}")
    return float(min(max(mi / norm, 0.0), 1.0))


def _map(fn, items, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def evaluate_subset(X: DataMatrix, selected, truth, c, repeats=DEFAULT_REPEATS,
                    base_seed=0, jobs=1, nmi_average="arithmetic"):
    """k-means on the selected features, repeated over seeds.

    Returns ``(acc_mean, acc_std, nmi_mean, nmi_std)`` in percent.
    """
    selected = list(selected)
    if not selected:
        raise ValueError("no features selected")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    pts = np.ascontiguousarray(X.values[selected].T)
    truth = np.asarray(truth)

    def trial(seed):
        run = kmeans(pts, c, seed)
        return hungarian_acc(run.predicted, truth), nmi(run.predicted, truth, nmi_average)

    res = np.array(_map(trial, range(base_seed, base_seed + repeats), jobs)) * 100.0
    return (float(res[:, 0].mean()), float(res[:, 0].std()),
            float(res[:, 1].mean()), float(res[:, 1].std()))


def _labels_and_c(dataset: LabeledDataset):
    if dataset.labels is None:
        raise ValueError("evaluation needs a labeled dataset")
    return dataset.label_codes(), dataset.class_count


def benchmark_sweep(dataset: LabeledDataset, variant, feature_counts=None,
                    params: Params = Params(), repeats=DEFAULT_REPEATS, base_seed=0,
                    jobs=1) -> EvalReport:
    """Select once, then evaluate the subset of each requested size."""
    X = dataset.data
    truth, c = _labels_and_c(dataset)
    counts = default_feature_counts(X.d) if feature_counts is None else list(feature_counts)
    for s in counts:
        if not 1 <= s <= X.d:
            raise ValueError(f"feature count {s} outside [1, {X.d}]")
    results = selections_by_count(X, variant, counts, params)
    stats = [evaluate_subset(X, r.selected, truth, c, repeats, base_seed, jobs)
             for r in results]
    cols = list(zip(*stats))
    return EvalReport(tuple(counts), *map(tuple, cols), repeats=repeats, variant=variant)


def grid_search(dataset: LabeledDataset, variant, s, lambdas=LAMBDA_GRID, ns=N_GRID,
                params: Params = Params(), repeats=DEFAULT_REPEATS, base_seed=0, jobs=1):
    """ACC/NMI means at fixed s for every (lambda, n) pair, lambda-major order.

    Returns a list of ``(lambda, n, acc_mean, nmi_mean)`` tuples.
    """
    X = dataset.data
    truth, c = _labels_and_c(dataset)
    results = select_many(X, variant, s, ns, lambdas, params)
    rows = []
    for lam in lambdas:
        for n in ns:
            acc, _, nm, _ = evaluate_subset(X, results[(lam, n)].selected, truth, c,
                                            repeats, base_seed, jobs)
            rows.append((float(lam), int(n), acc, nm))
    return rows
