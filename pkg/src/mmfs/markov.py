"""kNN graph, Markov transition matrices and min/max reachability templates.

All matrices are dense float64. Rows index the source instance.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .data import DataMatrix

DEFAULT_ALPHA = 1e-6
# Transition-power entries at or below this are treated as unreachable.
REACH_THRESHOLD = 1e-15


@dataclass(frozen=True)
class NeighborGraph:
    """Directed kNN graph: ``neighbors[i]`` lists the k nearest others of i."""

    neighbors: np.ndarray
    k: int

    def mask(self) -> np.ndarray:
        N = self.neighbors.shape[0]
        m = np.zeros((N, N), dtype=bool)
        m[np.arange(N)[:, None], self.neighbors] = True
        return m


@dataclass(frozen=True)
class TransitionMatrix:
    values: np.ndarray
    alpha: float


@dataclass(frozen=True)
class ReachabilityMatrix:
    values: np.ndarray
    variant: str
    horizon: int
    warnings: tuple = field(default=())


def pairwise_distances(X: DataMatrix) -> np.ndarray:
    """Euclidean distance between every pair of instances (columns of X)."""
    pts = np.ascontiguousarray(X.values.T, dtype=np.float64)
    return kernels.pairwise_distances(pts)


def knn_mask(D, k: int) -> NeighborGraph:
    """k nearest other instances per row, ascending distance, ties by lower index."""
    D = np.ascontiguousarray(D, dtype=np.float64)
    N = D.shape[0]
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= N - 1:
        raise ValueError(f"k must be an integer in [1, {N - 1}], got {k!r}")
    return NeighborGraph(kernels.knn(D, int(k)), int(k))


def one_step_transition(D, G: NeighborGraph, alpha=DEFAULT_ALPHA, denominator="neighbors"):
    """Row-stochastic transition matrix over the kNN graph.

    For each neighbor j of i the distance is normalized by the sum of
    distances from i (over its neighbors, or over all points when
    ``denominator="all"``), and the unnormalized weight is
    ``1 / (normalized distance + alpha)``. Non-neighbors and the diagonal get
    weight zero; rows are then scaled to sum to one.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    D = np.asarray(D, dtype=np.float64)
    N = D.shape[0]
    rows = np.arange(N)[:, None]
    nbr = G.neighbors
    dn = D[rows, nbr]
    if denominator == "neighbors":
        total = dn.sum(axis=1, keepdims=True)
    elif denominator == "all":
        total = D.sum(axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown denominator mode {denominator!r}")
    # every distance from i is zero: all normalized distances are taken as 0
    safe = np.where(total > 0, total, 1.0)
    w = 1.0 / (dn / safe + alpha)
    P = np.zeros((N, N))
    P[rows, nbr] = w / w.sum(axis=1, keepdims=True)
    return TransitionMatrix(P, float(alpha))


def _as_array(P):
    return P.values if isinstance(P, TransitionMatrix) else np.asarray(P, dtype=np.float64)


def iter_powers(P, n: int):
    """Yield P^(1), ..., P^(n) with P^(t) = P^(t-1) P."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    P = _as_array(P)
    cur = P
    yield cur
    for _ in range(n - 1):
        cur = cur @ P
        yield cur


def multi_step_transitions(P, n: int) -> list:
    return list(iter_powers(P, n))


def _reachability(powers, n, use_max):
    V = None
    count = 0
    for Pt in powers:
        if V is None:
            V = np.zeros_like(Pt, dtype=np.float64)
        kernels.fold_reachability(V, np.ascontiguousarray(Pt), use_max, REACH_THRESHOLD)
        count += 1
    if count != n:
        raise ValueError(f"expected {n} transition powers, got {count}")
    np.fill_diagonal(V, 0.0)
    return ReachabilityMatrix(V, "max" if use_max else "min", n)


def min_reachability(powers, n: int) -> ReachabilityMatrix:
    """Per pair, the smallest positive transition probability over steps 1..n.

    ``powers`` may be a list or any iterable (e.g. :func:`iter_powers`), in
    which case the powers are folded one at a time without being stored.
    """
    return _reachability(powers, n, use_max=False)


def max_reachability(powers, n: int) -> ReachabilityMatrix:
    """Per pair, the largest transition probability over steps 1..n; zero diagonal."""
    return _reachability(powers, n, use_max=True)


def row_normalize(V: ReachabilityMatrix) -> ReachabilityMatrix:
    vals = np.asarray(V.values, dtype=np.float64)
    sums = vals.sum(axis=1, keepdims=True)
    zero = sums[:, 0] <= 0
    out = vals / np.where(zero[:, None], 1.0, sums)
    out[zero] = 0.0
    warnings = tuple(f"row {i} has no reachable points" for i in np.flatnonzero(zero))
    return ReachabilityMatrix(out, V.variant, V.horizon, V.warnings + warnings)


def build_template(V, X: DataMatrix) -> np.ndarray:
    """Structure template V @ X^T (N x d)."""
    vals = V.values if isinstance(V, ReachabilityMatrix) else np.asarray(V, dtype=float)
    if vals.shape != (X.N, X.N):
        raise ValueError(
            f"reachability matrix shape {vals.shape} does not match N={X.N}"
        )
    return vals @ X.values.T


def reachability_by_horizon(P, horizons, variants=("min", "max"), low_memory=True):
    """Row-normalized reachability matrices for several horizons in one pass.

    Returns a dict keyed by ``(variant, n)``. The powers are generated once up
    to ``max(horizons)`` and folded as they are produced.
    """
    hs = sorted(set(int(h) for h in horizons))
    if not hs or hs[0] < 1:
        raise ValueError(f"horizons must be positive, got {horizons!r}")
    for v in variants:
        if v not in ("min", "max"):
            raise ValueError(f"unknown variant {v!r}")
    powers = iter_powers(P, hs[-1])
    if not low_memory:
        powers = multi_step_transitions(P, hs[-1])
    acc = {}
    out = {}
    for t, Pt in enumerate(powers, start=1):
        Pt = np.ascontiguousarray(Pt)
        for v in variants:
            if v not in acc:
                acc[v] = np.zeros_like(Pt)
            kernels.fold_reachability(acc[v], Pt, v == "max", REACH_THRESHOLD)
            if t in hs:
                V = acc[v].copy()
                np.fill_diagonal(V, 0.0)
                out[(v, t)] = row_normalize(ReachabilityMatrix(V, v, t))
    return out


def transition_for(X: DataMatrix, k=5, alpha=DEFAULT_ALPHA, denominator="neighbors"):
    """Distances, kNN graph and one-step transition matrix of ``X``."""
    D = pairwise_distances(X)
    return one_step_transition(D, knn_mask(D, k), alpha, denominator)


def reachability(X: DataMatrix, variant, k=5, alpha=DEFAULT_ALPHA, n=10,
                 denominator="neighbors", low_memory=True):
    """Row-normalized reachability matrix of ``X`` for ``variant`` ("min" or "max").

    Returns ``(P, V)`` where ``P`` is the one-step :class:`TransitionMatrix`.
    """
    P = transition_for(X, k, alpha, denominator)
    return P, reachability_by_horizon(P, [n], (variant,), low_memory)[(variant, n)]
