"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba versions are used when numba imports cleanly and the environment
variable ``MMFS_DISABLE_NUMBA`` is unset (or ``0``). Both variants are always
importable under explicit names (``*_numba`` / ``*_numpy``) so they can be
benchmarked and cross-checked against each other.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("MMFS_DISABLE_NUMBA", "0").lower() in (
    "",
    "0",
    "false",
    "no",
)

# Chunk size (rows) for numpy kernels that would otherwise allocate N*c*m.
_CHUNK = 512


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def pairwise_distances_numpy(points):
    """Euclidean distances between rows of ``points`` (N x m) via the Gram trick."""
    sq = np.einsum("ij,ij->i", points, points)
    D2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.maximum(D2, 0.0, out=D2)
    D = np.sqrt(D2)
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


def knn_numpy(D, k):
    N = D.shape[0]
    out = np.empty((N, k), dtype=np.int64)
    for start in range(0, N, _CHUNK):
        rows = D[start : start + _CHUNK].copy()
        idx = np.arange(rows.shape[0])
        rows[idx, start + idx] = np.inf
        out[start : start + _CHUNK] = np.argsort(rows, axis=1, kind="stable")[:, :k]
    return out


def fold_reachability_numpy(V, Pt, use_max, threshold):
    """Fold one transition power into the running min/max reachability ``V``.

    Entries of ``V`` equal to 0 mean "not reached yet". Entries of ``Pt`` at or
    below ``threshold`` are treated as unreachable at this step.
    """
    reach = Pt > threshold
    if use_max:
        np.maximum(V, np.where(reach, Pt, 0.0), out=V)
    else:
        fresh = reach & (V == 0.0)
        both = reach & ~fresh
        V[fresh] = Pt[fresh]
        V[both] = np.minimum(V[both], Pt[both])
    return V


def assign_numpy(points, centers):
    """Nearest center (lowest index on ties) and squared distance for each point."""
    N = points.shape[0]
    labels = np.empty(N, dtype=np.int64)
    best = np.empty(N)
    for start in range(0, N, _CHUNK):
        block = points[start : start + _CHUNK]
        diff = block[:, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        lab = np.argmin(d2, axis=1)
        labels[start : start + _CHUNK] = lab
        best[start : start + _CHUNK] = d2[np.arange(block.shape[0]), lab]
    return labels, best


def contingency_numpy(a, b, na, nb):
    table = np.zeros((na, nb), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def pairwise_distances_numba(points):
        N, m = points.shape
        D = np.zeros((N, N))
        for i in range(N):
            for j in range(i + 1, N):
                acc = 0.0
                for f in range(m):
                    t = points[i, f] - points[j, f]
                    acc += t * t
                r = np.sqrt(acc)
                D[i, j] = r
                D[j, i] = r
        return D

    @njit(cache=True, nogil=True)
    def knn_numba(D, k):
        # top-k by insertion; strict < keeps the lower index first on ties
        N = D.shape[0]
        out = np.empty((N, k), dtype=np.int64)
        best = np.empty(k)
        for i in range(N):
            filled = 0
            for j in range(N):
                if j == i:
                    continue
                v = D[i, j]
                if filled == k and not v < best[k - 1]:
                    continue
                pos = filled if filled < k else k - 1
                while pos > 0 and v < best[pos - 1]:
                    best[pos] = best[pos - 1]
                    out[i, pos] = out[i, pos - 1]
                    pos -= 1
                best[pos] = v
                out[i, pos] = j
                if filled < k:
                    filled += 1
        return out

    @njit(cache=True, nogil=True)
    def fold_reachability_numba(V, Pt, use_max, threshold):
        N, M = V.shape
        for i in range(N):
            for j in range(M):
                p = Pt[i, j]
                if p > threshold:
                    v = V[i, j]
                    if v == 0.0:
                        V[i, j] = p
                    elif use_max:
                        if p > v:
                            V[i, j] = p
                    elif p < v:
                        V[i, j] = p
        return V

    @njit(cache=True, nogil=True)
    def assign_numba(points, centers):
        N, m = points.shape
        c = centers.shape[0]
        labels = np.empty(N, dtype=np.int64)
        best = np.empty(N)
        for i in range(N):
            bl = 0
            bd = np.inf
            for j in range(c):
                acc = 0.0
                for f in range(m):
                    t = points[i, f] - centers[j, f]
                    acc += t * t
                if acc < bd:
                    bd = acc
                    bl = j
            labels[i] = bl
            best[i] = bd
        return labels, best

    @njit(cache=True, nogil=True)
    def contingency_numba(a, b, na, nb):
        table = np.zeros((na, nb), dtype=np.int64)
        for i in range(a.shape[0]):
            table[a[i], b[i]] += 1
        return table


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if USE_NUMBA:
    pairwise_distances = pairwise_distances_numba
    knn = knn_numba
    fold_reachability = fold_reachability_numba
    assign = assign_numba
    contingency = contingency_numba
else:
    pairwise_distances = pairwise_distances_numpy
    knn = knn_numpy
    fold_reachability = fold_reachability_numpy
    assign = assign_numpy
    contingency = contingency_numpy


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
