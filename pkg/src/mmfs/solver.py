"""Iteratively reweighted solver for row-sparse least squares.

Minimizes ``||X^T W - F||_F^2 + lam * R(W)`` where, with row norms
``a_j = sqrt(||W^j||^2 + eps)``,

* ``penalty="squared"`` (default): ``R(W) = (sum_j a_j)^2``
* ``penalty="plain"``: ``R(W) = sum_j a_j``

Each iteration solves ``(X X^T + lam diag(q)) W = X F`` by Cholesky and then
refreshes the diagonal reweighting ``q`` from the new ``W``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .data import DataMatrix


class SingularSystemError(LinAlgError):
    """The normal-equation matrix is not positive definite."""


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 1.0
    epsilon: float = 1e-8
    tol: float = 1e-6
    max_iter: int = 100
    penalty: str = "squared"

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon!r}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if self.penalty not in ("squared", "plain"):
            raise ValueError(f"unknown penalty {self.penalty!r}")


@dataclass(frozen=True)
class SolverState:
    W: np.ndarray
    Q_diag: np.ndarray
    objective_trace: tuple
    iterations: int
    converged: bool
    # relative ||W_t - W_{t-1}||_F / ||W_t||_F per iteration (inf for the first)
    delta_trace: tuple = field(default=())


def _xvals(X):
    return X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=np.float64)


def _row_terms(W, epsilon):
    return np.sqrt(np.einsum("ij,ij->i", W, W) + epsilon)


def objective(X, W, F, lam, epsilon, penalty="squared") -> float:
    """Smoothed objective value."""
    Xv = _xvals(X)
    W = np.asarray(W, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    d, N = Xv.shape
    if W.shape[0] != d or F.shape != (N, W.shape[1]):
        raise ValueError(
            f"shape mismatch: X {Xv.shape}, W {W.shape}, F {F.shape}"
        )
    R = Xv.T @ W - F
    a = _row_terms(W, epsilon)
    reg = a.sum() ** 2 if penalty == "squared" else a.sum()
    return float(np.einsum("ij,ij->", R, R) + lam * reg)


def update_Q(W, epsilon, penalty="squared") -> np.ndarray:
    """Diagonal of the reweighting matrix for the current W."""
    a = _row_terms(np.asarray(W, dtype=np.float64), epsilon)
    if penalty == "squared":
        return a.sum() / a
    return 0.5 / a


def _factor(G, lam, Q_diag):
    A = G + lam * np.diag(Q_diag) if lam else G.copy()
    try:
        return cho_factor(A, lower=False, check_finite=False)
    except LinAlgError:
        raise SingularSystemError(
            "X X^T + lambda Q is not positive definite; with lambda=0 the data "
            "matrix must have full row rank (rank deficiency)"
        ) from None


def update_W(X, F, Q_diag, lam, _gram=None, _xf=None) -> np.ndarray:
    """Solve (X X^T + lam diag(Q)) W = X F."""
    Xv = _xvals(X)
    F = np.asarray(F, dtype=np.float64)
    if F.shape[0] != Xv.shape[1]:
        raise ValueError(f"template has {F.shape[0]} rows, X has {Xv.shape[1]} instances")
    G = Xv @ Xv.T if _gram is None else _gram
    XF = Xv @ F if _xf is None else _xf
    W = cho_solve(_factor(G, lam, np.asarray(Q_diag, dtype=np.float64)), XF, check_finite=False)
    if not np.all(np.isfinite(W)):
        raise SingularSystemError("linear solve produced non-finite weights")
    return W


def gradient(X, W, F, lam, Q_diag):
    """2 X (X^T W - F) + 2 lam diag(Q) W with Q held fixed."""
    Xv = _xvals(X)
    return 2.0 * Xv @ (Xv.T @ W - F) + 2.0 * lam * np.asarray(Q_diag)[:, None] * W


def solve_irls(X, F, config: SolverConfig = SolverConfig()) -> SolverState:
    Xv = _xvals(X)
    F = np.asarray(F, dtype=np.float64)
    G = Xv @ Xv.T
    XF = Xv @ F
    d = Xv.shape[0]
    lam, eps, pen = config.lam, config.epsilon, config.penalty

    Q = np.ones(d)
    if lam == 0:
        W = update_W(Xv, F, Q, 0.0, G, XF)
        obj = objective(Xv, W, F, lam, eps, pen)
        return SolverState(W, update_Q(W, eps, pen), (obj,), 1, True, (np.inf,))

    trace, deltas = [], []
    W_prev = None
    converged = False
    for it in range(1, int(config.max_iter) + 1):
        W = update_W(Xv, F, Q, lam, G, XF)
        trace.append(objective(Xv, W, F, lam, eps, pen))
        if W_prev is None:
            deltas.append(np.inf)
        else:
            nw = np.linalg.norm(W)
            deltas.append(np.linalg.norm(W - W_prev) / nw if nw > 0 else 0.0)
        Q = update_Q(W, eps, pen)
        W_prev = W
        if it > 1:
            prev = trace[-2]
            rel = abs(prev - trace[-1]) / prev if prev > 0 else 0.0
            # objective change is second order in dW near a stationary point,
            # so it alone would stop the iteration early
            if rel < config.tol and deltas[-1] < config.tol:
                converged = True
                break
    return SolverState(W, Q, tuple(trace), it, converged, tuple(deltas))


def stationarity_residual(X, F, state: SolverState, config: SolverConfig) -> float:
    """Frobenius norm of the objective gradient at the returned W."""
    Q = update_Q(state.W, config.epsilon, config.penalty)
    return float(np.linalg.norm(gradient(X, state.W, F, config.lam, Q)))
