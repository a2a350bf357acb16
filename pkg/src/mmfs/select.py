"""Feature ranking and the minP / maxP / inter selection pipelines."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import markov
from .data import DataMatrix
from .solver import SolverConfig, SolverState, solve_irls

VARIANTS = ("minP", "maxP", "inter")
_REACH = {"minP": "min", "maxP": "max"}


@dataclass(frozen=True)
class SelectionResult:
    scores: np.ndarray
    ranking: np.ndarray
    selected: np.ndarray
    s: int
    variant: str
    # solver output and transition matrices, kept for projection / debug dumps
    state: Optional[SolverState] = field(default=None, repr=False, compare=False)
    transition: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    reach: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, SelectionResult):
            return NotImplemented
        return (
            self.variant == other.variant
            and self.s == other.s
            and np.array_equal(self.scores, other.scores)
            and np.array_equal(self.ranking, other.ranking)
            and np.array_equal(self.selected, other.selected)
        )

    __hash__ = None

    @property
    def W(self):
        return None if self.state is None else self.state.W


@dataclass(frozen=True)
class Params:
    """Pipeline settings shared by the selection variants."""

    k: int = 5
    alpha: float = markov.DEFAULT_ALPHA
    n: int = 10
    solver: SolverConfig = SolverConfig()
    denominator: str = "neighbors"
    low_memory: bool = True


def feature_scores(W) -> np.ndarray:
    """Euclidean norm of each row of W."""
    W = np.asarray(W, dtype=np.float64)
    return np.sqrt(np.einsum("ij,ij->i", W, W))


def rank_features(scores, descending: bool) -> np.ndarray:
    """Stable sort of feature indices by score; ties keep ascending index."""
    scores = np.asarray(scores, dtype=np.float64)
    key = -scores if descending else scores
    return np.argsort(key, kind="stable")


def _check_s(s, d):
    if not isinstance(s, (int, np.integer)) or not 1 <= s <= d:
        raise ValueError(f"s must be an integer in [1, {d}], got {s!r}")


def fit_reachability(X: DataMatrix, variant, V, config: SolverConfig, s,
                     transition=None) -> SelectionResult:
    """Fit W to the template built from a normalized reachability matrix and rank."""
    _check_s(s, X.d)
    F = markov.build_template(V, X)
    state = solve_irls(X, F, config)
    scores = feature_scores(state.W)
    ranking = rank_features(scores, descending=(variant == "maxP"))
    return SelectionResult(scores, ranking, ranking[:s].copy(), int(s), variant,
                           state, transition, V.values)


def _select(X, variant, k, alpha, n, config, s, denominator, low_memory):
    _check_s(s, X.d)
    P, V = markov.reachability(X, _REACH[variant], k=k, alpha=alpha, n=n,
                               denominator=denominator, low_memory=low_memory)
    return fit_reachability(X, variant, V, config, s, P.values)


def select_minP(X: DataMatrix, k=5, alpha=markov.DEFAULT_ALPHA, n=10,
                config: SolverConfig = SolverConfig(), s=None,
                denominator="neighbors", low_memory=True) -> SelectionResult:
    """Fit against the min-reachability template; keep the s smallest-norm features."""
    return _select(X, "minP", k, alpha, n, config, X.d if s is None else s,
                   denominator, low_memory)


def select_maxP(X: DataMatrix, k=5, alpha=markov.DEFAULT_ALPHA, n=10,
                config: SolverConfig = SolverConfig(), s=None,
                denominator="neighbors", low_memory=True) -> SelectionResult:
    """Fit against the max-reachability template; keep the s largest-norm features."""
    return _select(X, "maxP", k, alpha, n, config, X.d if s is None else s,
                   denominator, low_memory)


def select_inter(result_min: SelectionResult, result_max: SelectionResult, s=None) -> SelectionResult:
    """Combine a minP and a maxP selection.

    The features both selected come first (in maxP order). The remaining
    slots are filled by alternately taking the next unused feature from the
    maxP ranking and from the minP ranking, maxP first, so maxP contributes
    the extra feature when the remainder is odd.
    """
    s = result_max.s if s is None else s
    if result_min.s != s or result_max.s != s:
        raise ValueError(
            f"both selections must have s={s}, got {result_min.s} and {result_max.s}"
        )
    d = len(result_max.ranking)
    if len(result_min.ranking) != d:
        raise ValueError(
            f"rankings cover different feature counts: {len(result_min.ranking)} vs {d}"
        )
    _check_s(s, d)

    both = set(int(i) for i in result_min.selected) & set(int(i) for i in result_max.selected)
    common = [int(i) for i in result_max.ranking if int(i) in both]
    picked = common[:s]
    used = set(picked)
    sources = [iter(int(i) for i in result_max.ranking), iter(int(i) for i in result_min.ranking)]
    turn = 0
    while len(picked) < s:
        for f in sources[turn]:
            if f not in used:
                picked.append(f)
                used.add(f)
                break
        turn ^= 1

    rest = [int(i) for i in result_max.ranking if int(i) not in used]
    ranking = np.array(picked + rest, dtype=np.int64)
    return SelectionResult(
        np.asarray(result_max.scores, dtype=np.float64).copy(),
        ranking,
        ranking[:s].copy(),
        int(s),
        "inter",
        result_max.state,
        result_max.transition,
    )


def truncate(result: SelectionResult, s) -> SelectionResult:
    """Same ranking, first ``s`` features selected."""
    from dataclasses import replace

    _check_s(s, len(result.ranking))
    return replace(result, selected=result.ranking[:s].copy(), s=int(s))


def selections_by_count(X: DataMatrix, variant, counts, params: Params = Params()):
    """One selection per requested size, fitting the model only once.

    For ``inter`` the combination rule is applied afresh at each size, since
    its output for a smaller s is not a prefix of its output for a larger one.
    """
    counts = [int(c) for c in counts]
    for c in counts:
        _check_s(c, X.d)
    if variant == "inter":
        lo = select(X, "minP", X.d, params)
        hi = select(X, "maxP", X.d, params)
        return [select_inter(truncate(lo, c), truncate(hi, c), c) for c in counts]
    full = select(X, variant, X.d, params)
    return [truncate(full, c) for c in counts]


def select_many(X: DataMatrix, variant, s, ns, lambdas, params: Params = Params()):
    """Selections for every (lambda, n) pair, sharing the graph and power sweep.

    Returns a dict keyed by ``(lambda, n)``.
    """
    from dataclasses import replace

    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    _check_s(s, X.d)
    P = markov.transition_for(X, params.k, params.alpha, params.denominator)
    kinds = ("min", "max") if variant == "inter" else (_REACH[variant],)
    reach = markov.reachability_by_horizon(P, ns, kinds, params.low_memory)
    out = {}
    for lam in lambdas:
        cfg = replace(params.solver, lam=float(lam))
        for n in ns:
            fits = {v: fit_reachability(X, v, reach[(_REACH[v], int(n))], cfg, s, P.values)
                    for v in (("minP", "maxP") if variant == "inter" else (variant,))}
            if variant == "inter":
                out[(lam, n)] = select_inter(fits["minP"], fits["maxP"], s)
            else:
                out[(lam, n)] = fits[variant]
    return out


def select(X: DataMatrix, variant, s, params: Params = Params()) -> SelectionResult:
    """Run one of ``minP``, ``maxP`` or ``inter``."""
    return select_many(X, variant, s, [params.n], [params.solver.lam], params)[
        (params.solver.lam, params.n)
    ]
