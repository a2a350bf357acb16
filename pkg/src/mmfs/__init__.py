"""Unsupervised feature selection from multi-step Markov transition structure."""

from .data import DataError, DataMatrix, LabeledDataset, load_csv, save_csv, standardize
from .evaluation import (
    ClusteringRun,
    EvalReport,
    benchmark_sweep,
    evaluate_subset,
    grid_search,
    hungarian_acc,
    kmeans,
    nmi,
)
from .kernels import backend
from .markov import (
    NeighborGraph,
    ReachabilityMatrix,
    TransitionMatrix,
    build_template,
    knn_mask,
    max_reachability,
    min_reachability,
    multi_step_transitions,
    one_step_transition,
    pairwise_distances,
    row_normalize,
)
from .select import (
    Params,
    SelectionResult,
    feature_scores,
    select,
    select_inter,
    select_maxP,
    select_minP,
)
from .solver import (
    SingularSystemError,
    SolverConfig,
    SolverState,
    objective,
    solve_irls,
    update_Q,
    update_W,
)

__version__ = "0.1.0"
