"""Command-line front end: ``mmfs {select,sweep,grid,project}``.

Every option can also be given through an environment variable named
``MMFS_<OPTION>`` (upper case, dashes as underscores, e.g. ``MMFS_MAX_ITER``);
an explicit flag wins over the environment.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import evaluation, io, kernels
from .data import DataError, load_csv, standardize
from .markov import DEFAULT_ALPHA
from .select import VARIANTS, Params, select, select_inter
from .solver import SolverConfig

log = logging.getLogger("mmfs")

ENV_PREFIX = "MMFS_"


class UsageError(Exception):
    """Invalid option value; reported with exit status 2."""


def _int_list(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _flag(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# (flag, type, default, help)
OPTIONS = [
    ("--input", str, None, "input CSV file"),
    ("--orientation", str, "rows-are-instances", "rows-are-instances | rows-are-features"),
    ("--label-col", str, None, "name (or index, without header) of the label column"),
    ("--standardize", str, "none", "none | zscore"),
    ("--variant", str, "maxP", "minP | maxP | inter"),
    ("--k", int, 5, "nearest neighbours per instance"),
    ("--alpha", float, DEFAULT_ALPHA, "smoothing constant in the transition weights"),
    ("--n", int, 10, "number of Markov steps"),
    ("--lambda", float, 1.0, "regularization weight"),
    ("--epsilon", float, 1e-8, "row-norm smoothing constant"),
    ("--tol", float, 1e-6, "relative convergence tolerance"),
    ("--max-iter", int, 100, "maximum solver iterations"),
    ("--s", int, None, "number of features to select"),
    ("--counts", _int_list, None, "comma-separated feature counts for sweep"),
    ("--lambdas", _float_list, list(evaluation.LAMBDA_GRID), "lambda values for grid"),
    ("--ns", _int_list, list(evaluation.N_GRID), "step counts for grid"),
    ("--repeats", int, evaluation.DEFAULT_REPEATS, "k-means restarts per evaluation"),
    ("--seed", int, 0, "first k-means seed"),
    ("--out", str, ".", "output directory"),
    ("--jobs", int, 1, "worker threads for k-means repeats"),
    ("--penalty", str, "squared", "squared | plain row-sparsity penalty"),
    ("--denominator", str, "neighbors", "distance normalization over neighbors | all"),
]
SWITCHES = [
    ("--dump-matrices", "write P and the reachability matrices as (row, col, value) CSV"),
    ("--trace", "write the solver objective trace as CSV"),
    ("--identity-w", "debug: project with W = identity instead of fitting"),
]


def _env_name(flag):
    return ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper()


def _common_parser(environ):
    p = argparse.ArgumentParser(add_help=False)
    for flag, typ, default, help_ in OPTIONS:
        env = environ.get(_env_name(flag))
        if env is not None:
            try:
                default = typ(env)
            except ValueError:
                raise UsageError(f"bad value {env!r} in ${_env_name(flag)}") from None
        p.add_argument(flag, type=typ, default=default,
                       help=f"{help_} (env {_env_name(flag)})")
    for flag, help_ in SWITCHES:
        default = _flag(environ.get(_env_name(flag), "0"))
        p.add_argument(flag, action="store_true", default=default,
                       help=f"{help_} (env {_env_name(flag)})")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser(environ=None):
    environ = os.environ if environ is None else environ
    common = _common_parser(environ)
    parser = argparse.ArgumentParser(
        prog="mmfs",
        description="Unsupervised feature selection from multi-step Markov transition structure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("select", parents=[common], help="rank features and write the selected subset")
    sub.add_parser("sweep", parents=[common], help="ACC/NMI over a grid of feature counts")
    sub.add_parser("grid", parents=[common], help="ACC/NMI over (lambda, n) at fixed s")
    sub.add_parser("project", parents=[common], help="write X^T W coordinates per instance")
    return parser


@dataclass
class RunConfig:
    command: str
    input: str
    orientation: str
    label_col: object
    standardize: str
    variant: str
    params: Params
    s: object
    counts: object
    lambdas: list
    ns: list
    repeats: int
    seed: int
    out: Path
    jobs: int
    dump_matrices: bool
    trace: bool
    identity_w: bool


def _check(cond, msg):
    if not cond:
        raise UsageError(msg)


def make_config(args) -> RunConfig:
    _check(args.input, "--input is required")
    _check(args.orientation in ("rows-are-instances", "rows-are-features"),
           f"--orientation must be rows-are-instances or rows-are-features, got {args.orientation!r}")
    _check(args.standardize in ("none", "zscore"), f"--standardize must be none or zscore, got {args.standardize!r}")
    _check(args.variant in VARIANTS, f"--variant must be one of {', '.join(VARIANTS)}, got {args.variant!r}")
    _check(args.k >= 1, f"--k must be >= 1, got {args.k}")
    _check(args.alpha > 0, f"--alpha must be > 0, got {args.alpha}")
    _check(args.n >= 1, f"--n must be >= 1, got {args.n}")
    _check(args.repeats >= 1, f"--repeats must be >= 1, got {args.repeats}")
    _check(args.jobs >= 1, f"--jobs must be >= 1, got {args.jobs}")
    _check(args.penalty in ("squared", "plain"), f"--penalty must be squared or plain, got {args.penalty!r}")
    _check(args.denominator in ("neighbors", "all"), f"--denominator must be neighbors or all, got {args.denominator!r}")
    _check(args.s is None or args.s >= 1, f"--s must be >= 1, got {args.s}")
    _check(all(n >= 1 for n in args.ns) and args.ns, "--ns must be positive integers")
    _check(all(lam >= 0 for lam in args.lambdas) and args.lambdas, "--lambdas must be nonnegative")
    try:
        solver = SolverConfig(lam=args.__dict__["lambda"], epsilon=args.epsilon, tol=args.tol,
                              max_iter=args.max_iter, penalty=args.penalty)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.command in ("select", "grid"):
        _check(args.s is not None, f"--s is required for {args.command}")
    if args.command == "project":
        _check(args.variant != "inter", "project needs a single fitted W: use --variant minP or maxP")
    label = args.label_col
    if label is not None and label.lstrip("-").isdigit():
        label = int(label)
    return RunConfig(
        command=args.command, input=args.input, orientation=args.orientation,
        label_col=label, standardize=args.standardize, variant=args.variant,
        params=Params(k=args.k, alpha=args.alpha, n=args.n, solver=solver,
                      denominator=args.denominator),
        s=args.s, counts=args.counts, lambdas=args.lambdas, ns=args.ns,
        repeats=args.repeats, seed=args.seed, out=Path(args.out), jobs=args.jobs,
        dump_matrices=args.dump_matrices, trace=args.trace, identity_w=args.identity_w,
    )


def _load(cfg: RunConfig, need_labels=False):
    ds = load_csv(cfg.input, cfg.label_col, cfg.orientation)
    if need_labels and ds.labels is None:
        raise UsageError(f"{cfg.command} needs class labels: pass --label-col")
    X = standardize(ds.data, cfg.standardize)
    _check(cfg.params.k <= X.N - 1, f"--k must be <= N-1 = {X.N - 1}, got {cfg.params.k}")
    for s in [cfg.s] + list(cfg.counts or []):
        _check(s is None or s <= X.d, f"feature count {s} exceeds d = {X.d}")
    return ds, X


def _dump(result, tag, out):
    if result.transition is not None:
        io.write_matrix_triplets(result.transition, out / "P.csv")
    if result.reach is not None:
        io.write_matrix_triplets(result.reach, out / f"V_{tag}.csv")


def cmd_select(cfg: RunConfig):
    ds, X = _load(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.variant == "inter":
        parts = {v: select(X, v, cfg.s, cfg.params) for v in ("minP", "maxP")}
        result = select_inter(parts["minP"], parts["maxP"], cfg.s)
    else:
        parts = {cfg.variant: select(X, cfg.variant, cfg.s, cfg.params)}
        result = parts[cfg.variant]
    names = X.feature_names
    io.write_selection_json(result, names, cfg.out / f"selection_{cfg.variant}.json")
    io.write_selection_csv(result, names, cfg.out / f"selection_{cfg.variant}.csv")
    for v, r in parts.items():
        if cfg.trace:
            io.write_trace_csv(r.state, cfg.out / f"trace_{v}.csv")
        if cfg.dump_matrices:
            _dump(r, "min" if v == "minP" else "max", cfg.out)
        if not r.state.converged:
            log.warning("%s solver stopped at max_iter=%d before converging",
                        v, cfg.params.solver.max_iter)
    return result


def cmd_sweep(cfg: RunConfig):
    ds, X = _load(cfg, need_labels=True)
    ds = replace(ds, data=X)
    report = evaluation.benchmark_sweep(ds, cfg.variant, cfg.counts, cfg.params,
                                        cfg.repeats, cfg.seed, cfg.jobs)
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_report_csv(report, cfg.out / f"sweep_{cfg.variant}.csv")
    return report


def cmd_grid(cfg: RunConfig):
    ds, X = _load(cfg, need_labels=True)
    ds = replace(ds, data=X)
    rows = evaluation.grid_search(ds, cfg.variant, cfg.s, cfg.lambdas, cfg.ns, cfg.params,
                                  cfg.repeats, cfg.seed, cfg.jobs)
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_grid_csv(rows, cfg.out / f"grid_{cfg.variant}.csv")
    return rows


def cmd_project(cfg: RunConfig):
    ds, X = _load(cfg)
    if cfg.identity_w:
        W = np.eye(X.d)
    else:
        W = select(X, cfg.variant, X.d, cfg.params).W
    Z = X.values.T @ W
    cfg.out.mkdir(parents=True, exist_ok=True)
    io.write_projection_csv(Z, ds.labels, cfg.out / f"projection_{cfg.variant}.csv")
    return Z


COMMANDS = {"select": cmd_select, "sweep": cmd_sweep, "grid": cmd_grid, "project": cmd_project}


def main(argv=None, environ=None) -> int:
    try:
        parser = build_parser(environ)
    except UsageError as exc:
        print(f"mmfs: error: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("kernel backend: %s", kernels.backend())
    try:
        cfg = make_config(args)
        COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"mmfs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, ValueError, np.linalg.LinAlgError, OSError) as exc:
        print(f"mmfs {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main_entry():  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
