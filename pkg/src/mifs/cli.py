"""Command-line front end.

Exit status is 0 on success, 1 on data or estimation errors and 2 on usage
errors. Reports go to ``--out`` or standard output as JSON.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .clustering import cluster_features
from .dataset import SEED_MAX, add_jitter, generate_friedman, load_csv, standardize, write_csv
from .estimators import EstimatorConfig, entropy_kl, mi_knn
from .exceptions import DataError, EstimatorError
from .greedy import forward_backward_select, forward_select
from .model_selection import (
    DEFAULT_ALPHA,
    DEFAULT_PERMUTATIONS,
    choose_k,
    default_k_grid,
    max_k_for_folds,
)
from .neighbors import Norm
from .reports import dataset_summary, dumps, rows_to_csv, run_report


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return v


def _data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="comma-separated numeric file")
    p.add_argument("--target", default=None,
                   help="target column name, or 1-based column number (default: last column)")
    p.add_argument("--no-header", action="store_true", help="file has no header line")
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True,
                   help="z-score features and target before estimation")
    p.add_argument("--jitter", action="store_true",
                   help="add seeded 1e-10-scale noise to break duplicated values")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--norm", choices=[n.value for n in Norm], default=Norm.EUCLIDEAN.value,
                   help="norm inside the X and Y spaces")
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")


def _k_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-min", type=_positive, default=None)
    p.add_argument("--k-max", type=_positive, default=None)
    p.add_argument("--folds", type=_positive, default=20, help="cross-validation folds S")
    p.add_argument("--aggregate", choices=["max", "mean"], default="max")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mifs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate-mi", help="MI between feature subsets and the target")
    _data_args(p)
    p.add_argument("--features", action="append", default=None,
                   help="comma-separated subset; repeat for several (default: each feature)")
    p.add_argument("--k", type=_positive, default=6)
    p.add_argument("--bits", action="store_true", help="report bits instead of nats")
    p.add_argument("--entropy", action="store_true",
                   help="also report the entropy estimate of each subset")

    p = sub.add_parser("select-k", help="choose the estimator's K by resampling")
    _data_args(p)
    _k_grid_args(p)
    p.add_argument("--features", default=None, help="comma-separated candidate features")
    p.add_argument("--tk-csv", default=None, help="write (feature, K, t_K) rows here")

    p = sub.add_parser("select", help="greedy feature selection")
    _data_args(p)
    _k_grid_args(p)
    p.add_argument("--method", choices=["forward", "forward-backward"], default="forward")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=_positive, default=None)
    g.add_argument("--auto-k", action="store_true", help="run select-k first (default without --k)")
    p.add_argument("--alpha", type=_probability, default=DEFAULT_ALPHA)
    p.add_argument("--permutations", type=_positive, default=DEFAULT_PERMUTATIONS)
    p.add_argument("--max-size", type=_positive, default=None)
    p.add_argument("--legacy-stop", action="store_true",
                   help="stop when the estimated MI stops increasing (no permutation test)")
    p.add_argument("--cv-folds", type=_positive, default=None,
                   help="fold-averaged estimates inside the stopping test")
    p.add_argument("--bits", action="store_true", help="report MI values in bits")

    p = sub.add_parser("cluster", help="supervised feature clustering")
    _data_args(p)
    p.add_argument("--n-clusters", type=_positive, default=None)
    p.add_argument("--min-similarity", type=float, default=None)
    p.add_argument("--representative", choices=["max-mi", "mean"], default="max-mi")
    p.add_argument("--k", type=_positive, default=6, help="K for representative election")
    p.add_argument("--unsupervised", action="store_true",
                   help="baseline: plain column correlation, target ignored")
    p.add_argument("--merges-csv", default=None,
                   help="write (step, item_a, item_b, similarity, representative) rows here")

    p = sub.add_parser("synth", help="write a synthetic Friedman-style dataset")
    p.add_argument("--n", type=int, required=True, help="sample count")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    return parser


def _resolve_target(path: str, target: str | None, no_header: bool):
    if target is None:
        return -1
    if not no_header:
        with open(path, encoding="utf-8") as fh:
            header = [h.strip() for h in fh.readline().rstrip("\r\n").split(",")]
        if target in header:
            return target
    if target.isdigit():
        if int(target) < 1:
            raise UsageError("--target column numbers start at 1")
        return int(target) - 1
    if no_header:
        raise UsageError("--target must be a column number when --no-header is given")
    return target


def _load(args):
    target = _resolve_target(args.input, args.target, args.no_header)
    d = load_csv(args.input, has_header=not args.no_header, target_column=target)
    if args.target is None or not isinstance(target, str):
        target_name = "y" if args.no_header else _header_name(args.input, target)
    else:
        target_name = target
    if args.jitter:
        d = add_jitter(d, args.seed)
    return d, target_name


def _header_name(path, index):
    with open(path, encoding="utf-8") as fh:
        header = [h.strip() for h in fh.readline().rstrip("\r\n").split(",")]
    return header[index]


def _feature_list(d, text: str) -> list[int]:
    out = []
    for name in (s.strip() for s in text.split(",")):
        if not name:
            continue
        if name not in d.feature_names:
            raise UsageError(f"unknown feature {name!r}")
        out.append(d.feature_names.index(name))
    if not out:
        raise UsageError("empty feature list")
    return out


def _emit(args, report: dict) -> None:
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _k_bounds(args, n: int) -> tuple[int, int]:
    lo, hi = default_k_grid(n)
    k_min = args.k_min if args.k_min is not None else lo
    k_max = args.k_max if args.k_max is not None else max(k_min, hi)
    if not 2 <= args.folds <= n:
        raise UsageError(f"--folds must lie in [2, {n}]")
    bound = max_k_for_folds(n, args.folds)
    if k_max > bound:
        raise UsageError(
            f"--k-max {k_max} too large: with {args.folds} folds each subset keeps "
            f"{bound + 1} samples, so K must be <= {bound}"
        )
    if k_min > k_max:
        raise UsageError(f"empty K grid {k_min}..{k_max}")
    return k_min, k_max


def cmd_estimate_mi(args, argv) -> dict:
    d, target_name = _load(args)
    subsets = [_feature_list(d, t) for t in args.features] if args.features else \
        [[j] for j in range(d.n_features)]
    if args.k > d.n_samples - 1:
        raise UsageError(f"--k must be <= {d.n_samples - 1} for {d.n_samples} samples")
    work = standardize(d)[0] if args.standardize else d
    scale = 1.0 / math.log(2.0) if args.bits else 1.0
    config = EstimatorConfig(args.k, Norm(args.norm))
    estimates = []
    for cols in subsets:
        est = mi_knn(work.features[:, cols], work.target, config)
        entry = {"features": [d.feature_names[j] for j in cols], "mi": est.value * scale,
                 "k": est.k, "n": est.n}
        if args.entropy:
            entry["entropy"] = entropy_kl(work.features[:, cols], args.k) * scale
        estimates.append(entry)
    payload = {"unit": "bits" if args.bits else "nats", "estimates": estimates}
    return run_report("estimate-mi", argv, {"seed": args.seed},
                      dataset_summary(d, target_name, args.standardize), payload)


def _run_choose_k(args, d):
    k_min, k_max = _k_bounds(args, d.n_samples)
    features = _feature_list(d, args.features) if getattr(args, "features", None) else None
    return choose_k(d, features, k_min, k_max, args.folds, args.seed, args.aggregate,
                    Norm(args.norm), args.standardize, args.threads)


def cmd_select_k(args, argv) -> dict:
    d, target_name = _load(args)
    report = _run_choose_k(args, d)
    if args.tk_csv:
        Path(args.tk_csv).write_text(rows_to_csv(["feature", "K", "t_K"], report.tk_rows()),
                                     encoding="utf-8")
    return run_report("select-k", argv, {"seed": args.seed},
                      dataset_summary(d, target_name, args.standardize), report.to_dict())


def cmd_select(args, argv) -> dict:
    d, target_name = _load(args)
    if args.max_size is not None and args.max_size > d.n_features:
        raise UsageError(f"--max-size must be <= {d.n_features}")
    if args.cv_folds is not None and not 2 <= args.cv_folds <= d.n_samples:
        raise UsageError(f"--cv-folds must lie in [2, {d.n_samples}]")
    k_report = None
    if args.k is None:
        k_report = _run_choose_k(args, d)
        k = k_report.chosen_k
    else:
        k = args.k
    limit = d.n_samples - 1 if args.cv_folds is None else max_k_for_folds(d.n_samples, args.cv_folds)
    if k > limit:
        raise UsageError(f"--k must be <= {limit} here")
    run = forward_select if args.method == "forward" else forward_backward_select
    trace = run(d, k, args.alpha, args.permutations, args.max_size, args.seed, Norm(args.norm),
                args.legacy_stop, args.cv_folds, args.standardize, args.threads)
    trace_dict = trace.to_dict()
    if args.bits:
        for step in trace_dict["steps"]:
            if step["mi_value"] is not None:
                step["mi_value"] /= math.log(2.0)
    payload = {
        "unit": "bits" if args.bits else "nats",
        "k_selection": k_report.to_dict() if k_report else None,
        "trace": trace_dict,
        "log": trace.log_lines(),
    }
    return run_report("select", argv, {"seed": args.seed},
                      dataset_summary(d, target_name, args.standardize), payload)


def cmd_cluster(args, argv) -> dict:
    d, target_name = _load(args)
    if args.n_clusters is None and args.min_similarity is None:
        raise UsageError("give --n-clusters and/or --min-similarity")
    if args.n_clusters is not None and args.n_clusters > d.n_features:
        raise UsageError(f"--n-clusters must be <= {d.n_features}")
    if args.min_similarity is not None and not -1 <= args.min_similarity <= 1:
        raise UsageError("--min-similarity must lie in [-1, 1]")
    if d.n_features < 2:
        raise UsageError("clustering needs at least 2 features")
    work = standardize(d)[0] if args.standardize else d
    dendro = cluster_features(work, args.n_clusters, args.min_similarity,
                              args.representative.replace("-", "_"), args.k, None,
                              args.unsupervised)
    if args.merges_csv:
        Path(args.merges_csv).write_text(
            rows_to_csv(["step", "item_a", "item_b", "similarity", "representative"],
                        dendro.merge_rows()),
            encoding="utf-8",
        )
    payload = dendro.to_dict()
    payload["cluster_names"] = [[d.feature_names[j] for j in c] for c in dendro.final_clusters]
    return run_report("cluster", argv, {"seed": args.seed},
                      dataset_summary(d, target_name, args.standardize), payload)


def cmd_synth(args, argv) -> None:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    d = generate_friedman(args.n, args.seed, args.noise_std)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_csv(d, fh)
    else:
        write_csv(d, sys.stdout)


COMMANDS = {
    "estimate-mi": cmd_estimate_mi,
    "select-k": cmd_select_k,
    "select": cmd_select,
    "cluster": cmd_cluster,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        try:
            report = COMMANDS[args.command](args, argv)
        except UsageError as exc:
            parser.error(str(exc))
        if report is not None:
            _emit(args, report)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except (DataError, EstimatorError, OSError, ValueError) as exc:
        print(f"mifs: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
