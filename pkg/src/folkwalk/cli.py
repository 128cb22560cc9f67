"""Command-line front end: ingest, recommend, evaluate, ablate, sweep, grid.

Every command writes a run manifest (config snapshot, input digests, seeds,
tool version) next to its outputs so a run can be reproduced byte-for-byte.
Config precedence: CLI flag > config file > built-in default.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .baselines import ABLATION_KINDS, ALGORITHM_KINDS, AlgorithmSpec
from .dataset import (
    EmptyDatasetError,
    ParseError,
    dataset_from_json,
    dataset_to_json,
    format_stats_table,
    ingest,
    parse_triples,
    split as make_split,
    stats,
)
from .evaluation import (
    density_sweep,
    format_report_table,
    format_sweep_table,
    grid_search,
    paired_t_test,
    report_to_json,
    run_experiment,
    runs_to_csv,
)
from .similarity import SimilarityConfig
from .walker import WalkConfig, recommend


class UsageError(Exception):
    pass


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(path: str, command: str, args: argparse.Namespace, inputs: list[str]) -> None:
    manifest = {
        "command": command,
        "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")},
        "inputs": {p: _sha256(p) for p in inputs},
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config_file(path: str) -> dict[str, str]:
    """Flat key-value config: one ``key = value`` per line, # comments."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {line_no}: expected key = value")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}") from exc


def _walk_config(args: argparse.Namespace) -> WalkConfig:
    return WalkConfig(
        eta=args.eta,
        lambda_=getattr(args, "lambda_"),
        mu=args.mu,
        tol=args.tol,
        max_iters=args.max_iters,
    )


def _algorithm_spec(kind: str, args: argparse.Namespace) -> AlgorithmSpec:
    if kind == "Random":
        return AlgorithmSpec("Random")
    if kind in ("UserCF", "ItemCF"):
        return AlgorithmSpec(kind, {"k_neighbors": args.k_neighbors})
    if kind == "Fusion":
        return AlgorithmSpec(kind, {"fuse_weight": args.fuse_weight})
    return AlgorithmSpec(
        kind,
        {
            "walk": _walk_config(args),
            "similarity": SimilarityConfig(alpha=args.alpha, beta=args.beta),
        },
    )


def _load_dataset(path: str):
    with open(path, encoding="utf-8") as fh:
        return dataset_from_json(fh.read())


def cmd_ingest(args: argparse.Namespace) -> int:
    with open(args.input, encoding="utf-8") as fh:
        posts = parse_triples(fh.read())
    ds = ingest(
        posts,
        min_items_per_user=args.min_items_per_user,
        min_users_per_item=args.min_users_per_item,
        unqualified_item_threshold=args.unqualified_threshold,
        num_tags=args.select_tags,
    )
    if ds.num_users == 0 or ds.num_items == 0:
        print("dataset empty after filtering", file=sys.stderr)
        return 2
    with open(args.dataset, "w", encoding="utf-8") as fh:
        fh.write(dataset_to_json(ds))
    s = stats(ds)
    if args.format == "json":
        print(json.dumps(s.to_dict(), indent=2, sort_keys=True))
    else:
        print(format_stats_table(s))
    _write_manifest(args.dataset + ".manifest.json", "ingest", args, [args.input])
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    if args.top_n < 1:
        raise UsageError("--top-n must be >= 1")
    ds = _load_dataset(args.dataset)
    if args.user is not None:
        try:
            users = [ds.user_index(args.user)]
        except KeyError:
            print(f"unknown user id {args.user!r}", file=sys.stderr)
            return 1
    else:
        users = list(range(ds.num_users))
    sp = make_split(ds, args.train_fraction, args.seed)
    spec = _algorithm_spec(args.algorithm, args)
    from .baselines import run_algorithm

    recs = run_algorithm(spec, sp, ds, args.top_n)
    payload = {ds.users[u]: [ds.items[j] for j in recs[u]] for u in users}
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for user_id in sorted(payload):
            print(f"{user_id}\t" + "\t".join(payload[user_id]))
    return 0


def _parse_algorithms(text: str) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    for k in kinds:
        if k not in ALGORITHM_KINDS:
            raise UsageError(f"unknown algorithm {k!r}; choose from {ALGORITHM_KINDS}")
    if not kinds:
        raise UsageError("no algorithms given")
    return kinds


def _run_reports(ds, kinds, args) -> list:
    return [
        run_experiment(
            ds,
            _algorithm_spec(kind, args),
            train_fraction=args.train_fraction,
            top_n=args.top_n,
            n_runs=args.runs,
            base_seed=args.seed,
            half_life=args.half_life,
        )
        for kind in kinds
    ]


def _emit_reports(reports, args, command: str, extras: dict | None = None) -> None:
    os.makedirs(args.output_dir, exist_ok=True)
    report_json = report_to_json(reports)
    if extras:
        doc = json.loads(report_json)
        doc = {"reports": doc, **extras}
        report_json = json.dumps(doc, sort_keys=True, indent=2)
    with open(os.path.join(args.output_dir, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report_json + "\n")
    with open(os.path.join(args.output_dir, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(format_report_table(reports) + "\n")
    with open(os.path.join(args.output_dir, "runs.csv"), "w", encoding="utf-8") as fh:
        fh.write(runs_to_csv(reports))
    _write_manifest(
        os.path.join(args.output_dir, "manifest.json"), command, args, [args.dataset]
    )
    if args.format == "json":
        print(report_json)
    else:
        print(format_report_table(reports))


def cmd_evaluate(args: argparse.Namespace) -> int:
    ds = _load_dataset(args.dataset)
    kinds = _parse_algorithms(args.algorithms)
    reports = _run_reports(ds, kinds, args)
    extras = None
    if args.t_test and len(reports) >= 2:
        ordered = sorted(reports, key=lambda r: -r.means.precision)
        best, second = ordered[0], ordered[1]
        t, p = paired_t_test(
            [r.precision for r in best.runs], [r.precision for r in second.runs]
        )
        extras = {
            "t_test": {
                "best": best.algorithm.kind,
                "second": second.algorithm.kind,
                "metric": "precision",
                "t": t,
                "p": p,
            }
        }
    _emit_reports(reports, args, "evaluate", extras)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    ds = _load_dataset(args.dataset)
    reports = _run_reports(ds, list(ABLATION_KINDS), args)
    _emit_reports(reports, args, "ablate")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    fractions = _csv_floats(args.fractions)
    if not fractions or not all(0.0 < f < 1.0 for f in fractions):
        raise UsageError("--fractions must be a non-empty list within (0, 1)")
    ds = _load_dataset(args.dataset)
    kinds = _parse_algorithms(args.algorithms)
    grid = density_sweep(
        ds,
        [_algorithm_spec(k, args) for k in kinds],
        fractions,
        top_n=args.top_n,
        n_runs=args.runs,
        base_seed=args.seed,
        half_life=args.half_life,
    )
    os.makedirs(args.output_dir, exist_ok=True)
    table = format_sweep_table(grid)
    doc = {
        f"{kind}@{frac:g}": report.to_dict() for (kind, frac), report in grid.items()
    }
    with open(os.path.join(args.output_dir, "sweep.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    with open(os.path.join(args.output_dir, "sweep.txt"), "w", encoding="utf-8") as fh:
        fh.write(table + "\n")
    _write_manifest(os.path.join(args.output_dir, "manifest.json"), "sweep", args, [args.dataset])
    print(table)
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    grid_axes = {}
    for name in ("alpha", "beta", "eta", "lambda", "mu"):
        raw = getattr(args, "lambda_" if name == "lambda" else name)
        if raw is not None:
            grid_axes[name] = _csv_floats(raw)
    if not grid_axes:
        raise UsageError("give at least one grid axis (--alpha/--beta/--eta/--lambda/--mu)")
    ds = _load_dataset(args.dataset)
    best, results = grid_search(
        ds,
        grid_axes,
        objective=args.objective,
        train_fraction=args.train_fraction,
        top_n=args.top_n,
        n_runs=args.runs,
        base_seed=args.seed,
        half_life=args.half_life,
    )
    os.makedirs(args.output_dir, exist_ok=True)
    doc = {
        "best": best,
        "objective": args.objective,
        "grid": [
            {"params": point, "means": report.means.as_dict()} for point, report in results
        ],
    }
    with open(os.path.join(args.output_dir, "grid.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    _write_manifest(os.path.join(args.output_dir, "manifest.json"), "grid", args, [args.dataset])
    print(json.dumps({"best": best, "objective": args.objective}, sort_keys=True))
    return 0


def _add_walk_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=0.8)
    p.add_argument("--lambda", dest="lambda_", type=float, default=0.8)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--k-neighbors", type=int, default=None)
    p.add_argument("--fuse-weight", type=float, default=0.5)


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True)
    p.add_argument("--train-fraction", type=float, default=0.2)
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--half-life", type=int, default=5)
    p.add_argument("--output-dir", default="out")
    p.add_argument("--format", choices=("json", "table", "csv"), default="table")
    _add_walk_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="folkwalk", description=__doc__)
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("FOLKWALK_THREADS", "1")),
        help="worker cap; 1 guarantees bit-stable output",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse triples, filter, build a dataset snapshot")
    p.add_argument("--input", required=True)
    p.add_argument("--dataset", required=True, help="output dataset path (JSON)")
    p.add_argument("--min-items-per-user", type=int, default=None)
    p.add_argument("--min-users-per-item", type=int, default=None)
    p.add_argument("--unqualified-threshold", type=int, default=20)
    p.add_argument("--select-tags", type=int, default=None)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("recommend", help="top-N lists for one user or all users")
    p.add_argument("--dataset", required=True)
    p.add_argument("--algorithm", choices=ALGORITHM_KINDS, default="pRW")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--user", help="user id")
    group.add_argument("--all", action="store_true")
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--train-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "table"), default="table")
    _add_walk_flags(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("evaluate", help="repeated-split evaluation of algorithms")
    p.add_argument("--algorithms", default="Random,UserCF,ItemCF,Fusion,pRW")
    p.add_argument("--t-test", action="store_true",
                   help="paired t-test of best vs second-best precision")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="evaluate pRW-IT, pRW-UT, pRW-UI, pRW")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("sweep", help="evaluation across training-fraction levels")
    p.add_argument("--fractions", default="0.05,0.10,0.20")
    p.add_argument("--algorithms", default="UserCF,ItemCF,Fusion,pRW")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("grid", help="exhaustive hyperparameter search for pRW")
    p.add_argument("--dataset", required=True)
    p.add_argument("--alpha", default=None, help="comma list, e.g. 0,0.5,1")
    p.add_argument("--beta", default=None)
    p.add_argument("--eta", default=None)
    p.add_argument("--lambda", dest="lambda_", default=None)
    p.add_argument("--mu", default=None)
    p.add_argument("--objective", default="precision",
                   choices=("precision", "recall", "f_measure", "rankscore"))
    p.add_argument("--train-fraction", type=float, default=0.2)
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--half-life", type=int, default=5)
    p.add_argument("--output-dir", default="out")
    p.set_defaults(func=cmd_grid)
    return parser


_INT_KEYS = {
    "top_n", "runs", "seed", "half_life", "max_iters", "min_items_per_user",
    "min_users_per_item", "unqualified_threshold", "select_tags",
    "k_neighbors", "threads",
}
_FLOAT_KEYS = {
    "alpha", "beta", "eta", "lambda_", "mu", "tol", "train_fraction",
    "fuse_weight",
}


def _apply_config(args: argparse.Namespace, cfg: dict[str, str], argv: list[str]) -> None:
    """Overlay config-file values onto flags not given on the command line."""
    for key, raw in cfg.items():
        if key == "lambda":
            key = "lambda_"
        flag = "--" + ("lambda" if key == "lambda_" else key).replace("_", "-")
        if flag in argv or not hasattr(args, key):
            continue
        if key in _INT_KEYS:
            value: object = int(raw)
        elif key in _FLOAT_KEYS:
            value = float(raw)
        elif isinstance(getattr(args, key), bool):
            value = raw.lower() in ("1", "true", "yes", "on")
        else:
            value = raw
        setattr(args, key, value)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            _apply_config(args, _load_config_file(args.config), argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, EmptyDatasetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
