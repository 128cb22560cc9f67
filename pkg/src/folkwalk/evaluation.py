"""Top-N evaluation: precision/recall/F-measure, half-life rankscore,
repeated-split experiments, density sweeps, paired t-tests, and grid search."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import stdtr

from .baselines import AlgorithmSpec, run_algorithm
from .dataset import TaggingDataset, split as make_split
from .similarity import SimilarityConfig
from .walker import WalkConfig

Recs = dict[int, list[int]]
TestSets = dict[int, frozenset[int]]


@dataclass(frozen=True)
class MetricTuple:
    precision: float
    recall: float
    f_measure: float
    rankscore: float

    def as_dict(self) -> dict[str, float]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "rankscore": self.rankscore,
        }

    def get(self, name: str) -> float:
        return self.as_dict()[name]


@dataclass(frozen=True)
class EvalReport:
    algorithm: AlgorithmSpec
    runs: list[MetricTuple]
    means: MetricTuple
    top_n: int
    seed_list: list[int]

    def to_dict(self) -> dict:
        return {
            "algorithm": {"kind": self.algorithm.kind, "params": _params_json(self.algorithm)},
            "top_n": self.top_n,
            "seeds": self.seed_list,
            "runs": [r.as_dict() for r in self.runs],
            "means": self.means.as_dict(),
        }


def _params_json(spec: AlgorithmSpec) -> dict:
    out = {}
    for key, value in spec.params.items():
        if isinstance(value, (WalkConfig, SimilarityConfig)):
            out[key] = asdict(value)
        else:
            out[key] = value
    return out


def _counted_users(recs: Recs, test_sets: TestSets) -> list[int]:
    users = [u for u, t in test_sets.items() if t]
    if not users:
        raise ValueError("no user has a non-empty test set")
    for u in users:
        if u not in recs:
            raise KeyError(f"no recommendation list for user {u}")
    return users


def precision_recall(recs: Recs, test_sets: TestSets, top_n: int) -> tuple[float, float]:
    """Mean per-user precision and recall over users with non-empty test
    sets, as percentages."""
    users = _counted_users(recs, test_sets)
    precisions, recalls = [], []
    for u in users:
        hits = len(set(recs[u]) & test_sets[u])
        precisions.append(hits / len(recs[u]) if recs[u] else 0.0)
        recalls.append(hits / len(test_sets[u]))
    return 100.0 * float(np.mean(precisions)), 100.0 * float(np.mean(recalls))


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean 2PR/(P+R); zero when both are zero."""
    if precision < 0 or recall < 0:
        raise ValueError("precision and recall must be non-negative")
    total = precision + recall
    return 2.0 * precision * recall / total if total > 0 else 0.0


def rankscore(recs: Recs, test_sets: TestSets, half_life: int = 5) -> float:
    """Half-life utility: hits at 1-based rank r earn 2^{-(r-1)/(half_life-1)};
    normalized by the best achievable utility, as a percentage."""
    if half_life < 2:
        raise ValueError("half_life must be >= 2")
    users = _counted_users(recs, test_sets)
    utility = max_utility = 0.0
    for u in users:
        for r, item in enumerate(recs[u], start=1):
            if item in test_sets[u]:
                utility += 2.0 ** (-(r - 1) / (half_life - 1))
        best = min(len(test_sets[u]), len(recs[u]))
        for r in range(1, best + 1):
            max_utility += 2.0 ** (-(r - 1) / (half_life - 1))
    return 100.0 * utility / max_utility if max_utility > 0 else 0.0


def evaluate_lists(
    recs: Recs, test_sets: TestSets, top_n: int, half_life: int = 5
) -> MetricTuple:
    p, r = precision_recall(recs, test_sets, top_n)
    return MetricTuple(p, r, f_measure(p, r), rankscore(recs, test_sets, half_life))


def run_experiment(
    ds: TaggingDataset,
    algorithm: AlgorithmSpec,
    train_fraction: float = 0.2,
    top_n: int = 5,
    n_runs: int = 10,
    base_seed: int = 0,
    half_life: int = 5,
) -> EvalReport:
    """Evaluate an algorithm over n_runs independent splits seeded
    base_seed, base_seed+1, ..."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    seeds = [base_seed + r for r in range(n_runs)]
    runs = []
    for seed in seeds:
        sp = make_split(ds, train_fraction, seed)
        recs = run_algorithm(algorithm, sp, ds, top_n)
        runs.append(evaluate_lists(recs, sp.test_sets, top_n, half_life))
    means = MetricTuple(
        precision=float(np.mean([r.precision for r in runs])),
        recall=float(np.mean([r.recall for r in runs])),
        f_measure=float(np.mean([r.f_measure for r in runs])),
        rankscore=float(np.mean([r.rankscore for r in runs])),
    )
    return EvalReport(algorithm, runs, means, top_n, seeds)


def density_sweep(
    ds: TaggingDataset,
    algorithms: list[AlgorithmSpec],
    fractions: list[float],
    top_n: int = 5,
    n_runs: int = 10,
    base_seed: int = 0,
    half_life: int = 5,
) -> dict[tuple[str, float], EvalReport]:
    """run_experiment per (algorithm, training fraction)."""
    for f in fractions:
        if not 0.0 < f < 1.0:
            raise ValueError(f"training fraction {f} outside (0, 1)")
    return {
        (spec.kind, frac): run_experiment(
            ds, spec, frac, top_n, n_runs, base_seed, half_life
        )
        for spec in algorithms
        for frac in fractions
    }


def paired_t_test(runs_a: list[float], runs_b: list[float]) -> tuple[float, float]:
    """Two-tailed paired t-test on per-run differences.

    Identical lists give (0, 1). A constant nonzero difference has zero
    variance; reported as (signed infinity, 0) rather than an error.
    """
    if len(runs_a) != len(runs_b):
        raise ValueError("run lists must have equal length")
    n = len(runs_a)
    if n < 2:
        raise ValueError("need at least 2 paired runs")
    diffs = np.asarray(runs_a, dtype=float) - np.asarray(runs_b, dtype=float)
    mean = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * (1.0 - float(stdtr(n - 1, abs(t))))
    return t, p


def grid_search(
    ds: TaggingDataset,
    param_grid: dict[str, list[float]],
    objective: str = "precision",
    train_fraction: float = 0.2,
    top_n: int = 5,
    n_runs: int = 1,
    base_seed: int = 0,
    half_life: int = 5,
) -> tuple[dict[str, float], list[tuple[dict[str, float], EvalReport]]]:
    """Exhaustive search over walk/similarity hyperparameters for the full
    walk algorithm; ties keep the first grid point. Grid axes: any of alpha,
    beta, eta, lambda, mu."""
    if not param_grid:
        raise ValueError("param_grid must be non-empty")
    allowed = {"alpha", "beta", "eta", "lambda", "mu"}
    unknown = set(param_grid) - allowed
    if unknown:
        raise ValueError(f"unknown grid parameters: {sorted(unknown)}")
    keys = list(param_grid)
    results: list[tuple[dict[str, float], EvalReport]] = []
    best: tuple[dict[str, float], float] | None = None
    for values in itertools.product(*(param_grid[k] for k in keys)):
        point = dict(zip(keys, values))
        spec = AlgorithmSpec(
            "pRW",
            {
                "walk": WalkConfig(
                    eta=point.get("eta", 0.8),
                    lambda_=point.get("lambda", 0.8),
                    mu=point.get("mu", 0.5),
                ),
                "similarity": SimilarityConfig(
                    alpha=point.get("alpha", 0.5), beta=point.get("beta", 0.5)
                ),
            },
        )
        report = run_experiment(ds, spec, train_fraction, top_n, n_runs, base_seed, half_life)
        results.append((point, report))
        score = report.means.get(objective)
        if best is None or score > best[1]:
            best = (point, score)
    return best[0], results


def report_to_json(reports: list[EvalReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2)


def format_report_table(reports: list[EvalReport]) -> str:
    """Aligned text table: one row per algorithm, one column per metric."""
    header = ["Alg.", "Precision (%)", "Recall (%)", "F-measure (%)", "Rankscore (%)"]
    rows = [
        [
            r.algorithm.kind,
            f"{r.means.precision:.2f}",
            f"{r.means.recall:.2f}",
            f"{r.means.f_measure:.2f}",
            f"{r.means.rankscore:.2f}",
        ]
        for r in reports
    ]
    widths = [max(len(h), *(len(row[c]) for row in rows)) if rows else len(h)
              for c, h in enumerate(header)]
    lines = ["  ".join(h.ljust(widths[c]) for c, h in enumerate(header))]
    lines += ["  ".join(row[c].ljust(widths[c]) for c in range(len(header))) for row in rows]
    return "\n".join(lines)


def format_sweep_table(
    grid: dict[tuple[str, float], EvalReport], metric: str = "precision"
) -> str:
    """Grid of one metric: algorithms as rows, training fractions as columns."""
    kinds = list(dict.fromkeys(k for k, _ in grid))
    fractions = sorted({f for _, f in grid})
    header = ["Algorithm"] + [f"{f * 100:g}%" for f in fractions]
    rows = [
        [kind] + [f"{grid[(kind, f)].means.get(metric):.2f}" for f in fractions]
        for kind in kinds
    ]
    widths = [max(len(header[c]), *(len(row[c]) for row in rows)) if rows else len(header[c])
              for c in range(len(header))]
    lines = ["  ".join(header[c].ljust(widths[c]) for c in range(len(header)))]
    lines += ["  ".join(row[c].ljust(widths[c]) for c in range(len(header))) for row in rows]
    return "\n".join(lines)


def runs_to_csv(reports: list[EvalReport]) -> str:
    """Per-run metric values for external analysis."""
    lines = ["algorithm,run_seed,precision,recall,f_measure,rankscore"]
    for r in reports:
        for seed, run in zip(r.seed_list, r.runs):
            lines.append(
                f"{r.algorithm.kind},{seed},{run.precision:.10g},"
                f"{run.recall:.10g},{run.f_measure:.10g},{run.rankscore:.10g}"
            )
    return "\n".join(lines) + "\n"
