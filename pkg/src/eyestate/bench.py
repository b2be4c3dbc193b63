"""Timed k-fold evaluation and the base/A/B/C data-reduction experiments.

* base: all channels, all rows
* A: mRMR-selected channels, all rows
* B: mRMR-selected channels, transition-epoch rows
* C: all channels, transition-epoch rows

Gains are relative to base: ``f1_gain = F1_exp - F1_base`` and
``speedup_gain = time_base / time_exp``.
"""

from __future__ import annotations

import json
import os
import platform
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import clone
from threadpoolctl import threadpool_limits

from . import _io
from .epochs import EpochSet, slice_windows
from .exceptions import EyeStateError, MissingBaseReport, UnsupportedFormat
from .learners import grid_search, make_classifier
from .recording import Recording
from .scoring import FoldPlan, f1_score, make_folds
from .selection import (AggregateRanking, HistogramConfig, average_ranking,
                        mrmr_rank)

__all__ = ["CLASSIFIERS", "EXPERIMENTS", "PUBLISHED_GAINS", "BenchConfig",
           "ClassifierResult", "ExperimentReport", "ExperimentContext",
           "timed_kfold", "run_experiment", "run_grid", "compute_gains",
           "emit_report", "environment_descriptor", "REPORT_FORMAT_VERSION"]

CLASSIFIERS = ("knn", "logreg", "svc", "rf")
EXPERIMENTS = ("base", "A", "B", "C")
DISPLAY = {"knn": "KNN", "logreg": "LogReg", "svc": "SVC", "rf": "RF"}
REPORT_FORMAT_VERSION = 1

# (F1 gain, speed-up gain) published for each experiment; informational only,
# they come from different hardware. None = not observed.
PUBLISHED_GAINS = {
    "A": {"knn": (-0.2, 2.1), "logreg": (-0.36, 2.0), "svc": (-0.3, 3.0), "rf": (-0.5, 0.3)},
    "B": {"knn": (-0.4, 4.3), "logreg": (-0.6, 2.5), "svc": (-0.7, 5.6), "rf": (-0.7, 3.0)},
    "C": {"knn": (-0.1, None), "logreg": (-0.17, 2.3), "svc": (-0.3, 1.9), "rf": (-0.63, 3.0)},
}


@dataclass
class BenchConfig:
    k: int = 5
    seed: int = 0
    repeats: int = 3
    n_select: int = 9
    bins: int = 16
    window_len: int = 384
    n_windows: int = 20
    knn_grid: tuple = (1, 3, 5, 7, 9, 15)
    svc_c: float = 10.0
    svc_gamma: float = 0.001
    rf_trees: int = 100
    logreg_l2: float = 1e-4
    logreg_max_iter: int = 1000
    logreg_tol: float = 1e-6
    classifiers: tuple = CLASSIFIERS

    def __post_init__(self):
        if self.k < 2:
            raise EyeStateError(f"k must be >= 2, got {self.k}")
        if self.repeats < 1:
            raise EyeStateError(f"repeats must be >= 1, got {self.repeats}")
        unknown = set(self.classifiers) - set(CLASSIFIERS)
        if unknown:
            raise EyeStateError(f"unknown classifiers {sorted(unknown)}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["knn_grid"] = list(self.knn_grid)
        d["classifiers"] = list(self.classifiers)
        return d

    def base_params(self, kind: str) -> dict:
        if kind == "knn":
            return {"n_neighbors": self.knn_grid[0]}
        if kind == "logreg":
            return {"l2": self.logreg_l2, "max_iter": self.logreg_max_iter,
                    "tol": self.logreg_tol}
        if kind == "svc":
            return {"C": self.svc_c, "gamma": self.svc_gamma}
        return {"n_estimators": self.rf_trees, "random_state": self.seed}


def environment_descriptor(repeats: int) -> dict:
    cpu = platform.processor() or platform.machine()
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return {"cpu_model": cpu, "cpu_count": os.cpu_count(), "repeats": repeats,
            "threads": 1, "python": platform.python_version(),
            "numpy": np.__version__, "timer": "time.perf_counter"}


@dataclass
class ClassifierResult:
    kind: str
    hyperparameters: dict
    mean_f1: float
    fold_f1: list
    wall_clock_seconds: float
    repeat_seconds: list
    repeats: int


def _warmup(estimator):
    # trigger JIT compilation outside the timed region
    rng = np.random.default_rng(0)
    X = rng.normal(size=(20, 3))
    y = np.tile([0, 1], 10)
    clone(estimator).fit(X, y).predict(X)


def timed_kfold(estimator, X, y, plan: FoldPlan, repeats: int = 3) -> ClassifierResult:
    """Train on k-1 folds and predict the held-out fold, for every fold.

    Each repeat times (fit + predict) summed over folds with BLAS/OpenMP
    pools limited to one thread. The reported time is the median over
    repeats; F1 comes from the first repeat (training is deterministic).
    """
    if repeats < 1:
        raise EyeStateError(f"repeats must be >= 1, got {repeats}")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    _warmup(estimator)
    totals, fold_f1 = [], None
    with threadpool_limits(limits=1):
        for _ in range(repeats):
            total, scores = 0.0, []
            for train, test in plan.splits():
                model = clone(estimator)
                t0 = time.perf_counter()
                model.fit(X[train], y[train])
                pred = model.predict(X[test])
                total += time.perf_counter() - t0
                scores.append(f1_score(pred, y[test]))
            totals.append(total)
            if fold_f1 is None:
                fold_f1 = scores
    return ClassifierResult(
        kind=getattr(estimator, "kind", type(estimator).__name__),
        hyperparameters=estimator.get_params(),
        mean_f1=float(np.mean(fold_f1)),
        fold_f1=[float(s) for s in fold_f1],
        wall_clock_seconds=float(statistics.median(totals)),
        repeat_seconds=[float(t) for t in totals],
        repeats=repeats,
    )


@dataclass
class ExperimentReport:
    experiment_id: str
    n_rows: int
    channels: list
    results: dict
    f1_gain: dict = field(default_factory=dict)
    speedup_gain: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "experiment_id": self.experiment_id,
            "n_rows": self.n_rows,
            "channels": list(self.channels),
            "results": {k: asdict(v) for k, v in self.results.items()},
            "f1_gain": self.f1_gain,
            "speedup_gain": self.speedup_gain,
            "environment": self.environment,
            "config": self.config,
            "extras": self.extras,
            "published_reference": {k: {"f1_gain": v[0], "speedup_gain": v[1]}
                                for k, v in PUBLISHED_GAINS.get(self.experiment_id, {}).items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        if d.get("format_version") != REPORT_FORMAT_VERSION:
            raise EyeStateError(f"unsupported report format version {d.get('format_version')!r}")
        return cls(
            experiment_id=d["experiment_id"], n_rows=d["n_rows"], channels=d["channels"],
            results={k: ClassifierResult(**v) for k, v in d["results"].items()},
            f1_gain=d["f1_gain"], speedup_gain=d["speedup_gain"],
            environment=d["environment"], config=d["config"], extras=d["extras"])

    def deterministic_dict(self) -> dict:
        """Everything except wall-clock figures and the machine description."""
        d = self.to_dict()
        for r in d["results"].values():
            del r["wall_clock_seconds"], r["repeat_seconds"]
        del d["speedup_gain"], d["environment"]
        return d

    def timing_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "experiment_id": self.experiment_id,
            "wall_clock_seconds": {k: r.wall_clock_seconds for k, r in self.results.items()},
            "repeat_seconds": {k: r.repeat_seconds for k, r in self.results.items()},
            "speedup_gain": self.speedup_gain,
            "environment": self.environment,
            "config": self.config,
        }


def compute_gains(report: ExperimentReport, base: ExperimentReport) -> ExperimentReport:
    """Fill ``report``'s gains against ``base`` (in place) and return it."""
    for kind, r in report.results.items():
        b = base.results[kind]
        report.f1_gain[kind] = r.mean_f1 - b.mean_f1
        report.speedup_gain[kind] = b.wall_clock_seconds / r.wall_clock_seconds
    return report


class ExperimentContext:
    """Data assembly shared by all four experiments.

    Holds the preprocessed recording, its transition epochs, the per-window
    mRMR rankings and their average, and the selected channel indices.
    """

    def __init__(self, rec: Recording, config: BenchConfig):
        self.rec = rec
        self.config = config
        self.epochs: EpochSet = slice_windows(rec, config.window_len, config.n_windows,
                                              seed=config.seed)
        cfg = HistogramConfig(config.bins)
        self.rankings = [mrmr_rank(w, cfg, n_select=rec.n_channels)
                         for w in self.epochs.window_recordings()]
        self.aggregate: AggregateRanking = average_ranking(self.rankings)
        self.selected = sorted(self.aggregate.top(config.n_select))

    def data(self, experiment_id: str):
        """``(X, y, channel_names)`` for one experiment."""
        if experiment_id not in EXPERIMENTS:
            raise EyeStateError(f"unknown experiment {experiment_id!r}; expected one of {EXPERIMENTS}")
        source = self.rec if experiment_id in ("base", "A") else self.epochs.recording
        if experiment_id in ("A", "B"):
            source = source.select_channels(self.selected)
        return np.array(source.values), np.array(source.labels, dtype=np.int64), list(source.names)


def _tune_knn(X, y, config: BenchConfig):
    return grid_search(make_classifier("knn"), X, y,
                       {"n_neighbors": list(config.knn_grid)},
                       plan=make_folds(y, k=config.k, seed=config.seed))


def run_experiment(experiment_id: str, rec: Recording, config: BenchConfig | None = None,
                   base_report: ExperimentReport | None = None,
                   context: ExperimentContext | None = None,
                   compute_base: bool = True) -> ExperimentReport:
    """Evaluate every configured classifier on one experiment's data.

    ``rec`` must already have outliers removed and be centred. For A/B/C,
    hyperparameters (including the KNN neighbour count tuned by grid
    search in the base run) are copied from ``base_report``; when it is
    missing the base run is computed first, unless ``compute_base`` is
    False, in which case :class:`MissingBaseReport` is raised.
    """
    config = config or BenchConfig()
    context = context or ExperimentContext(rec, config)
    X, y, names = context.data(experiment_id)
    plan = make_folds(y, k=config.k, seed=config.seed)

    extras = {"selected_channels": [rec.names[i] for i in context.selected]}
    if experiment_id == "base":
        params = {kind: config.base_params(kind) for kind in config.classifiers}
        if "knn" in config.classifiers:
            tuned = _tune_knn(X, y, config)
            params["knn"] = dict(tuned.best_params)
            extras["knn_grid_search"] = tuned.to_dict()
    else:
        if base_report is None:
            if not compute_base:
                raise MissingBaseReport(f"experiment {experiment_id} needs a base report for gains")
            base_report = run_experiment("base", rec, config, context=context)
        params = {kind: base_report.results[kind].hyperparameters for kind in config.classifiers}

    results = {}
    for kind in config.classifiers:
        est = make_classifier(kind, **params[kind])
        results[kind] = timed_kfold(est, X, y, plan, repeats=config.repeats)

    report = ExperimentReport(
        experiment_id=experiment_id, n_rows=int(X.shape[0]), channels=names,
        results=results, environment=environment_descriptor(config.repeats),
        config=config.to_dict(), extras=extras)
    if experiment_id == "base":
        report.f1_gain = {k: 0.0 for k in results}
        report.speedup_gain = {k: 1.0 for k in results}
    else:
        compute_gains(report, base_report)
    return report


def run_grid(rec: Recording, config: BenchConfig | None = None,
             experiments=EXPERIMENTS) -> dict[str, ExperimentReport]:
    """Run base plus the requested experiments with one shared context."""
    config = config or BenchConfig()
    context = ExperimentContext(rec, config)
    base = run_experiment("base", rec, config, context=context)
    out = {"base": base}
    for exp in experiments:
        if exp != "base":
            out[exp] = run_experiment(exp, rec, config, base_report=base, context=context)
    return out


def _fmt_gain(g):
    g = round(g, 2)
    return f"{g + 0.0:.2f}"  # + 0.0 turns -0.0 into 0.0


def _fmt_speedup(s):
    return "not observed" if s is None else f"{s:.1f}x"


def emit_report(report: ExperimentReport, fmt: str = "json") -> bytes:
    """Serialize ``report`` as lossless JSON, per-fold CSV, or a markdown table."""
    fmt = fmt.lower()
    if fmt == "json":
        return _io.dumps(report.to_dict()).encode("utf-8")
    if fmt == "csv":
        rows = []
        for kind, r in report.results.items():
            for f, s in enumerate(r.fold_f1):
                rows.append([report.experiment_id, kind, f, repr(s)])
        return _io.csv_text(rows, header=["experiment", "classifier", "fold", "f1"]).encode("utf-8")
    if fmt in ("markdown", "md", "markdown-table"):
        lines = ["| Classifier | F1 Score gain | Speed-up gain |",
                 "|---|---|---|"]
        for kind in report.results:
            lines.append(f"| {DISPLAY.get(kind, kind)} | {_fmt_gain(report.f1_gain[kind])} "
                         f"| {_fmt_speedup(report.speedup_gain.get(kind))} |")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise UnsupportedFormat(f"report format {fmt!r} not in ('json', 'csv', 'markdown')")


def load_report(text: str | bytes) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(text))
