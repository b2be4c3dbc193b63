"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import _io
from .bench import (CLASSIFIERS, EXPERIMENTS, BenchConfig, ExperimentContext,
                    ExperimentReport, emit_report, run_experiment)
from .connectivity import (adjacency, average_degree, cluster_order,
                           correlation_matrix, export_graph)
from .datasets import make_synthetic_recording
from .epochs import slice_windows
from .exceptions import DataError, EyeStateError
from .ingest import load_recording, summarize, write_csv
from .preprocess import center, remove_outliers
from .recording import Recording

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4
OUTPUT_ENV_VAR = "EYESTATE_OUTPUT_DIR"


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _int_at_least(lo):
    def parse(text):
        v = _positive_int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return parse


def _factor(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not v > 1:
        raise argparse.ArgumentTypeError(f"must be > 1, got {v}")
    return v


def _tau(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not -1 < v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (-1, 1), got {v}")
    return v


def _state(text):
    if text not in ("0", "1", "all"):
        raise argparse.ArgumentTypeError(f"must be 0, 1 or all, got {text!r}")
    return text


def _common(p: argparse.ArgumentParser, needs_input=True):
    if needs_input:
        p.add_argument("--input", "-i", required=True, help="ARFF or CSV recording")
        p.add_argument("--format", choices=("arff", "csv"), default=None,
                       help="override format detection by file suffix")
        p.add_argument("--sample-rate", type=_positive_int, default=128)
        p.add_argument("--outlier-factor", type=_factor, default=10.0)
    p.add_argument("--output-dir", "-o", default=os.environ.get(OUTPUT_ENV_VAR, "eyestate-out"))
    p.add_argument("--seed", type=int, default=0)


def _epoch_args(p):
    p.add_argument("--window-len", type=_int_at_least(2), default=384)
    p.add_argument("--windows", type=_positive_int, default=20)


def _selection_args(p):
    p.add_argument("--n-select", type=_positive_int, default=9)
    p.add_argument("--bins", type=_int_at_least(2), default=16)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eyestate",
        description="EEG eye-state data reduction and classifier speed-up benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="per-channel statistics and label counts")
    _common(p)

    p = sub.add_parser("preprocess", help="remove outliers and centre channels")
    _common(p)

    p = sub.add_parser("graph", help="correlation matrices and thresholded graphs")
    _common(p)
    p.add_argument("--tau", type=_tau, nargs="+", default=[0.6, 0.7, 0.8])
    p.add_argument("--state", type=_state, default="all")
    p.add_argument("--index-range", type=int, nargs=2, metavar=("START", "STOP"))

    p = sub.add_parser("select", help="per-window mRMR channel ranking")
    _common(p)
    _selection_args(p)
    _epoch_args(p)

    p = sub.add_parser("epoch", help="slice transition-centred windows")
    _common(p)
    _epoch_args(p)

    p = sub.add_parser("bench", help="run base/A/B/C experiments")
    _common(p)
    _selection_args(p)
    _epoch_args(p)
    p.add_argument("--experiment", choices=EXPERIMENTS + ("all",), default="all")
    p.add_argument("--k", type=_int_at_least(2), default=5, help="cross-validation folds")
    p.add_argument("--repeats", type=_positive_int, default=3)
    p.add_argument("--classifiers", nargs="+", choices=CLASSIFIERS, default=list(CLASSIFIERS))
    p.add_argument("--rf-trees", type=_positive_int, default=100)
    p.add_argument("--base-report", default=None,
                   help="reuse a previous base run (its bench_base.json)")

    p = sub.add_parser("report", help="render tables from bench outputs")
    _common(p, needs_input=False)
    p.add_argument("--reports-dir", default=None,
                   help="directory holding bench_*.json (default: --output-dir)")
    p.add_argument("--as", dest="fmt", choices=("markdown", "csv", "json"), default="markdown")

    p = sub.add_parser("synth", help="write a synthetic UCI-shaped recording as CSV")
    _common(p, needs_input=False)
    p.add_argument("--samples", type=_int_at_least(10), default=14980)
    return parser


def parse_args(argv=None) -> tuple[str, dict]:
    """Parse ``argv`` into ``(subcommand, run_config)``; usage errors exit with 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    if getattr(ns, "n_select", None) is not None and ns.n_select > 64:
        parser.error(f"argument --n-select: implausible channel count {ns.n_select}")
    config = {k: v for k, v in vars(ns).items()}
    return config.pop("command"), config


def _write(out: Path, name: str, data) -> Path:
    path = out / name
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    return path


def _load(cfg) -> Recording:
    path = Path(cfg["input"])
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    return load_recording(path, fmt=cfg["format"], sample_rate_hz=cfg["sample_rate"])


def _prepared(cfg):
    raw = _load(cfg)
    cleaned, report = remove_outliers(raw, cfg["outlier_factor"])
    return raw, center(cleaned), report


def _bench_config(cfg) -> BenchConfig:
    return BenchConfig(k=cfg["k"], seed=cfg["seed"], repeats=cfg["repeats"],
                       n_select=cfg["n_select"], bins=cfg["bins"],
                       window_len=cfg["window_len"], n_windows=cfg["windows"],
                       rf_trees=cfg["rf_trees"], classifiers=tuple(cfg["classifiers"]))


def _cmd_summarize(cfg, out):
    stats = summarize(_load(cfg))
    _write(out, "summary.json", stats.to_json(config=cfg))
    _write(out, "label_counts.csv", stats.counts_csv(config=cfg))
    print(f"{stats.n_samples} rows, labels {stats.label_counts}, {stats.transitions} transitions")


def _cmd_preprocess(cfg, out):
    raw, rec, report = _prepared(cfg)
    _write(out, "outliers.json", report.to_json(config=cfg))
    _write(out, "preprocessed.csv", write_csv(rec, config=cfg))
    print(f"removed {report.n_removed} of {raw.n_samples} rows -> {rec.n_samples}")


def _cmd_graph(cfg, out):
    _, rec, _ = _prepared(cfg)
    state = cfg["state"]
    corr = correlation_matrix(rec, state, index_range=cfg["index_range"])
    order = cluster_order(corr)
    _write(out, f"corr_state-{state}.csv", corr.to_csv(config=cfg))
    _write(out, f"corr_state-{state}_clustered.csv", corr.reorder(order).to_csv(config=cfg))
    metrics = {"state": state, "cluster_order": [corr.labels[i] for i in order], "graphs": []}
    comment = _io.config_comment(cfg)
    for tau in cfg["tau"]:
        g = adjacency(corr, tau, eye_state=state)
        stem = f"graph_state-{state}_tau-{tau}"
        _write(out, stem + ".edges", comment.encode() + export_graph(g, "edge-list"))
        _write(out, stem + ".dot", comment.replace("#", "//", 1).encode() + export_graph(g, "dot"))
        metrics["graphs"].append({"tau": tau, "edges": g.n_edges,
                                  "average_degree": average_degree(g)})
        print(f"state {state} tau {tau}: {g.n_edges} edges, average degree {average_degree(g):.3f}")
    metrics["config"] = cfg
    _write(out, f"graph_state-{state}_metrics.json", _io.dumps(metrics))


def _cmd_select(cfg, out):
    _, rec, _ = _prepared(cfg)
    bc = BenchConfig(seed=cfg["seed"], n_select=cfg["n_select"], bins=cfg["bins"],
                     window_len=cfg["window_len"], n_windows=cfg["windows"])
    ctx = ExperimentContext(rec, bc)
    _write(out, "selection_rankings.json",
           _io.dumps({"rankings": [r.to_dict() for r in ctx.rankings],
                      "windows": [list(w) for w in ctx.epochs.windows], "config": cfg}))
    agg = ctx.aggregate.to_dict()
    agg["selected"] = [rec.names[i] for i in ctx.selected]
    agg["config"] = cfg
    _write(out, "selection_aggregate.json", _io.dumps(agg))
    _write(out, "selection_matrix.csv", ctx.aggregate.matrix_csv(config=cfg))
    print("selected:", " ".join(agg["selected"]))


def _cmd_epoch(cfg, out):
    _, rec, _ = _prepared(cfg)
    eps = slice_windows(rec, cfg["window_len"], cfg["windows"], seed=cfg["seed"])
    _write(out, "epochs_manifest.json", eps.manifest_json(config=cfg))
    _write(out, "epochs_rows.csv", eps.rows_csv(config=cfg))
    _write(out, "epochs_window0.csv", eps.window_plot_csv(0, config=cfg))
    print(f"{len(eps.windows)} windows x {eps.window_len} = {eps.n_rows} rows")


def _save_report(out, report: ExperimentReport, cfg):
    stem = f"bench_{report.experiment_id}"
    det = report.deterministic_dict()
    det["run_config"] = cfg
    _write(out, stem + ".json", _io.dumps(det))
    timing = report.timing_dict()
    timing["run_config"] = cfg
    _write(out, stem + "_timing.json", _io.dumps(timing))
    _write(out, stem + "_folds.csv",
           _io.config_comment(cfg).encode() + emit_report(report, "csv"))
    _write(out, stem + "_table.md",
           _md_config(cfg).encode() + b"\n" + emit_report(report, "markdown"))


def _md_config(cfg) -> str:
    return f"<!-- config: {json.dumps(cfg, sort_keys=True)} -->"


def _merge(det: dict, timing: dict) -> ExperimentReport:
    d = json.loads(json.dumps(det))
    for kind, r in d["results"].items():
        r["wall_clock_seconds"] = timing["wall_clock_seconds"][kind]
        r["repeat_seconds"] = timing["repeat_seconds"][kind]
    d["speedup_gain"] = timing["speedup_gain"]
    d["environment"] = timing["environment"]
    return ExperimentReport.from_dict(d)


def _read_report(path: Path) -> ExperimentReport:
    det = json.loads(path.read_text())
    timing = json.loads(path.with_name(path.stem + "_timing.json").read_text())
    return _merge(det, timing)


def _cmd_bench(cfg, out):
    _, rec, _ = _prepared(cfg)
    bc = _bench_config(cfg)
    ctx = ExperimentContext(rec, bc)
    if cfg["base_report"]:
        base = _read_report(Path(cfg["base_report"]))
    else:
        base = run_experiment("base", rec, bc, context=ctx)
    _save_report(out, base, cfg)
    wanted = EXPERIMENTS[1:] if cfg["experiment"] == "all" else (cfg["experiment"],)
    for exp in wanted:
        if exp == "base":
            continue
        rep = run_experiment(exp, rec, bc, base_report=base, context=ctx)
        _save_report(out, rep, cfg)
    for exp in (("base",) + tuple(w for w in wanted if w != "base")):
        rep = base if exp == "base" else _read_report(out / f"bench_{exp}.json")
        print(f"experiment {exp} ({rep.n_rows} rows, {len(rep.channels)} channels)")
        print(emit_report(rep, "markdown").decode())


def _cmd_report(cfg, out):
    src = Path(cfg["reports_dir"] or out)
    reports = [_read_report(src / f"bench_{e}.json") for e in EXPERIMENTS
               if (src / f"bench_{e}.json").is_file()]
    if not reports:
        raise DataError(f"no bench_*.json reports in {src}")
    if cfg["fmt"] == "json":
        text = _io.dumps({"reports": [r.to_dict() for r in reports], "config": cfg})
        name = "report.json"
    elif cfg["fmt"] == "csv":
        text = _io.config_comment(cfg) + "".join(
            emit_report(r, "csv").decode().split("\n", 1)[1] if i else emit_report(r, "csv").decode()
            for i, r in enumerate(reports))
        name = "report.csv"
    else:
        parts = [_md_config(cfg)]
        for r in reports:
            parts.append(f"\n### Experiment {r.experiment_id} "
                         f"({r.n_rows} rows, {len(r.channels)} channels)\n")
            parts.append(emit_report(r, "markdown").decode())
        text = "\n".join(parts)
        name = "report.md"
    _write(out, name, text)
    print(text)


def _cmd_synth(cfg, out):
    rec = make_synthetic_recording(n_samples=cfg["samples"], seed=cfg["seed"])
    path = _write(out, "synthetic.csv", write_csv(rec))
    print(f"wrote {path}")


_COMMANDS = {
    "summarize": _cmd_summarize, "preprocess": _cmd_preprocess, "graph": _cmd_graph,
    "select": _cmd_select, "epoch": _cmd_epoch, "bench": _cmd_bench,
    "report": _cmd_report, "synth": _cmd_synth,
}


def dispatch(command: str, config: dict) -> int:
    """Run one subcommand; return the process exit status."""
    out = Path(config["output_dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[command](config, out)
    except (DataError, FileNotFoundError) as exc:
        print(f"eyestate {command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (EyeStateError, OSError) as exc:
        print(f"eyestate {command}: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    command, config = parse_args(argv)
    return dispatch(command, config)


if __name__ == "__main__":
    sys.exit(main())
