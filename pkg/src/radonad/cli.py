"""Command-line front end: fit, score, eval, synth, ablate.

Every pipeline parameter lives in a flat JSON config; any key can be
overridden with a ``--key value`` flag (flags win).  Data goes to
standard output or named files, diagnostics and timings to standard
error, so command output stays byte-stable for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import fields, replace
from pathlib import Path

from radonad.config import RunConfig, load_config
from radonad.data import (
    LabeledDataset,
    TimeSeries,
    filter_by_length,
    merge_splits,
    parse_csv_series,
    parse_ts_file,
)
from radonad.detectors import (
    PointRegressor,
    fit_detector,
    fit_point_regressor,
    score_many,
    score_points,
    score_points_collective,
)
from radonad.evaluation import (
    DEFAULT_RATIOS,
    run_ablation,
    run_one_vs_rest,
    run_point_eval,
    run_synthetic_suite,
)
from radonad.modelfile import load_model, save_model
from radonad.parallel import ordered_map
from radonad.synthetic import (
    SCENARIOS,
    SynthConfig,
    generate,
    read_dataset,
    write_dataset,
)

_CONFIG_KEYS = tuple(f.name for f in fields(RunConfig))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads", type=int, default=1, help="worker cap; 1 gives the reference output"
    )
    group = parser.add_argument_group(
        "pipeline config", "flat JSON file plus per-key override flags (flags win)"
    )
    group.add_argument("--config", type=Path, default=None, help="JSON config file")
    for name in _CONFIG_KEYS:
        group.add_argument(
            "--" + name.replace("_", "-"),
            dest="cfg_" + name,
            default=None,
            metavar="V",
            help=f"override {name}",
        )


def _build_config(args: argparse.Namespace) -> RunConfig:
    overrides = {}
    for name in _CONFIG_KEYS:
        value = getattr(args, "cfg_" + name, None)
        if value is not None:
            overrides[name] = value
    return load_config(getattr(args, "config", None), overrides)


def _split_list(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _load_series(path: Path) -> tuple[list[TimeSeries], list[str] | None]:
    """Series from a .ts file, a .csv file, or a directory of .csv files.

    The second element carries class labels when the source is a .ts file.
    """
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
        if not files:
            raise FileNotFoundError(f"no .csv files under {path}")
        return [parse_csv_series(f.read_text(), series_id=f.stem) for f in files], None
    if path.suffix == ".ts":
        dataset = parse_ts_file(path.read_text())
        return list(dataset.series), list(dataset.labels)
    if path.suffix == ".csv":
        return [parse_csv_series(path.read_text(), series_id=path.stem)], None
    raise ValueError(f"unsupported data path {path}; expected .ts, .csv or a directory")


def _find_ts_pair(path: Path) -> tuple[Path, Path]:
    if path.is_dir():
        trains = sorted(path.glob("*_TRAIN.ts"))
        tests = sorted(path.glob("*_TEST.ts"))
        if len(trains) != 1 or len(tests) != 1:
            raise FileNotFoundError(
                f"{path} must contain exactly one *_TRAIN.ts and one *_TEST.ts"
            )
        return trains[0], tests[0]
    name = path.name
    if name.endswith("_TRAIN.ts"):
        return path, path.with_name(name[: -len("_TRAIN.ts")] + "_TEST.ts")
    if name.endswith("_TEST.ts"):
        return path.with_name(name[: -len("_TEST.ts")] + "_TRAIN.ts"), path
    raise ValueError(
        f"cannot infer a train/test pair from {path}; pass the _TRAIN.ts file or its directory"
    )


def _load_labeled_dataset(path: Path, cfg: RunConfig) -> LabeledDataset:
    train_path, test_path = _find_ts_pair(path)
    for p in (train_path, test_path):
        if not p.exists():
            raise FileNotFoundError(str(p))
    dataset = merge_splits(
        parse_ts_file(train_path.read_text(), split="train"),
        parse_ts_file(test_path.read_text(), split="test"),
    )
    if not dataset.name:
        dataset = replace(dataset, name=train_path.name[: -len("_TRAIN.ts")])
    return filter_by_length(dataset, cfg.min_length, cfg.max_length)


def _write_report(report: dict, out: Path | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_fit(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    series, labels = _load_series(args.data)
    if args.label is not None:
        if labels is None:
            raise ValueError("--label needs a class-labeled .ts input")
        series = [s for s, l in zip(series, labels) if l == args.label]
        if not series:
            raise ValueError(f"no training series carry label {args.label!r}")
    t0 = time.perf_counter()
    if args.kind == "detector":
        model = fit_detector(
            series, cfg.window(), cfg.radon(), cfg.detector(), epsilon=cfg.epsilon
        )
        detail = f"bank={len(series)}"
    else:
        model = fit_point_regressor(
            series,
            cfg.window(),
            cfg.radon(),
            context_len=cfg.context_len,
            ridge_lambda=cfg.ridge_lambda,
        )
        detail = f"lambda={model.ridge_lambda:g}"
    seconds = time.perf_counter() - t0
    save_model(model, args.out, run_config=cfg)
    dim = model.grid.n_projections * model.grid.n_bins
    print(
        f"[fit] kind={args.kind} n_series={len(series)} feature_dim={dim} "
        f"{detail} ({seconds:.2f}s) -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    model, doc = load_model(args.model)
    series, _ = _load_series(args.data)
    named = [
        (s.series_id or f"series_{i:04d}", s) for i, s in enumerate(series)
    ]
    t0 = time.perf_counter()
    if args.points:
        if isinstance(model, PointRegressor):
            score_fn = lambda s: score_points(model, s)
        else:
            stored = doc.get("config") or {}
            context_len = int(stored.get("context_len", RunConfig().context_len))
            score_fn = lambda s: score_points_collective(model, s, context_len)
        results = ordered_map(lambda pair: score_fn(pair[1]), named, args.threads)
        for (sid, _s), scores in zip(named, results):
            sys.stdout.write(
                json.dumps({"series_id": sid, "point_scores": scores.tolist()}) + "\n"
            )
    else:
        if isinstance(model, PointRegressor):
            raise ValueError("regressor models score points; pass --points")
        scores = score_many(model, [s for _sid, s in named], threads=args.threads)
        for (sid, _s), score in zip(named, scores):
            sys.stdout.write(json.dumps({"series_id": sid, "score": float(score)}) + "\n")
    print(
        f"[score] {len(named)} series ({time.perf_counter() - t0:.2f}s)",
        file=sys.stderr,
    )
    return 0


def _manifest_scenario(directory: Path) -> str:
    manifest = directory / "manifest.json"
    if not manifest.exists():
        raise ValueError(
            f"{directory} has no manifest.json; pass --scenario explicitly"
        )
    return json.loads(manifest.read_text())["scenario"]


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    t0 = time.perf_counter()
    if args.protocol == "one_vs_rest":
        if args.data is None:
            raise ValueError("one_vs_rest needs --data pointing at a .ts train/test pair")
        dataset = _load_labeled_dataset(args.data, cfg)
        report = run_one_vs_rest(dataset, cfg, threads=args.threads)
    elif args.data is not None:
        if args.train_data is None:
            raise ValueError(
                "point protocol on a dataset needs --train-data with anomaly-free series"
            )
        train_items = read_dataset(args.train_data)
        tainted = [it.series.series_id for it in train_items if it.point_labels.any()]
        if tainted:
            raise ValueError(f"--train-data series carry anomaly labels: {tainted[:3]}")
        test_items = read_dataset(args.data)
        scenario = args.scenario or _manifest_scenario(args.data)
        report = run_point_eval(
            [it.series for it in train_items],
            test_items,
            cfg,
            scenario,
            threads=args.threads,
        )
    else:
        scenarios = _split_list(args.scenarios) or list(SCENARIOS)
        ratios = [float(r) for r in _split_list(args.ratios)] or list(DEFAULT_RATIOS)
        report = run_synthetic_suite(
            cfg,
            scenarios=scenarios,
            ratios=ratios,
            n_train=args.n_train,
            n_test=args.n_test,
            n_trials=args.trials,
            threads=args.threads,
        )
    _write_report(report, args.out)
    target = args.out or "stdout"
    print(f"[eval] report -> {target} ({time.perf_counter() - t0:.2f}s)", file=sys.stderr)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = SynthConfig(
        scenario=args.scenario,
        ratio=args.ratio,
        length=args.length,
        amplitude=args.amplitude,
        period=args.period,
        noise=args.noise,
        segment_len=args.segment_len,
        edge_margin=args.edge_margin,
        trend_slope=args.trend_slope,
        seasonal_factor=args.seasonal_factor,
        contextual_shift=args.contextual_shift,
        seed=args.seed,
    )
    items = generate(cfg, args.n_series)
    write_dataset(items, args.out, cfg)
    labeled = sum(int(it.point_labels.sum()) for it in items)
    total = sum(it.point_labels.size for it in items)
    print(
        f"[synth] {len(items)} series -> {args.out} (labeled fraction {labeled / total:.3f})",
        file=sys.stderr,
    )
    return 0


_AXIS_VALUE_TYPE = {"projections": int, "bins": int, "scheme": str, "distance": str}


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    raw_values = _split_list(args.values)
    if not raw_values:
        raise ValueError("--values must list at least one value")
    values = [_AXIS_VALUE_TYPE[args.axis](v) for v in raw_values]
    seeds = [int(s) for s in _split_list(args.seeds)] or [cfg.seed]
    dataset = _load_labeled_dataset(args.data, cfg) if args.data else None
    t0 = time.perf_counter()
    rows = run_ablation(
        cfg,
        args.axis,
        values,
        seeds,
        n_train=args.n_train,
        n_test=args.n_test,
        threads=args.threads,
        dataset=dataset,
    )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["axis", "value", "mean_auc"] + [f"auc_seed{i}" for i in range(len(seeds))]
        )
        for row in rows:
            writer.writerow(
                [row["axis"], row["value"], f"{row['mean_auc']:.6f}"]
                + [f"{a:.6f}" for a in row["per_seed"]]
            )
    print(f"[ablate] {len(rows)} rows -> {args.out} ({time.perf_counter() - t0:.2f}s)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radonad",
        description="Distribution-based time series anomaly detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a detector or point regressor")
    p.add_argument("--data", type=Path, required=True, help=".ts file, .csv file or CSV directory")
    p.add_argument("--out", type=Path, required=True, help="model JSON path")
    p.add_argument("--kind", choices=("detector", "regressor"), default="detector")
    p.add_argument("--label", default=None, help="train only on this class (.ts input)")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score series with a saved model")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument(
        "--points",
        action="store_true",
        help="emit per-point scores (regressor models, or window scoring for detectors)",
    )
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="run an evaluation protocol, write a JSON report")
    p.add_argument("--protocol", choices=("one_vs_rest", "point"), required=True)
    p.add_argument("--data", type=Path, default=None, help="dataset path (see protocol help)")
    p.add_argument(
        "--train-data", type=Path, default=None, help="clean series for dataset point eval"
    )
    p.add_argument("--scenario", default=None, choices=SCENARIOS, help="override manifest scenario")
    p.add_argument("--scenarios", default=None, help="comma list for the synthetic suite")
    p.add_argument("--ratios", default=None, help="comma list of anomaly ratios")
    p.add_argument("--n-train", type=int, default=6)
    p.add_argument("--n-test", type=int, default=8)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", type=Path, default=None, help="report path (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--scenario", choices=SCENARIOS, default="shapelet")
    p.add_argument("--ratio", type=float, default=0.1)
    p.add_argument("--n-series", type=int, default=10)
    p.add_argument("--length", type=int, default=200)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--period", type=float, default=25.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--segment-len", type=int, default=20)
    p.add_argument("--edge-margin", type=int, default=20)
    p.add_argument("--trend-slope", type=float, default=0.05)
    p.add_argument("--seasonal-factor", type=float, default=0.5)
    p.add_argument("--contextual-shift", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ablate", help="sweep one config axis, write a CSV")
    p.add_argument("--axis", choices=sorted(_AXIS_VALUE_TYPE), required=True)
    p.add_argument("--values", required=True, help="comma list of axis values")
    p.add_argument("--seeds", default=None, help="comma list of seeds (default: config seed)")
    p.add_argument("--data", type=Path, default=None, help=".ts pair; default synthetic suite")
    p.add_argument("--n-train", type=int, default=6)
    p.add_argument("--n-test", type=int, default=8)
    p.add_argument("--out", type=Path, required=True, help="CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
