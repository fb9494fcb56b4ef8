"""Batch command-line front end.

Commands read the CSV/JSON formats declared by the backing modules and
write their outputs plus a provenance manifest alongside. Plot rendering is
out of scope: every figure-shaped result is served as data (CSV/JSON).

Exit codes: 0 ok, 2 input error, 3 configuration error, 4 numeric failure.
The ``LOADLENS_SEED`` environment variable supplies the default seed when a
command takes one and ``--seed`` is not given.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import LoadlensError, NonFiniteLoss, ParseError, UnknownLabel
from .features import (
    ALL_FEATURES,
    correlation_matrix,
    extract_features,
    feature_matrix,
    read_features_csv,
    write_correlation_csv,
    write_features_csv,
)
from .ingest import (
    DEFAULT_ACTIVITIES,
    accel_magnitude,
    parse_accel_csv,
    parse_rr_csv,
    parse_sessions_csv,
    resolve_channel_path,
    rr_series,
    write_accel_csv,
    write_rr_csv,
)
from .learn import (
    PRESETS,
    DnnConfig,
    Standardizer,
    build_xy,
    decode_prediction,
    kmeans,
    load_model,
    run_training,
    save_model,
)
from .manifest import (
    manifest_path_for,
    manifest_path_for_dir,
    write_manifest,
)
from .momentplane import export_plane
from .stats import DEFAULT_STRIDE, DEFAULT_WINDOW, bootstrap, sliding_windows, write_windows_csv
from .synth import ACCEL_CLASSES, PROTOCOL_PRESETS, GenConfig, gen_accel, gen_rr, gen_sessions

DEFAULT_CLUSTER_COLUMNS = "acc_mean,acc_std,acc_skewness,acc_kurtosis"


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems as configuration errors (exit 3)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _default_seed() -> int:
    return int(os.environ.get("LOADLENS_SEED", "0"))


def _resolve_seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def cmd_moments(args) -> None:
    if args.channel == "accel":
        series = accel_magnitude(parse_accel_csv(args.input), center=args.center)
    else:
        if args.center:
            raise ValueError("--center applies to the accel channel only")
        series = rr_series(parse_rr_csv(args.input))
    windows = sliding_windows(series, args.window, args.stride)
    write_windows_csv(args.out, windows)
    write_manifest(
        manifest_path_for(args.out),
        "moments",
        {"channel": args.channel, "window": args.window, "stride": args.stride, "center": args.center},
        [args.input],
        [args.out],
    )


def cmd_plane(args) -> None:
    seed = _resolve_seed(args)
    rr = parse_rr_csv(args.input)
    series = rr_series(rr)
    windows = sliding_windows(series, args.window, args.stride)
    cloud = None
    if args.bootstrap > 0:
        last = windows[-1]
        values = series.value[last.start_index : last.start_index + last.length]
        cloud = bootstrap(values, args.bootstrap, seed, source_window=last)
    doc = export_plane(windows, rho=args.rho, tau=args.tau, bootstrap_cloud=cloud)
    _write_json(args.out, doc)
    write_manifest(
        manifest_path_for(args.out),
        "plane",
        {
            "window": args.window,
            "stride": args.stride,
            "bootstrap": args.bootstrap,
            "rho": args.rho,
            "tau": args.tau,
        },
        [args.input],
        [args.out],
        seed=seed,
    )


def cmd_features(args) -> None:
    metas = parse_sessions_csv(args.sessions)
    rows = []
    inputs = [args.sessions]
    for meta in metas:
        accel_path = resolve_channel_path(args.sessions, meta.accel_file)
        rr_path = resolve_channel_path(args.sessions, meta.rr_file)
        accel = accel_magnitude(parse_accel_csv(accel_path))
        rr = parse_rr_csv(rr_path)
        rows.append(extract_features(meta, accel, rr))
        inputs.extend([accel_path, rr_path])
    write_features_csv(args.out, rows)
    write_manifest(manifest_path_for(args.out), "features", {}, inputs, [args.out])


def _parse_columns(text: str) -> tuple[str, ...]:
    cols = tuple(c.strip() for c in text.split(",") if c.strip())
    unknown = [c for c in cols if c not in ALL_FEATURES]
    if unknown:
        raise ValueError(f"unknown feature columns: {', '.join(unknown)}")
    if not cols:
        raise ValueError("no feature columns given")
    return cols


def cmd_correlate(args) -> None:
    rows = read_features_csv(args.features)
    columns = _parse_columns(args.columns) if args.columns else ALL_FEATURES
    corr = correlation_matrix(rows, columns)
    write_correlation_csv(args.out, corr)
    write_manifest(
        manifest_path_for(args.out),
        "correlate",
        {"columns": list(columns)},
        [args.features],
        [args.out],
    )


def cmd_cluster(args) -> None:
    seed = _resolve_seed(args)
    rows = read_features_csv(args.features)
    columns = _parse_columns(args.columns)
    X = feature_matrix(rows, columns)
    keep = np.isfinite(X).all(axis=1)
    kept_rows = [r for r, k in zip(rows, keep) if k]
    std = Standardizer.fit(X[keep])
    result = kmeans(std.transform(X[keep]), k=args.k, seed=seed, feature_names=columns)
    doc = {
        "k": result.k,
        "columns": list(columns),
        "inertia": result.inertia,
        "n_iter": result.n_iter,
        "centroids_standardized": result.centroids.tolist(),
        "centroids": (result.centroids * std.stds + std.means).tolist(),
        "intensity_labels": {str(c): v for c, v in (result.intensity_labels or {}).items()},
        "assignments": [
            {
                "session_id": r.session_id,
                "activity": r.activity,
                "cluster": int(c),
                "intensity": (result.intensity_labels or {}).get(int(c)),
            }
            for r, c in zip(kept_rows, result.assignments)
        ],
    }
    _write_json(args.out, doc)
    write_manifest(
        manifest_path_for(args.out),
        "cluster",
        {"k": args.k, "columns": list(columns)},
        [args.features],
        [args.out],
        seed=seed,
    )


def _parse_hidden(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"bad --hidden {text!r}; expected comma-separated integers") from None
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError(f"--hidden sizes must be positive, got {text!r}")
    return sizes


def cmd_train(args) -> None:
    seed = _resolve_seed(args)
    rows = read_features_csv(args.features)
    config = DnnConfig(
        hidden=_parse_hidden(args.hidden),
        epochs=args.epochs,
        lr=args.lr,
        batch=args.batch,
        seed=seed,
    )
    model, report = run_training(rows, args.model, args.preset, config, split_seed=seed)
    os.makedirs(args.out_dir, exist_ok=True)
    stem = f"{args.model}_{args.preset}"
    model_path = os.path.join(args.out_dir, f"{stem}.model.json")
    report_path = os.path.join(args.out_dir, f"{stem}.report.json")
    losses_path = os.path.join(args.out_dir, f"{stem}.losses.csv")
    save_model(model, model_path)
    config_echo = {
        "model": args.model,
        "preset": args.preset,
        "hidden": list(config.hidden),
        "epochs": config.epochs,
        "lr": config.lr,
        "batch": config.batch,
        "seed": seed,
    }
    _write_json(report_path, {**report.to_dict(), "config": config_echo})
    with open(losses_path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_loss,val_loss\n")
        for epoch, (tl, vl) in enumerate(zip(report.train_loss, report.val_loss)):
            fh.write(f"{epoch},{tl!r},{vl!r}\n")
    write_manifest(
        manifest_path_for(os.path.join(args.out_dir, stem)),
        "train",
        config_echo,
        [args.features],
        [model_path, report_path, losses_path],
        seed=seed,
    )


def cmd_predict(args) -> None:
    model = load_model(args.model)
    rows = read_features_csv(args.features)
    X, y, kept = build_xy(rows, model.features)
    yhat = model.predict(X)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("session_id,activity,y_true,y_pred,predicted_activity\n")
        for r, yt, yp in zip(kept, y, yhat):
            cls = decode_prediction(float(yp))
            fh.write(f"{r.session_id},{r.activity},{yt!r},{yp!r},{DEFAULT_ACTIVITIES[cls]}\n")
    write_manifest(
        manifest_path_for(args.out),
        "predict",
        {"model_features": list(model.features), "kind": model.kind},
        [args.model, args.features],
        [args.out],
    )


def cmd_synth_sessions(args) -> None:
    seed = _resolve_seed(args)
    metas = gen_sessions(args.n, seed, args.out_dir)
    outputs = [os.path.join(args.out_dir, "sessions.csv")] + [
        os.path.join(args.out_dir, f)
        for m in metas
        for f in (m.accel_file, m.rr_file)
    ]
    write_manifest(
        manifest_path_for_dir(args.out_dir),
        "synth sessions",
        {"n": args.n},
        [],
        outputs,
        seed=seed,
    )


def cmd_synth_rr(args) -> None:
    seed = _resolve_seed(args)
    samples = gen_rr(PROTOCOL_PRESETS[args.preset], GenConfig(seed=seed))
    write_rr_csv(args.out, samples)
    write_manifest(
        manifest_path_for(args.out), "synth rr", {"preset": args.preset}, [], [args.out], seed=seed
    )


def cmd_synth_accel(args) -> None:
    seed = _resolve_seed(args)
    samples = gen_accel(args.activity_class, args.duration, GenConfig(seed=seed))
    write_accel_csv(args.out, samples)
    write_manifest(
        manifest_path_for(args.out),
        "synth accel",
        {"class": args.activity_class, "duration_s": args.duration},
        [],
        [args.out],
        seed=seed,
    )


def cmd_report(args) -> None:
    paths = sorted(glob.glob(os.path.join(args.in_dir, "*.report.json")))
    if not paths:
        raise FileNotFoundError(f"no *.report.json files in {args.in_dir}")
    entries = []
    for p in paths:
        with open(p, encoding="utf-8") as fh:
            doc = json.load(fh)
        entries.append(
            {
                "model": doc["model"],
                "preset": doc["preset"],
                "accuracy": doc["accuracy"],
                "accuracy_val": doc["accuracy_val"],
                "mae_val": doc["mae_val"],
                "mrd_val": doc["mrd_val"],
                "mae_pred": doc["mae_pred"],
                "mrd_pred": doc["mrd_pred"],
            }
        )
    _write_json(args.out, {"entries": entries, "n": len(entries)})
    write_manifest(manifest_path_for(args.out), "report", {}, paths, [args.out])


def _add_seed(p) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $LOADLENS_SEED or 0)")


def build_parser() -> _Parser:
    parser = _Parser(prog="loadlens", description=__doc__)
    parser.add_argument("--version", action="version", version=f"loadlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[], help="sliding-window moment statistics to CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--channel", choices=["accel", "rr"], required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    p.add_argument("--center", action="store_true", help="subtract the series mean (accel only)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("plane", help="moments-plane export (landmarks, zones, metrics) to JSON")
    p.add_argument("--input", required=True, help="rr.csv")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    p.add_argument("--bootstrap", type=int, default=0, metavar="B", help="cloud size for the final window")
    p.add_argument("--rho", type=float, default=0.3)
    p.add_argument("--tau", type=float, default=0.15)
    _add_seed(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_plane)

    p = sub.add_parser("features", help="per-session feature vectors to features.csv")
    p.add_argument("--sessions", required=True, help="sessions.csv")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_features)

    p = sub.add_parser("correlate", help="Pearson correlation matrix to CSV")
    p.add_argument("--features", required=True, help="features.csv")
    p.add_argument("--columns", default=None, help="comma-separated feature subset")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_correlate)

    p = sub.add_parser("cluster", help="k-means intensity clustering to JSON")
    p.add_argument("--features", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--columns", default=DEFAULT_CLUSTER_COLUMNS)
    _add_seed(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("train", help="fit and evaluate one model on one preset")
    p.add_argument("--features", required=True)
    p.add_argument("--model", choices=["lrm", "dnn"], required=True)
    p.add_argument("--preset", choices=sorted(PRESETS), default="all")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--hidden", default="16,16")
    _add_seed(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to features.csv")
    p.add_argument("--model", required=True, help="model.json")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("synth", help="deterministic synthetic data generators")
    ssub = p.add_subparsers(dest="synth_command", required=True)

    q = ssub.add_parser("sessions", help="full dataset: sessions.csv + channel files")
    q.add_argument("--n", type=int, required=True, help="sessions per class")
    _add_seed(q)
    q.add_argument("--out-dir", required=True)
    q.set_defaults(fn=cmd_synth_sessions)

    q = ssub.add_parser("rr", help="heartbeat protocol to rr.csv")
    q.add_argument("--preset", choices=sorted(PROTOCOL_PRESETS), required=True)
    _add_seed(q)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_synth_rr)

    q = ssub.add_parser("accel", help="accelerometer trace to accel.csv")
    q.add_argument("--class", dest="activity_class", choices=sorted(ACCEL_CLASSES), required=True)
    q.add_argument("--duration", type=float, default=60.0, help="seconds")
    _add_seed(q)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_synth_accel)

    p = sub.add_parser("report", help="merge train reports into one comparison JSON")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (ParseError, UnknownLabel, FileNotFoundError, IsADirectoryError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except NonFiniteLoss as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 4
    except (LoadlensError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
