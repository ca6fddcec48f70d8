"""Command-line interface: dataset conversion, spectrum reports, the centering
sweep, and the cross-validated classification benchmark.

Configuration is a JSON file with nested keys; every value can be overridden
by a command-line flag, and flags win. Each command writes a manifest (the
resolved configuration, input hashes, and package version) next to its
outputs; rerunning from a manifest reproduces the outputs byte for byte.
"""

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import ClassPairTask, HsiCube, SpectralDataset, flatten_cube, load_csv, load_npy, save_csv, write_npy
from .experiment import (
    CvConfig,
    default_gamma_grid,
    find_crossing,
    run_classification,
    run_gamma_sweep,
    run_spectrum_report,
    sweep_to_csv,
)
from .eigen import export_spectrum_csv
from .pca import SCHEMES, canonical_scheme
from .svm import SmoSvc

DEFAULTS = {
    "data": {},
    "tasks": ["3/10", "2/11", "5/8"],
    "schemes": ["CL", "UC", "UC-skip", "C", "HC"],
    "components": [2, 3, 4, 5, 10],
    "gamma": 0.0,
    "gamma_hc": 0.95,
    "gamma_grid": "default",
    "cv": {"folds": 5, "seed": 0, "stratified": True},
    "svm": {"c": 1.0, "gamma": "scale", "tol": 1e-3, "max_passes": 1000, "seed": 0},
    "out": "out",
    "workers": 0,  # 0 = all available cores
}


def _deep_merge(base, override):
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _load_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    if "command" in data and "config" in data:
        data = data["config"]  # rerun from a manifest
    return data


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(path, command, config, inputs):
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_int_list(text):
    return [int(part) for part in str(text).split(",") if part != ""]


def _parse_tasks(items):
    return [ClassPairTask.parse(t) for t in items]


def _resolve_config(args, parser):
    config = _deep_merge(DEFAULTS, {})
    if getattr(args, "config", None):
        config = _deep_merge(config, _load_config_file(args.config))
    data = dict(config["data"])
    if getattr(args, "data", None):
        path = str(args.data)
        if path.endswith(".csv"):
            data = {"csv": path, "has_header": bool(getattr(args, "has_header", False))}
        else:
            data = {"samples": path, "labels": data.get("labels")}
    if getattr(args, "labels", None):
        data["labels"] = str(args.labels)
    if getattr(args, "cube", None):
        data["cube"] = str(args.cube)
    if getattr(args, "gt", None):
        data["gt"] = str(args.gt)
    if getattr(args, "classes", None):
        data["keep_classes"] = _parse_int_list(args.classes)
    config["data"] = data
    if getattr(args, "tasks", None):
        config["tasks"] = [t.strip() for t in str(args.tasks).split(",") if t.strip()]
    if getattr(args, "task", None):
        config["tasks"] = [str(args.task)]
    if getattr(args, "schemes", None):
        config["schemes"] = [s.strip() for s in str(args.schemes).split(",") if s.strip()]
    if getattr(args, "ks", None):
        config["components"] = _parse_int_list(args.ks)
    if getattr(args, "gamma", None) is not None:
        config["gamma"] = float(args.gamma)
    if getattr(args, "grid", None):
        config["gamma_grid"] = str(args.grid)
    if getattr(args, "folds", None):
        config["cv"] = dict(config["cv"], folds=int(args.folds))
    if getattr(args, "seed", None) is not None:
        config["cv"] = dict(config["cv"], seed=int(args.seed))
        config["svm"] = dict(config["svm"], seed=int(args.seed))
    if getattr(args, "svm_c", None) is not None:
        config["svm"] = dict(config["svm"], c=float(args.svm_c))
    if getattr(args, "svm_gamma", None):
        g = args.svm_gamma
        config["svm"] = dict(config["svm"], gamma=g if g == "scale" else float(g))
    if getattr(args, "out", None):
        config["out"] = str(args.out)
    if getattr(args, "workers", None) is not None:
        config["workers"] = int(args.workers)
    try:
        config["schemes"] = [canonical_scheme(s) for s in config["schemes"]]
    except ValueError as exc:
        parser.error(str(exc))
    return config


def _load_dataset(config):
    """Build the working dataset from the resolved config; returns the dataset
    and the list of input files that back it (for the manifest)."""
    data = config["data"]
    if data.get("cube") and data.get("gt"):
        cube = HsiCube(load_npy(data["cube"]), load_npy(data["gt"]))
        keep = data.get("keep_classes")
        if not keep:
            keep = sorted(
                {t.class_a for t in _parse_tasks(config["tasks"])}
                | {t.class_b for t in _parse_tasks(config["tasks"])}
            )
        dataset = flatten_cube(cube, keep)
        return dataset, [data["cube"], data["gt"]]
    if data.get("csv"):
        dataset = load_csv(
            data["csv"],
            has_header=bool(data.get("has_header", False)),
            label_column=data.get("label_column", "last"),
        )
        return dataset, [data["csv"]]
    if data.get("samples") and data.get("labels"):
        samples = load_npy(data["samples"])
        labels = load_npy(data["labels"])
        dataset = SpectralDataset(
            samples, labels, source=f"{data['samples']} + {data['labels']}"
        )
        return dataset, [data["samples"], data["labels"]]
    raise ValueError(
        "no dataset configured: provide cube+gt, a csv file, or a samples+labels NPY pair"
    )


def _parse_grid(spec):
    if spec == "default" or spec is None:
        return default_gamma_grid()
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    text = str(spec)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec must be start:stop:count, got {text!r}")
        return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
    return [float(v) for v in text.split(",") if v != ""]


def cmd_convert(args, parser):
    if not args.classes or not _parse_int_list(args.classes):
        parser.error("--classes must name at least one class id")
    keep = _parse_int_list(args.classes)
    cube = HsiCube(load_npy(args.cube), load_npy(args.gt))
    dataset = flatten_cube(cube, keep)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix == ".csv":
        save_csv(dataset, out)
        written = [out]
        stem = out.with_suffix("")
    else:
        stem = out
        data_path = Path(f"{out}.data.npy")
        labels_path = Path(f"{out}.labels.npy")
        if dataset.labels.max() > 32767:
            raise ValueError("class ids exceed the 16-bit range of the NPY label format")
        write_npy(data_path, dataset.samples)
        write_npy(labels_path, dataset.labels.astype("<i2"))
        written = [data_path, labels_path]
    meta = {
        "band_count": int(dataset.band_count),
        "class_counts": {str(k): v for k, v in dataset.class_counts().items()},
        "sample_count": int(dataset.sample_count),
        "source": {str(args.cube): _sha256(args.cube), str(args.gt): _sha256(args.gt)},
    }
    meta_path = Path(f"{stem}.meta.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(
        Path(f"{stem}.manifest.json"),
        "convert",
        {"cube": str(args.cube), "gt": str(args.gt), "out": str(args.out), "classes": keep},
        [args.cube, args.gt],
    )
    print(f"wrote {dataset.sample_count} samples x {dataset.band_count} bands:")
    for p in written + [meta_path]:
        print(f"  {p}")
    return 0


def cmd_eigen(args, parser):
    config = _resolve_config(args, parser)
    dataset, inputs = _load_dataset(config)
    task = ClassPairTask.parse(config["tasks"][0])
    gamma = float(config["gamma"])
    if not 0.0 <= gamma <= 1.0:
        parser.error(f"--gamma must lie in [0, 1], got {gamma}")
    report = run_spectrum_report(dataset, task, gamma)
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    spectrum_path = out / "spectrum.csv"
    export_spectrum_csv(report.decomposition_q, report.decomposition_rho, spectrum_path)
    _write_manifest(out / "eigen_manifest.json", "eigen", config, inputs)
    print(f"task={task} gamma={gamma:g} mu_norm={report.mu_norm:.6f}")
    print(f"shift0 max_rel_diff={report.shift0.max_rel_diff:.6g}")
    print(f"shift1 max_rel_diff={report.shift1.max_rel_diff:.6g}")
    print(f"spectra written to {spectrum_path}")
    return 0


def cmd_sweep(args, parser):
    config = _resolve_config(args, parser)
    dataset, inputs = _load_dataset(config)
    task = ClassPairTask.parse(config["tasks"][0])
    try:
        grid = _parse_grid(config["gamma_grid"])
        records = run_gamma_sweep(dataset, task, grid)
    except ValueError as exc:
        if "gamma grid" in str(exc) or "grid spec" in str(exc):
            parser.error(str(exc))
        raise
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    sweep_path = out / "sweep.csv"
    sweep_to_csv(records, sweep_path)
    _write_manifest(out / "sweep_manifest.json", "sweep", config, inputs)
    crossing = find_crossing(records)
    if crossing is None:
        print("no fidelity crossing on the grid")
    else:
        print(f"crossing gamma*={crossing[0]:.6f} mu_norm={crossing[1]:.6f}")
    print(f"sweep written to {sweep_path}")
    return 0


def cmd_classify(args, parser):
    config = _resolve_config(args, parser)
    dataset, inputs = _load_dataset(config)
    tasks = _parse_tasks(config["tasks"])
    cv_cfg = config["cv"]
    cv = CvConfig(
        folds=int(cv_cfg["folds"]),
        seed=int(cv_cfg["seed"]),
        stratified=bool(cv_cfg["stratified"]),
    )
    svm_cfg = config["svm"]
    svm = SmoSvc(
        C=float(svm_cfg["c"]),
        gamma=svm_cfg["gamma"] if svm_cfg["gamma"] == "scale" else float(svm_cfg["gamma"]),
        tol=float(svm_cfg["tol"]),
        max_passes=int(svm_cfg["max_passes"]),
        random_state=int(svm_cfg["seed"]),
    )
    workers = int(config["workers"]) or (os.cpu_count() or 1)
    report = run_classification(
        dataset,
        tasks,
        config["schemes"],
        config["components"],
        cv=cv,
        svm=svm,
        gamma_hc=float(config["gamma_hc"]),
        n_workers=workers,
    )
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.csv"
    report.to_csv(report_path)
    _write_manifest(out / "classify_manifest.json", "classify", config, inputs)
    print(report.render_table())
    print(f"report written to {report_path}")
    failed = report.failed_rows
    if failed:
        print(f"{len(failed)} cell(s) failed", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qcovpca",
        description=(
            "Covariance preprocessing analysis and SVM benchmarking for "
            "hyperspectral classification"
        ),
    )
    parser.add_argument("--version", action="version", version=f"qcovpca {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    convert = sub.add_parser("convert", help="flatten a labeled cube into a dataset file")
    convert.add_argument("--cube", required=True, help="NPY file with the H x W x B cube")
    convert.add_argument("--gt", required=True, help="NPY file with the H x W ground truth")
    convert.add_argument("--out", required=True, help="output path (stem for an NPY pair, or *.csv)")
    convert.add_argument("--classes", required=True, help="comma-separated class ids to keep")
    convert.set_defaults(func=cmd_convert)

    def add_common(p):
        p.add_argument("--config", help="JSON config file (or a previously written manifest)")
        p.add_argument("--data", help="dataset file: samples NPY or CSV")
        p.add_argument("--labels", help="labels NPY (with --data NPY)")
        p.add_argument("--has-header", action="store_true", help="CSV input has a header row")
        p.add_argument("--cube", help="cube NPY (alternative to --data)")
        p.add_argument("--gt", help="ground-truth NPY (with --cube)")
        p.add_argument("--classes", help="comma-separated class ids to keep from the cube")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="seed for fold shuffling and SVM tie-breaking")
        p.add_argument("--workers", type=int, help="parallel workers for the benchmark grid")

    eigen = sub.add_parser("eigen", help="compare classical and quantum covariance spectra")
    add_common(eigen)
    eigen.add_argument("--task", help="class pair 'a/b' (default: first configured task)")
    eigen.add_argument("--gamma", type=float, help="centering strength in [0, 1]")
    eigen.set_defaults(func=cmd_eigen)

    sweep = sub.add_parser("sweep", help="sweep centering strength and track eigenvector fidelity")
    add_common(sweep)
    sweep.add_argument("--task", help="class pair 'a/b'")
    sweep.add_argument("--grid", help="'default', 'start:stop:count', or comma-separated values")
    sweep.set_defaults(func=cmd_sweep)

    classify = sub.add_parser("classify", help="cross-validated scheme/SVM accuracy grid")
    add_common(classify)
    classify.add_argument("--tasks", help="comma-separated class pairs, e.g. '3/10,2/11'")
    classify.add_argument("--schemes", help=f"comma-separated subset of {', '.join(SCHEMES)}")
    classify.add_argument("--ks", help="comma-separated component counts")
    classify.add_argument("--folds", type=int, help="cross-validation folds")
    classify.add_argument("--svm-c", type=float, help="SVM box constraint C")
    classify.add_argument("--svm-gamma", help="'scale' or a positive RBF width")
    classify.set_defaults(func=cmd_classify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (FileNotFoundError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
