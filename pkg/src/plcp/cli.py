"""Experiment harness: dataset generation, paired runs, sweeps, inspection.

Config files are flat INI (``key = value`` under sections). Every ``run``
or ``sweep`` writes its resolved configuration next to the results for
provenance.

Seeding rule: each run seed expands into per-purpose streams through
``np.random.SeedSequence(seed).spawn(3)``, consumed in the fixed order
(dataset, split, base). Appending new consumers never perturbs the
existing streams.

Results CSV schema (one row per seed per method):
    method, seed, test_accuracy, transductive_accuracy,
    correction_ratio, miscorrection_ratio, iterations_run, wall_ms
"""

from __future__ import annotations

import argparse
import configparser
import csv
import itertools
import os
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .base import BaseClassifierKind
from .data import SyntheticSpec, generate_synthetic, load_dataset, save_dataset, split
from .engine import EngineConfig, run_base_alone, run_plcp
from .kernel import KernelSpec
from .metrics import MetricReport, accuracy, correction_metrics
from .partner import PartnerConfig

RESULT_FIELDS = (
    "method",
    "seed",
    "test_accuracy",
    "transductive_accuracy",
    "correction_ratio",
    "miscorrection_ratio",
    "iterations_run",
    "wall_ms",
)
SWEEP_AXES = ("lambda", "alpha", "gamma", "k", "flip_q", "k_neighbors")
OUTPUT_DIR_ENV = "PLCP_OUTPUT_DIR"


@dataclass(frozen=True)
class ExperimentConfig:
    engine: EngineConfig
    seeds: tuple[int, ...]
    train_frac: float
    outputs: Path
    emit_trajectories: bool
    synthetic: SyntheticSpec | None = None
    features_path: Path | None = None
    candidates_path: Path | None = None
    truth_path: Path | None = None

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.synthetic is None and self.features_path is None:
            raise ValueError("config needs a synthetic spec or dataset file paths")


def derive_streams(seed: int) -> tuple[int, int, int]:
    """Per-purpose child seeds, fixed order: (dataset, split, base)."""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(int(c.generate_state(1)[0]) for c in children)


# ---------------------------------------------------------------------------
# config parsing


def _get(cfg, section, key, conv, default):
    if cfg.has_option(section, key):
        raw = cfg.get(section, key)
        if conv is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return conv(raw)
    return default


def _parse_kernel(cfg) -> KernelSpec:
    kind = _get(cfg, "kernel", "kind", str, "gaussian").strip()
    sigma_raw = _get(cfg, "kernel", "sigma", str, "mean-pairwise").strip()
    sigma = None if sigma_raw == "mean-pairwise" else float(sigma_raw)
    ridge = _get(cfg, "partner", "ridge", float, 0.05)
    return KernelSpec(kind=kind, sigma=sigma, ridge=ridge)


def _parse_engine(cfg) -> EngineConfig:
    kernel_spec = _parse_kernel(cfg)
    base_kind = BaseClassifierKind(
        kind=_get(cfg, "base", "kind", str, "pl-knn").strip(),
        k_neighbors=_get(cfg, "base", "k_neighbors", int, 10),
        kernel=kernel_spec,
        binarize=_get(cfg, "base", "binarize", bool, False),
    )
    partner_cfg = PartnerConfig(
        ridge=_get(cfg, "partner", "ridge", float, 0.05),
        gamma=_get(cfg, "partner", "gamma", float, 2.0),
        inner_iters=_get(cfg, "partner", "inner_iters", int, 10),
        inner_tol=_get(cfg, "partner", "inner_tol", float, 1e-6),
        kernel=kernel_spec,
        aggressive=_get(cfg, "partner", "aggressive", bool, False),
    )
    return EngineConfig(
        alpha=_get(cfg, "engine", "alpha", float, 0.5),
        k=_get(cfg, "engine", "k", float, -1.0),
        max_iter=_get(cfg, "engine", "max_iter", int, 5),
        stop_change_frac=_get(cfg, "engine", "stop_change_frac", float, 0.05),
        base=base_kind,
        partner=partner_cfg,
        predict_from_base=_get(cfg, "engine", "predict_from_base", bool, False),
    )


def _read_ini(path: str | Path) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    found = cfg.read(path)
    if not found:
        raise FileNotFoundError(f"config file not found: {path}")
    return cfg


def parse_experiment_config(path: str | Path) -> ExperimentConfig:
    cfg = _read_ini(path)
    source = _get(cfg, "dataset", "source", str, "synthetic").strip()
    synthetic = None
    features = candidates = truth = None
    if source == "synthetic":
        synthetic = SyntheticSpec(
            n=_get(cfg, "dataset", "n", int, 500),
            d=_get(cfg, "dataset", "d", int, 8),
            l=_get(cfg, "dataset", "l", int, 5),
            flip_q=_get(cfg, "dataset", "flip_q", float, 0.3),
            cluster_spread=_get(cfg, "dataset", "cluster_spread", float, 1.0),
        )
    elif source == "files":
        features = Path(cfg.get("dataset", "features"))
        candidates = Path(cfg.get("dataset", "candidates"))
        if cfg.has_option("dataset", "truth"):
            truth = Path(cfg.get("dataset", "truth"))
    else:
        raise ValueError(f"unknown dataset source {source!r}")

    seeds = tuple(
        int(s) for s in _get(cfg, "run", "seeds", str, "1").split(",") if s.strip()
    )
    outputs = Path(
        os.environ.get(OUTPUT_DIR_ENV, _get(cfg, "run", "outputs", str, "results"))
    )
    return ExperimentConfig(
        engine=_parse_engine(cfg),
        seeds=seeds,
        train_frac=_get(cfg, "run", "train_frac", float, 0.5),
        outputs=outputs,
        emit_trajectories=_get(cfg, "run", "emit_trajectories", bool, False),
        synthetic=synthetic,
        features_path=features,
        candidates_path=candidates,
        truth_path=truth,
    )


def _resolved_ini(exp: ExperimentConfig) -> configparser.ConfigParser:
    out = configparser.ConfigParser()
    eng, prt, bs = exp.engine, exp.engine.partner, exp.engine.base
    out["dataset"] = (
        {
            "source": "synthetic",
            "n": str(exp.synthetic.n),
            "d": str(exp.synthetic.d),
            "l": str(exp.synthetic.l),
            "flip_q": repr(exp.synthetic.flip_q),
            "cluster_spread": repr(exp.synthetic.cluster_spread),
        }
        if exp.synthetic is not None
        else {
            "source": "files",
            "features": str(exp.features_path),
            "candidates": str(exp.candidates_path),
            **({"truth": str(exp.truth_path)} if exp.truth_path else {}),
        }
    )
    out["engine"] = {
        "alpha": repr(eng.alpha),
        "k": repr(eng.k),
        "max_iter": str(eng.max_iter),
        "stop_change_frac": repr(eng.stop_change_frac),
        "predict_from_base": str(eng.predict_from_base).lower(),
    }
    out["base"] = {
        "kind": bs.kind,
        "k_neighbors": str(bs.k_neighbors),
        "binarize": str(bs.binarize).lower(),
    }
    out["partner"] = {
        "ridge": repr(prt.ridge),
        "gamma": repr(prt.gamma),
        "inner_iters": str(prt.inner_iters),
        "inner_tol": repr(prt.inner_tol),
        "aggressive": str(prt.aggressive).lower(),
    }
    out["kernel"] = {
        "kind": prt.kernel.kind,
        "sigma": "mean-pairwise" if prt.kernel.sigma is None else repr(prt.kernel.sigma),
    }
    out["run"] = {
        "seeds": ",".join(str(s) for s in exp.seeds),
        "train_frac": repr(exp.train_frac),
        "outputs": str(exp.outputs),
        "emit_trajectories": str(exp.emit_trajectories).lower(),
    }
    return out


# ---------------------------------------------------------------------------
# running


def _method_names(exp: ExperimentConfig) -> tuple[str, str]:
    base_name = exp.engine.base.kind
    return base_name, f"{base_name}-plcp"


def run_seed(exp: ExperimentConfig, seed: int):
    """One seed's paired base / base-plcp comparison.

    Returns (result rows, trajectory rows).
    """
    dataset_seed, split_seed, base_seed = derive_streams(seed)
    if exp.synthetic is not None:
        dataset = generate_synthetic(replace(exp.synthetic, seed=dataset_seed))
    else:
        dataset = load_dataset(exp.features_path, exp.candidates_path, exp.truth_path)
    train, test = split(dataset, exp.train_frac, split_seed)
    has_truth = train.ground_truth is not None
    base_name, plcp_name = _method_names(exp)

    t0 = time.perf_counter()
    base_train, base_test = run_base_alone(train, test.features, exp.engine.base)
    base_ms = 1000.0 * (time.perf_counter() - t0)

    t0 = time.perf_counter()
    report = run_plcp(train, test.features, replace(exp.engine, seed=base_seed))
    plcp_ms = 1000.0 * (time.perf_counter() - t0)

    nan = float("nan")
    if has_truth:
        base_metrics = MetricReport(
            test_accuracy=accuracy(base_test, test.ground_truth),
            transductive_accuracy=accuracy(base_train, train.ground_truth),
            correction_ratio=0.0,
            miscorrection_ratio=0.0,
        )
        corr, miscorr = correction_metrics(
            base_train, report.train_predictions, train.ground_truth
        )
        plcp_metrics = MetricReport(
            test_accuracy=accuracy(report.test_predictions, test.ground_truth),
            transductive_accuracy=accuracy(report.train_predictions, train.ground_truth),
            correction_ratio=corr,
            miscorrection_ratio=miscorr,
        )
    else:
        base_metrics = MetricReport(nan, nan, nan, nan)
        plcp_metrics = MetricReport(nan, nan, nan, nan)

    def as_row(method, metrics, iterations, wall_ms):
        return {
            "method": method,
            "seed": seed,
            "test_accuracy": metrics.test_accuracy,
            "transductive_accuracy": metrics.transductive_accuracy,
            "correction_ratio": metrics.correction_ratio,
            "miscorrection_ratio": metrics.miscorrection_ratio,
            "iterations_run": iterations,
            "wall_ms": wall_ms,
        }

    rows = [
        as_row(base_name, base_metrics, 1, base_ms),
        as_row(plcp_name, plcp_metrics, report.iterations_run, plcp_ms),
    ]

    trajectory_rows = []
    if exp.emit_trajectories:
        for it, snap in enumerate(report.trajectories, start=1):
            for i in range(train.n_samples):
                trajectory_rows.append(
                    {
                        "seed": seed,
                        "iteration": it,
                        "sample": i,
                        "label": int(snap.labels[i]),
                        "truth_confidence": (
                            snap.truth_confidence[i]
                            if snap.truth_confidence is not None
                            else ""
                        ),
                        "max_false_positive_confidence": (
                            snap.max_false_confidence[i]
                            if snap.max_false_confidence is not None
                            else ""
                        ),
                    }
                )
    return rows, trajectory_rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, fields, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fields))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in fields})


def read_results_csv(path: str | Path) -> list[dict]:
    """Parse a results CSV back into typed rows (round-trips write_csv)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            parsed = dict(row)
            for key, value in row.items():
                if key in ("seed", "iterations_run", "iteration", "sample", "label"):
                    parsed[key] = int(value)
                elif key not in ("method",) and value != "":
                    try:
                        parsed[key] = float(value)
                    except ValueError:
                        pass
            out.append(parsed)
    return out


def summarize(rows) -> list[dict]:
    methods = sorted({r["method"] for r in rows})
    summary = []
    for method in methods:
        sub = [r for r in rows if r["method"] == method]
        entry = {"method": method, "n_seeds": len(sub)}
        for key in (
            "test_accuracy",
            "transductive_accuracy",
            "correction_ratio",
            "miscorrection_ratio",
            "iterations_run",
            "wall_ms",
        ):
            vals = np.array([float(r[key]) for r in sub])
            entry[f"{key}_mean"] = float(vals.mean())
            entry[f"{key}_std"] = float(vals.std())
        summary.append(entry)
    return summary


SUMMARY_FIELDS = ("method", "n_seeds") + tuple(
    f"{key}_{stat}"
    for key in (
        "test_accuracy",
        "transductive_accuracy",
        "correction_ratio",
        "miscorrection_ratio",
        "iterations_run",
        "wall_ms",
    )
    for stat in ("mean", "std")
)

TRAJECTORY_FIELDS = (
    "seed",
    "iteration",
    "sample",
    "label",
    "truth_confidence",
    "max_false_positive_confidence",
)


def run_experiment(exp: ExperimentConfig) -> int:
    """Run all seeds, write results/summary/trajectories, return exit code."""
    exp.outputs.mkdir(parents=True, exist_ok=True)
    rows, trajectory_rows, failures = [], [], []
    for seed in exp.seeds:
        try:
            seed_rows, seed_traj = run_seed(exp, seed)
        except Exception as exc:  # keep remaining seeds alive
            failures.append({"seed": seed, "error": f"{type(exc).__name__}: {exc}"})
            continue
        rows.extend(seed_rows)
        trajectory_rows.extend(seed_traj)

    write_csv(exp.outputs / "results.csv", RESULT_FIELDS, rows)
    write_csv(exp.outputs / "summary.csv", SUMMARY_FIELDS, summarize(rows))
    if exp.emit_trajectories:
        write_csv(exp.outputs / "trajectories.csv", TRAJECTORY_FIELDS, trajectory_rows)
    with open(exp.outputs / "resolved_config.ini", "w") as fh:
        _resolved_ini(exp).write(fh)
    if failures:
        write_csv(exp.outputs / "failures.csv", ("seed", "error"), failures)
        print(f"{len(failures)} of {len(exp.seeds)} seeds failed; see failures.csv",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# sweep


def _apply_axis(exp: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    eng = exp.engine
    if axis == "lambda":
        kernel_spec = replace(eng.partner.kernel, ridge=value)
        return replace(
            exp,
            engine=replace(
                eng, partner=replace(eng.partner, ridge=value, kernel=kernel_spec)
            ),
        )
    if axis == "alpha":
        return replace(exp, engine=replace(eng, alpha=value))
    if axis == "gamma":
        return replace(exp, engine=replace(eng, partner=replace(eng.partner, gamma=value)))
    if axis == "k":
        return replace(exp, engine=replace(eng, k=value))
    if axis == "flip_q":
        if exp.synthetic is None:
            raise ValueError("flip_q axis requires a synthetic dataset source")
        return replace(exp, synthetic=replace(exp.synthetic, flip_q=value))
    if axis == "k_neighbors":
        return replace(
            exp, engine=replace(eng, base=replace(eng.base, k_neighbors=int(value)))
        )
    raise ValueError(f"unknown sweep axis {axis!r}")


def run_sweep(config_path: str | Path) -> int:
    cfg = _read_ini(config_path)
    exp = parse_experiment_config(config_path)
    if not cfg.has_section("sweep"):
        raise ValueError("sweep command requires a [sweep] section")
    max_cells = _get(cfg, "sweep", "max_cells", int, 1000)
    axes = []
    for axis in SWEEP_AXES:
        if cfg.has_option("sweep", axis):
            values = [float(v) for v in cfg.get("sweep", axis).split(",") if v.strip()]
            axes.append((axis, values))
    if not axes:
        axes = [("__cell__", [0.0])]  # degenerate grid: a single cell
    n_cells = 1
    for _, values in axes:
        n_cells *= len(values)
    if n_cells > max_cells:
        print(
            f"sweep grid has {n_cells} cells, above the cap of {max_cells}; "
            "raise max_cells or shrink the grid",
            file=sys.stderr,
        )
        return 2

    exp.outputs.mkdir(parents=True, exist_ok=True)
    axis_names = [name for name, _ in axes if name != "__cell__"]
    rows, failures = [], []
    for combo in itertools.product(*(values for _, values in axes)):
        cell = exp
        cell_id = {}
        for (axis, _), value in zip(axes, combo):
            if axis == "__cell__":
                continue
            cell_id[axis] = value
            cell = _apply_axis(cell, axis, value)
        for seed in exp.seeds:
            try:
                seed_rows, _ = run_seed(cell, seed)
            except Exception as exc:
                failures.append(
                    {**cell_id, "seed": seed, "error": f"{type(exc).__name__}: {exc}"}
                )
                continue
            for row in seed_rows:
                rows.append({**cell_id, **row})

    fields = tuple(axis_names) + RESULT_FIELDS
    write_csv(exp.outputs / "sweep.csv", fields, rows)
    with open(exp.outputs / "resolved_config.ini", "w") as fh:
        out = _resolved_ini(exp)
        out["sweep"] = {name: cfg.get("sweep", name) for name, _ in axes if name != "__cell__"}
        out.write(fh)
    if failures:
        write_csv(
            exp.outputs / "failures.csv", tuple(axis_names) + ("seed", "error"), failures
        )
        print(f"{len(failures)} sweep runs failed; see failures.csv", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    cfg = _read_ini(args.spec)
    spec = SyntheticSpec(
        n=_get(cfg, "synthetic", "n", int, 100),
        d=_get(cfg, "synthetic", "d", int, 2),
        l=_get(cfg, "synthetic", "l", int, 3),
        flip_q=_get(cfg, "synthetic", "flip_q", float, 0.3),
        cluster_spread=_get(cfg, "synthetic", "cluster_spread", float, 1.0),
        seed=_get(cfg, "synthetic", "seed", int, 0),
    )
    out_dir = Path(
        os.environ.get(OUTPUT_DIR_ENV, _get(cfg, "output", "dir", str, "dataset"))
    )
    paths = save_dataset(generate_synthetic(spec), out_dir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_run(args) -> int:
    return run_experiment(parse_experiment_config(args.config))


def cmd_sweep(args) -> int:
    return run_sweep(args.config)


def cmd_inspect(args) -> int:
    dataset = load_dataset(args.features, args.candidates, args.truth)
    avg = dataset.candidates.sum(axis=1).mean()
    print(f"samples: {dataset.n_samples}")
    print(f"features: {dataset.n_features}")
    print(f"labels: {dataset.label_count}")
    print(f"avg candidates: {avg:.4f}")
    print(f"ground truth: {'present' if dataset.ground_truth is not None else 'absent'}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plcp",
        description="Partial-label learning experiments with a partner classifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset to CSV files")
    p.add_argument("spec", help="INI file with a [synthetic] section")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="paired base vs base-plcp runs over seeds")
    p.add_argument("config", help="experiment INI file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid sweep over hyper-parameters")
    p.add_argument("config", help="experiment INI file with a [sweep] section")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("inspect", help="print dataset statistics")
    p.add_argument("features")
    p.add_argument("candidates")
    p.add_argument("--truth", default=None)
    p.set_defaults(func=cmd_inspect)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
