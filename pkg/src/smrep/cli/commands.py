"""
smrep/cli/commands.py
─────────────────────
Sub-commands of the ``smrep`` entry point.

Exit codes: 0 success, 1 runtime failure, 2 invalid configuration, 3 missing input file.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from smrep import __version__
from smrep.analysis.geometry import cluster_geometry
from smrep.analysis.kmeans import kmeans_fit, load_clusters, save_clusters
from smrep.analysis.pca import pca_fit
from smrep.analysis.reports import cluster_report, projection_frame, write_csv
from smrep.analysis.representation import load_representations, raw_sensor_representation, save_representations
from smrep.analysis.transfer import transfer
from smrep.contracts import Manifest, RunConfig, ScalePreset, derive_seed
from smrep.dataset.statistics import dataset_stats
from smrep.dataset.storage import export_csv, load_trajectory, save_trajectory
from smrep.dataset.trajectory import generate, split
from smrep.models.contracts import ArchitectureKind, ArchitectureSpec, TrainingConfig
from smrep.models.evaluation import encode, evaluate
from smrep.models.storage import load_network, save_model
from smrep.models.training import train
from smrep.nn.checkpoint import canonical_json
from smrep.pipeline.builtin import MANIFEST_NAME, snapshot_frame, verify_outputs
from smrep.pipeline.engine import run_experiment
from smrep.sim.environment import make_environment
from smrep.utils.exceptions import ConfigError, SmrepError
from smrep.utils.logger import set_level, setup_logger

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_MISSING_INPUT = 3

console = Console()
err_console = Console(stderr=True)
logger = setup_logger("smrep.cli")


# ─────────────────────────────────────────────
# generate
# ─────────────────────────────────────────────

def cmd_generate(args: argparse.Namespace) -> int:
    env = make_environment(args.env)
    traj = generate(env, args.steps, args.seed)
    out = save_trajectory(traj, args.out)
    stats = dataset_stats(traj)
    stats_path = out.with_name(f"{out.stem}_stats.json")
    stats_path.write_bytes(canonical_json(stats) + b"\n")
    if args.csv:
        export_csv(traj, out.with_suffix(".csv"), pose_limit=args.trajectory_points)
    if args.snapshots:
        rng = np.random.default_rng(derive_seed(args.seed, 1))
        steps = np.sort(rng.choice(len(traj), size=min(args.snapshots, len(traj)), replace=False))
        write_csv(snapshot_frame(traj, steps), out.with_name(f"{out.stem}_snapshots.csv"))
    console.print(
        f"wrote {out} ({len(traj)} steps in {env.name}, "
        f"{stats['occupancy_visited']}/{stats['occupancy_bins'] ** 2} cells visited, "
        f"{traj.clamp_count} clamped moves)"
    )
    return EXIT_OK


# ─────────────────────────────────────────────
# train / evaluate
# ─────────────────────────────────────────────

def _training_config(args: argparse.Namespace) -> TrainingConfig:
    data: dict[str, Any] = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        data = data.get("training", data)
    for field in ("batch_size", "learning_rate", "max_epochs", "patience", "horizon"):
        value = getattr(args, field)
        if value is not None:
            data[field] = value
    return TrainingConfig.model_validate(data)


def cmd_train(args: argparse.Namespace) -> int:
    config = _training_config(args)
    traj = load_trajectory(args.data, include_poses=False)
    init_seed = args.seed_init if args.seed_init is not None else derive_seed(args.seed, 0)
    shuffle_seed = args.seed_shuffle if args.seed_shuffle is not None else derive_seed(args.seed, 1)
    trained = train(
        ArchitectureSpec.for_kind(args.arch),
        traj,
        config,
        init_seed=init_seed,
        shuffle_seed=shuffle_seed,
        dataset_id=Path(args.data).name,
    )
    save_model(trained, args.out)
    console.print(
        f"{args.arch}: {len(trained.history)} epochs, best validation loss "
        f"{trained.provenance['best_val_loss']:.6g} at epoch {trained.best_epoch} → {args.out}"
    )
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    network = load_network(args.model)
    traj = load_trajectory(args.data, include_poses=False)
    splits = split(traj)
    steps = {
        "test": splits.test,
        "validation": splits.validation,
        "train": splits.train,
        "all": range(len(traj)),
    }[args.split]
    error = evaluate(network, traj, steps)
    console.print(f"{network.architecture_id} on {traj.env_name} ({args.split} split): {error:.6g}")
    return EXIT_OK


# ─────────────────────────────────────────────
# represent / cluster / transfer
# ─────────────────────────────────────────────

def cmd_represent(args: argparse.Namespace) -> int:
    traj = load_trajectory(args.data)
    if args.raw:
        reps = raw_sensor_representation(traj)
    else:
        if args.model is None:
            raise ConfigError("represent needs --model unless --raw is given")
        reps = encode(load_network(args.model), traj, model_id=Path(args.model).name)
    out = Path(args.out)
    stem = Path(args.data).stem
    path = save_representations(reps, out / f"{stem}.reps")
    write_csv(projection_frame(pca_fit(reps.codes), reps), out / f"{stem}_projection.csv")
    console.print(f"wrote {len(reps)} {reps.dims}-d codes to {path}")
    return EXIT_OK


def _single_reps_file(path: Path) -> Path:
    if path.is_file():
        return path
    if not path.exists():
        raise FileNotFoundError(f"representation path not found: {path}")
    found = sorted(path.glob("*.reps"))
    if len(found) != 1:
        raise ConfigError(f"--reps {path} must be a .reps file or a directory holding exactly one (found {len(found)})")
    return found[0]


def cmd_cluster(args: argparse.Namespace) -> int:
    reps_path = _single_reps_file(Path(args.reps))
    reps = load_representations(reps_path)
    model = kmeans_fit(reps.codes, args.k, args.seed, architecture=reps.architecture, env_name=reps.env_name)
    out = Path(args.out) if args.out else reps_path.parent
    save_clusters(model, out / "clusters.bin")
    write_csv(cluster_report(model, reps, args.samples, args.seed_sampling, model.labels), out / "cluster_report.csv")
    if args.env:
        write_csv(cluster_geometry(model.labels, reps, make_environment(args.env), model.k), out / "cluster_geometry.csv")
    console.print(f"k={model.k} clusters, inertia {model.inertia:.6g} after {model.n_iter} iterations → {out}")
    return EXIT_OK


def cmd_transfer(args: argparse.Namespace) -> int:
    encoder = load_network(args.encoder)
    clusters = load_clusters(args.clusters)
    traj = load_trajectory(args.data)
    result = transfer(encoder, clusters, traj, args.samples, args.seed_sampling)
    out = Path(args.out) if args.out else Path(args.clusters).parent / f"transfer_{Path(args.data).stem}.csv"
    write_csv(result.report, out)
    write_csv(
        cluster_geometry(result.labels, result.representations, traj.env, clusters.k),
        out.with_name(f"{out.stem}_geometry.csv"),
    )
    console.print(f"{result.source_env} → {result.target_env}: {result.coverage:.1%} of points labeled → {out}")
    return EXIT_OK


# ─────────────────────────────────────────────
# repro
# ─────────────────────────────────────────────

SEED_FIELDS = ("dataset", "init", "shuffle", "sampling", "clustering")


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Defaults ← config file ← command-line overrides, validated once at the end."""
    data: dict[str, Any] = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
    if args.scale is not None:
        data["scale"] = args.scale
    for name in ("steps", "replicates", "workers"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.out is not None:
        data["output_dir"] = args.out
    seeds = dict(data.get("seeds", {}))
    for name in SEED_FIELDS:
        value = getattr(args, f"seed_{name}")
        if value is not None:
            seeds[name] = value
    if seeds:
        data["seeds"] = seeds
    return RunConfig.model_validate(data)


def cmd_repro(args: argparse.Namespace) -> int:
    manifest: Optional[Manifest] = None
    if args.manifest:
        manifest = Manifest.model_validate_json(Path(args.manifest).read_text())
        config = manifest.config
        overrides = {"output_dir": args.out} if args.out else {}
        if args.workers:
            overrides["workers"] = args.workers
        config = RunConfig.model_validate({**config.model_dump(mode="json"), **overrides})
    else:
        config = build_run_config(args)

    run_dir = run_experiment(config)
    table = pd.read_csv(run_dir / "evaluation" / "table.csv")
    print_evaluation_table(table, config.train_environment)

    if manifest is not None:
        mismatched = verify_outputs(manifest, run_dir)
        if mismatched:
            err_console.print(f"[red]{len(mismatched)} outputs differ from the manifest:[/red]")
            for rel in mismatched:
                err_console.print(f"  {rel}")
            return EXIT_RUNTIME
        console.print(f"all {len(manifest.outputs)} outputs match the manifest")
    console.print(f"artifacts in {run_dir} (manifest: {run_dir / MANIFEST_NAME})")
    return EXIT_OK


def print_evaluation_table(table: pd.DataFrame, train_environment: str) -> None:
    """Rows = models, columns = test environments, as in the usual prediction-error table."""
    view = Table(title=f"Sensorimotor prediction error (trained on {train_environment})")
    for column in table.columns:
        view.add_column(str(column), justify="left" if column == "architecture" else "right")
    for row in table.itertuples(index=False):
        view.add_row(row[0], *(f"{v:.6f}" for v in row[1:]))
    console.print(view)


# ─────────────────────────────────────────────
# Parser
# ─────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smrep", description="Sensorimotor prediction and representation toolkit")
    parser.add_argument("--version", action="version", version=f"smrep {__version__}")
    parser.add_argument("--log-level", default=None, help="override SMREP_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate the exploration policy and write a trajectory")
    p.add_argument("--env", default="square", help="square | rooms1 | rooms2 | path to a JSON layout")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="output .smt file")
    p.add_argument("--csv", action="store_true", help="also export CSV (records and a pose excerpt)")
    p.add_argument("--trajectory-points", type=int, default=10_000, help="poses kept in the CSV excerpt")
    p.add_argument("--snapshots", type=int, default=0, help="perception snapshots to export")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("train", help="train one architecture on a trajectory")
    p.add_argument("--arch", required=True, choices=[k.value for k in ArchitectureKind])
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="model directory")
    p.add_argument("--seed", type=int, default=0, help="derives --seed-init and --seed-shuffle")
    p.add_argument("--seed-init", type=int, default=None)
    p.add_argument("--seed-shuffle", type=int, default=None)
    p.add_argument("--config", type=Path, default=None, help="JSON with training settings (or a run config)")
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="mean squared prediction error of a model on a trajectory")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--split", choices=["test", "validation", "train", "all"], default="test")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("represent", help="export sensory codes with poses")
    p.add_argument("--model", type=Path, default=None)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--raw", action="store_true", help="use the normalized sensors instead of a model")
    p.set_defaults(handler=cmd_represent)

    p = sub.add_parser("cluster", help="k-means over a representation set")
    p.add_argument("--reps", type=Path, required=True, help=".reps file or directory holding one")
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seed-sampling", type=int, default=0)
    p.add_argument("--samples", type=int, default=500, help="poses reported per cluster")
    p.add_argument("--env", default=None, help="layout for the corner / wall-end table")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("transfer", help="label another environment with an encoder's clusters")
    p.add_argument("--encoder", type=Path, required=True)
    p.add_argument("--clusters", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed-sampling", type=int, default=0)
    p.add_argument("--out", type=Path, default=None, help="report CSV")
    p.set_defaults(handler=cmd_transfer)

    p = sub.add_parser("repro", help="run the whole experiment")
    p.add_argument("--scale", choices=[s.value for s in ScalePreset], default=None)
    p.add_argument("--config", type=Path, default=None, help="run config JSON")
    p.add_argument("--manifest", type=Path, default=None, help="re-run a manifest and verify its outputs")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--replicates", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    for name in SEED_FIELDS:
        p.add_argument(f"--seed-{name}", type=int, default=None)
    p.set_defaults(handler=cmd_repro)
    return parser


def run(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (ValidationError, ConfigError) as exc:
        err_console.print(f"[red]invalid configuration:[/red] {exc}", markup=True)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        err_console.print(f"[red]missing input:[/red] {exc}")
        return EXIT_MISSING_INPUT
    except (SmrepError, json.JSONDecodeError) as exc:
        err_console.print(f"[red]{type(exc).__name__}:[/red] {exc}")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())
