"""
smrep/pipeline/builtin.py
─────────────────────────
All built-in stage implementations live here.
Adding a new stage = add a class below + register it in registry.py.
"""
from __future__ import annotations

import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path
from typing import Any, Iterator

import numpy as np
import pandas as pd

from smrep import __version__
from smrep.analysis.geometry import (
    CORNER_CLUSTER_SHARE,
    CORNER_TRANSFER_SHARE,
    WALL_END_CLUSTER_SHARE,
    best_cluster,
    cluster_geometry,
    corner_concentration,
    nothing_perceived_spread,
)
from smrep.analysis.kmeans import kmeans_fit, load_clusters, save_clusters
from smrep.analysis.pca import pca_fit
from smrep.analysis.reports import cluster_report, projection_frame, write_csv
from smrep.analysis.representation import (
    RAW_SENSORS,
    load_representations,
    raw_sensor_representation,
    save_representations,
)
from smrep.analysis.transfer import transfer
from smrep.contracts import Manifest, derive_seed
from smrep.dataset.statistics import dataset_stats
from smrep.dataset.storage import export_csv, load_trajectory, pose_sidecar, save_trajectory
from smrep.dataset.trajectory import generate
from smrep.models.contracts import ArchitectureSpec, TrainingConfig
from smrep.models.evaluation import encode, evaluate
from smrep.models.storage import load_network, save_model
from smrep.models.training import train
from smrep.nn.checkpoint import canonical_json
from smrep.pipeline.base import BaseStage, RunContext, sha256_file
from smrep.sim.agent import perceived_points
from smrep.sim.environment import make_environment
from smrep.utils.exceptions import AnalysisError

MANIFEST_NAME = "manifest.json"
CONFIG_NAME = "config.json"
VERSIONED_PACKAGES = ["numpy", "scipy", "pandas", "pydantic"]


def write_json(path: Path, payload: Any) -> Path:
    path.write_bytes(canonical_json(payload) + b"\n")
    return path


# ─────────────────────────────────────────────
# Stage 1: datasets
# ─────────────────────────────────────────────

class GenerateStage(BaseStage):
    """One trajectory per environment, with statistics, a pose excerpt and perception snapshots."""

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        for index, (layout, key) in enumerate(zip(cfg.environments, context.env_keys)):
            env = make_environment(layout)
            traj = generate(env, cfg.total_steps, derive_seed(cfg.seeds.dataset, index))
            path = save_trajectory(traj, context.path("data", f"{key}.smt"))
            context.datasets[key] = path
            self._emit(path, pose_sidecar(path))

            stats = dataset_stats(traj)
            self._emit(write_json(context.path("data", f"{key}_stats.json"), stats))
            if cfg.trajectory_points:
                self._emit(*export_csv(traj, context.path("data", f"{key}.csv"), pose_limit=cfg.trajectory_points))
            if cfg.snapshots:
                self._emit(self._snapshots(context, traj, key, derive_seed(cfg.seeds.sampling, index)))
            yield {"environment": key, "steps": len(traj), "clamp_count": traj.clamp_count}

    def _snapshots(self, context: RunContext, traj, key: str, seed: int) -> Path:
        rng = np.random.default_rng(seed)
        steps = np.sort(rng.choice(len(traj), size=min(context.config.snapshots, len(traj)), replace=False))
        frame = snapshot_frame(traj, steps)
        return write_csv(frame, context.path("data", f"{key}_snapshots.csv"))


def snapshot_frame(traj, steps: np.ndarray) -> pd.DataFrame:
    """Agent-frame endpoints of every ray that hit a wall, for each chosen step."""
    rows = []
    for t in steps:
        for x, y in perceived_points(traj.sensors[t]):
            rows.append((int(t), float(x), float(y)))
    return pd.DataFrame(rows, columns=["t", "x", "y"])


# ─────────────────────────────────────────────
# Stage 2: training
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class TrainJob:
    kind: str
    replicate: int
    dataset: str
    out_dir: str
    training: dict
    init_seed: int
    shuffle_seed: int
    dataset_id: str


def run_train_job(job: TrainJob) -> list[str]:
    """Top-level so it pickles into worker processes."""
    traj = load_trajectory(job.dataset, include_poses=False)
    spec = ArchitectureSpec.for_kind(job.kind)
    trained = train(
        spec,
        traj,
        TrainingConfig.model_validate(job.training),
        init_seed=job.init_seed,
        shuffle_seed=job.shuffle_seed,
        dataset_id=job.dataset_id,
    )
    return [str(p) for p in save_model(trained, job.out_dir)]


class TrainStage(BaseStage):
    """Every (architecture, replicate) pair on the training environment; parallel when workers > 1."""

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        dataset = context.datasets[context.train_key]
        dataset_id = sha256_file(dataset)[:16]
        jobs = []
        for kind in cfg.architectures:
            for r in range(cfg.replicates):
                out_dir = context.run_dir / "models" / kind.value / f"r{r}"
                context.models[(kind, r)] = out_dir
                jobs.append(
                    TrainJob(
                        kind=kind.value,
                        replicate=r,
                        dataset=str(dataset),
                        out_dir=str(out_dir),
                        training=cfg.training.model_dump(mode="json"),
                        init_seed=derive_seed(cfg.seeds.init, r),
                        shuffle_seed=derive_seed(cfg.seeds.shuffle, r),
                        dataset_id=dataset_id,
                    )
                )

        if cfg.workers > 1:
            self.logger.info(f"training {len(jobs)} models on {cfg.workers} workers")
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for job, written in zip(jobs, pool.map(run_train_job, jobs)):
                    self._emit(*(Path(p) for p in written))
                    yield {"architecture": job.kind, "replicate": job.replicate}
        else:
            for job in jobs:
                self._emit(*(Path(p) for p in run_train_job(job)))
                yield {"architecture": job.kind, "replicate": job.replicate}


# ─────────────────────────────────────────────
# Stage 3: evaluation table
# ─────────────────────────────────────────────

class EvaluateStage(BaseStage):
    """Test-split error of every model on every environment; medians over replicates."""

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        tests = {key: load_trajectory(context.datasets[key], include_poses=False) for key in context.env_keys}
        rows = []
        for (kind, r), model_dir in context.models.items():
            network = load_network(model_dir)
            for key, traj in tests.items():
                error = evaluate(network, traj)
                rows.append((kind.value, r, key, error))
            yield {"architecture": kind.value, "replicate": r}

        errors = pd.DataFrame(rows, columns=["architecture", "replicate", "environment", "error"])
        table = evaluation_table(errors, [k.value for k in cfg.architectures], context.env_keys)
        self._emit(
            write_csv(errors, context.path("evaluation", "errors.csv")),
            write_csv(table, context.path("evaluation", "table.csv")),
        )
        self._summary = {"train_environment": context.train_key, "table": table.to_dict(orient="records")}


def evaluation_table(errors: pd.DataFrame, architectures: list[str], environments: list[str]) -> pd.DataFrame:
    """Rows = architectures, columns = environments, cells = median error over replicates."""
    medians = errors.groupby(["architecture", "environment"])["error"].median().unstack("environment")
    table = medians.reindex(index=architectures, columns=environments)
    table.index.name = "architecture"
    table.columns.name = None
    return table.reset_index()


# ─────────────────────────────────────────────
# Stage 4: representations
# ─────────────────────────────────────────────

def unit_parts(architecture: str, replicate: int) -> tuple[str, ...]:
    """Output sub-directory of one representation set: the raw baseline has no replicates."""
    return (architecture,) if architecture == RAW_SENSORS else (architecture, f"r{replicate}")


def majority(replicates: int) -> int:
    """Replicates that must agree for a phenomenon to count, e.g. 2 of 3."""
    return replicates // 2 + 1


class RepresentStage(BaseStage):
    """Sensory codes of every trained model on every environment, plus PCA projections."""

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        for key in context.env_keys:
            traj = load_trajectory(context.datasets[key])
            units = [
                (encode(load_network(context.models[(kind, r)]), traj, model_id=f"{kind.value}/r{r}"), r)
                for kind in cfg.architectures
                for r in range(cfg.replicates)
            ]
            if cfg.analysis.raw_baseline:
                units.append((raw_sensor_representation(traj), 0))
            written = 0
            for reps, r in units:
                try:
                    projection = projection_frame(pca_fit(reps.codes), reps)
                except AnalysisError as exc:
                    self.logger.warning(f"{reps.model_id} on {key} skipped: {exc}")
                    continue
                parts = unit_parts(reps.architecture, r)
                path = save_representations(reps, context.path("reps", *parts, f"{key}.reps"))
                csv = write_csv(projection, context.path("reps", *parts, f"{key}_projection.csv"))
                context.representations[(reps.architecture, r, key)] = path
                self._emit(path, csv)
                written += 1
            yield {"environment": key, "sets": written}


# ─────────────────────────────────────────────
# Stage 5: clusters
# ─────────────────────────────────────────────

class ClusterStage(BaseStage):
    """
    k-means on each training-environment representation set, with pose reports and
    geometric checks per replicate, then a summary across replicates per architecture.
    """

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        env = load_trajectory(context.datasets[context.train_key], include_poses=False).env
        architectures = [k.value for k in cfg.architectures] + ([RAW_SENSORS] if cfg.analysis.raw_baseline else [])
        for architecture in architectures:
            replicates = 1 if architecture == RAW_SENSORS else cfg.replicates
            per_replicate = []
            for r in range(replicates):
                reps_path = context.representations.get((architecture, r, context.train_key))
                if reps_path is None:
                    continue
                reps = load_representations(reps_path)
                model = kmeans_fit(
                    reps.codes,
                    cfg.analysis.k,
                    derive_seed(cfg.seeds.clustering, r),
                    architecture=architecture,
                    env_name=reps.env_name,
                )
                parts = unit_parts(architecture, r)
                path = save_clusters(model, context.path("clusters", *parts, "clusters.bin"))
                context.clusters[(architecture, r)] = path
                report = cluster_report(model, reps, cfg.analysis.samples_per_cluster, cfg.seeds.sampling, model.labels)
                geometry = cluster_geometry(
                    model.labels, reps, env, model.k, cfg.analysis.corner_radius, cfg.analysis.facing_tolerance
                )
                summary = {"replicate": r, **replicate_summary(model.labels, reps, geometry, env)}
                self._emit(
                    path,
                    write_csv(report, context.path("clusters", *parts, "report.csv")),
                    write_csv(geometry, context.path("clusters", *parts, "geometry.csv")),
                )
                if len(parts) > 1:
                    self._emit(write_json(context.path("clusters", *parts, "summary.json"), summary))
                per_replicate.append(summary)
                yield {"architecture": architecture, "replicate": r, "inertia": model.inertia, "iterations": model.n_iter}

            if not per_replicate:
                self.logger.warning(f"{architecture}: no representation of {context.train_key} to cluster")
                continue
            summary = across_replicates(per_replicate, env)
            self._check(architecture, summary)
            self._emit(write_json(context.path("clusters", architecture, "summary.json"), summary))
            self._summary[architecture] = summary

    def _check(self, architecture: str, summary: dict[str, Any]) -> None:
        needed = majority(summary["replicates"])
        self.logger.info(
            f"{architecture}: corner cluster in {summary['corner_cluster_replicates']} of "
            f"{summary['replicates']} replicates"
        )
        wall_end = summary["wall_end_cluster_replicates"]
        if wall_end is not None and wall_end < needed:
            self.logger.warning(
                f"{architecture}: a cluster with {WALL_END_CLUSTER_SHARE:.0%} of its members near a wall end "
                f"appears in {wall_end} of {summary['replicates']} replicates, fewer than {needed}"
            )


def replicate_summary(labels, reps, geometry: pd.DataFrame, env) -> dict[str, Any]:
    """Checkable cluster phenomena of one clustering."""
    spread = nothing_perceived_spread(labels, reps)
    summary = {
        "nothing_perceived_records": spread.records,
        "nothing_perceived_clusters": spread.clusters_spanned,
        "nothing_perceived_dominant_share": spread.dominant_share,
        "corner_cluster": best_cluster(geometry, "corner_share", CORNER_CLUSTER_SHARE),
        "wall_end_cluster": None,
    }
    if len(env.wall_ends()):
        summary["wall_end_cluster"] = best_cluster(geometry, "wall_end_share", WALL_END_CLUSTER_SHARE)
    return summary


def across_replicates(per_replicate: list[dict[str, Any]], env) -> dict[str, Any]:
    """Seed medians and counts of the replicates in which each phenomenon appears."""
    frame = pd.DataFrame(per_replicate)
    has_wall_ends = len(env.wall_ends()) > 0
    return {
        "replicates": len(per_replicate),
        "nothing_perceived_clusters_median": float(frame["nothing_perceived_clusters"].median()),
        "nothing_perceived_dominant_share_median": float(frame["nothing_perceived_dominant_share"].median()),
        "corner_cluster_replicates": int(frame["corner_cluster"].notna().sum()),
        "wall_end_cluster_replicates": int(frame["wall_end_cluster"].notna().sum()) if has_wall_ends else None,
        "per_replicate": per_replicate,
    }


# ─────────────────────────────────────────────
# Stage 6: transfer
# ─────────────────────────────────────────────

class TransferStage(BaseStage):
    """Training-environment encoder + clusters of every replicate applied to every environment."""

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        kind = cfg.analysis.transfer_architecture
        if kind not in cfg.architectures:
            self.logger.warning(f"transfer skipped: '{kind.value}' is not among the trained architectures")
            return
        source = context.train_key
        targets = {key: load_trajectory(context.datasets[key]) for key in context.env_keys}
        per_target: dict[str, list[dict[str, Any]]] = {key: [] for key in targets}

        for r in range(cfg.replicates):
            if (kind.value, r) not in context.clusters:
                self.logger.warning(f"transfer of {kind.value}/r{r} skipped: it was not clustered")
                continue
            encoder = load_network(context.models[(kind, r)])
            clusters = load_clusters(context.clusters[(kind.value, r)])
            source_geometry = pd.read_csv(context.run_dir.joinpath("clusters", *unit_parts(kind.value, r), "geometry.csv"))
            corner = best_cluster(source_geometry, "corner_share", CORNER_CLUSTER_SHARE)
            for key, traj in targets.items():
                result = transfer(encoder, clusters, traj, cfg.analysis.samples_per_cluster, cfg.seeds.sampling)
                geometry = cluster_geometry(
                    result.labels,
                    result.representations,
                    traj.env,
                    clusters.k,
                    cfg.analysis.corner_radius,
                    cfg.analysis.facing_tolerance,
                )
                corner_share = None
                if corner is not None:
                    members = result.representations.poses[result.labels == corner]
                    corner_share = corner_concentration(
                        members, traj.env, cfg.analysis.corner_radius, cfg.analysis.facing_tolerance
                    )
                parts = unit_parts(kind.value, r)
                self._emit(
                    write_csv(result.report, context.path("transfer", *parts, f"{source}_to_{key}.csv")),
                    write_csv(geometry, context.path("transfer", *parts, f"{source}_to_{key}_geometry.csv")),
                )
                per_target[key].append(
                    {"replicate": r, "coverage": result.coverage, "corner_cluster": corner, "corner_share": corner_share}
                )
                yield {"source": source, "target": key, "replicate": r, "coverage": result.coverage}

        for key, rows in per_target.items():
            self._summary[key] = {
                "replicates": len(rows),
                "min_coverage": min((row["coverage"] for row in rows), default=None),
                "corner_persists_replicates": sum(
                    1 for row in rows if row["corner_share"] is not None and row["corner_share"] >= CORNER_TRANSFER_SHARE
                ),
                "per_replicate": rows,
            }
        self._emit(write_json(context.path("transfer", kind.value, "summary.json"), self._summary))


# ─────────────────────────────────────────────
# Stage 7: manifest
# ─────────────────────────────────────────────

def package_versions() -> dict[str, str]:
    versions = {"smrep": __version__, "python": platform.python_version()}
    for name in VERSIONED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class ManifestStage(BaseStage):
    """Hashes every output so a rerun can be checked byte for byte."""

    def _run(self, context: RunContext) -> Iterator[dict[str, Any]]:
        cfg = context.config
        outputs = {context.relative(p): sha256_file(p) for p in sorted(set(context.outputs))}
        manifest = Manifest(
            config=cfg,
            config_hash=cfg.config_hash(),
            versions=package_versions(),
            seeds=cfg.seeds,
            outputs=outputs,
        )
        path = context.run_dir / MANIFEST_NAME
        path.write_text(manifest.model_dump_json(indent=2) + "\n")
        self._summary = {"config_hash": manifest.config_hash, "outputs": len(outputs)}
        yield {"manifest": MANIFEST_NAME, "outputs": len(outputs)}


def verify_outputs(manifest: Manifest, run_dir: Path) -> list[str]:
    """Relative paths whose content differs from (or is missing compared to) the manifest."""
    mismatched = []
    for rel, digest in manifest.outputs.items():
        path = Path(run_dir) / rel
        if not path.exists() or sha256_file(path) != digest:
            mismatched.append(rel)
    return mismatched
