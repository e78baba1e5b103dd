import json

import pytest

from smrep.analysis.kmeans import load_clusters
from smrep.analysis.representation import load_representations
from smrep.cli import build_parser, run
from smrep.cli.commands import EXIT_CONFIG, EXIT_MISSING_INPUT, EXIT_OK, EXIT_RUNTIME
from smrep.contracts import Manifest
from smrep.dataset.storage import load_trajectory
from smrep.models.storage import load_model


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def dataset(workdir):
    out = workdir / "square.smt"
    assert run(["generate", "--env", "square", "--steps", "500", "--seed", "3", "--out", str(out), "--csv",
                "--trajectory-points", "20", "--snapshots", "2"]) == EXIT_OK
    return out


@pytest.fixture(scope="module")
def model_dir(workdir, dataset):
    out = workdir / "rsm"
    argv = ["train", "--arch", "recurrent-sm", "--data", str(dataset), "--out", str(out), "--seed", "1",
            "--max-epochs", "1", "--batch-size", "16", "--horizon", "8"]
    assert run(argv) == EXIT_OK
    return out


def test_generate_writes_dataset_and_extras(dataset):
    traj = load_trajectory(dataset)
    assert len(traj) == 500 and traj.env_name == "Square"
    for name in ("square_stats.json", "square.csv", "square_poses.csv", "square_snapshots.csv"):
        assert (dataset.parent / name).is_file(), name
    stats = json.loads((dataset.parent / "square_stats.json").read_text())
    assert stats["steps"] == 500


def test_generate_is_reproducible(dataset, tmp_path):
    again = tmp_path / "square.smt"
    assert run(["generate", "--steps", "500", "--seed", "3", "--out", str(again)]) == EXIT_OK
    assert again.read_bytes() == dataset.read_bytes()


def test_train_and_evaluate(model_dir, dataset):
    trained = load_model(model_dir)
    assert trained.spec.horizon == 8
    assert len(trained.history) == 1
    for split in ("test", "all"):
        assert run(["evaluate", "--model", str(model_dir), "--data", str(dataset), "--split", split]) == EXIT_OK


def test_train_reads_a_config_file(tmp_path, dataset):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"training": {"max_epochs": 1, "batch_size": 8}}))
    out = tmp_path / "s"
    assert run(["train", "--arch", "s", "--data", str(dataset), "--out", str(out), "--config", str(config)]) == EXIT_OK
    assert len(load_model(out).history) == 1


def test_represent_cluster_transfer(workdir, model_dir, dataset, tmp_path):
    reps_dir = workdir / "reps"
    assert run(["represent", "--model", str(model_dir), "--data", str(dataset), "--out", str(reps_dir)]) == EXIT_OK
    reps = load_representations(reps_dir / "square.reps")
    assert len(reps) == 500
    assert (reps_dir / "square_projection.csv").is_file()

    assert run(["cluster", "--reps", str(reps_dir), "--k", "4", "--samples", "10", "--env", "square"]) == EXIT_OK
    clusters = load_clusters(reps_dir / "clusters.bin")
    assert clusters.k == 4 and clusters.architecture == "recurrent-sm"
    assert (reps_dir / "cluster_geometry.csv").is_file()

    target = tmp_path / "rooms1.smt"
    assert run(["generate", "--env", "rooms1", "--steps", "300", "--out", str(target)]) == EXIT_OK
    report = tmp_path / "transfer.csv"
    argv = ["transfer", "--encoder", str(model_dir), "--clusters", str(reps_dir / "clusters.bin"),
            "--data", str(target), "--samples", "10", "--out", str(report)]
    assert run(argv) == EXIT_OK
    assert report.is_file()
    assert (tmp_path / "transfer_geometry.csv").is_file()


def test_raw_representation(dataset, tmp_path):
    assert run(["represent", "--raw", "--data", str(dataset), "--out", str(tmp_path)]) == EXIT_OK
    assert load_representations(tmp_path / "square.reps").dims == 5


def test_represent_without_a_model_is_a_config_error(dataset, tmp_path):
    assert run(["represent", "--data", str(dataset), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_input_file(tmp_path):
    assert run(["evaluate", "--model", str(tmp_path / "nope"), "--data", str(tmp_path / "x.smt")]) == EXIT_MISSING_INPUT
    assert run(["cluster", "--reps", str(tmp_path / "missing.reps")]) == EXIT_MISSING_INPUT


def test_invalid_run_config(tmp_path):
    assert run(["repro", "--scale", "smoke", "--steps", "0", "--out", str(tmp_path / "run")]) == EXIT_CONFIG
    assert not (tmp_path / "run").exists()
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"replicates": 0}))
    assert run(["repro", "--config", str(config)]) == EXIT_CONFIG


def test_unknown_run_environment_is_a_config_error(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"scale": "smoke", "environments": ["square", "nowhere"]}))
    assert run(["repro", "--config", str(config), "--out", str(tmp_path / "run")]) == EXIT_CONFIG
    assert not (tmp_path / "run").exists()


def test_unknown_layout_is_a_runtime_error(tmp_path):
    assert run(["generate", "--env", "maze", "--steps", "50", "--out", str(tmp_path / "m.smt")]) == EXIT_RUNTIME


def test_corrupt_trajectory_is_a_runtime_error(tmp_path, model_dir):
    bad = tmp_path / "bad.smt"
    bad.write_bytes(b"not a trajectory")
    assert run(["evaluate", "--model", str(model_dir), "--data", str(bad)]) == EXIT_RUNTIME


def test_argument_errors_exit_with_usage():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["train", "--arch", "lstm", "--data", "d", "--out", "o"])
    assert info.value.code == 2


@pytest.mark.slow
def test_repro_smoke_and_manifest_check(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "scale": "smoke",
                "steps": 600,
                "environments": ["square", "rooms1"],
                "architectures": ["sm", "recurrent-sm"],
                "training": {"batch_size": 16, "max_epochs": 1, "horizon": 10},
                "analysis": {"k": 4, "samples_per_cluster": 20},
                "trajectory_points": 20,
            }
        )
    )
    first = tmp_path / "a"
    assert run(["repro", "--config", str(config), "--out", str(first)]) == EXIT_OK
    manifest_path = first / "manifest.json"
    assert run(["repro", "--manifest", str(manifest_path), "--out", str(tmp_path / "b")]) == EXIT_OK

    manifest = Manifest.model_validate_json(manifest_path.read_text())
    manifest.outputs["data/square.smt"] = "0" * 64
    tampered = tmp_path / "tampered.json"
    tampered.write_text(manifest.model_dump_json())
    assert run(["repro", "--manifest", str(tampered), "--out", str(tmp_path / "c")]) == EXIT_RUNTIME
