import math

import numpy as np
import pytest

from smrep.dataset.normalize import denormalize, normalize
from smrep.dataset.storage import export_csv, load_trajectory, pose_sidecar, read_csv, save_trajectory
from smrep.utils.exceptions import DatasetError, TrajectoryFormatError


@pytest.fixture
def saved(tmp_path, square_traj):
    return save_trajectory(square_traj, tmp_path / "square.smt")


def test_round_trip_is_bit_identical(saved, square_traj):
    loaded = load_trajectory(saved)
    assert loaded.same_as(square_traj)


def test_poses_live_in_a_sidecar(saved, square_traj):
    assert pose_sidecar(saved).exists()
    blind = load_trajectory(saved, include_poses=False)
    assert blind.poses is None
    np.testing.assert_array_equal(blind.sensors, square_traj.sensors)


def test_saving_twice_gives_identical_bytes(tmp_path, square_traj):
    a = save_trajectory(square_traj, tmp_path / "a.smt")
    b = save_trajectory(square_traj, tmp_path / "b.smt")
    assert a.read_bytes() == b.read_bytes()


def test_corrupted_magic(saved):
    raw = bytearray(saved.read_bytes())
    raw[0:4] = b"JUNK"
    saved.write_bytes(bytes(raw))
    with pytest.raises(TrajectoryFormatError, match="magic"):
        load_trajectory(saved)


def test_unsupported_version(saved):
    raw = bytearray(saved.read_bytes())
    raw[8] = 99
    saved.write_bytes(bytes(raw))
    with pytest.raises(TrajectoryFormatError, match="version"):
        load_trajectory(saved)


def test_truncated_payload(saved):
    saved.write_bytes(saved.read_bytes()[:-8])
    with pytest.raises(TrajectoryFormatError, match="payload"):
        load_trajectory(saved)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_trajectory(tmp_path / "missing.smt")


def test_csv_export(tmp_path, square_traj):
    paths = export_csv(square_traj, tmp_path / "square.csv", pose_limit=100)
    frame = read_csv(paths[0])
    assert frame.shape == (len(square_traj), 8)
    np.testing.assert_allclose(frame[["s0", "s1", "s2", "s3", "s4"]].to_numpy(), square_traj.sensors, rtol=1e-15)
    poses = paths[1].read_text().splitlines()
    assert poses[0] == "t,x,y,theta"
    assert len(poses) == 101


def test_csv_min_laser_matches_binary(tmp_path, square_traj):
    frame = read_csv(export_csv(square_traj, tmp_path / "square.csv")[0])
    np.testing.assert_allclose(
        frame[["s0", "s1", "s2", "s3", "s4"]].min(axis=1).to_numpy(), square_traj.sensors.min(axis=1), rtol=1e-15
    )


def test_read_csv_rejects_other_columns(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(TrajectoryFormatError, match="columns"):
        read_csv(path)


# ── normalize ─────────────────────────────────────────────────────────────


def test_normalize_scales():
    sensors = np.array([[10.0] * 5, [3.0, 3.1404, 10.0, 10.0, 0.0]])
    motors = np.array([[0.5, math.pi], [0.0, -math.pi / 2]])
    s, m = normalize(sensors, motors)
    np.testing.assert_allclose(s[0], np.ones(5))
    np.testing.assert_allclose(s[1, :2], [0.3, 0.31404])
    np.testing.assert_allclose(m, [[0.5, 1.0], [0.0, -0.5]])


def test_normalize_is_invertible(square_traj):
    s, m = denormalize(*normalize(square_traj.sensors, square_traj.motors))
    np.testing.assert_allclose(s, square_traj.sensors, rtol=0, atol=1e-12)
    np.testing.assert_allclose(m, square_traj.motors, rtol=0, atol=1e-12)


@pytest.mark.parametrize("bad", [-0.1, 10.5, np.nan])
def test_normalize_rejects_out_of_range(bad):
    sensors = np.full((1, 5), 5.0)
    sensors[0, 2] = bad
    with pytest.raises(DatasetError, match="sensor values"):
        normalize(sensors, np.zeros((1, 2)))
