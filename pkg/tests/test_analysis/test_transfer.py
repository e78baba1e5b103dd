import numpy as np
import pytest

from smrep.analysis.kmeans import kmeans_fit
from smrep.analysis.transfer import check_compatible, transfer
from smrep.models.evaluation import encode
from smrep.models.registry import registry
from smrep.utils.exceptions import AnalysisError
from tests.conftest import tiny_spec


@pytest.fixture(scope="module")
def encoder():
    return registry.create(tiny_spec("recurrent-sm"), seed=2)


@pytest.fixture(scope="module")
def clusters(encoder, square_traj):
    reps = encode(encoder, square_traj)
    return kmeans_fit(reps.codes, k=5, seed=0, architecture=reps.architecture, env_name=reps.env_name)


def test_same_environment_reproduces_assignments(encoder, clusters, square_traj):
    result = transfer(encoder, clusters, square_traj)
    np.testing.assert_array_equal(result.labels, clusters.labels)
    assert result.source_env == result.target_env == "Square"


def test_every_target_point_gets_a_label(encoder, clusters, rooms1_traj):
    result = transfer(encoder, clusters, rooms1_traj, samples_per_cluster=20, seed=1)
    assert len(result.labels) == len(rooms1_traj)
    assert result.coverage == 1.0
    assert result.target_env == "Rooms1"
    assert result.report.groupby("cluster_id").size().max() <= 20
    np.testing.assert_array_equal(result.representations.poses, rooms1_traj.poses)


def test_transfer_is_deterministic(encoder, clusters, rooms1_traj):
    a = transfer(encoder, clusters, rooms1_traj, seed=3)
    b = transfer(encoder, clusters, rooms1_traj, seed=3)
    assert a.report.equals(b.report)


def test_architecture_mismatch(clusters):
    other = registry.create(tiny_spec("recurrent-s"), seed=2)
    with pytest.raises(AnalysisError, match="encoder is 'recurrent-s'"):
        check_compatible(other, clusters)


def test_dimension_mismatch(clusters):
    wide = registry.create("recurrent-sm")
    with pytest.raises(AnalysisError, match="dimensional"):
        check_compatible(wide, clusters)
