import numpy as np
import pytest

from smrep.analysis.kmeans import assign, kmeans_fit, load_clusters, save_clusters, squared_distances
from smrep.utils.exceptions import AnalysisError

BLOB_CENTERS = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]])


@pytest.fixture
def blobs(rng):
    points = np.concatenate([c + rng.normal(scale=0.5, size=(100, 2)) for c in BLOB_CENTERS])
    truth = np.repeat(np.arange(3), 100)
    return points, truth


def restart_oracle(points, k, restarts=100, iterations=100):
    """Plain Lloyd from random data points, best inertia over many restarts."""
    rng = np.random.default_rng(99)
    best = np.inf
    for _ in range(restarts):
        centroids = points[rng.choice(len(points), size=k, replace=False)]
        for _ in range(iterations):
            labels = np.argmin(((points[:, None, :] - centroids[None]) ** 2).sum(-1), axis=1)
            centroids = np.array(
                [points[labels == j].mean(axis=0) if np.any(labels == j) else centroids[j] for j in range(k)]
            )
        labels = np.argmin(((points[:, None, :] - centroids[None]) ** 2).sum(-1), axis=1)
        best = min(best, float(((points - centroids[labels]) ** 2).sum()))
    return best


def test_recovers_blobs(blobs):
    points, truth = blobs
    model = kmeans_fit(points, k=3, seed=0)
    # same partition up to relabeling
    for c in range(3):
        assert len(set(model.labels[truth == c])) == 1
    assert len(set(model.labels)) == 3
    assert model.inertia <= 1.01 * restart_oracle(points, 3)


def test_inertia_never_increases(rng):
    points = rng.normal(size=(400, 5))
    model = kmeans_fit(points, k=8, seed=3)
    history = np.array(model.inertia_history)
    assert np.all(np.diff(history) <= 1e-9 * (np.sum(points ** 2) + 1.0))
    assert model.inertia == pytest.approx(history[-1])


def test_reported_inertia_matches_labels(rng):
    points = rng.normal(size=(300, 4))
    model = kmeans_fit(points, k=6, seed=1)
    expected = ((points - model.centroids[model.labels]) ** 2).sum()
    assert model.inertia == pytest.approx(expected, rel=1e-12)
    np.testing.assert_array_equal(assign(model, points), model.labels)


def test_deterministic_per_seed(rng):
    points = rng.normal(size=(200, 3))
    a, b = kmeans_fit(points, k=5, seed=7), kmeans_fit(points, k=5, seed=7)
    assert a.centroids.tobytes() == b.centroids.tobytes()
    np.testing.assert_array_equal(a.labels, b.labels)


def test_fewer_points_than_clusters():
    with pytest.raises(AnalysisError, match="at least k"):
        kmeans_fit(np.zeros((3, 2)), k=4)


def test_one_cluster_per_distinct_point(rng):
    points = rng.permutation(np.arange(16.0).reshape(8, 2))
    model = kmeans_fit(points, k=8, seed=3)
    assert model.inertia == 0.0
    assert sorted(model.labels.tolist()) == list(range(8))
    np.testing.assert_array_equal(model.centroids[model.labels], points)


def test_identical_points_do_not_crash():
    model = kmeans_fit(np.ones((30, 2)), k=3, seed=0)
    assert model.inertia == 0.0
    assert model.k == 3


def test_assign_checks_dimensions(blobs):
    model = kmeans_fit(blobs[0], k=3)
    with pytest.raises(AnalysisError, match="do not match"):
        assign(model, np.zeros((4, 3)))


def test_squared_distances_never_negative(rng):
    points = rng.normal(scale=1e6, size=(50, 3))
    d2 = squared_distances(points, points)
    assert np.all(d2 >= 0.0)


def test_cluster_file_round_trip(tmp_path, blobs):
    model = kmeans_fit(blobs[0], k=3, seed=2, architecture="recurrent-sm", env_name="Square")
    loaded = load_clusters(save_clusters(model, tmp_path / "clusters.bin"))
    assert loaded.centroids.tobytes() == model.centroids.tobytes()
    assert (loaded.k, loaded.seed, loaded.architecture, loaded.env_name) == (3, 2, "recurrent-sm", "Square")
    assert loaded.inertia == model.inertia
    np.testing.assert_array_equal(assign(loaded, blobs[0]), model.labels)
