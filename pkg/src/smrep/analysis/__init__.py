"""
Representation-space analysis: PCA projections, k-means clusters, cluster reports.
Cross-environment transfer lives in ``smrep.analysis.transfer`` (it needs the models package).
"""

from smrep.analysis.geometry import (
    cluster_geometry,
    corner_concentration,
    nothing_perceived_spread,
    wall_end_concentration,
)
from smrep.analysis.kmeans import ClusterModel, assign, kmeans_fit, load_clusters, save_clusters
from smrep.analysis.pca import PcaModel, pca_fit, pca_project
from smrep.analysis.reports import cluster_report, projection_frame, write_csv
from smrep.analysis.representation import (
    RepresentationSet,
    load_representations,
    min_laser_coloring,
    raw_sensor_representation,
    save_representations,
)

__all__ = [
    "ClusterModel",
    "PcaModel",
    "RepresentationSet",
    "assign",
    "cluster_geometry",
    "cluster_report",
    "corner_concentration",
    "kmeans_fit",
    "load_clusters",
    "load_representations",
    "min_laser_coloring",
    "nothing_perceived_spread",
    "pca_fit",
    "pca_project",
    "projection_frame",
    "raw_sensor_representation",
    "save_clusters",
    "save_representations",
    "wall_end_concentration",
]
