"""
smrep/sim/environment.py
────────────────────────
Environments: a square arena of side ``size`` with optional interior walls.

The three canonical layouts are registered in ``LAYOUTS``; any other layout can be
given as a JSON file ``{"name": ..., "size": ..., "walls": [[x1, y1, x2, y2], ...]}``
(the four boundary walls are implicit).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, ValidationError, field_validator, model_validator

from smrep.sim.geometry import point_segment_distance, segments_cross
from smrep.utils.exceptions import EnvironmentLayoutError

CANONICAL_SIZE = 50.0
CONNECTIVITY_GRID = 64  # flood-fill cells per side

Wall = tuple[float, float, float, float]

LAYOUTS: dict[str, dict[str, Any]] = {
    "square": {"name": "Square", "walls": []},
    "rooms1": {
        "name": "Rooms1",
        "walls": [
            (0.0, 25.0, 30.0, 25.0),
            (25.0, 0.0, 25.0, 17.0),
        ],
    },
    "rooms2": {
        "name": "Rooms2",
        "walls": [
            (0.0, 25.0, 42.0, 25.0),
            (12.5, 25.0, 12.5, 42.0),
            (25.0, 8.0, 25.0, 25.0),
            (37.5, 25.0, 37.5, 42.0),
        ],
    },
}


def boundary_walls(size: float) -> list[Wall]:
    return [
        (0.0, 0.0, size, 0.0),
        (size, 0.0, size, size),
        (size, size, 0.0, size),
        (0.0, size, 0.0, 0.0),
    ]


class Environment(BaseModel):
    """A validated arena.  ``walls`` holds interior walls only."""

    name: str
    size: float = Field(default=CANONICAL_SIZE, gt=0)
    walls: list[Wall] = Field(default_factory=list)

    _segments: np.ndarray = PrivateAttr()

    @field_validator("walls")
    @classmethod
    def _non_degenerate(cls, walls: list[Wall]) -> list[Wall]:
        for wall in walls:
            if wall[0] == wall[2] and wall[1] == wall[3]:
                raise ValueError(f"wall {list(wall)} has zero length")
        return walls

    @model_validator(mode="after")
    def _inside_arena(self) -> "Environment":
        for wall in self.walls:
            if any(c < 0.0 or c > self.size for c in wall):
                raise ValueError(
                    f"wall {list(wall)} has an endpoint outside [0, {self.size}]^2"
                )
        return self

    def model_post_init(self, __context: Any) -> None:
        self._segments = np.array(boundary_walls(self.size) + list(self.walls), dtype=float)
        self._segments.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Environment):
            return NotImplemented
        return (self.name, self.size, list(self.walls)) == (other.name, other.size, list(other.walls))

    # ── Geometry views ─────────────────────────────────────────────────────

    @property
    def segments(self) -> np.ndarray:
        """All walls, boundary first, as an (S, 4) read-only array."""
        return self._segments

    @property
    def interior(self) -> np.ndarray:
        return self._segments[4:]

    def clearance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the nearest wall."""
        return point_segment_distance(points, self._segments).min(axis=1)

    def corners(self) -> np.ndarray:
        """Intersection points of perpendicular wall pairs (including T-junctions)."""
        segs = self._segments
        found: list[tuple[float, float]] = []
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                point = _perpendicular_intersection(segs[i], segs[j])
                if point is not None:
                    found.append(point)
        return _unique_points(found)

    def wall_ends(self) -> np.ndarray:
        """Interior wall endpoints that do not rest on any other wall."""
        ends: list[tuple[float, float]] = []
        segs = self._segments
        for k, wall in enumerate(self.interior, start=4):
            others = np.delete(segs, k, axis=0)
            for end in (wall[:2], wall[2:]):
                if point_segment_distance(end[None, :], others).min() > 1e-9:
                    ends.append((float(end[0]), float(end[1])))
        return _unique_points(ends)

    def is_connected(self, cells: int = CONNECTIVITY_GRID) -> bool:
        """
        Coarse flood fill: every grid cell must reach every other without crossing a
        wall.  Cells whose center lies on a wall are left out of the graph.
        """
        graph = nx.grid_2d_graph(cells, cells)
        h = self.size / cells
        if len(self.walls):
            interior = self._segments[4:]
            nodes = list(graph.nodes())
            centers = (np.array(nodes, dtype=float) + 0.5) * h
            on_wall = point_segment_distance(centers, interior).min(axis=1) <= 1e-9 * self.size
            graph.remove_nodes_from(node for node, hit in zip(nodes, on_wall) if hit)
            edges = list(graph.edges())
            if edges:
                starts = (np.array([a for a, _ in edges], dtype=float) + 0.5) * h
                ends = (np.array([b for _, b in edges], dtype=float) + 0.5) * h
                blocked = segments_cross(interior, starts, ends)
                graph.remove_edges_from(e for e, cut in zip(edges, blocked) if cut)
        return graph.number_of_nodes() > 0 and nx.is_connected(graph)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def _perpendicular_intersection(s1: np.ndarray, s2: np.ndarray):
    d1 = s1[2:] - s1[:2]
    d2 = s2[2:] - s2[:2]
    n1, n2 = np.linalg.norm(d1), np.linalg.norm(d2)
    if abs(float(d1 @ d2)) > 1e-9 * n1 * n2:
        return None
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    ap = s2[:2] - s1[:2]
    t = (ap[0] * d2[1] - ap[1] * d2[0]) / denom
    u = (ap[0] * d1[1] - ap[1] * d1[0]) / denom
    eps = 1e-9
    if -eps <= t <= 1 + eps and -eps <= u <= 1 + eps:
        p = s1[:2] + t * d1
        return (round(float(p[0]), 9), round(float(p[1]), 9))
    return None


def _unique_points(points: list[tuple[float, float]]) -> np.ndarray:
    if not points:
        return np.zeros((0, 2))
    return np.array(sorted(set(points)), dtype=float)


def make_environment(layout: Union[str, Path, dict, Environment]) -> Environment:
    """
    Build a validated Environment.

    ``layout`` is a canonical identifier (square / rooms1 / rooms2, case-insensitive),
    a path to a JSON layout file, a dict with the JSON fields, or an Environment.
    """
    if isinstance(layout, Environment):
        data: dict[str, Any] = layout.model_dump()
    elif isinstance(layout, dict):
        data = dict(layout)
    elif isinstance(layout, str) and layout.lower() in LAYOUTS:
        preset = LAYOUTS[layout.lower()]
        data = {"name": preset["name"], "size": CANONICAL_SIZE, "walls": preset["walls"]}
    elif isinstance(layout, Path) or str(layout).endswith(".json"):
        path = Path(layout)
        if not path.exists():
            raise EnvironmentLayoutError(f"layout file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise EnvironmentLayoutError(f"layout file {path} is not valid JSON: {exc}") from exc
    else:
        raise EnvironmentLayoutError(
            f"Unknown layout '{layout}'. Known layouts: {sorted(LAYOUTS)}"
        )

    try:
        env = Environment.model_validate(data)
    except ValidationError as exc:
        raise EnvironmentLayoutError(str(exc)) from exc

    if not env.is_connected():
        raise EnvironmentLayoutError(f"layout '{env.name}' splits the arena into disconnected regions")
    return env
