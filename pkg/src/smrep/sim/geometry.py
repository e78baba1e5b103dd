"""
smrep/sim/geometry.py
─────────────────────
Exact 2D segment geometry on numpy arrays.

Walls are zero-thickness segments stored as rows ``[x1, y1, x2, y2]``.
Rays and sweeps are solved in closed parametric form; nothing is sampled.
"""
from __future__ import annotations

import numpy as np

from smrep.utils.exceptions import SimulationError

PARALLEL_TOL = 1e-12
ON_WALL_TOL = 1e-12
_CHUNK = 200_000


def wrap_angle(theta):
    """Wrap an angle (scalar or array) to (-pi, pi]."""
    return np.pi - np.mod(np.pi - theta, 2.0 * np.pi)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def point_segment_distance(points: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Euclidean distance from every point (N,2) to every segment (S,4) -> (N,S)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    a = segments[:, :2]
    e = segments[:, 2:] - a
    length2 = np.einsum("ij,ij->i", e, e)
    rel = points[:, None, :] - a[None, :, :]
    u = np.einsum("nsk,sk->ns", rel, e) / np.where(length2 > 0, length2, 1.0)
    u = np.clip(u, 0.0, 1.0)
    closest = a[None, :, :] + u[..., None] * e[None, :, :]
    return np.linalg.norm(points[:, None, :] - closest, axis=-1)


def check_free_point(segments: np.ndarray, size: float, point) -> None:
    """Raise SimulationError unless ``point`` is strictly inside the arena and off every wall."""
    x, y = float(point[0]), float(point[1])
    if not (0.0 < x < size and 0.0 < y < size):
        raise SimulationError(f"point ({x:.6f}, {y:.6f}) is outside the {size}x{size} arena")
    dist = point_segment_distance(np.array([[x, y]]), segments)
    if dist.min() <= ON_WALL_TOL:
        wall = segments[int(dist.argmin())].tolist()
        raise SimulationError(f"point ({x:.6f}, {y:.6f}) lies on wall {wall}")


def ray_cast_many(segments: np.ndarray, origin, angles, max_range: float) -> np.ndarray:
    """
    Distance along each ray ``origin + t * (cos a, sin a)`` to the first wall, clipped to
    ``max_range``.  Returns an array shaped like ``angles``.
    """
    angles = np.asarray(angles, dtype=float)
    flat = angles.reshape(-1)
    dx, dy = np.cos(flat)[:, None], np.sin(flat)[:, None]

    a = segments[:, :2]
    ex = (segments[:, 2] - segments[:, 0])[None, :]
    ey = (segments[:, 3] - segments[:, 1])[None, :]
    apx = (a[:, 0] - origin[0])[None, :]
    apy = (a[:, 1] - origin[1])[None, :]

    denom = _cross(dx, dy, ex, ey)
    parallel = np.abs(denom) <= PARALLEL_TOL
    safe = np.where(parallel, 1.0, denom)
    t = _cross(apx, apy, ex, ey) / safe
    u = _cross(apx, apy, dx, dy) / safe

    hit = (~parallel) & (t >= 0.0) & (u >= 0.0) & (u <= 1.0)
    dist = np.where(hit, t, np.inf).min(axis=1)
    return np.minimum(dist, max_range).reshape(angles.shape)


def segments_cross(segments: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """
    For each sweep ``starts[i] -> ends[i]`` report whether it touches any wall.
    Touching an endpoint and running collinearly along a wall both count.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    ends = np.atleast_2d(np.asarray(ends, dtype=float))
    out = np.empty(len(starts), dtype=bool)
    for lo in range(0, len(starts), _CHUNK):
        hi = lo + _CHUNK
        out[lo:hi] = _segments_cross_chunk(segments, starts[lo:hi], ends[lo:hi])
    return out


def _segments_cross_chunk(segments, starts, ends):
    px, py = starts[:, 0:1], starts[:, 1:2]
    rx, ry = (ends[:, 0] - starts[:, 0])[:, None], (ends[:, 1] - starts[:, 1])[:, None]
    ax, ay = segments[None, :, 0], segments[None, :, 1]
    ex = (segments[:, 2] - segments[:, 0])[None, :]
    ey = (segments[:, 3] - segments[:, 1])[None, :]
    apx, apy = ax - px, ay - py

    denom = _cross(rx, ry, ex, ey)
    parallel = np.abs(denom) <= PARALLEL_TOL
    safe = np.where(parallel, 1.0, denom)
    t = _cross(apx, apy, ex, ey) / safe
    u = _cross(apx, apy, rx, ry) / safe
    proper = (~parallel) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)

    # collinear overlap: project the wall onto the sweep direction
    collinear = parallel & (np.abs(_cross(apx, apy, rx, ry)) <= PARALLEL_TOL)
    rr = rx * rx + ry * ry
    rr_safe = np.where(rr > 0, rr, 1.0)
    s0 = (apx * rx + apy * ry) / rr_safe
    s1 = ((apx + ex) * rx + (apy + ey) * ry) / rr_safe
    overlap = (np.maximum(s0, s1) >= 0.0) & (np.minimum(s0, s1) <= 1.0) & (rr > 0)

    return (proper | (collinear & overlap)).any(axis=1)
