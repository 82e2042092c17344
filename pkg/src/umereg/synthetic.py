"""Synthetic test shapes: an asymmetric convex blob and a box.

The blob is the convex hull of a seeded anisotropically-scaled random point
set: almost surely free of rotational symmetries and with well-separated
covariance eigenvalues. The box is symmetric under 180-degree rotations about
its axes, which is what the ambiguity experiments need.
"""

import numpy as np
from scipy.spatial import ConvexHull

from .io_formats import Mesh


def asymmetric_hull_mesh(seed=7, n_seed_points=64):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_seed_points, 3)) * np.array([1.0, 0.6, 0.35])
    pts += 0.5 * pts**2  # strong skew: kills near-central-symmetry that weakens shell moments
    hull = ConvexHull(pts)
    return Mesh(hull.points, hull.simplices)


def box_mesh(a=1.0, b=0.6, c=0.3):
    """Axis-aligned box centered at the origin with half-extents a, b, c."""
    corners = np.array(
        [[sx * a, sy * b, sz * c] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    )
    hull = ConvexHull(corners)
    return Mesh(hull.points, hull.simplices)


def single_triangle_mesh():
    v = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return Mesh(v, np.array([[0, 1, 2]]))
