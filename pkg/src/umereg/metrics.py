"""Registration evaluation metrics and the exact nearest-neighbor index.

Chamfer and Hausdorff follow the paper's symmetric-sum forms with plain
(non-squared) Euclidean distances:

    d_C = mean_{p in P1} min_{p'} ||p - p'||  +  mean_{p' in P2} min_p ||p' - p||
    d_H = max_{p in P1} min_{p'} ||p - p'||   +  max_{p' in P2} min_p ||p' - p||

Rotation RMSE decomposes both rotations into extrinsic X-Y-Z Euler angles in
degrees, wraps each difference into (-180, 180], and pools squared angle
errors before the root (square -> mean -> root, also at dataset level).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidInputError
from .geom import matrix_to_euler_xyz


class NNIndex:
    """Exact Euclidean nearest-neighbor index over a point cloud.

    Backed by a kd-tree; single-writer build, concurrent-read-safe after.
    Ties are broken by the lowest point index.
    """

    def __init__(self, cloud):
        if len(cloud) == 0:
            raise InvalidInputError("cannot index an empty cloud")
        self.points = cloud.points
        self._tree = cKDTree(self.points)

    def distances(self, queries):
        """Nearest-neighbor distance for each query row."""
        d, _ = self._tree.query(np.atleast_2d(queries), k=1)
        return d

    def query(self, queries):
        """(distances, indices) of the nearest neighbor for each query row."""
        return self._tree.query(np.atleast_2d(queries), k=1)

    def nearest(self, query):
        """(point, distance) of the exact nearest neighbor, lowest index on ties."""
        query = np.asarray(query, dtype=float)
        d, i = self._tree.query(query, k=1)
        # kd-tree tie resolution is unspecified; rescan the tie ball.
        candidates = self._tree.query_ball_point(query, d * (1.0 + 1e-12) + 1e-300)
        dists = np.linalg.norm(self.points[candidates] - query, axis=1)
        best = min(zip(dists, candidates))
        return self.points[best[1]], float(best[0])


def chamfer(p1, p2):
    """Symmetric mean nearest-neighbor distance between two clouds."""
    if len(p1) == 0 or len(p2) == 0:
        raise InvalidInputError("chamfer requires non-empty clouds")
    d12 = NNIndex(p2).distances(p1.points)
    d21 = NNIndex(p1).distances(p2.points)
    return float(d12.mean() + d21.mean())


def hausdorff(p1, p2):
    """Symmetric sum of maximal directed nearest-neighbor distances."""
    if len(p1) == 0 or len(p2) == 0:
        raise InvalidInputError("hausdorff requires non-empty clouds")
    d12 = NNIndex(p2).distances(p1.points)
    d21 = NNIndex(p1).distances(p2.points)
    return float(d12.max() + d21.max())


def angle_errors_deg(r_gt, r_pred):
    """Per-axis wrapped Euler angle differences in degrees; flags gimbal lock."""
    ang_gt, g1 = matrix_to_euler_xyz(r_gt)
    ang_pr, g2 = matrix_to_euler_xyz(r_pred)
    diff = ((ang_gt - ang_pr + 180.0) % 360.0) - 180.0
    # wrap maps +180 to -180; fold back to the (-180, 180] convention
    diff[diff == -180.0] = 180.0
    return diff, (g1 or g2)


def rmse_rotation(r_gt, r_pred):
    """Root-mean-square of the 3 wrapped Euler angle differences, degrees."""
    diff, _ = angle_errors_deg(r_gt, r_pred)
    return float(np.sqrt(np.mean(diff**2)))


def rmse_rotation_pooled(pairs):
    """Dataset RMSE(R): squared angle errors pooled across trials before the root."""
    sq = [angle_errors_deg(g, p)[0] ** 2 for g, p in pairs]
    return float(np.sqrt(np.mean(np.concatenate(sq))))


def rmse_translation(t_gt, t_pred):
    return float(np.linalg.norm(np.asarray(t_gt, float) - np.asarray(t_pred, float)))


def rmse_translation_pooled(pairs):
    sq = [np.sum((np.asarray(g, float) - np.asarray(p, float)) ** 2) for g, p in pairs]
    return float(np.sqrt(np.mean(sq)))


@dataclass
class TrialMetrics:
    chamfer: float
    hausdorff: float
    rmse_rotation_deg: float
    rmse_translation: float


@dataclass
class MetricsReport:
    """Aggregate metrics for one (method, scenario) cell plus per-trial detail."""

    chamfer: float
    hausdorff: float
    rmse_rotation_deg: float
    rmse_translation: float
    trials: int
    failures: int = 0
    per_trial: list = field(default_factory=list)
