"""Point-to-point ICP baseline.

Vanilla variant only: nearest-neighbor correspondences followed by a
closed-form rotation/translation update, iterated until the mean squared
correspondence error stops improving.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .geom import PointCloud, RigidTransform, apply_transform
from .metrics import NNIndex
from .solver import RegistrationResult, horn_rotation


@dataclass(frozen=True)
class IcpConfig:
    max_iterations: int = 100
    convergence_tol: float = 1e-8
    init: RigidTransform = field(default_factory=RigidTransform.identity)

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")
        if self.convergence_tol <= 0:
            raise InvalidInputError("convergence_tol must be > 0")


def icp(p1, p2, config=IcpConfig()):
    """Register p1 onto p2; converges to the nearest local minimum only."""
    if len(p1) == 0 or len(p2) == 0:
        raise InvalidInputError("icp requires non-empty clouds")
    index = NNIndex(p2)
    transform = config.init
    prev_mse = np.inf
    updates = 0
    for _ in range(config.max_iterations):
        moved = apply_transform(p1, transform)
        dists, nn_idx = index.query(moved.points)
        mse = float(np.mean(dists**2))
        if mse > prev_mse + 1e-15:  # point-to-point ICP never increases the error
            break
        if prev_mse - mse < config.convergence_tol:
            prev_mse = mse
            break
        prev_mse = mse
        targets = p2.points[nn_idx]
        src_c = p1.points.mean(axis=0)
        dst_c = targets.mean(axis=0)
        R = horn_rotation(p1.points - src_c, targets - dst_c)
        t = dst_c - R @ src_c
        transform = RigidTransform(R, t)
        updates += 1
    residual = float(np.sqrt(prev_mse)) if np.isfinite(prev_mse) else float("inf")
    return RegistrationResult(
        transform, 0, residual, frozenset({f"icp_iterations={updates}"})
    )
