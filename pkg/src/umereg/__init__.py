"""Rigid point-cloud registration via discrete UME moment embeddings.

Closed-form registration from SO(3)-invariant geometric moments: PCA
canonicalization with 8-way sign disambiguation, weighted first-moment
embeddings, Horn-style rotation recovery, the sampling/Gaussian noise models,
ambiguity-robust metrics, an ICP baseline and a benchmark harness. Learned
invariant features plug into the same solver through the UMEF file format.
"""

from .geom import (
    PointCloud,
    RigidTransform,
    apply_transform,
    compose,
    invert,
    normalize_unit_sphere,
    random_rigid,
)
from .solver import RegistrationResult, register_ume, register_with_external

__all__ = [
    "PointCloud",
    "RigidTransform",
    "RegistrationResult",
    "apply_transform",
    "compose",
    "invert",
    "normalize_unit_sphere",
    "random_rigid",
    "register_ume",
    "register_with_external",
]

__version__ = "0.1.0"
