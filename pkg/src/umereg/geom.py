"""Core geometric types: point clouds, rigid transforms, random transforms.

Point clouds are immutable value objects; every operation returns a new cloud.
The Euler convention used everywhere is extrinsic X-Y-Z in degrees (rotate
about the world X axis first, then world Y, then world Z), i.e.
R = Rz @ Ry @ Rx.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class PointCloud:
    """Ordered set of 3D points with optional per-point correspondence ids."""

    points: np.ndarray
    ids: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidInputError(f"points must be (N, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain non-finite coordinates")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.ids is not None:
            ids = np.asarray(self.ids, dtype=np.int64).copy()
            if ids.shape != (len(pts),):
                raise InvalidInputError("ids length must match point count")
            if len(np.unique(ids)) != len(ids):
                raise InvalidInputError("ids must be unique within the cloud")
            ids.flags.writeable = False
            object.__setattr__(self, "ids", ids)

    def __len__(self):
        return len(self.points)

    def centroid(self):
        if len(self) == 0:
            raise InvalidInputError("empty cloud has no centroid")
        return self.points.mean(axis=0)


@dataclass(frozen=True)
class RigidTransform:
    """Rigid map x -> R @ x + t with R in SO(3)."""

    R: np.ndarray
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        t = np.asarray(self.t, dtype=float).reshape(3)
        if R.shape != (3, 3):
            raise InvalidInputError("R must be 3x3")
        if np.max(np.abs(R.T @ R - np.eye(3))) > _ORTHO_TOL:
            raise InvalidInputError("R is not orthogonal within 1e-12")
        if abs(np.linalg.det(R) - 1.0) > _ORTHO_TOL:
            raise InvalidInputError("det(R) must be +1 within 1e-12")
        R = R.copy()
        R.flags.writeable = False
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @staticmethod
    def identity():
        return RigidTransform(np.eye(3), np.zeros(3))


def apply_transform(cloud, transform):
    """Apply R @ p + t to every point; ids preserved in order."""
    pts = cloud.points @ transform.R.T + transform.t
    return PointCloud(pts, cloud.ids)


def compose(t1, t2):
    """Transform applying t2 first, then t1."""
    return RigidTransform(t1.R @ t2.R, t1.R @ t2.t + t1.t)


def invert(transform):
    return RigidTransform(transform.R.T, -transform.R.T @ transform.t)


def rotation_x(deg):
    a = np.radians(deg)
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(deg):
    a = np.radians(deg)
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(deg):
    a = np.radians(deg)
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_xyz_to_matrix(angles_deg):
    """Rotation matrix from extrinsic X-Y-Z Euler angles in degrees."""
    ax, ay, az = angles_deg
    return rotation_z(az) @ rotation_y(ay) @ rotation_x(ax)


def matrix_to_euler_xyz(R):
    """Extrinsic X-Y-Z Euler angles (degrees) of R; returns (angles, gimbal_flag).

    With R = Rz @ Ry @ Rx: R[2,0] = -sin(y). Near |cos(y)| = 0 the x/z split is
    undefined; the standard degenerate branch fixes x = 0.
    """
    R = np.asarray(R, dtype=float)
    sy = -R[2, 0]
    sy = min(1.0, max(-1.0, sy))
    cy = np.hypot(R[0, 0], R[1, 0])
    gimbal = cy < 1e-9
    y = np.arctan2(sy, cy)
    if gimbal:
        x = 0.0
        z = np.arctan2(-R[0, 1], R[1, 1])
    else:
        x = np.arctan2(R[2, 1], R[2, 2])
        z = np.arctan2(R[1, 0], R[0, 0])
    return np.degrees(np.array([x, y, z])), gimbal


def random_rigid(rng, euler_range_deg=(-180.0, 180.0), trans_range=(-0.5, 0.5)):
    """Random rigid transform: Euler angles and translation components i.i.d. uniform.

    Angles are composed in the fixed extrinsic X-then-Y-then-Z order.
    Deterministic given the generator state.
    """
    lo, hi = euler_range_deg
    tlo, thi = trans_range
    if hi < lo or thi < tlo:
        raise InvalidInputError("ranges must be non-empty")
    angles = rng.uniform(lo, hi, size=3)
    t = rng.uniform(tlo, thi, size=3)
    return RigidTransform(euler_xyz_to_matrix(angles), t)


def normalize_unit_sphere(cloud):
    """Center the cloud and rescale so the farthest point sits on the unit sphere.

    Returns (normalized cloud, scale, center). All-coincident clouds keep
    scale 1 instead of dividing by zero.
    """
    if len(cloud) == 0:
        raise InvalidInputError("cannot normalize an empty cloud")
    center = cloud.centroid()
    shifted = cloud.points - center
    scale = float(np.max(np.linalg.norm(shifted, axis=1)))
    if scale <= 0.0:
        scale = 1.0
    return PointCloud(shifted / scale, cloud.ids), scale, center
