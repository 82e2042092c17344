"""SO(3)-invariant canonical frames via covariance PCA.

The frame of a cloud is (centroid m, principal-axis matrix D, projected
coordinates C = D^T (p - m)). Axes are covariant under rotation up to column
signs, giving 8 sign constellations; the right one is chosen by Chamfer
argmin against the other cloud's projection.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidInputError
from .geom import PointCloud
from .metrics import chamfer

# All 8 column-sign patterns, 3-bit binary counter order: index 0 is +++.
SIGN_PATTERNS = np.array(
    [[1 - 2 * ((i >> 2) & 1), 1 - 2 * ((i >> 1) & 1), 1 - 2 * (i & 1)] for i in range(8)],
    dtype=float,
)

DEGENERATE_GAP = 1e-6


@dataclass(frozen=True)
class CanonicalFrame:
    m: np.ndarray
    D: np.ndarray
    eigenvalues: np.ndarray
    C: PointCloud
    degenerate_spectrum: bool = False

    def with_signs(self, signs):
        """Frame with D columns multiplied by the given ±1 pattern, C recomputed."""
        signs = np.asarray(signs, dtype=float)
        return CanonicalFrame(
            self.m,
            self.D * signs,
            self.eigenvalues,
            PointCloud(self.C.points * signs, self.C.ids),
            self.degenerate_spectrum,
        )


def covariance(centered_cloud):
    """Unnormalized scatter matrix H = sum_p p p^T of an already-centered cloud."""
    pts = centered_cloud.points
    if len(pts) == 0:
        raise InvalidInputError("covariance of an empty cloud")
    return pts.T @ pts


def jacobi_eigh3(A, tol=1e-14, max_sweeps=50):
    """Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.

    Returns (eigenvalues descending, eigenvector columns). Chosen over the
    closed-form cubic, which loses precision near degenerate spectra.
    """
    a = np.array(A, dtype=float)
    v = np.eye(3)
    scale = max(np.max(np.abs(a)), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2)
        if off <= tol * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if abs(apq) <= tol * scale:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
            if theta == 0.0:
                t = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            v = v @ rot
    w = np.diag(a).copy()
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def _fix_column_signs(D):
    # Deterministic pre-disambiguation rule: largest-magnitude entry of each
    # column positive, lowest row index on ties.
    D = D.copy()
    for j in range(3):
        col = D[:, j]
        mags = np.abs(col)
        i = int(np.flatnonzero(mags == mags.max())[0])
        if col[i] < 0:
            D[:, j] = -col
    return D


def pca_frame(cloud):
    """Canonical frame of a cloud: PCA axes of the centered covariance.

    Raises DegenerateGeometryError when the covariance has rank <= 1
    (collinear or coincident points). Near-degenerate spectra (relative gap
    below 1e-6) are flagged, not rejected.
    """
    if len(cloud) < 3:
        raise DegenerateGeometryError("need at least 3 points", flags={"too_few_points"})
    m = cloud.centroid()
    centered = PointCloud(cloud.points - m, cloud.ids)
    H = covariance(centered)
    w, V = jacobi_eigh3(H)
    w = np.maximum(w, 0.0)
    if w[0] <= 0.0 or w[1] <= 1e-12 * w[0]:
        raise DegenerateGeometryError(
            "covariance rank <= 1 (collinear or coincident points)",
            flags={"degenerate_pca"},
        )
    gaps = (w[:-1] - w[1:]) / w[0]
    degenerate = bool(np.min(gaps) < DEGENERATE_GAP)
    D = _fix_column_signs(V)
    C = PointCloud(centered.points @ D, cloud.ids)
    return CanonicalFrame(m, D, w, C, degenerate)


def sign_constellations(frame):
    """The 8 frames obtained by every ±1 column-sign pattern, counter order."""
    return [frame.with_signs(s) for s in SIGN_PATTERNS]


def disambiguate(frame1, frame2):
    """Pick frame2's sign constellation by Chamfer argmin against frame1's C.

    Returns (chosen index 0..7, Chamfer distance); ties go to the lowest index.
    """
    best_idx, best_d = 0, np.inf
    c1 = frame1.C
    for j, signs in enumerate(SIGN_PATTERNS):
        d = chamfer(c1, PointCloud(frame2.C.points * signs))
        if d < best_d:
            best_idx, best_d = j, d
    return best_idx, best_d


def reproject(frame, coords):
    """World-frame cloud D @ c + m for every c in coords."""
    return PointCloud(coords.points @ frame.D.T + frame.m, coords.ids)
