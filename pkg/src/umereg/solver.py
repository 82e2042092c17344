"""Closed-form transformation recovery from moment-vector correspondences.

Pipeline: center both clouds, build canonical frames and pick the sign
constellation by 8-way Chamfer, compute radial features with a pooled
quantile bank, take moment vectors of the centered clouds, solve the
rotation with Horn's procedure (Kabsch-SVD realization) weighted by bin
occupancy, and recover the translation from the original centroids.
"""

from dataclasses import dataclass, field

import numpy as np

from . import canon, ume
from .errors import DegenerateGeometryError, InvalidInputError
from .geom import PointCloud, RigidTransform

RESIDUAL_WARN_FACTOR = 0.1


@dataclass(frozen=True)
class RegistrationResult:
    transform: RigidTransform
    chosen_constellation: int
    residual: float
    degeneracy_flags: frozenset = field(default_factory=frozenset)


def horn_rotation(u, v, weights=None):
    """Least-squares rotation R minimizing sum_i w_i ||v_i - R u_i||^2 over SO(3).

    Kabsch-SVD realization of Horn's closed-form procedure; the determinant
    correction guards against reflections. Requires the weighted
    cross-covariance K = sum w_i v_i u_i^T to have rank >= 2.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    if u.shape != v.shape or u.shape[0] < 3 or u.shape[1] != 3:
        raise InvalidInputError("need >= 3 corresponding 3-vectors of equal count")
    if weights is None:
        weights = np.ones(len(u))
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise InvalidInputError("weights must be non-negative")
    K = (v * weights[:, None]).T @ u
    A, S, Bt = np.linalg.svd(K)
    if S[1] <= 1e-12 * max(S[0], 1e-300):
        raise DegenerateGeometryError(
            "cross-covariance rank <= 1", flags={"degenerate_correspondences"}
        )
    d = np.sign(np.linalg.det(A @ Bt))
    R = A @ np.diag([1.0, 1.0, d]) @ Bt
    return R


def estimate_translation(R, m1, m2):
    """Translation completing the rigid map once the rotation is known."""
    return np.asarray(m2, dtype=float) - R @ np.asarray(m1, dtype=float)


def _moment_setup(q1, q2, n_channels):
    # Shared pooled-quantile bank over the radii of both centered clouds.
    r1 = np.linalg.norm(q1.points, axis=1)
    r2 = np.linalg.norm(q2.points, axis=1)
    bank = ume.quantile_bank(np.concatenate([r1, r2]), n_channels)
    w1 = ume.apply_weights(ume.FeatureValues(r1[:, None]), bank)
    w2 = ume.apply_weights(ume.FeatureValues(r2[:, None]), bank)
    return w1, w2


def _solve_from_moments(m1_vecs, m2_vecs, weights):
    keep = weights > 0
    if keep.sum() < 3:
        raise DegenerateGeometryError(
            "fewer than 3 usable moment-vector pairs", flags={"degenerate_moments"}
        )
    R = horn_rotation(m1_vecs.T[keep], m2_vecs.T[keep], weights[keep])
    residual = float(np.linalg.norm(m2_vecs - R @ m1_vecs))
    return R, residual


def register_ume(p1, p2, n_channels=ume.DEFAULT_CHANNELS):
    """Closed-form UME registration of two clouds; returns transform P1 -> P2."""
    if len(p1) < 4 or len(p2) < 4:
        raise InvalidInputError("registration needs clouds of >= 4 points")
    m1, m2 = p1.centroid(), p2.centroid()
    q1 = PointCloud(p1.points - m1)
    q2 = PointCloud(p2.points - m2)

    frame1 = canon.pca_frame(p1)
    frame2 = canon.pca_frame(p2)
    chosen, _ = canon.disambiguate(frame1, frame2)
    flags = set()
    if frame1.degenerate_spectrum or frame2.degenerate_spectrum:
        flags.add("near_degenerate_spectrum")

    w1, w2 = _moment_setup(q1, q2, n_channels)
    mom1 = ume.moment_vectors(q1, w1)
    mom2 = ume.moment_vectors(q2, w2)
    # Empty or sparsely hit bins carry no signal under sampling noise.
    occupancy = np.minimum(w1.values.sum(axis=0), w2.values.sum(axis=0))
    R, residual = _solve_from_moments(mom1, mom2, occupancy)
    if residual > RESIDUAL_WARN_FACTOR * np.linalg.norm(mom2):
        flags.add("high_residual")

    t = estimate_translation(R, m1, m2)
    return RegistrationResult(RigidTransform(R, t), chosen, residual, frozenset(flags))


def export_canonical_frames(p1, p2, n_channels=ume.DEFAULT_CHANNELS):
    """Canonical frames plus echo feature data for the external trainer.

    Returns (frame1, frame2_chosen, chosen_index, features1, features2) where
    frame2_chosen is frame2 at the Chamfer-chosen sign constellation and the
    features are the pooled-quantile radial-bin channels of each centered
    cloud. Bundles built from these reproduce register_ume exactly.
    """
    frame1 = canon.pca_frame(p1)
    frame2 = canon.pca_frame(p2)
    chosen, _ = canon.disambiguate(frame1, frame2)
    frame2c = frame2.with_signs(canon.SIGN_PATTERNS[chosen])
    q1 = PointCloud(p1.points - frame1.m)
    q2 = PointCloud(p2.points - frame2.m)
    w1, w2 = _moment_setup(q1, q2, n_channels)
    return frame1, frame2c, chosen, w1, w2


def register_with_external(p1, p2, bundle1, bundle2):
    """UME registration driven by externally supplied coordinates and features.

    Bundle coordinates live in each cloud's canonical frame and are
    reprojected into world coordinates (bundle2 through the Chamfer-chosen
    sign constellation); bundle feature channels are used directly as the
    invariant features for the moment vectors.
    """
    if bundle1.n_features != bundle2.n_features:
        raise InvalidInputError("bundles must share the feature channel count")
    if bundle1.n_features < 3:
        raise InvalidInputError("external registration needs K >= 3 feature channels")

    frame1 = canon.pca_frame(p1)
    frame2 = canon.pca_frame(p2)
    if bundle1.n_points != len(frame1.C) or bundle2.n_points != len(frame2.C):
        raise InvalidInputError("bundle point counts must match their clouds")
    chosen, _ = canon.disambiguate(frame1, frame2)
    frame2c = frame2.with_signs(canon.SIGN_PATTERNS[chosen])

    world1 = canon.reproject(frame1, PointCloud(bundle1.coords))
    world2 = canon.reproject(frame2c, PointCloud(bundle2.coords))
    m1, m2 = world1.centroid(), world2.centroid()
    q1 = PointCloud(world1.points - m1)
    q2 = PointCloud(world2.points - m2)

    f1 = ume.FeatureValues(bundle1.features)
    f2 = ume.FeatureValues(bundle2.features)
    mom1 = ume.moment_vectors(q1, f1)
    mom2 = ume.moment_vectors(q2, f2)
    # Occupancy analog for arbitrary features: nonzero support per channel.
    occupancy = np.minimum(
        (f1.values != 0).sum(axis=0), (f2.values != 0).sum(axis=0)
    ).astype(float)
    R, residual = _solve_from_moments(mom1, mom2, occupancy)
    flags = set()
    if residual > RESIDUAL_WARN_FACTOR * np.linalg.norm(mom2):
        flags.add("high_residual")

    t = estimate_translation(R, m1, m2)
    return RegistrationResult(RigidTransform(R, t), chosen, residual, frozenset(flags))
