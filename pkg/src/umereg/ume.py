"""Discrete UME moment embedding: invariant features, weight banks, moments.

The discrete UME matrix of a cloud P and per-point weights w_j(F(p)) is

    M[i][j] = sum_p p_i * w_j(F(p))          (sum normalization)

divided by |P| under mean normalization. For clouds related by a rotation and
a rotation-invariant F, M transforms covariantly: M2 = R @ M1.

The ε-ball construction gives an independent analytic oracle: replacing each
point by an indicator ball of radius ε (balls disjoint, w_j(0) = 0), the
continuous UME entries equal the discrete sums exactly after dividing by the
ball volume, because a ball's first moment is its center times its volume.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ConfigError, InvalidInputError

# Radial values are snapped to this many significant digits before quantile
# edges are computed and indicators applied. Corresponding points in a rotated
# copy carry ~1e-16 relative fp jitter; without snapping a pooled quantile
# edge can fall between the two copies and flip the point's bin.
SNAP_SIG_DIGITS = 7

DEFAULT_CHANNELS = 8
EDGE_FLOOR = 1e-9


@dataclass(frozen=True)
class FeatureValues:
    """N x K matrix of per-point feature channel values, aligned with point order."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if v.ndim != 2:
            raise InvalidInputError("feature values must be 2-D")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("feature values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_channels(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class WeightBank:
    """Bank of D weight functions w_j with w_j(0) = 0.

    kind "quantile-bins": w_j is the indicator of (b_{j-1}, b_j], params are
    the edges b_0 < ... < b_D with b_0 > 0. kind "power": w_j(x) = x**e_j with
    every exponent >= 1.
    """

    kind: str
    params: np.ndarray

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        if self.kind == "quantile-bins":
            if params.ndim != 1 or len(params) < 2:
                raise ConfigError("bin bank needs at least 2 edges")
            if np.any(np.diff(params) <= 0):
                raise ConfigError("bin edges must be strictly increasing")
            if params[0] <= 0:
                raise ConfigError("smallest bin edge must be positive (w_j(0)=0)")
        elif self.kind == "power":
            if params.ndim != 1 or len(params) < 1:
                raise ConfigError("power bank needs at least one exponent")
            if np.any(params < 1):
                raise ConfigError("power exponents must be >= 1 (w_j(0)=0)")
        else:
            raise ConfigError(f"unknown bank kind {self.kind!r}")
        params = params.copy()
        params.flags.writeable = False
        object.__setattr__(self, "params", params)

    @property
    def n_channels(self):
        return len(self.params) - 1 if self.kind == "quantile-bins" else len(self.params)


@dataclass(frozen=True)
class UMEMatrix:
    """3 x D moment matrix plus the normalization it was computed under."""

    M: np.ndarray
    normalization: str

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if M.shape[0] != 3 or not np.all(np.isfinite(M)):
            raise InvalidInputError("UME matrix must be finite with 3 rows")
        object.__setattr__(self, "M", M)


def snap(values, sig_digits=SNAP_SIG_DIGITS):
    """Round to a fixed number of significant digits (elementwise, sign-safe)."""
    v = np.asarray(values, dtype=float)
    out = np.zeros_like(v)
    nz = v != 0
    mag = np.floor(np.log10(np.abs(v[nz])))
    factor = 10.0 ** (sig_digits - 1 - mag)
    out[nz] = np.round(v[nz] * factor) / factor
    return out


def radial_feature(cloud):
    """Single-channel invariant feature: distance from the cloud center of mass."""
    if len(cloud) == 0:
        raise InvalidInputError("radial feature of an empty cloud")
    r = np.linalg.norm(cloud.points - cloud.centroid(), axis=1)
    return FeatureValues(r[:, None])


def quantile_bank(pooled_values, n_channels=DEFAULT_CHANNELS):
    """Indicator-bin bank with edges at evenly spaced percentiles of the pooled values.

    Pooling the radial values of both clouds being registered keeps the bank
    identical across the pair, preserving the covariance relation. Values are
    snapped before percentile computation; duplicate edges are nudged up to
    stay strictly increasing (their bins simply end up empty).
    """
    vals = snap(np.asarray(pooled_values, dtype=float).ravel())
    if len(vals) == 0:
        raise ConfigError("cannot build a bank from no values")
    qs = np.linspace(0.0, 100.0, n_channels + 1)
    edges = np.percentile(vals, qs)
    edges[0] = max(edges[0], EDGE_FLOOR)
    for i in range(1, len(edges)):
        if edges[i] <= edges[i - 1]:
            edges[i] = np.nextafter(edges[i - 1], np.inf)
    # widen the top edge a hair so the maximum pooled value stays inside
    edges[-1] = max(edges[-1], vals.max())
    return WeightBank("quantile-bins", edges)


def power_bank(n_channels=DEFAULT_CHANNELS):
    """Smooth alternative bank: exponents 1..D."""
    return WeightBank("power", np.arange(1, n_channels + 1, dtype=float))


def apply_weights(features, bank):
    """Expand a single-channel feature into the bank's D channels."""
    if features.n_channels != 1:
        raise InvalidInputError("apply_weights expects a single-channel feature")
    x = features.values[:, 0]
    if bank.kind == "quantile-bins":
        x = snap(x)
        edges = bank.params
        out = ((x[:, None] > edges[:-1]) & (x[:, None] <= edges[1:])).astype(float)
    else:
        out = x[:, None] ** bank.params[None, :]
    return FeatureValues(out)


def ume_matrix(cloud, features, normalization="mean"):
    """3 x D matrix of first moments weighted by each feature channel."""
    if normalization not in ("sum", "mean"):
        raise InvalidInputError(f"unknown normalization {normalization!r}")
    if len(cloud) != len(features.values):
        raise InvalidInputError("feature row count must match cloud size")
    if len(cloud) == 0:
        raise InvalidInputError("ume_matrix of an empty cloud")
    M = cloud.points.T @ features.values
    if normalization == "mean":
        M = M / len(cloud)
    return UMEMatrix(M, normalization)


def moment_vectors(cloud, features):
    """Mean-normalized moment vector per feature channel, as columns of a 3 x K array."""
    return ume_matrix(cloud, features, normalization="mean").M


def epsball_oracle(cloud, features, eps):
    """Analytic continuous-UME evaluation over disjoint ε-balls.

    Computes ∫ x_i w_j(f_ε(x)) dx with f_ε the sum of feature-valued ball
    indicators, using ∫_{B_ε(p)} x_i dx = p_i · Vol(B_ε), then divides by the
    ball volume. Requires ε below half the minimum pairwise distance so the
    balls are disjoint. Equals the sum-normalized discrete UME matrix.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    if len(cloud) != len(features.values):
        raise InvalidInputError("feature row count must match cloud size")
    if len(cloud) > 1:
        min_dist = float(pdist(cloud.points).min())
        if eps >= 0.5 * min_dist:
            raise InvalidInputError(
                f"eps={eps} too large: balls intersect (min pairwise distance {min_dist})"
            )
    vol = 4.0 / 3.0 * np.pi * eps**3
    n, k = features.values.shape
    M = np.zeros((3, k))
    for row in range(n):  # deliberate plain double loop: this is the oracle
        p = cloud.points[row]
        for j in range(k):
            ball_first_moment = p * vol
            M[:, j] += features.values[row, j] * ball_first_moment
    return UMEMatrix(M / vol, "sum")
