"""Observation models: Bernoulli sampling, zero-intersection sampling, AWGN.

All draws come from an explicit numpy Generator, so the models are
reproducible and thread-safe given independent streams.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geom import PointCloud

RESAMPLE_ATTEMPTS = 100


@dataclass(frozen=True)
class NoiseSpec:
    """Serializable description of one noise scenario.

    kind is one of "none", "bernoulli", "zero_intersection", "awgn".
    q1/q2 are keep-probabilities in (0, 1]; sigma is a standard deviation in
    model units. A value of None means "draw per trial from the paper's range"
    (q uniform in [0.2, 1], sigma uniform in [0, 0.04]).
    """

    kind: str = "none"
    q1: float | None = None
    q2: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in ("none", "bernoulli", "zero_intersection", "awgn"):
            raise InvalidInputError(f"unknown noise kind {self.kind!r}")
        for q in (self.q1, self.q2):
            if q is not None and not 0.0 < q <= 1.0:
                raise InvalidInputError("keep-probabilities must be in (0, 1]")
        if self.sigma is not None and self.sigma < 0:
            raise InvalidInputError("sigma must be >= 0")


def bernoulli_noise(p1, p2, q1, q2, rng):
    """Keep each point of cloud i independently with probability q_i.

    Clouds must be in correspondence; ids are preserved so the surviving
    correspondences stay identifiable. Retries up to 100 times rather than
    returning an empty cloud.
    """
    if not 0.0 < q1 <= 1.0 or not 0.0 < q2 <= 1.0:
        raise InvalidInputError("keep-probabilities must be in (0, 1]")
    out = []
    for cloud, q in ((p1, q1), (p2, q2)):
        for _ in range(RESAMPLE_ATTEMPTS):
            keep = rng.random(len(cloud)) < q
            if keep.any():
                break
        else:
            raise InvalidInputError(
                f"Bernoulli sampling produced an empty cloud {RESAMPLE_ATTEMPTS} times"
            )
        ids = cloud.ids[keep] if cloud.ids is not None else None
        out.append(PointCloud(cloud.points[keep], ids))
    return out[0], out[1]


def zero_intersection(parent1, parent2, rng):
    """Split corresponding parents into complementary halves sharing no samples.

    A uniform random half S of the indices goes to cloud 1; cloud 2 keeps the
    complement, so by construction no point in one cloud is the rigid image of
    a point in the other.
    """
    n = len(parent1)
    if len(parent2) != n:
        raise InvalidInputError("parents must be in correspondence (equal sizes)")
    if n % 2 != 0:
        raise InvalidInputError("zero_intersection needs an even parent size")
    half = n // 2
    if parent1.ids is not None and parent2.ids is not None:
        # Correspondence by id: immune to point-order shuffles of either cloud.
        shared = np.sort(parent1.ids)
        if not np.array_equal(shared, np.sort(parent2.ids)):
            raise InvalidInputError("parents must share the same id set")
        chosen = shared[np.sort(rng.permutation(n)[:half])]
        keep1 = np.isin(parent1.ids, chosen)
        keep2 = ~np.isin(parent2.ids, chosen)
        return (
            PointCloud(parent1.points[keep1], parent1.ids[keep1]),
            PointCloud(parent2.points[keep2], parent2.ids[keep2]),
        )
    perm = rng.permutation(n)
    s = np.sort(perm[:half])
    comp = np.sort(perm[half:])
    return PointCloud(parent1.points[s]), PointCloud(parent2.points[comp])


def awgn(p2, sigma, rng):
    """Perturb every coordinate with independent N(0, sigma^2) noise, no clipping."""
    if sigma < 0:
        raise InvalidInputError("sigma must be >= 0")
    if sigma == 0:
        return p2
    pts = p2.points + rng.normal(0.0, sigma, size=p2.points.shape)
    return PointCloud(pts, p2.ids)
