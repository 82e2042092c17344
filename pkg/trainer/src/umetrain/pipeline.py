"""Differentiable moments -> rotation -> Chamfer pipeline used as the loss.

Mirrors the closed-form solver's structure: channel moments of both clouds,
an occupancy-weighted orthogonal Procrustes rotation, then the symmetric
Chamfer distance of the aligned clouds. The SVD backward is the smooth
autograd one; pairs whose cross-covariance has a near-degenerate singular
spectrum are skipped to keep gradients bounded.
"""

import torch

EPS = 1e-12


def channel_moments(coords, features):
    """Mean moment vector per channel: (B, 3, K)."""
    return coords.transpose(1, 2) @ features / coords.shape[1]


def soft_occupancy(f1, f2):
    """Per-channel weights: the smaller of the two clouds' total channel mass."""
    return torch.minimum(f1.sum(dim=1), f2.sum(dim=1)).clamp_min(0.0)


def procrustes_rotation(m1, m2, weights):
    """Weighted rotation aligning moment sets m1 -> m2.

    Returns (rotations (B,3,3), valid mask (B,)); invalid entries hold the
    identity and must not contribute to the loss.
    """
    k = (m2 * weights.unsqueeze(1)) @ m1.transpose(1, 2)
    u, s, vt = torch.linalg.svd(k)
    gap = (s[:, 0] - s[:, 1]).minimum(s[:, 1] - s[:, 2])
    valid = (gap > 1e-6) & (s[:, 1] > EPS * s[:, 0])
    det = torch.linalg.det(u @ vt)
    d = torch.stack([torch.ones_like(det), torch.ones_like(det), det], dim=1)
    rot = u @ (d.unsqueeze(2) * vt)
    eye = torch.eye(3, dtype=rot.dtype, device=rot.device).expand_as(rot)
    return torch.where(valid.view(-1, 1, 1), rot, eye), valid


def chamfer(p1, p2):
    """Symmetric mean nearest-neighbor distance per batch element: (B,)."""
    d = torch.cdist(p1, p2)
    return d.min(dim=2).values.mean(dim=1) + d.min(dim=1).values.mean(dim=1)


def pair_loss(c1, f1_hat, c2, f2_hat, r1, r2):
    """Chamfer of the aligned original canonical clouds.

    The resampled coordinates r1/r2 feed the moment estimate only; the
    distance is scored on the clouds actually observed, so the resampler
    cannot cheat by collapsing both clouds onto each other.
    """
    m1 = channel_moments(r1, f1_hat)
    m2 = channel_moments(r2, f2_hat)
    weights = soft_occupancy(f1_hat, f2_hat)
    rot, valid = procrustes_rotation(m1, m2, weights)
    t = c2.mean(dim=1) - (rot @ c1.mean(dim=1).unsqueeze(2)).squeeze(2)
    aligned = c1 @ rot.transpose(1, 2) + t.unsqueeze(1)
    return chamfer(aligned, c2), valid, rot, t


def batch_loss(model, batch):
    """Mean Chamfer loss over the valid pairs of one batch."""
    r1, f1_hat, r2, f2_hat = model(batch["c1"], batch["f1"], batch["c2"], batch["f2"])
    per_pair, valid, _, _ = pair_loss(batch["c1"], f1_hat, batch["c2"], f2_hat, r1, r2)
    if not bool(valid.any()):
        return None, 0
    return per_pair[valid].mean(), int(valid.sum())
