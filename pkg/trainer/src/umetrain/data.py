"""Dataset preparation and loading.

Pairs are generated by the umereg command line (synth + export-canon), so the
trainer sees exactly the observation model and canonicalization the solver
uses. Each pair lives under <dataset_dir>/pair_<seed>/ as:

    pair_src.xyz, pair_dst.xyz, pair_gt.json      raw observations
    canon_src.umef, canon_dst.umef                canonical coords + features
    canon_src.canon.json, canon_dst.canon.json    frame metadata
"""

import os
import subprocess

import numpy as np

from .interchange import read_transform_json, read_umef

UMEREG = os.environ.get("UMEREG_BIN", "umereg")


def _run(args):
    proc = subprocess.run(args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"{' '.join(args)} failed:\n{proc.stderr}")


def pair_dir(cfg, seed):
    return os.path.join(cfg.dataset_dir, f"pair_{seed:05d}")


def prepare_pair(cfg, seed):
    """Generate one observation pair and its canonical export; idempotent."""
    d = pair_dir(cfg, seed)
    if os.path.exists(os.path.join(d, "canon_dst.umef")):
        return d
    os.makedirs(d, exist_ok=True)
    prefix = os.path.join(d, "pair")
    _run(
        [
            UMEREG,
            "synth",
            "--mesh",
            cfg.mesh,
            "--noise",
            cfg.noise,
            "--seed",
            str(seed),
            "--n-parent",
            str(cfg.n_points),
            "--out-prefix",
            prefix,
        ]
    )
    _run(
        [
            UMEREG,
            "export-canon",
            "--src",
            prefix + "_src.xyz",
            "--dst",
            prefix + "_dst.xyz",
            "--out-prefix",
            os.path.join(d, "canon"),
        ]
    )
    return d


def prepare_dataset(cfg, seeds=None):
    seeds = range(cfg.n_pairs) if seeds is None else seeds
    return [prepare_pair(cfg, s) for s in seeds]


def load_pair(directory):
    """One training sample: canonical coords, base features, ground truth."""
    c1, f1 = read_umef(os.path.join(directory, "canon_src.umef"))
    c2, f2 = read_umef(os.path.join(directory, "canon_dst.umef"))
    gt_R, gt_t = read_transform_json(os.path.join(directory, "pair_gt.json"))
    return {"c1": c1, "f1": f1, "c2": c2, "f2": f2, "gt_R": gt_R, "gt_t": gt_t}


def split_pairs(dirs, val_fraction, rng):
    """Deterministic train/validation split of prepared pair directories."""
    order = rng.permutation(len(dirs))
    n_val = max(1, int(round(val_fraction * len(dirs))))
    val = [dirs[i] for i in order[:n_val]]
    train = [dirs[i] for i in order[n_val:]]
    return train, val


def stack_batch(samples, dtype, device="cpu"):
    """Batch same-sized pairs into (B, N, 3) / (B, N, K) tensors."""
    import torch

    out = {}
    for key in ("c1", "f1", "c2", "f2"):
        out[key] = torch.as_tensor(
            np.stack([s[key] for s in samples]), dtype=dtype, device=device
        )
    return out
