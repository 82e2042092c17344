"""Held-out comparison of learned bundles against the closed-form solver.

Everything goes through the umereg command line: pairs are generated with
`synth` + `export-canon`, both methods are run with `register`, and the
per-pair rotation error comes from `metrics --gt --pred`.
"""

import json
import os
import subprocess

import numpy as np

from .data import UMEREG, load_pair, pair_dir, prepare_pair
from .export import export_bundles


def _register(src, dst, out, method="ume", umef_src=None, umef_dst=None):
    args = [UMEREG, "register", "--src", src, "--dst", dst, "--method", method, "--out", out]
    if method == "external":
        args += ["--umef-src", umef_src, "--umef-dst", umef_dst]
    proc = subprocess.run(args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"register failed:\n{proc.stderr}")


def _rotation_error(src, dst, gt, pred):
    proc = subprocess.run(
        [UMEREG, "metrics", "--src", src, "--dst", dst, "--gt", gt, "--pred", pred],
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)["rmse_rotation_deg"]


def held_out_comparison(model, cfg, seeds):
    """Pooled RMSE(R) in degrees for the closed-form and learned methods.

    Per-pair RMSEs already average three squared angle errors, so pooling
    their squares keeps the dataset-level convention.
    """
    sq = {"ume": [], "external": []}
    for seed in seeds:
        d = prepare_pair(cfg, seed)
        sample = load_pair(d)
        src, dst = os.path.join(d, "pair_src.xyz"), os.path.join(d, "pair_dst.xyz")
        gt = os.path.join(d, "pair_gt.json")
        export_bundles(
            model,
            sample["c1"],
            sample["f1"],
            sample["c2"],
            sample["f2"],
            os.path.join(d, "learned_src.umef"),
            os.path.join(d, "learned_dst.umef"),
        )
        pred_u = os.path.join(d, "pred_ume.json")
        pred_e = os.path.join(d, "pred_ext.json")
        _register(src, dst, pred_u)
        _register(
            src,
            dst,
            pred_e,
            method="external",
            umef_src=os.path.join(d, "learned_src.umef"),
            umef_dst=os.path.join(d, "learned_dst.umef"),
        )
        sq["ume"].append(_rotation_error(src, dst, gt, pred_u) ** 2)
        sq["external"].append(_rotation_error(src, dst, gt, pred_e) ** 2)
    return {k: float(np.sqrt(np.mean(v))) for k, v in sq.items()}
