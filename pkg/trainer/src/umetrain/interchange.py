"""Readers and writers for the interchange files produced by the umereg CLI.

The trainer talks to the registration toolkit only through these files and
its command line; nothing is imported from the umereg package.
"""

import json

import numpy as np

FLOAT_FMT = "%.17g"


def read_umef(path):
    """UMEF ASCII bundle -> (coords (N,3), features (N,K))."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if lines[0].split() != ["UMEF", "1"]:
        raise ValueError(f"{path}: expected 'UMEF 1' header")
    n = int(lines[1].split()[1])
    k = int(lines[2].split()[1])
    rows = np.array(
        [[float(x) for x in ln.split()] for ln in lines[3 : 3 + n]], dtype=float
    )
    if rows.shape != (n, 3 + k):
        raise ValueError(f"{path}: expected {n} rows of {3 + k} values")
    return rows[:, :3], rows[:, 3:]


def write_umef(coords, features, path):
    coords = np.asarray(coords, dtype=float)
    features = np.asarray(features, dtype=float)
    if features.shape[1] < 3:
        raise ValueError("UMEF export needs at least 3 feature channels")
    with open(path, "w") as fh:
        fh.write("UMEF 1\n")
        fh.write(f"points {len(coords)}\n")
        fh.write(f"features {features.shape[1]}\n")
        for row in np.hstack([coords, features]):
            fh.write(" ".join(FLOAT_FMT % x for x in row) + "\n")


def read_transform_json(path):
    with open(path) as fh:
        payload = json.load(fh)
    R = np.array(payload["rotation"], dtype=float).reshape(3, 3)
    t = np.array(payload["translation"], dtype=float)
    return R, t


def read_canon_json(path):
    with open(path) as fh:
        payload = json.load(fh)
    return {
        "centroid": np.array(payload["centroid"], dtype=float),
        "axes": np.array(payload["axes_rowmajor"], dtype=float).reshape(3, 3),
        "eigenvalues": np.array(payload["eigenvalues"], dtype=float),
        "chosen_constellation": int(payload["chosen_constellation"]),
        "degenerate_spectrum": bool(payload["degenerate_spectrum"]),
    }
