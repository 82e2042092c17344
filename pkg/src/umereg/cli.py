"""Command-line interface.

Subcommands:
  register      estimate the rigid transform between two cloud files
  synth         generate a noisy observation pair + ground-truth transform
  bench         run a benchmark config and emit the report CSV
  metrics       score two clouds (optionally against a ground-truth transform)
  export-canon  write canonical frames + UMEF skeletons for the trainer
"""

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from . import solver, synthetic
from .errors import InvalidInputError
from .geom import apply_transform
from .icp import icp
from .io_formats import (
    UMEFBundle,
    load_cloud,
    load_off,
    read_transform_json,
    read_umef,
    save_xyz,
    write_transform_json,
    write_umef,
)
from .metrics import chamfer, hausdorff, rmse_rotation, rmse_translation
from .noise import NoiseSpec


def _load_mesh_arg(spec):
    if spec == "synthetic:hull":
        return synthetic.asymmetric_hull_mesh()
    if spec == "synthetic:box":
        return synthetic.box_mesh()
    return load_off(spec)


def cmd_register(args):
    src = load_cloud(args.src)
    dst = load_cloud(args.dst)
    if args.method == "ume":
        result = solver.register_ume(src, dst)
    elif args.method == "icp":
        result = icp(src, dst)
    else:
        if not (args.umef_src and args.umef_dst):
            raise InvalidInputError("--method external needs --umef-src and --umef-dst")
        result = solver.register_with_external(
            src, dst, read_umef(args.umef_src), read_umef(args.umef_dst)
        )
    write_transform_json(result.transform, args.out)
    print(
        f"method={args.method} residual={result.residual:.6g} "
        f"constellation={result.chosen_constellation} flags={sorted(result.degeneracy_flags)}"
    )
    return 0


def cmd_synth(args):
    mesh = _load_mesh_arg(args.mesh)
    kind = args.noise.replace("-", "_")
    if kind == "vanilla":
        kind = "none"
    cfg = bench_mod.ExperimentConfig(
        n_parent=args.n_parent,
        noise=NoiseSpec(kind, args.q1, args.q2, args.sigma),
        trials=1,
        seed=args.seed,
    )
    rng = np.random.default_rng([args.seed, 0, 0])
    p1, p2, gt = bench_mod.make_trial_pair(mesh, cfg, args.n_parent, rng)
    save_xyz(p1, args.out_prefix + "_src.xyz")
    save_xyz(p2, args.out_prefix + "_dst.xyz")
    write_transform_json(gt, args.out_prefix + "_gt.json")
    print(f"wrote {args.out_prefix}_src.xyz ({len(p1)} pts), _dst.xyz ({len(p2)} pts), _gt.json")
    return 0


def cmd_bench(args):
    cfg = bench_mod.parse_config(args.config)
    rows = bench_mod.run_experiment(cfg)
    bench_mod.emit_report(rows, args.out, fmt="csv")
    if args.markdown:
        bench_mod.emit_report(rows, args.markdown, fmt="markdown")
    if args.trials_out:
        bench_mod.write_trial_csv(rows, args.trials_out)
    for row in rows:
        r = row.report
        print(
            f"{row.method:8s} {row.scenario:24s} d_C={r.chamfer:.6g} d_H={r.hausdorff:.6g} "
            f"RMSE(R)={r.rmse_rotation_deg:.6g} RMSE(t)={r.rmse_translation:.6g} "
            f"trials={r.trials} failures={r.failures}"
        )
    return 0


def cmd_metrics(args):
    src = load_cloud(args.src)
    dst = load_cloud(args.dst)
    out = {"chamfer": chamfer(src, dst), "hausdorff": hausdorff(src, dst)}
    if args.gt:
        gt = read_transform_json(args.gt)
        aligned = apply_transform(src, gt)
        out["chamfer_gt_aligned"] = chamfer(aligned, dst)
        out["hausdorff_gt_aligned"] = hausdorff(aligned, dst)
        if args.pred:
            pred = read_transform_json(args.pred)
            out["rmse_rotation_deg"] = rmse_rotation(gt.R, pred.R)
            out["rmse_translation"] = rmse_translation(gt.t, pred.t)
    print(json.dumps(out, indent=2))
    return 0


def cmd_export_canon(args):
    src = load_cloud(args.src)
    dst = load_cloud(args.dst)
    frame1, frame2c, chosen, w1, w2 = solver.export_canonical_frames(src, dst)
    for name, frame in (("src", frame1), ("dst", frame2c)):
        payload = {
            "centroid": list(frame.m),
            "axes_rowmajor": list(frame.D.ravel()),
            "eigenvalues": list(frame.eigenvalues),
            "chosen_constellation": chosen,
            "degenerate_spectrum": frame.degenerate_spectrum,
        }
        with open(f"{args.out_prefix}_{name}.canon.json", "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    write_umef(UMEFBundle(frame1.C.points, w1.values), args.out_prefix + "_src.umef")
    write_umef(UMEFBundle(frame2c.C.points, w2.values), args.out_prefix + "_dst.umef")
    print(f"wrote {args.out_prefix}_{{src,dst}}.canon.json and .umef (constellation {chosen})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="umereg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register", help="register two point cloud files")
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--method", choices=("ume", "icp", "external"), default="ume")
    p.add_argument("--umef-src")
    p.add_argument("--umef-dst")
    p.add_argument("--out", required=True, help="output transform JSON path")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("synth", help="generate a noisy observation pair")
    p.add_argument("--mesh", required=True, help="OFF path, synthetic:hull or synthetic:box")
    p.add_argument(
        "--noise",
        choices=("vanilla", "bernoulli", "zero-intersection", "awgn"),
        default="vanilla",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-parent", type=int, default=2048)
    p.add_argument("--q1", type=float)
    p.add_argument("--q2", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run a benchmark config")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--markdown", help="optional markdown report path")
    p.add_argument("--trials-out", help="optional per-trial CSV path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("metrics", help="score two clouds")
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--gt", help="ground-truth transform JSON")
    p.add_argument("--pred", help="predicted transform JSON (enables RMSE vs --gt)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-canon", help="write canonical frames + UMEF skeletons")
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_export_canon)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
