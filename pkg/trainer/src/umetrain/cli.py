"""Command-line interface.

Subcommands:
  train   prepare the dataset (via the umereg CLI), train, save a checkpoint
  export  run a checkpoint on one canonical pair and write UMEF bundles
"""

import argparse
import sys

from .config import TrainerConfigError, parse_config
from .data import load_pair
from .export import export_bundles
from .train import load_checkpoint, save_checkpoint, train


def cmd_train(args):
    cfg = parse_config(args.config)
    model, history = train(cfg)
    save_checkpoint(model, cfg, history, args.out)
    drop = 1.0 - history["best_val_loss"] / history["val_loss"][0]
    print(f"saved {args.out}; best val loss {history['best_val_loss']:.5f} "
          f"({100 * drop:.1f}% below epoch 0)")
    return 0


def cmd_export(args):
    model, cfg, _ = load_checkpoint(args.checkpoint)
    sample = load_pair(args.pair_dir)
    export_bundles(
        model,
        sample["c1"],
        sample["f1"],
        sample["c2"],
        sample["f2"],
        args.out_prefix + "_src.umef",
        args.out_prefix + "_dst.umef",
    )
    print(f"wrote {args.out_prefix}_src.umef and _dst.umef")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="umetrain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export", help="write UMEF bundles for one prepared pair")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--pair-dir", required=True, help="directory made by dataset prep")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TrainerConfigError, FileNotFoundError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
