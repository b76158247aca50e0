"""Trainer CLI: train, generate, reconstruct, unseen-split.

Tensors travel in the shared container format, so outputs plug straight
into the core package's metrics and vice versa.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentSplit, TrainerConfig
from .container import load_tensor, save_tensor
from .splits import split_unseen
from .training import (
    Checkpoint,
    generate,
    load_checkpoint,
    reconstruction_loss,
    save_checkpoint,
    train,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="x-trainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a generator on a tensor file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="checkpoint path")
    p.add_argument("--mode", choices=["deepx", "baseline"], default="deepx")
    p.add_argument("--theta-a", type=float, default=None)
    p.add_argument("--theta-b", type=float, default=None)
    p.add_argument("--length-scale", type=float, default=2.0)
    p.add_argument("--q", type=float, default=0.90)
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--learning-rate", type=float, default=1e-4)
    p.add_argument("--embedding-loss-weight", type=float, default=1.0)
    p.add_argument("--latent-dim", type=int, default=32)
    p.add_argument("--critic-every", type=int, default=2,
                   help="critic updates once per this many generator steps")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("generate", help="sample an ensemble from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("reconstruct", help="latent-optimization reconstruction losses")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--output", required=True, help="JSON with per-target losses")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--n-targets", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="target subsampling seed")

    p = sub.add_parser("unseen-split", help="materialize one experiment row")
    p.add_argument("--input", required=True)
    p.add_argument("--train-variant", choices=["Complete", "NoExtreme"], default="Complete")
    p.add_argument("--test-variant", choices=["Complete", "NoExtreme", "ExtremeOnly"],
                   default="ExtremeOnly")
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--report-out", default=None)
    return parser


def _cmd_train(args) -> int:
    values = load_tensor(args.input)
    if args.mode == "baseline":
        cfg = TrainerConfig.baseline(
            length_scale=args.length_scale, q=args.q, iterations=args.iterations,
            batch_size=args.batch_size, learning_rate=args.learning_rate,
            embedding_loss_weight=args.embedding_loss_weight,
            latent_dim=args.latent_dim, critic_every=args.critic_every, seed=args.seed,
        )
    else:
        cfg = TrainerConfig(
            mode="deepx",
            theta_a=0.5 if args.theta_a is None else args.theta_a,
            theta_b=0.5 if args.theta_b is None else args.theta_b,
            length_scale=args.length_scale, q=args.q, iterations=args.iterations,
            batch_size=args.batch_size, learning_rate=args.learning_rate,
            embedding_loss_weight=args.embedding_loss_weight,
            latent_dim=args.latent_dim, critic_every=args.critic_every, seed=args.seed,
        )
    ckpt = train(cfg, values)
    save_checkpoint(ckpt, args.output)
    first = ckpt.generator_losses[: max(1, len(ckpt.generator_losses) // 10)]
    last = ckpt.generator_losses[-max(1, len(ckpt.generator_losses) // 10):]
    print(json.dumps({
        "iterations": len(ckpt.generator_losses),
        "generator_loss_first_decile_median": float(np.median(first)),
        "generator_loss_last_decile_median": float(np.median(last)),
    }, sort_keys=True))
    return 0


def _cmd_generate(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    fields = generate(ckpt, args.n, args.seed)
    save_tensor(fields, args.output)
    return 0


def _cmd_reconstruct(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    targets = load_tensor(args.targets)
    if args.n_targets < len(targets):
        rng = np.random.default_rng(args.seed)
        targets = targets[rng.choice(len(targets), size=args.n_targets, replace=False)]
    losses = reconstruction_loss(ckpt, targets, max_iters=args.max_iters, lr=args.lr)
    q1, med, q3 = (float(v) for v in np.percentile(losses, [25, 50, 75]))
    payload = {
        "losses": [float(v) for v in losses],
        "median": med,
        "q1": q1,
        "q3": q3,
        "max_iters": args.max_iters,
        "lr": args.lr,
    }
    Path(args.output).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    print(json.dumps({"median": med, "q1": q1, "q3": q3}, sort_keys=True))
    return 0


def _cmd_unseen_split(args) -> int:
    values = load_tensor(args.input)
    rule = ExperimentSplit(
        train_variant=args.train_variant, test_variant=args.test_variant, top_k=args.top_k
    )
    result = split_unseen(values, rule)
    save_tensor(result.train_values, args.train_out)
    if len(result.test_values):
        save_tensor(result.test_values, args.test_out)
    report = {
        **result.counts,
        "train_variant": args.train_variant,
        "test_variant": args.test_variant,
        "top_k": args.top_k,
    }
    if args.report_out:
        Path(args.report_out).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    print(json.dumps(report, sort_keys=True))
    return 0


_DISPATCH = {
    "train": _cmd_train,
    "generate": _cmd_generate,
    "reconstruct": _cmd_reconstruct,
    "unseen-split": _cmd_unseen_split,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
