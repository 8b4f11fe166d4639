"""Command-line entry point: init-tiny, train, generate."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import load_train_config
from .generate import DecodeSettings, generate
from .tiny import init_tiny
from .train import select_best, train


def cmd_init_tiny(args) -> int:
    out = init_tiny(
        args.corpus, args.out,
        d_model=args.d_model, num_layers=args.layers, num_heads=args.heads,
        d_ff=args.d_ff, vocab_cap=args.vocab_cap,
        pretrain_steps=args.pretrain_steps, pretrain_batch=args.pretrain_batch,
        pretrain_lr=args.pretrain_lr, seed=args.seed)
    print(f"tiny checkpoint written to {out}")
    return 0


def cmd_train(args) -> int:
    config = load_train_config(args.config)
    records = train(config)
    for record in records:
        print(f"epoch {record.epoch}: valid WER {record.val_wer:.2f}%  "
              f"({record.path})")
    best = select_best(records)
    print(f"best: epoch {best.epoch} (valid WER {best.val_wer:.2f}%) "
          f"at {best.path}")
    return 0


def cmd_generate(args) -> int:
    settings = DecodeSettings(num_beams=args.beams,
                              max_new_tokens=args.max_new_tokens,
                              max_input_tokens=args.max_input_tokens,
                              batch_size=args.batch_size)
    out = generate(args.checkpoint, args.prompts, args.out, settings)
    print(f"predictions written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbtrainer",
        description="fine-tune seq2seq correction models on prompt corpora")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init-tiny",
                       help="create a tiny offline checkpoint from corpora")
    p.set_defaults(func=cmd_init_tiny)
    p.add_argument("--corpus", nargs="+", required=True,
                   help="prompt corpus files (emission format)")
    p.add_argument("--out", required=True)
    p.add_argument("--d-model", type=int, default=192)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--d-ff", type=int, default=576)
    p.add_argument("--vocab-cap", type=int, default=4000)
    p.add_argument("--pretrain-steps", type=int, default=2500)
    p.add_argument("--pretrain-batch", type=int, default=8)
    p.add_argument("--pretrain-lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="run a fine-tuning job")
    p.set_defaults(func=cmd_train)
    p.add_argument("--config", required=True,
                   help="TOML file mirroring the training config")

    p = sub.add_parser("generate", help="decode prompts into predictions")
    p.set_defaults(func=cmd_generate)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--prompts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--beams", type=int, default=4)
    p.add_argument("--max-new-tokens", type=int, default=None)
    p.add_argument("--max-input-tokens", type=int, default=512)
    p.add_argument("--batch-size", type=int, default=8)

    return parser


def dispatch(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
