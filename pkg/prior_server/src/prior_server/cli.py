"""prior-server command line: train, serve, make-uniform, sbert-eval."""

from __future__ import annotations

import argparse
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="prior-server", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune a byte denoiser")
    p.add_argument("--corpus", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--arch", choices=["scratch", "byt5"], default="scratch")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--flip-rate", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sentences", type=int)
    p.add_argument("--d-model", type=int, default=128)
    p.add_argument("--layers", type=int, default=5)

    p = sub.add_parser("serve", help="serve a checkpoint over TCP or stdio")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=9431)
    p.add_argument("--stdio", action="store_true")

    p = sub.add_parser("make-uniform", help="write the uniform debug checkpoint")
    p.add_argument("--output", required=True)

    p = sub.add_parser("sbert-eval", help="mean cosine similarity over a pair TSV")
    p.add_argument("--pairs", required=True)
    p.add_argument("--model", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            from .train import finetune

            finetune(
                args.corpus, args.output, arch=args.arch, epochs=args.epochs, lr=args.lr,
                batch=args.batch, p=args.flip_rate, seed=args.seed,
                max_sentences=args.max_sentences, d_model=args.d_model, layers=args.layers,
            )
        elif args.command == "serve":
            from .server import serve_stdio, serve_tcp

            if args.stdio:
                serve_stdio(args.checkpoint)
            else:
                serve_tcp(args.checkpoint, args.host, args.port)
        elif args.command == "make-uniform":
            from .model import build_model, save_checkpoint

            save_checkpoint(args.output, build_model("uniform"), "uniform", {})
            print(f"wrote {args.output}")
        elif args.command == "sbert-eval":
            from .sbert import DEFAULT_MODEL, sbert_eval

            score = sbert_eval(args.pairs, args.model or DEFAULT_MODEL)
            print(f"{score:.4f}")
        return 0
    except (RuntimeError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
