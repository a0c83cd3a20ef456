"""Command-line front end.

Subcommands: ``simulate`` (Monte-Carlo sweeps), ``bound`` (normal
approximation curve), ``train-prior`` (byte n-gram), ``serve-check``
(prior-server protocol ping), ``tepcount`` (family sizes). A plain-text
``key = value`` config file can pre-set any simulate flag; explicit flags
win over the file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds
from .codes import build
from .harness import DecoderSpec, RunConfig, run_sweep
from .semosd import bit_tep_count, byte_tep_count, tep_count


def _parse_grid(text: str) -> tuple:
    """"0:3:0.5" (start:stop:step, inclusive) or "0,1,2.5"."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    return tuple(float(x) for x in text.split(","))


def load_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _add_simulate(sub) -> None:
    p = sub.add_parser("simulate", help="run a Monte-Carlo BLER sweep")
    p.add_argument("--config", help="key=value file with defaults for the flags below")
    p.add_argument("--code", choices=["rs_16_8", "bch_127_64", "hamming_7_4"], default="rs_16_8")
    p.add_argument("--channel", choices=["awgn", "ge"], default="awgn")
    p.add_argument("--ebn0", default="0:3:0.5", help="grid: start:stop:step or comma list")
    p.add_argument("--decoder", choices=["bm", "osd", "semosd", "semosd-bit", "semosd-byte"], default="osd")
    p.add_argument("--m", type=int, default=3, help="bit-flip order")
    p.add_argument("--omega", type=int, default=2, help="max substituted bytes (semosd)")
    p.add_argument("--T", type=int, default=16, help="alternatives per byte (semosd)")
    p.add_argument("--alpha", type=float, default=0.5, help="channel weight in the fusion")
    p.add_argument("--prior", default="ngram:order=3,delta=0.05,p=0.1",
                   help="uniform | oracle:q=Q | ngram:order=N,delta=D,p=P[,model=PATH] | remote:HOST:PORT")
    p.add_argument("--early-stop", action="store_true")
    p.add_argument("--eps-stop", type=float, default=0.0)
    p.add_argument("--corpus", help="line-per-sentence text file")
    p.add_argument("--train-frac", type=float, default=0.9)
    p.add_argument("--max-blocks", type=int, default=10_000)
    p.add_argument("--min-block-errors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ge-pib", type=float, default=0.10)
    p.add_argument("--ge-burst", type=float, default=16.0)
    p.add_argument("--ge-rho2", type=float, default=100.0)
    p.add_argument("--fallback", choices=["fail", "uniform"], default="fail",
                   help="policy when a remote prior fails")
    p.add_argument("--output", help="CSV path (appended point by point)")
    p.add_argument("--json", dest="json_output", help="JSON results path")
    p.add_argument("--pairs", dest="pairs_output",
                   help="TSV of decoded-vs-reference prefix text (corpus runs only)")


def _simulate(args, argv) -> int:
    if args.config:
        overrides = load_config_file(args.config)
        explicit = {a.removeprefix("--").replace("-", "_").split("=")[0] for a in argv if a.startswith("--")}
        for key, value in overrides.items():
            if key in explicit or not hasattr(args, key):
                continue
            current = getattr(args, key)
            cast = type(current) if current is not None else str
            setattr(args, key, cast(value) if cast is not bool else value.lower() in ("1", "true", "yes"))
    kind = args.decoder
    families = "both"
    if kind == "semosd-bit":
        kind, families = "semosd", "bit"
    elif kind == "semosd-byte":
        kind, families = "semosd", "byte"
    if kind == "semosd" and args.corpus is None and not args.prior.startswith(("oracle", "uniform")):
        print("error: semosd with a text prior requires --corpus", file=sys.stderr)
        return 2
    omega = args.omega if kind == "semosd" else -1
    dec = DecoderSpec(kind=kind, m=args.m, omega=omega, T=args.T,
                      alpha=args.alpha if kind == "semosd" else 1.0,
                      prior=args.prior, early_stop=args.early_stop, eps_stop=args.eps_stop,
                      families=families)
    cfg = RunConfig(
        code=args.code, decoder=dec, ebn0_grid=_parse_grid(args.ebn0), channel_kind=args.channel,
        ge_pi_b=args.ge_pib, ge_mean_burst=args.ge_burst, ge_rho_sq=args.ge_rho2,
        max_blocks=args.max_blocks, min_block_errors=args.min_block_errors,
        master_seed=args.seed, workers=args.workers, corpus=args.corpus,
        train_frac=args.train_frac, output=args.output, json_output=args.json_output,
        pairs_output=args.pairs_output, fallback=args.fallback,
    )
    code = build(cfg.code)
    print(f"# code={cfg.code} channel={cfg.channel_kind} decoder={dec.kind}({families}) "
          f"m={dec.m} omega={dec.omega} T={dec.T} alpha={dec.alpha} prior={dec.prior}")
    print("ebn0_db blocks errors bler ci ber mean_teps mean_ms")
    for stats in run_sweep(cfg):
        print(f"{stats.ebn0_db:7.2f} {stats.blocks:6d} {stats.block_errors:6d} "
              f"{stats.bler:.6g} {stats.ci_halfwidth:.3g} {stats.ber(code.k_b):.4g} "
              f"{stats.mean_teps:.6g} {stats.mean_ms:.4g}")
    return 0


def _bound(args) -> int:
    rate = args.rate if args.rate is not None else args.k / args.n
    for ebn0 in _parse_grid(args.ebn0):
        eps = bounds.na_bler(args.n, args.k, bounds.ebn0_to_sigma_sq(ebn0, rate))
        print(f"{ebn0:.2f} {eps:.6g}")
    return 0


def _train_prior(args) -> int:
    from .corpus import load_sentences, split_train_test
    from .prior import ngram_train, save_ngram

    sentences = load_sentences(args.corpus)
    train, _ = split_train_test(sentences, args.train_frac, args.seed)
    model = ngram_train(train, args.order, args.delta)
    save_ngram(model, args.output)
    print(f"trained order-{args.order} model on {len(train)} sentences -> {args.output}")
    return 0


def _serve_check(args) -> int:
    from .prior import RemotePrior

    client = RemotePrior(endpoint=args.endpoint, timeout=args.timeout)
    try:
        ctx = b"The cat is sleeping on t"
        hd = bytes(range(args.k))
        mat = client.query(ctx, hd)
        from scipy.special import logsumexp

        worst = float(np.max(np.abs(logsumexp(mat, axis=1))))
        print(f"ok: {mat.shape[0]}x{mat.shape[1]} rows, normalization residue {worst:.2e}, "
              f"renorm warnings {client.renorm_warnings}")
        return 0
    finally:
        client.close()


def _tepcount(args) -> int:
    nb = bit_tep_count(args.kb, args.m)
    nB = byte_tep_count(args.k, args.omega, args.T)
    print(nb, nB, tep_count(args.kb, args.m, args.k, args.omega, args.T))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="semosd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_simulate(sub)

    p = sub.add_parser("bound", help="normal-approximation BLER curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ebn0", required=True)
    p.add_argument("--rate", type=float, help="override the Eb/N0 -> sigma^2 rate (default k/n)")

    p = sub.add_parser("train-prior", help="train and save the byte n-gram prior")
    p.add_argument("--corpus", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--train-frac", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)

    p = sub.add_parser("serve-check", help="ping a prior server over the wire protocol")
    p.add_argument("--endpoint", required=True, help="host:port")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--timeout", type=float, default=30.0)

    p = sub.add_parser("tepcount", help="TEP family sizes")
    p.add_argument("--kb", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--omega", type=int, required=True)
    p.add_argument("--T", type=int, required=True)

    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    handlers = {
        "bound": _bound,
        "train-prior": _train_prior,
        "serve-check": _serve_check,
        "tepcount": _tepcount,
    }
    try:
        if args.command == "simulate":
            return _simulate(args, argv)
        return handlers[args.command](args)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
