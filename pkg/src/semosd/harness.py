"""Monte-Carlo simulation engine.

Each trial is seeded as SeedSequence((master_seed, point_index,
trial_index)), so every counter is a pure function of the configuration and
the master seed: worker count and scheduling cannot change results. Trials
run in fixed-size chunks; chunks are accumulated in index order and the
stopping rule (max_blocks or min_block_errors, whichever first) is applied
per trial inside that ordered stream.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import prior as prior_mod
from .bm import bm_decode_bch, bm_decode_rs
from .channel import ChannelConfig, GEParams, llr, transmit
from .codes import bits_to_bytes, bytes_to_bits, build, encode
from .corpus import load_sentences, make_trial, split_train_test
from .fusion import bit_channel_logpost, bit_marginalize, byte_channel_logpost, channel_only_scores, fuse
from .prior import PriorProtocolError
from .semosd import DecodeParams, decode

CHUNK_TRIALS = 64
CSV_COLUMNS = [
    "ebn0_db", "blocks", "block_errors", "bler", "ci_halfwidth", "ber",
    "mean_teps", "mean_ms", "wins_bit", "wins_byte",
]


@dataclass(frozen=True)
class DecoderSpec:
    kind: str  # "bm" | "osd" | "semosd"
    m: int = 3
    omega: int = -1
    T: int = 16
    alpha: float = 1.0
    prior: str = "uniform"
    early_stop: bool = False
    eps_stop: float = 0.0
    families: str = "both"  # semosd only: "both" | "bit" | "byte"


@dataclass(frozen=True)
class RunConfig:
    code: str
    decoder: DecoderSpec
    ebn0_grid: tuple
    channel_kind: str = "awgn"
    ge_pi_b: float = 0.10
    ge_mean_burst: float = 16.0
    ge_rho_sq: float = 100.0
    max_blocks: int = 10_000
    min_block_errors: int = 100
    master_seed: int = 0
    workers: int = 1
    corpus: str | None = None
    train_frac: float = 0.9
    output: str | None = None
    json_output: str | None = None
    pairs_output: str | None = None  # decoded-vs-reference prefix text TSV
    fallback: str = "fail"  # remote-prior failure policy: "fail" | "uniform"


@dataclass
class PointStats:
    ebn0_db: float
    blocks: int = 0
    block_errors: int = 0
    bit_errors: int = 0
    byte_errors: int = 0
    teps: list = field(default_factory=list, repr=False)
    total_ms: float = 0.0
    wins_bit: int = 0
    wins_byte: int = 0
    ties: int = 0
    early_stops: int = 0
    prior_fallbacks: int = 0

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks if self.blocks else 0.0

    @property
    def ci_halfwidth(self) -> float:
        if not self.blocks:
            return 0.0
        p = self.bler
        return 1.96 * np.sqrt(max(p * (1.0 - p), 0.0) / self.blocks)

    def ber(self, k_b: int) -> float:
        return self.bit_errors / (self.blocks * k_b) if self.blocks else 0.0

    @property
    def mean_teps(self) -> float:
        return float(np.mean(self.teps)) if self.teps else 0.0

    @property
    def p90_teps(self) -> float:
        return float(np.percentile(self.teps, 90)) if self.teps else 0.0

    @property
    def mean_ms(self) -> float:
        return self.total_ms / self.blocks if self.blocks else 0.0


# ---------------------------------------------------------------------------
# Worker state
# ---------------------------------------------------------------------------

_STATE: dict = {}


def _init_worker(cfg: RunConfig) -> None:
    code = build(cfg.code)
    sentences = None
    backend = None
    dec = cfg.decoder
    if cfg.corpus is not None:
        all_sentences = load_sentences(cfg.corpus)
        train, test = split_train_test(all_sentences, cfg.train_frac, cfg.master_seed)
        sentences = test if test else all_sentences
    else:
        train = None
    if dec.kind == "semosd":
        if dec.prior.startswith("ngram") and "model=" not in dec.prior and train is None:
            raise ValueError("semosd with an ngram prior needs --corpus")
        backend = prior_mod.make_backend(dec.prior, corpus_train=train)
    _STATE.update(cfg=cfg, code=code, sentences=sentences, backend=backend)


def _channel_cfg(cfg: RunConfig, ebn0: float, rate: float) -> ChannelConfig:
    ge = GEParams(cfg.ge_pi_b, cfg.ge_mean_burst, cfg.ge_rho_sq) if cfg.channel_kind == "ge" else None
    return ChannelConfig(kind=cfg.channel_kind, ebn0_db=ebn0, rate=rate, ge=ge)


def _decode_params(dec: DecoderSpec) -> DecodeParams:
    m, omega = dec.m, dec.omega
    if dec.kind == "semosd":
        if dec.families == "bit":
            omega = -1
        elif dec.families == "byte":
            m = -1
    else:
        omega = -1
    return DecodeParams(m=m, omega=omega, T=dec.T, early_stop=dec.early_stop, eps_stop=dec.eps_stop)


def _run_trial(point_idx: int, ebn0: float, trial_idx: int) -> tuple:
    cfg: RunConfig = _STATE["cfg"]
    code = _STATE["code"]
    sentences = _STATE["sentences"]
    backend = _STATE["backend"]
    dec = cfg.decoder
    rng = np.random.default_rng(np.random.SeedSequence((cfg.master_seed, point_idx, trial_idx)))

    if sentences is not None and code.k >= 1:
        sid = int(rng.integers(len(sentences)))
        trial = make_trial(sentences[sid], rng, sid)
        msg, ctx = trial.block, trial.ctx
        u = bytes_to_bits(msg)
    else:
        u = rng.integers(0, 2, code.k_b).astype(np.uint8)
        msg = bits_to_bytes(u) if code.k >= 1 else None
        ctx = b""
    cw = encode(code, u)
    obs = transmit(_channel_cfg(cfg, ebn0, code.rate), cw, rng)

    t0 = time.perf_counter()
    teps = 0
    family = ""
    tie = False
    early = False
    fallback = 0
    if dec.kind == "bm":
        L = llr(obs)
        hard = (L < 0).astype(np.uint8)
        if code.symbol_info is not None:
            out = bm_decode_rs(code, bits_to_bytes(hard))
            cw_hat = bytes_to_bits(out.decoded)
        else:
            out = bm_decode_bch(code, hard)
            cw_hat = np.asarray(out.decoded, dtype=np.uint8)
    else:
        L = llr(obs)
        if dec.kind == "osd" or backend is None:
            scores = channel_only_scores(L, code.k)
        else:
            bc = bit_channel_logpost(L)
            byte_ch, hd = byte_channel_logpost(bc, code.k)
            if isinstance(backend, prior_mod.OraclePrior):
                backend.truth = msg
            try:
                pri = backend.query(ctx, hd)
            except (PriorProtocolError, OSError):
                if cfg.fallback != "uniform":
                    raise
                pri = prior_mod.UniformPrior().query(ctx, hd)
                fallback = 1
            scores = fuse(bc, bit_marginalize(pri), byte_ch, pri, dec.alpha, code.k_b)
        res = decode(code, scores, _decode_params(dec))
        cw_hat = res.codeword
        teps = res.teps_evaluated
        family = res.winner_family
        tie = np.isfinite(res.d_bit) and np.isfinite(res.d_byte) and res.d_bit == res.d_byte
        early = res.early_stopped
    ms = (time.perf_counter() - t0) * 1e3

    err = not np.array_equal(cw_hat, cw)
    nbit = int(np.sum(cw_hat[: code.k_b] != u))
    nbyte = 0
    pair = None
    if code.k >= 1 and msg is not None:
        dec_bytes = bits_to_bytes(np.asarray(cw_hat[: code.k_b], dtype=np.uint8))
        nbyte = sum(a != b for a, b in zip(dec_bytes, msg))
        if cfg.pairs_output and sentences is not None:
            pair = (ctx + dec_bytes, ctx + msg)
    return err, nbit, nbyte, teps, ms, family, tie, early, fallback, pair


def _run_chunk(args) -> list[tuple]:
    point_idx, ebn0, start, count = args
    return [_run_trial(point_idx, ebn0, start + i) for i in range(count)]


# ---------------------------------------------------------------------------
# Point / sweep drivers
# ---------------------------------------------------------------------------


def _accumulate(stats: PointStats, rec: tuple, pairs_file=None) -> None:
    err, nbit, nbyte, teps, ms, family, tie, early, fallback, pair = rec
    if pair is not None and pairs_file is not None:
        pairs_file.write(_escape(pair[0]) + "\t" + _escape(pair[1]) + "\n")
    stats.blocks += 1
    stats.block_errors += int(err)
    stats.bit_errors += nbit
    stats.byte_errors += nbyte
    stats.teps.append(teps)
    stats.total_ms += ms
    if family == "bit":
        if tie:
            stats.ties += 1
        else:
            stats.wins_bit += 1
    elif family == "byte":
        stats.wins_byte += 1
    stats.early_stops += int(early)
    stats.prior_fallbacks += fallback


def _chunk_specs(point_idx: int, ebn0: float, max_blocks: int):
    start = 0
    while start < max_blocks:
        count = min(CHUNK_TRIALS, max_blocks - start)
        yield (point_idx, ebn0, start, count)
        start += count


def _stop(stats: PointStats, cfg: RunConfig) -> bool:
    return stats.blocks >= cfg.max_blocks or stats.block_errors >= cfg.min_block_errors


def _escape(text: bytes) -> str:
    out = text.decode("latin-1")
    return out.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def run_point(
    cfg: RunConfig,
    ebn0: float,
    point_idx: int = 0,
    pool: ProcessPoolExecutor | None = None,
    pairs_file=None,
) -> PointStats:
    """Simulate one Eb/N0 point to the stopping rule."""
    stats = PointStats(ebn0_db=ebn0)
    specs = _chunk_specs(point_idx, ebn0, cfg.max_blocks)
    if pool is None:
        if "cfg" not in _STATE or _STATE["cfg"] is not cfg:
            _init_worker(cfg)
        for spec in specs:
            for rec in _run_chunk(spec):
                _accumulate(stats, rec, pairs_file)
                if _stop(stats, cfg):
                    return stats
    else:
        pending = {}
        specs = list(specs)
        next_submit = 0
        next_take = 0
        lookahead = cfg.workers + 2
        while next_take < len(specs):
            while next_submit < len(specs) and next_submit < next_take + lookahead:
                pending[next_submit] = pool.submit(_run_chunk, specs[next_submit])
                next_submit += 1
            for rec in pending.pop(next_take).result():
                _accumulate(stats, rec, pairs_file)
                if _stop(stats, cfg):
                    for fut in pending.values():
                        fut.cancel()
                    return stats
            next_take += 1
    return stats


def run_sweep(cfg: RunConfig) -> list[PointStats]:
    """Run every grid point; append CSV rows as points finish."""
    code = build(cfg.code)
    writer = _CsvAppender(cfg.output, code.k_b) if cfg.output else None
    results = []
    pool = None
    pairs_file = open(cfg.pairs_output, "a") if cfg.pairs_output else None
    try:
        if cfg.workers > 1:
            pool = ProcessPoolExecutor(max_workers=cfg.workers, initializer=_init_worker, initargs=(cfg,))
        for idx, ebn0 in enumerate(cfg.ebn0_grid):
            stats = run_point(cfg, float(ebn0), idx, pool, pairs_file)
            results.append(stats)
            if writer:
                writer.append(stats)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
        if pairs_file is not None:
            pairs_file.close()
    if cfg.json_output:
        payload = {"config": asdict(cfg), "points": [_stats_dict(s, code.k_b) for s in results]}
        Path(cfg.json_output).write_text(json.dumps(payload, indent=2))
    return results


def _stats_dict(s: PointStats, k_b: int) -> dict:
    return {
        "ebn0_db": s.ebn0_db,
        "blocks": s.blocks,
        "block_errors": s.block_errors,
        "bler": s.bler,
        "ci_halfwidth": s.ci_halfwidth,
        "ber": s.ber(k_b),
        "byte_errors": s.byte_errors,
        "mean_teps": s.mean_teps,
        "p90_teps": s.p90_teps,
        "mean_ms": s.mean_ms,
        "wins_bit": s.wins_bit,
        "wins_byte": s.wins_byte,
        "ties": s.ties,
        "early_stops": s.early_stops,
        "prior_fallbacks": s.prior_fallbacks,
    }


class _CsvAppender:
    """Crash-safe incremental CSV output with the fixed column set."""

    def __init__(self, path: str, k_b: int):
        self.path = Path(path)
        self.k_b = k_b
        if not self.path.exists() or self.path.stat().st_size == 0:
            with open(self.path, "w", newline="") as fh:
                csv.writer(fh).writerow(CSV_COLUMNS)

    def append(self, s: PointStats) -> None:
        row = [
            s.ebn0_db, s.blocks, s.block_errors, f"{s.bler:.8g}", f"{s.ci_halfwidth:.6g}",
            f"{s.ber(self.k_b):.8g}", f"{s.mean_teps:.6g}", f"{s.mean_ms:.6g}", s.wins_bit, s.wins_byte,
        ]
        with open(self.path, "a", newline="") as fh:
            csv.writer(fh).writerow(row)
            fh.flush()
