"""Semantic-prior backends: per-byte log-probability rows for a block.

A backend answers ``query(ctx, hd) -> (k, 256) float64`` where ctx is the
clean sentence prefix and hd the channel hard decision for the current
block. Rows are natural-log probabilities, floored at LOG_FLOOR before
normalization so no candidate is ever vetoed outright, and normalized to
logsumexp 0.

Backends: a uniform stub, an additive-smoothed byte n-gram combined with a
bit-flip likelihood (the desk-scale denoiser), a remote model speaking
newline-delimited JSON, and a truth-fed oracle for tests and diagnostics.
"""

from __future__ import annotations

import base64
import json
import socket

import numpy as np
from scipy.special import logsumexp

LOG_FLOOR = -30.0
_POPCOUNT8 = np.array([bin(v).count("1") for v in range(256)], dtype=np.float64)


class PriorProtocolError(RuntimeError):
    """Malformed or truncated wire response."""


def floor_and_normalize(logp: np.ndarray) -> np.ndarray:
    """Clamp entries at LOG_FLOOR, then renormalize each row to mass one."""
    logp = np.maximum(np.asarray(logp, dtype=np.float64), LOG_FLOOR)
    return logp - logsumexp(logp, axis=1, keepdims=True)


class UniformPrior:
    """Every byte value equally likely; the ablation backend."""

    def query(self, ctx: bytes, hd: bytes) -> np.ndarray:
        return np.full((len(hd), 256), -np.log(256.0))


class OraclePrior:
    """Mass q on the true byte, (1-q)/255 elsewhere.

    Test/diagnostic backend: the harness injects the transmitted block via
    ``truth`` before each query.
    """

    def __init__(self, q: float = 0.9):
        if not 0.0 < q < 1.0:
            raise ValueError("q must be in (0,1)")
        self.q = q
        self.truth: bytes | None = None

    def query(self, ctx: bytes, hd: bytes) -> np.ndarray:
        if self.truth is None or len(self.truth) != len(hd):
            raise RuntimeError("OraclePrior.truth not set for this block")
        out = np.full((len(hd), 256), np.log((1.0 - self.q) / 255.0))
        out[np.arange(len(hd)), np.frombuffer(self.truth, dtype=np.uint8)] = np.log(self.q)
        return floor_and_normalize(out)


# ---------------------------------------------------------------------------
# Byte n-gram denoiser
# ---------------------------------------------------------------------------


class NgramModel:
    """Additive-delta-smoothed byte-level n-gram with unigram backoff."""

    def __init__(self, order: int, delta: float):
        if order < 1:
            raise ValueError("order must be >= 1")
        if delta <= 0:
            raise ValueError("delta must be > 0")
        self.order = order
        self.delta = delta
        self.context_counts: dict[bytes, np.ndarray] = {}
        self.unigram = np.zeros(256, dtype=np.float64)

    def log_cond(self, context: bytes) -> np.ndarray:
        """log P(next byte | context), backing off to the unigram marginal."""
        counts = self.context_counts.get(context[-(self.order - 1) :] if self.order > 1 else b"")
        if counts is None:
            counts = self.unigram
        smoothed = counts + self.delta
        return np.log(smoothed) - np.log(smoothed.sum())


def ngram_train(corpus, order: int, delta: float) -> NgramModel:
    """Count n-grams over an iterable of byte strings."""
    model = NgramModel(order, delta)
    seen = False
    for sentence in corpus:
        sentence = bytes(sentence)
        if not sentence:
            continue
        seen = True
        arr = np.frombuffer(sentence, dtype=np.uint8)
        np.add.at(model.unigram, arr, 1.0)
        if order > 1:
            for i in range(len(sentence)):
                ctx = sentence[max(0, i - (order - 1)) : i]
                if len(ctx) < order - 1:
                    continue
                counts = model.context_counts.get(ctx)
                if counts is None:
                    counts = np.zeros(256, dtype=np.float64)
                    model.context_counts[ctx] = counts
                counts[sentence[i]] += 1.0
    if not seen:
        raise ValueError("empty corpus")
    return model


class NgramDenoiserPrior:
    """Context model times bit-flip likelihood, left-to-right over the block.

    Row i multiplies the n-gram conditional given the bytes left of
    position i (clean ctx, then hard-decision bytes inside the block) by
    the probability of observing hd[i] under independent bit flips at rate
    p from each candidate value.
    """

    def __init__(self, model: NgramModel, flip_rate: float):
        if not 0.0 < flip_rate < 0.5:
            raise ValueError("flip_rate must be in (0, 0.5)")
        self.model = model
        self.flip_rate = flip_rate

    def query(self, ctx: bytes, hd: bytes) -> np.ndarray:
        p = self.flip_rate
        log_p, log_1p = np.log(p), np.log(1.0 - p)
        k = len(hd)
        out = np.empty((k, 256))
        stream = bytes(ctx) + bytes(hd)
        base = len(ctx)
        values = np.arange(256, dtype=np.uint8)
        for i in range(k):
            d = _POPCOUNT8[values ^ hd[i]]
            out[i] = self.model.log_cond(stream[: base + i]) + d * log_p + (8.0 - d) * log_1p
        return floor_and_normalize(out)


def ngram_denoiser_query(model: NgramModel, ctx: bytes, hd: bytes, flip_rate: float) -> np.ndarray:
    return NgramDenoiserPrior(model, flip_rate).query(ctx, hd)


def save_ngram(model: NgramModel, path) -> None:
    ctxs = sorted(model.context_counts)
    np.savez_compressed(
        path,
        order=model.order,
        delta=model.delta,
        unigram=model.unigram,
        contexts=np.frombuffer(b"".join(ctxs), dtype=np.uint8).reshape(len(ctxs), -1)
        if ctxs
        else np.zeros((0, max(model.order - 1, 1)), dtype=np.uint8),
        counts=np.stack([model.context_counts[c] for c in ctxs]) if ctxs else np.zeros((0, 256)),
    )


def load_ngram(path) -> NgramModel:
    data = np.load(path)
    model = NgramModel(int(data["order"]), float(data["delta"]))
    model.unigram = data["unigram"]
    for row, counts in zip(data["contexts"], data["counts"]):
        model.context_counts[row.tobytes()] = counts
    return model


# ---------------------------------------------------------------------------
# Remote backend (newline-delimited JSON over a stream)
# ---------------------------------------------------------------------------


class RemotePrior:
    """Client for the prior-serving wire protocol.

    One JSON object per line. Request: {"id", "ctx": base64, "hd": base64};
    response: {"id", "logp": k x 256}. Responses arrive in order per
    connection. Rows off normalization by more than 1e-3 are renormalized
    locally and counted in ``renorm_warnings``.
    """

    def __init__(self, endpoint: str | None = None, files=None, timeout: float = 30.0):
        self.renorm_warnings = 0
        self._next_id = 0
        if files is not None:
            self._reader, self._writer = files
            self._sock = None
        elif endpoint is not None:
            host, _, port = endpoint.removeprefix("tcp://").rpartition(":")
            self._sock = socket.create_connection((host or "127.0.0.1", int(port)), timeout=timeout)
            self._reader = self._sock.makefile("rb")
            self._writer = self._sock.makefile("wb")
        else:
            raise ValueError("need an endpoint or a (reader, writer) pair")

    def close(self) -> None:
        if self._sock is not None:
            self._sock.close()

    def query(self, ctx: bytes, hd: bytes) -> np.ndarray:
        req_id = self._next_id
        self._next_id += 1
        line = json.dumps(
            {
                "id": req_id,
                "ctx": base64.b64encode(bytes(ctx)).decode(),
                "hd": base64.b64encode(bytes(hd)).decode(),
            }
        )
        self._writer.write(line.encode() + b"\n")
        self._writer.flush()
        raw = self._reader.readline()
        if not raw:
            raise PriorProtocolError("connection closed mid-request")
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as e:
            raise PriorProtocolError(f"unparseable response: {e}") from e
        if msg.get("id") != req_id:
            raise PriorProtocolError(f"response id {msg.get('id')} != request id {req_id}")
        if "error" in msg:
            raise PriorProtocolError(f"server error: {msg['error']}")
        logp = msg.get("logp")
        if logp is None:
            raise PriorProtocolError("response missing 'logp'")
        arr = np.asarray(logp, dtype=np.float64)
        if arr.shape != (len(hd), 256):
            raise PriorProtocolError(f"logp shape {arr.shape} != ({len(hd)}, 256)")
        if not np.all(np.isfinite(np.maximum(arr, LOG_FLOOR))):
            raise PriorProtocolError("logp contains NaN")
        if np.any(np.abs(logsumexp(arr, axis=1)) > 1e-3):
            self.renorm_warnings += 1
        return floor_and_normalize(arr)


def make_backend(spec: str, corpus_train=None):
    """Build a backend from a config string.

    Accepted forms: "uniform", "oracle:q=0.9",
    "ngram:order=3,delta=0.05,p=0.1" (trained on corpus_train),
    "remote:host:port".
    """
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        return UniformPrior()
    if kind == "oracle":
        opts = _parse_opts(rest)
        return OraclePrior(q=float(opts.get("q", 0.9)))
    if kind == "ngram":
        opts = _parse_opts(rest)
        if "model" in opts:
            model = load_ngram(opts["model"])
        else:
            if corpus_train is None:
                raise ValueError("ngram prior needs a training corpus")
            model = ngram_train(corpus_train, int(opts.get("order", 3)), float(opts.get("delta", 0.05)))
        return NgramDenoiserPrior(model, float(opts.get("p", 0.1)))
    if kind == "remote":
        return RemotePrior(endpoint=rest)
    raise ValueError(f"unknown prior spec {spec!r}")


def _parse_opts(rest: str) -> dict[str, str]:
    out = {}
    for part in rest.split(","):
        if not part:
            continue
        key, _, value = part.partition("=")
        out[key.strip()] = value.strip()
    return out
