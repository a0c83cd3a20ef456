"""Channel posteriors, semantic bit marginals, and fused score tables.

Everything downstream of the channel and the prior runs off one ScoreTable
per block: per-bit log-posterior pairs, their fused convex combination, the
fused LLRs that rank reliabilities, and the fused per-byte scores that rank
substitution candidates.

All tables are row-max-normalized before fusing, so every fused entry is
<= 0 and a row's maximum is 0 exactly when both inputs agree on the argmax.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

# BYTE_BITS[v, j] = j-th least significant bit of byte value v
BYTE_BITS = ((np.arange(256)[:, None] >> np.arange(8)[None, :]) & 1).astype(np.uint8)
# _VALUES_WITH_BIT[j][beta] = the 128 byte values whose bit j equals beta
_VALUES_WITH_BIT = [[np.nonzero(BYTE_BITS[:, j] == beta)[0] for beta in (0, 1)] for j in range(8)]


@dataclass
class ScoreTable:
    lam: np.ndarray  # (n_b, 2) fused bit scores
    Lambda: np.ndarray  # (n_b,) fused LLRs, lam[:,0] - lam[:,1]
    byte_scores: np.ndarray | None  # (k, 256) fused byte scores
    alpha: float
    k_b: int

    @property
    def n_b(self) -> int:
        return len(self.Lambda)

    def d_floor(self) -> float:
        """-sum of per-row maxima: the smallest value Eq.-style scoring can reach."""
        return float(-np.sum(self.lam.max(axis=1)))


def bit_channel_logpost(L) -> np.ndarray:
    """Per-bit log P(c = beta | y) from the LLRs, stable for large |L|."""
    L = np.asarray(L, dtype=np.float64)
    out = np.empty((len(L), 2))
    out[:, 0] = -np.logaddexp(0.0, -L)
    out[:, 1] = -np.logaddexp(0.0, L)
    return out


def byte_channel_logpost(bit_table: np.ndarray, k: int) -> tuple[np.ndarray, bytes]:
    """Byte-level log-posterior over the k information bytes plus hard decision.

    Sums the eight per-bit scores of each byte value (conditional
    independence of bits given the observations). Argmax ties break toward
    the smaller byte value.
    """
    if k < 1:
        raise ValueError("byte posterior needs a byte-aligned code (k >= 1)")
    out = np.empty((k, 256))
    j_idx = np.arange(8)
    for i in range(k):
        bt = bit_table[8 * i : 8 * i + 8]  # (8, 2)
        out[i] = bt[j_idx[None, :], BYTE_BITS].sum(axis=1)
    hd = bytes(int(np.argmax(row)) for row in out)
    return out, hd


def bit_marginalize(prior: np.ndarray) -> np.ndarray:
    """Byte prior -> per-bit semantic scores via log-sum-exp over half rows."""
    k = prior.shape[0]
    out = np.empty((8 * k, 2))
    for j in range(8):
        for beta in (0, 1):
            out[j::8, beta] = logsumexp(prior[:, _VALUES_WITH_BIT[j][beta]], axis=1)
    return out


def _row_max_normalize(table: np.ndarray) -> np.ndarray:
    return table - table.max(axis=1, keepdims=True)


def fuse(
    bit_channel: np.ndarray,
    bit_semantic: np.ndarray | None,
    byte_channel: np.ndarray | None,
    prior: np.ndarray | None,
    alpha: float,
    k_b: int,
) -> ScoreTable:
    """Convex-combine channel and semantic scores on information positions.

    Parity bits always carry the normalized channel score alone. The fused
    byte table is left un-normalized after combination (its row maxima may
    be negative when the two sides disagree on the argmax).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    tc = _row_max_normalize(bit_channel)
    lam = tc.copy()
    if bit_semantic is not None:
        ts = _row_max_normalize(bit_semantic)
        lam[:k_b] = alpha * tc[:k_b] + (1.0 - alpha) * ts
    elif alpha != 1.0:
        raise ValueError("alpha < 1 needs a semantic table")
    byte_scores = None
    if byte_channel is not None and prior is not None:
        byte_scores = alpha * _row_max_normalize(byte_channel) + (1.0 - alpha) * _row_max_normalize(prior)
    elif byte_channel is not None:
        byte_scores = _row_max_normalize(byte_channel)
    return ScoreTable(lam=lam, Lambda=lam[:, 0] - lam[:, 1], byte_scores=byte_scores, alpha=alpha, k_b=k_b)


def channel_only_scores(L, k: int) -> ScoreTable:
    """ScoreTable for a plain (alpha = 1) decoder; no prior query involved."""
    bc = bit_channel_logpost(L)
    byte_ch = byte_channel_logpost(bc, k)[0] if k >= 1 else None
    return fuse(bc, None, byte_ch, None, 1.0, 8 * k if k >= 1 else len(L))


def block_scores(L, k: int, prior: np.ndarray | None, alpha: float, k_b: int) -> tuple[ScoreTable, bytes | None]:
    """One-stop per-block scoring: channel tables, hard decision, fusion.

    Returns the table and the channel byte hard decision (None when the
    code is not byte-aligned).
    """
    bc = bit_channel_logpost(L)
    byte_ch, hd = byte_channel_logpost(bc, k) if k >= 1 else (None, None)
    bs = bit_marginalize(prior) if prior is not None else None
    return fuse(bc, bs, byte_ch, prior, alpha, k_b), hd
