"""The decoder core: most-reliable basis, both TEP families, re-encoding.

Decoding of one block runs in two passes over candidate codewords. The
bit-flip family perturbs the hard decision at the most-reliable basis (the
classic ordered-statistics search, driven here by the fused reliabilities);
the byte-substitution family swaps whole information bytes for their
top-ranked alternatives under the fused byte score and re-encodes through
the original generator. Every candidate is scored by the fused bit-level
table; the minimum wins, first found on ties, bit family first.

With alpha = 1 and the byte family disabled this is exactly Fossorier
order-m OSD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import kernels
from .codes import CodeSpec, bits_to_bytes, bytes_to_bits, encode
from .fusion import BYTE_BITS, ScoreTable
from .gf import BitMatrix, pack_bits, row_reduce_ordered, unpack_bits


@dataclass
class MrbContext:
    perm: np.ndarray  # final reliability order after rank repair
    perm_inv: np.ndarray
    G_s: BitMatrix
    u0: np.ndarray  # hard decision at the MRB under the fused LLRs
    swaps: int


@dataclass
class DecodeParams:
    """m or omega below zero disables that family entirely."""

    m: int = 3
    omega: int = -1
    T: int = 16
    early_stop: bool = False
    eps_stop: float = 0.0


@dataclass
class DecodeResult:
    codeword: np.ndarray
    info_bytes: bytes | None
    score: float
    teps_evaluated: int
    winner_family: str  # "bit" | "byte"
    early_stopped: bool
    d_bit: float
    d_byte: float
    swaps: int


@dataclass
class ByteTepPlan:
    """Per-position byte ranking plus the substitution enumeration."""

    mu_star: bytes
    alternatives: np.ndarray  # (k, T) byte values, rank order
    omega: int

    def count(self) -> int:
        k, T = self.alternatives.shape
        return byte_tep_count(k, self.omega, T)

    def teps(self):
        """Yield (positions, values) including the empty TEP, size ascending."""
        k, T = self.alternatives.shape
        yield (), ()
        for w in range(1, self.omega + 1):
            for positions in combinations(range(k), w):
                for ranks in product(range(T), repeat=w):
                    yield positions, tuple(int(self.alternatives[p, r]) for p, r in zip(positions, ranks))


def bit_tep_count(k_b: int, m: int) -> int:
    if m < 0:
        return 0
    return sum(math.comb(k_b, w) for w in range(min(m, k_b) + 1))


def byte_tep_count(k: int, omega: int, T: int) -> int:
    if omega < 0:
        return 0
    return sum(math.comb(k, w) * T**w for w in range(min(omega, k) + 1))


def tep_count(k_b: int, m: int, k: int, omega: int, T: int) -> int:
    """Worst-case candidate count across both families."""
    return bit_tep_count(k_b, m) + byte_tep_count(k, omega, T)


def build_mrb(code: CodeSpec, scores: ScoreTable) -> MrbContext:
    """Reliability-sort positions, reduce the generator, take the hard decision."""
    if scores.n_b != code.n_b:
        raise ValueError("score table does not match code length")
    r = np.abs(scores.Lambda)
    order = np.argsort(-r, kind="stable")  # ties: lower original index first
    G_s, perm, swaps = row_reduce_ordered(code.G_b, order)
    perm_inv = np.empty_like(perm)
    perm_inv[perm] = np.arange(code.n_b)
    u0 = (scores.Lambda[perm[: code.k_b]] < 0).astype(np.uint8)
    return MrbContext(perm=perm, perm_inv=perm_inv, G_s=G_s, u0=u0, swaps=swaps)


def gen_bit_teps(k_b: int, m: int):
    """All weight <= m patterns as bit masks over the MRB, lazily.

    Weight ascending; within a weight, supports start at the least-reliable
    (highest-index) end of the MRB.
    """
    yield 0
    for w in range(1, min(m, k_b) + 1):
        for combo in combinations(range(k_b), w):
            mask = 0
            for j in combo:
                mask |= 1 << (k_b - 1 - j)
            yield mask


def gen_byte_teps(scores: ScoreTable, omega: int, T: int) -> ByteTepPlan:
    """Rank byte values by the fused byte score and stage the substitutions."""
    if scores.byte_scores is None:
        raise ValueError("byte TEPs need a byte-aligned code with byte scores")
    if not 1 <= T <= 255:
        raise ValueError("T must be in [1, 255]")
    k = scores.byte_scores.shape[0]
    if omega > k:
        raise ValueError("omega cannot exceed the byte count")
    order = np.argsort(-scores.byte_scores, axis=1, kind="stable")  # ties: smaller value
    mu_star = bytes(int(v) for v in order[:, 0])
    return ByteTepPlan(mu_star=mu_star, alternatives=order[:, 1 : T + 1].astype(np.uint8), omega=omega)


def reencode_bit(mrb: MrbContext, e) -> np.ndarray:
    """Candidate codeword of a bit-flip TEP, back in the original basis."""
    e = np.asarray(e, dtype=np.uint8)
    cand_perm = mrb.G_s.vecmat(mrb.u0 ^ e)
    out = np.empty_like(cand_perm)
    out[mrb.perm] = cand_perm
    return out


def reencode_byte(code: CodeSpec, mu_star: bytes, eta: bytes) -> np.ndarray:
    """Candidate codeword of a byte-substitution TEP (original basis)."""
    cand = bytes(a ^ b for a, b in zip(mu_star, eta))
    return encode(code, bytes_to_bits(cand))


def score_candidate(scores: ScoreTable, x) -> float:
    """d(x) = -sum of fused bit scores along the codeword."""
    x = np.asarray(x, dtype=np.int64)
    return float(-np.sum(scores.lam[np.arange(len(x)), x]))


def _col_range_words(m: BitMatrix, start: int, stop: int) -> np.ndarray:
    """Columns [start, stop) of each row as one uint64 (stop-start <= 64)."""
    width = stop - start
    ws, off = divmod(start, 64)
    lo = m.words[:, ws] >> np.uint64(off)
    if off and ws + 1 < m.words.shape[1]:
        lo = lo | (m.words[:, ws + 1] << np.uint64(64 - off))
    if width < 64:
        lo = lo & np.uint64((1 << width) - 1)
    return lo


def _weights_table(weights: np.ndarray) -> np.ndarray:
    """(8, 256) per-byte penalty lookup for a <=64-wide weight vector."""
    w8 = np.zeros(64)
    w8[: len(weights)] = weights
    return w8.reshape(8, 8) @ BYTE_BITS.T.astype(np.float64)


def _xor_select(words: np.ndarray, bits: np.ndarray) -> np.uint64:
    sel = words[bits != 0]
    if len(sel) == 0:
        return np.uint64(0)
    return np.bitwise_xor.reduce(sel)


def decode(code: CodeSpec, scores: ScoreTable, params: DecodeParams, backend=None) -> DecodeResult:
    """Full two-family search; returns the score-minimizing codeword."""
    kern = kernels if backend is None else kernels.get_backend(backend)
    n_b, k_b, k = code.n_b, code.k_b, code.k
    if params.m < 0 and params.omega < 0:
        raise ValueError("both TEP families disabled")
    if params.omega >= 0 and k < 1:
        raise ValueError("byte TEPs require a byte-aligned code")

    r = np.abs(scores.Lambda)
    hard = (scores.Lambda < 0).astype(np.uint8)
    stop_pen = params.eps_stop if params.early_stop else -np.inf

    best_bit_cw = None
    d_bit = np.inf
    n_bit = 0
    early = False
    swaps = 0

    if params.m >= 0:
        mrb = build_mrb(code, scores)
        swaps = mrb.swaps
        prows = _col_range_words(mrb.G_s, k_b, n_b)
        p0 = _xor_select(prows, mrb.u0)
        hdpar = pack_bits(hard[mrb.perm[k_b:]])[0]
        partab = _weights_table(r[mrb.perm[k_b:]])
        rev = np.arange(k_b - 1, -1, -1)
        pen, mask_rev, n_bit, early_bit = kern.search_bit_teps(
            np.ascontiguousarray(prows[rev]),
            np.ascontiguousarray(r[mrb.perm[rev]]),
            int(p0 ^ hdpar),
            partab,
            params.m,
            stop_pen,
        )
        early = bool(early_bit)
        e_bits = unpack_bits(np.array([mask_rev], dtype=np.uint64), k_b)[::-1].copy()
        best_bit_cw = reencode_bit(mrb, e_bits)
        d_bit = score_candidate(scores, best_bit_cw)

    best_byte_cw = None
    d_byte = np.inf
    n_byte = 0

    if params.omega >= 0 and not early:
        plan = gen_byte_teps(scores, params.omega, params.T)
        borows = _col_range_words(code.G_b, k_b, n_b)
        mu_bits = bytes_to_bits(plan.mu_star)
        mu_word = pack_bits(mu_bits)[0]
        pmu = _xor_select(borows, mu_bits)
        hdinfo = pack_bits(hard[:k_b])[0]
        hdpar_o = pack_bits(hard[k_b:])[0]
        T = params.T
        delta_info = np.zeros((k, T), dtype=np.uint64)
        delta_par = np.zeros((k, T), dtype=np.uint64)
        for i in range(k):
            for t in range(T):
                change = plan.mu_star[i] ^ int(plan.alternatives[i, t])
                delta_info[i, t] = np.uint64(change) << np.uint64(8 * i)
                ch_bits = np.zeros(k_b, dtype=np.uint8)
                ch_bits[8 * i : 8 * i + 8] = BYTE_BITS[change]
                delta_par[i, t] = _xor_select(borows, ch_bits)
        infotab = _weights_table(r[:k_b])
        partab_o = _weights_table(r[k_b:])
        pen_b, eta_code, n_byte, early_byte = kern.search_byte_teps(
            int(mu_word ^ hdinfo),
            int(pmu ^ hdpar_o),
            delta_info,
            delta_par,
            infotab,
            partab_o,
            params.omega,
            stop_pen,
        )
        early = early or bool(early_byte)
        eta = bytes(
            0 if (eta_code >> (8 * i)) & 0xFF == 0 else plan.mu_star[i] ^ int(plan.alternatives[i, ((eta_code >> (8 * i)) & 0xFF) - 1])
            for i in range(k)
        )
        best_byte_cw = reencode_byte(code, plan.mu_star, eta)
        d_byte = score_candidate(scores, best_byte_cw)

    if best_bit_cw is None and best_byte_cw is None:
        raise RuntimeError("no candidate produced")
    if d_bit <= d_byte:
        winner, d, family = best_bit_cw, d_bit, "bit"
    else:
        winner, d, family = best_byte_cw, d_byte, "byte"
    info = bits_to_bytes(winner[:k_b]) if k >= 1 else None
    return DecodeResult(
        codeword=winner,
        info_bytes=info,
        score=d,
        teps_evaluated=int(n_bit) + int(n_byte),
        winner_family=family,
        early_stopped=early,
        d_bit=float(d_bit),
        d_byte=float(d_byte),
        swaps=swaps,
    )
