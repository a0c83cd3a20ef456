"""Hard-decision Berlekamp-Massey baselines.

Bounded-distance decoding from LLR-sign hard decisions: syndromes, the BM
locator iteration, Chien search, and (for Reed-Solomon) Forney magnitudes.
Anything beyond t errors ends in ``failure`` (input returned unmodified) or
an honest miscorrection to some other codeword; a corrected status always
re-verifies the syndromes, so a non-codeword is never silently returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import CodeSpec, rs_syndromes
from .gf import FieldSpec, gf_inv, gf_mul


@dataclass
class BmOutcome:
    status: str  # "corrected" | "failure"
    decoded: object  # bytes (RS) or np.uint8 bits (BCH)
    error_positions: tuple = ()
    error_magnitudes: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status == "corrected"


def _berlekamp_massey(f: FieldSpec, syndromes: list[int]) -> list[int]:
    """Minimal LFSR (error locator, ascending coefficients, sigma0 = 1)."""
    C = [1]
    B = [1]
    L = 0
    m = 1
    b = 1
    for n, s in enumerate(syndromes):
        d = s
        for i in range(1, L + 1):
            if i < len(C):
                d ^= gf_mul(f, C[i], syndromes[n - i])
        if d == 0:
            m += 1
            continue
        coef = gf_mul(f, d, gf_inv(f, b))
        shifted = [0] * m + [gf_mul(f, coef, c) for c in B]
        new_c = [0] * max(len(C), len(shifted))
        for i, c in enumerate(C):
            new_c[i] ^= c
        for i, c in enumerate(shifted):
            new_c[i] ^= c
        if 2 * L <= n:
            B = C
            b = d
            L = n + 1 - L
            m = 1
        else:
            m += 1
        C = new_c
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C


def _poly_eval(f: FieldSpec, coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = gf_mul(f, acc, x) ^ c
    return acc


def bm_decode_rs(code: CodeSpec, hard_symbols: bytes) -> BmOutcome:
    """Correct up to t = (n-k)/2 symbol errors of a (shortened) RS code."""
    si = code.symbol_info
    if si is None:
        raise ValueError("code has no symbol-level structure")
    f = si.field
    n = si.n_sym
    nroots = n - si.k_sym
    t = nroots // 2
    received = bytes(hard_symbols)
    synd = rs_syndromes(code, received)
    if not any(synd):
        return BmOutcome("corrected", received)

    sigma = _berlekamp_massey(f, synd)
    L = len(sigma) - 1
    if L > t:
        return BmOutcome("failure", received)

    # Chien search restricted to the n active (unshortened) positions;
    # byte p is the coefficient of x^(n-1-p), so its locator is alpha^(n-1-p).
    roots_pos = []
    for p in range(n):
        x = f.alpha_pow(-(n - 1 - p))
        if _poly_eval(f, sigma, x) == 0:
            roots_pos.append(p)
    if len(roots_pos) != L:
        return BmOutcome("failure", received)

    # Forney with first root alpha^1: e = Omega(Xinv) / sigma'(Xinv)
    omega = [0] * (2 * t)
    for i, s in enumerate(synd):
        for j, c in enumerate(sigma):
            if i + j < 2 * t:
                omega[i + j] ^= gf_mul(f, s, c)
    sigma_deriv = [sigma[i] for i in range(1, len(sigma), 2)]  # odd coefficients
    corrected = bytearray(received)
    mags = []
    for p in roots_pos:
        xinv = f.alpha_pow(-(n - 1 - p))
        num = _poly_eval(f, omega, xinv)
        den = 0
        xsq = gf_mul(f, xinv, xinv)
        acc = 1
        for c in sigma_deriv:
            den ^= gf_mul(f, c, acc)
            acc = gf_mul(f, acc, xsq)
        if den == 0:
            return BmOutcome("failure", received)
        mag = gf_mul(f, num, gf_inv(f, den))
        corrected[p] ^= mag
        mags.append(mag)
    if any(rs_syndromes(code, bytes(corrected))):
        return BmOutcome("failure", received)
    return BmOutcome("corrected", bytes(corrected), tuple(roots_pos), tuple(mags))


@lru_cache(maxsize=None)
def _bch_tables(n_b: int):
    """Syndrome and Chien lookup tables for the BCH bit layout."""
    from .codes import build_bch_127_64

    code = build_bch_127_64()
    f = code.bch_info.field
    t = code.bch_info.t
    powers = np.array([n_b - 1 - i for i in range(n_b)])
    synd_tab = np.zeros((2 * t, n_b), dtype=np.int64)
    for j in range(2 * t):
        for i in range(n_b):
            synd_tab[j, i] = f.alpha_pow((j + 1) * int(powers[i]))
    chien_log = np.zeros((t + 1, n_b), dtype=np.int64)
    for i in range(t + 1):
        for p in range(n_b):
            chien_log[i, p] = (-i * (n_b - 1 - p)) % (f.order - 1)
    return f, t, synd_tab, chien_log


def bm_decode_bch(code: CodeSpec, hard_bits) -> BmOutcome:
    """Correct up to t = 10 bit errors of the binary BCH code."""
    if code.bch_info is None:
        raise ValueError("code has no BCH structure")
    bits = np.asarray(hard_bits, dtype=np.uint8)
    f, t, synd_tab, chien_log = _bch_tables(code.n_b)
    idx = np.nonzero(bits)[0]
    if len(idx) == 0:
        return BmOutcome("corrected", bits.copy())
    synd = [int(s) for s in np.bitwise_xor.reduce(synd_tab[:, idx], axis=1)]
    if not any(synd):
        return BmOutcome("corrected", bits.copy())

    sigma = _berlekamp_massey(f, synd)
    L = len(sigma) - 1
    if L > t:
        return BmOutcome("failure", bits.copy())

    # vectorized Chien over all positions: sigma(alpha^-(n-1-p)) for each p
    acc = np.full(code.n_b, sigma[0], dtype=np.int64)
    for i in range(1, len(sigma)):
        if sigma[i]:
            acc ^= f.antilog[(int(f.log[sigma[i]]) + chien_log[i]) % (f.order - 1)]
    roots_pos = np.nonzero(acc == 0)[0]
    if len(roots_pos) != L:
        return BmOutcome("failure", bits.copy())

    corrected = bits.copy()
    corrected[roots_pos] ^= 1
    idx2 = np.nonzero(corrected)[0]
    synd2 = np.bitwise_xor.reduce(synd_tab[:, idx2], axis=1) if len(idx2) else np.zeros(2 * t, dtype=np.int64)
    if np.any(synd2):
        return BmOutcome("failure", bits.copy())
    return BmOutcome("corrected", corrected, tuple(int(p) for p in roots_pos))
