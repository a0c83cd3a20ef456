"""Finite-field and binary-matrix arithmetic.

Two substrates live here: table-driven GF(2^m) arithmetic (m <= 8) used by
the Reed-Solomon / BCH constructions and the Berlekamp-Massey decoders, and
a word-packed GF(2) matrix with the reliability-ordered Gaussian elimination
that builds the most-reliable-basis generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_WORD = 64


class RankError(ValueError):
    """Raised when a generator matrix is not full row rank."""


# ---------------------------------------------------------------------------
# GF(2^m)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) with log/antilog tables under a fixed primitive polynomial.

    ``antilog`` is doubled in length so products of logs never need an
    explicit modular reduction beyond one subtraction.
    """

    degree: int
    primitive_poly: int
    log: np.ndarray = field(repr=False, compare=False, default=None)
    antilog: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        order = 1 << self.degree
        log = np.zeros(order, dtype=np.int32)
        antilog = np.zeros(2 * (order - 1), dtype=np.int32)
        x = 1
        for i in range(order - 1):
            antilog[i] = x
            log[x] = i
            x <<= 1
            if x & order:
                x ^= self.primitive_poly
        if x != 1:
            raise ValueError(f"0x{self.primitive_poly:x} is not primitive for m={self.degree}")
        antilog[order - 1 :] = antilog[: order - 1]
        object.__setattr__(self, "log", log)
        object.__setattr__(self, "antilog", antilog)

    @property
    def order(self) -> int:
        return 1 << self.degree

    def alpha_pow(self, e: int) -> int:
        """alpha^e for any integer exponent e."""
        return int(self.antilog[e % (self.order - 1)])


def gf_mul(f: FieldSpec, a: int, b: int) -> int:
    """Product in GF(2^m)."""
    if a == 0 or b == 0:
        return 0
    return int(f.antilog[f.log[a] + f.log[b]])


def gf_inv(f: FieldSpec, a: int) -> int:
    """Multiplicative inverse; zero has none."""
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(2^m)")
    return int(f.antilog[(f.order - 1) - f.log[a]])


def gf_pow(f: FieldSpec, a: int, e: int) -> int:
    if a == 0:
        return 0 if e else 1
    return int(f.antilog[(int(f.log[a]) * e) % (f.order - 1)])


def gf256() -> FieldSpec:
    """GF(2^8) under x^8+x^4+x^3+x^2+1."""
    return FieldSpec(8, 0x11D)


def gf128() -> FieldSpec:
    """GF(2^7) under x^7+x^3+1."""
    return FieldSpec(7, 0x89)


def poly_mul(f: FieldSpec, a, b):
    """Product of polynomials over GF(2^m), coefficients ascending."""
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] ^= gf_mul(f, ca, cb)
    return out


def poly_eval(f: FieldSpec, coeffs, x: int) -> int:
    """Evaluate a polynomial (ascending coefficients) at x, Horner form."""
    acc = 0
    for c in reversed(coeffs):
        acc = gf_mul(f, acc, x) ^ c
    return acc


# ---------------------------------------------------------------------------
# Packed GF(2) matrices
# ---------------------------------------------------------------------------


class BitMatrix:
    """Row-major bit matrix packed into uint64 words.

    Bit j of row i lives at ``words[i, j >> 6] >> (j & 63)``. Padding bits
    past ``cols`` are kept at zero so whole-word row XORs are safe.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        self.rows = rows
        self.cols = cols
        wpr = (cols + _WORD - 1) // _WORD
        if words is None:
            words = np.zeros((rows, wpr), dtype=np.uint64)
        self.words = words

    # -- construction -------------------------------------------------

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense, dtype=np.uint8)
        rows, cols = dense.shape
        m = cls(rows, cols)
        for j in range(cols):
            w, b = divmod(j, _WORD)
            m.words[:, w] |= dense[:, j].astype(np.uint64) << np.uint64(b)
        return m

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.set(i, i, 1)
        return m

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.words.copy())

    # -- element access -----------------------------------------------

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def set(self, i: int, j: int, v: int) -> None:
        mask = np.uint64(1) << np.uint64(j & 63)
        if v:
            self.words[i, j >> 6] |= mask
        else:
            self.words[i, j >> 6] &= ~mask

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j in range(self.cols):
            w, b = divmod(j, _WORD)
            out[:, j] = (self.words[:, w] >> np.uint64(b)) & np.uint64(1)
        return out

    # -- row/column operations ----------------------------------------

    def row_bits(self, i: int) -> np.ndarray:
        """Row i as a dense uint8 vector."""
        out = np.zeros(self.cols, dtype=np.uint8)
        for j in range(self.cols):
            out[j] = self.get(i, j)
        return out

    def swap_rows(self, i: int, j: int) -> None:
        self.words[[i, j]] = self.words[[j, i]]

    def swap_cols(self, i: int, j: int) -> None:
        wi, bi = divmod(i, _WORD)
        wj, bj = divmod(j, _WORD)
        ci = (self.words[:, wi] >> np.uint64(bi)) & np.uint64(1)
        cj = (self.words[:, wj] >> np.uint64(bj)) & np.uint64(1)
        diff = ci ^ cj
        self.words[:, wi] ^= diff << np.uint64(bi)
        self.words[:, wj] ^= diff << np.uint64(bj)

    def column(self, j: int) -> np.ndarray:
        w, b = divmod(j, _WORD)
        return ((self.words[:, w] >> np.uint64(b)) & np.uint64(1)).astype(np.uint8)

    def permute_cols(self, order) -> "BitMatrix":
        """New matrix whose column p is this matrix's column order[p]."""
        out = BitMatrix(self.rows, self.cols)
        for p, j in enumerate(order):
            w, b = divmod(p, _WORD)
            out.words[:, w] |= self.column(int(j)).astype(np.uint64) << np.uint64(b)
        return out

    def vecmat(self, u) -> np.ndarray:
        """u @ M over GF(2); u is a length-``rows`` bit vector."""
        u = np.asarray(u, dtype=np.uint8)
        sel = self.words[u != 0]
        if len(sel) == 0:
            acc = np.zeros(self.words.shape[1], dtype=np.uint64)
        else:
            acc = np.bitwise_xor.reduce(sel, axis=0)
        return unpack_bits(acc, self.cols)

    def rank(self) -> int:
        work = self.words.copy()
        r = 0
        for j in range(self.cols):
            w, b = divmod(j, _WORD)
            col = (work[r:, w] >> np.uint64(b)) & np.uint64(1)
            nz = np.nonzero(col)[0]
            if len(nz) == 0:
                continue
            piv = r + int(nz[0])
            work[[r, piv]] = work[[piv, r]]
            hit = np.nonzero((work[:, w] >> np.uint64(b)) & np.uint64(1))[0]
            hit = hit[hit != r]
            work[hit] ^= work[r]
            r += 1
            if r == self.rows:
                break
        return r


def pack_bits(bits) -> np.ndarray:
    """Bit vector -> uint64 words, LSB-first within each word."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = len(bits)
    words = np.zeros((n + _WORD - 1) // _WORD, dtype=np.uint64)
    for j in np.nonzero(bits)[0]:
        words[j >> 6] |= np.uint64(1) << np.uint64(int(j) & 63)
    return words


def unpack_bits(words, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.uint8)
    for j in range(n):
        out[j] = (words[j >> 6] >> np.uint64(j & 63)) & np.uint64(1)
    return out


def row_reduce_ordered(g: BitMatrix, order) -> tuple[BitMatrix, np.ndarray, int]:
    """Column-permute ``g`` by ``order`` and reduce to systematic [I | P'].

    When a leading column turns out dependent on the pivots so far, it is
    swapped with the lowest-index later column that is independent, and the
    swap is counted. The returned order reflects all such repairs.

    Returns (systematic matrix, final column order, swap count).
    """
    k = g.rows
    n = g.cols
    m = g.permute_cols(order)
    perm = np.array(order, dtype=np.int64).copy()
    if len(perm) != n or sorted(perm.tolist()) != list(range(n)):
        raise ValueError("order must be a permutation of column indices")
    swaps = 0
    for p in range(k):
        q = p
        piv_row = -1
        while q < n:
            w, b = divmod(q, _WORD)
            col = (m.words[p:, w] >> np.uint64(b)) & np.uint64(1)
            nz = np.nonzero(col)[0]
            if len(nz):
                piv_row = p + int(nz[0])
                break
            q += 1
        if piv_row < 0:
            raise RankError("generator not full rank")
        if q != p:
            m.swap_cols(p, q)
            perm[p], perm[q] = perm[q], perm[p]
            swaps += 1
        if piv_row != p:
            m.swap_rows(p, piv_row)
        w, b = divmod(p, _WORD)
        hit = np.nonzero((m.words[:, w] >> np.uint64(b)) & np.uint64(1))[0]
        hit = hit[hit != p]
        m.words[hit] ^= m.words[p]
    return m, perm, swaps
