"""Code construction and encoding.

Builds the two byte-aligned codes used throughout (binary BCH(127,64) and
the binary image of shortened RS(16,8) over GF(2^8)) plus a small Hamming
code for brute-force cross-checks. All generators are systematic [I | P] at
the bit level.

Bit convention, fixed globally: bit j of a byte is the j-th LEAST
significant bit, so a k-byte message expands to bits u[8i+j] = (mu[i] >> j) & 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf import BitMatrix, FieldSpec, gf128, gf256, gf_mul, poly_mul


@dataclass(frozen=True)
class SymbolInfo:
    """Nonbinary (symbol-level) structure of a code's binary image."""

    field: FieldSpec
    n_sym: int
    k_sym: int
    genpoly: tuple  # ascending coefficients over the field
    first_root: int


@dataclass(frozen=True)
class BchInfo:
    """Binary BCH structure needed by the hard-decision decoder."""

    field: FieldSpec
    genpoly: tuple  # ascending GF(2) coefficients
    t: int


@dataclass(frozen=True)
class CodeSpec:
    name: str
    n_b: int
    k_b: int
    k: int  # information bytes; 0 when not byte-aligned
    d_min: int
    G_b: BitMatrix
    symbol_info: SymbolInfo | None = None
    bch_info: BchInfo | None = None

    @property
    def rate(self) -> float:
        return self.k_b / self.n_b


def bytes_to_bits(mu) -> np.ndarray:
    """Byte vector -> bit vector, LSB-first within each byte."""
    mu = np.frombuffer(bytes(mu), dtype=np.uint8) if isinstance(mu, (bytes, bytearray)) else np.asarray(mu, dtype=np.uint8)
    return np.unpackbits(mu, bitorder="little")


def bits_to_bytes(bits) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) % 8:
        raise ValueError("bit length must be a multiple of 8")
    return np.packbits(bits, bitorder="little").tobytes()


def encode(code: CodeSpec, u) -> np.ndarray:
    """c = u G_b over GF(2); systematic, so c[:k_b] == u."""
    u = np.asarray(u, dtype=np.uint8)
    if len(u) != code.k_b:
        raise ValueError(f"message length {len(u)} != k_b {code.k_b}")
    return code.G_b.vecmat(u)


def is_codeword(code: CodeSpec, c) -> bool:
    """Membership via re-encoding the systematic information positions."""
    c = np.asarray(c, dtype=np.uint8)
    if len(c) != code.n_b:
        return False
    return bool(np.array_equal(encode(code, c[: code.k_b]), c))


# ---------------------------------------------------------------------------
# Reed-Solomon (16,8) over GF(2^8), binary image
# ---------------------------------------------------------------------------

# Symbol layout: byte i of the codeword is the coefficient of x^(n_sym-1-i),
# so the information bytes sit at the high powers and parity at the low.


def _rs_genpoly(f: FieldSpec, n_roots: int, first_root: int):
    g = [1]
    for j in range(first_root, first_root + n_roots):
        g = poly_mul(f, g, [f.alpha_pow(j), 1])
    return g


def rs_encode_symbols(code: CodeSpec, msg: bytes) -> bytes:
    """Systematic symbol-level encoding (polynomial remainder route)."""
    si = code.symbol_info
    f = si.field
    n, ksym = si.n_sym, si.k_sym
    nroots = n - ksym
    rem = [0] * n
    for i, b in enumerate(msg):
        rem[n - 1 - i] = b
    for p in range(n - 1, nroots - 1, -1):
        c = rem[p]
        if c:
            for q, gc in enumerate(si.genpoly):
                rem[p - nroots + q] ^= gf_mul(f, c, gc)
    out = bytearray(msg)
    out.extend(rem[nroots - 1 - i] for i in range(nroots))
    return bytes(out)


def rs_syndromes(code: CodeSpec, received: bytes) -> list[int]:
    """S_j = r(alpha^(first_root+j)) for j = 0..n-k-1; all zero on codewords."""
    si = code.symbol_info
    f = si.field
    n = si.n_sym
    nroots = n - si.k_sym
    out = []
    for j in range(nroots):
        x = f.alpha_pow(si.first_root + j)
        acc = 0
        for b in received:  # byte i is the coefficient of x^(n-1-i)
            acc = gf_mul(f, acc, x) ^ b
        out.append(acc)
    return out


@lru_cache(maxsize=None)
def build_rs_16_8() -> CodeSpec:
    """Shortened RS(16,8) over GF(2^8) and its systematic binary image.

    RS(255,247) with generator roots alpha^1..alpha^8, shortened by fixing
    the 239 leading information symbols to zero. Each symbol-generator entry
    g expands to the 8x8 binary block whose row j is the bit pattern of
    g * x^j, which makes the bit-level image of symbol multiplication exact.
    """
    f = gf256()
    n_sym, k_sym = 16, 8
    genpoly = tuple(_rs_genpoly(f, n_sym - k_sym, 1))
    si = SymbolInfo(field=f, n_sym=n_sym, k_sym=k_sym, genpoly=genpoly, first_root=1)

    dense = np.zeros((64, 128), dtype=np.uint8)
    code_stub = CodeSpec("rs_16_8", 128, 64, 8, 9, BitMatrix(1, 1), symbol_info=si)
    for i in range(k_sym):
        msg = bytes(1 if t == i else 0 for t in range(k_sym))
        row_syms = rs_encode_symbols(code_stub, msg)
        for j in range(8):
            for c, g in enumerate(row_syms):
                v = gf_mul(f, g, 1 << j)
                for b in range(8):
                    dense[8 * i + j, 8 * c + b] = (v >> b) & 1
    G = BitMatrix.from_dense(dense)
    return CodeSpec("rs_16_8", 128, 64, 8, 9, G, symbol_info=si)


# ---------------------------------------------------------------------------
# BCH(127,64)
# ---------------------------------------------------------------------------


def _bch_genpoly(f: FieldSpec, designed_delta: int):
    """lcm of minimal polynomials of alpha^1..alpha^(designed_delta-1)."""
    n = f.order - 1
    seen = set()
    g = [1]
    for d in range(1, designed_delta):
        if d in seen:
            continue
        cls = []
        e = d
        while e not in cls:
            cls.append(e)
            e = (e * 2) % n
        seen.update(cls)
        minpoly = [1]
        for e in cls:
            minpoly = poly_mul(f, minpoly, [f.alpha_pow(e), 1])
        if any(c not in (0, 1) for c in minpoly):
            raise AssertionError("minimal polynomial not binary")
        g = poly_mul(f, g, minpoly)
    return g


@lru_cache(maxsize=None)
def build_bch_127_64() -> CodeSpec:
    """Narrow-sense binary BCH(127,64), designed distance 21 (t=10).

    Codeword bit j is the coefficient of x^(126-j): information bits occupy
    the high powers, parity the low, giving a systematic [I | P] generator
    from polynomial remainders.
    """
    f = gf128()
    g = _bch_genpoly(f, 21)
    deg = len(g) - 1
    n_b, k_b = 127, 64
    if deg != n_b - k_b:
        raise AssertionError(f"BCH generator degree {deg} != {n_b - k_b}")
    dense = np.zeros((k_b, n_b), dtype=np.uint8)
    for i in range(k_b):
        dense[i, i] = 1
        # remainder of x^(126-i) mod g(x)
        rem = np.zeros(n_b, dtype=np.uint8)
        rem[n_b - 1 - i] = 1
        for p in range(n_b - 1, deg - 1, -1):
            if rem[p]:
                for q, gc in enumerate(g):
                    if gc:
                        rem[p - deg + q] ^= 1
        for j in range(k_b, n_b):
            dense[i, j] = rem[n_b - 1 - j]
    G = BitMatrix.from_dense(dense)
    return CodeSpec(
        "bch_127_64", n_b, k_b, 8, 21, G, bch_info=BchInfo(field=f, genpoly=tuple(int(c) for c in g), t=10)
    )


# ---------------------------------------------------------------------------
# Hamming(7,4)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def build_hamming_7_4() -> CodeSpec:
    dense = np.array(
        [
            [1, 0, 0, 0, 1, 1, 0],
            [0, 1, 0, 0, 1, 0, 1],
            [0, 0, 1, 0, 0, 1, 1],
            [0, 0, 0, 1, 1, 1, 1],
        ],
        dtype=np.uint8,
    )
    return CodeSpec("hamming_7_4", 7, 4, 0, 3, BitMatrix.from_dense(dense))


_BUILDERS = {
    "rs_16_8": build_rs_16_8,
    "bch_127_64": build_bch_127_64,
    "hamming_7_4": build_hamming_7_4,
}


def build(name: str) -> CodeSpec:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown code {name!r}; choose from {sorted(_BUILDERS)}") from None
