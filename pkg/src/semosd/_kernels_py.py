"""Pure-numpy fallback for the TEP search kernels.

Mirrors the compiled extension's semantics exactly: same enumeration
orders, same table-lookup scoring with the same accumulation order (so the
two backends agree bit-for-bit), evaluated in vectorized chunks instead of
scalar loops. Selected automatically when the extension is unavailable;
the benchmark script compares the two.

Word layout: candidates live in single uint64s (info and parity parts
each at most 64 bits). ``partab``/``infotab`` are (8, 256) tables mapping
byte b of a disagreement word to its summed reliability penalty.
"""

from __future__ import annotations

from itertools import combinations, islice, product

import numpy as np

BACKEND = "python"
_CHUNK = 16384


def _table_pen(tab: np.ndarray, words: np.ndarray, base: np.ndarray) -> np.ndarray:
    """base + per-byte table sums of each word, bytes added low to high."""
    pen = base.copy()
    b = words[:, None].view(np.uint8)  # little-endian byte view, shape (n, 8)
    for i in range(8):
        pen += tab[i][b[:, i]]
    return pen


def _mask_of(idx_row, width_bits=64) -> int:
    mask = 0
    for j in idx_row:
        mask |= 1 << int(j)
    return mask


def search_bit_teps(prows_rev, winfo_rev, base_disagree, partab, m, stop_pen):
    """Best bit-flip TEP of weight <= m.

    Enumeration: weight ascending; within a weight, supports in ascending
    lexicographic order over the reversed index space (least-reliable
    positions first). A TEP whose info-side penalty already reaches the
    running best is counted but not parity-scored. Returns
    (best_pen, best_mask_rev, n_eval, early).
    """
    kb = len(prows_rev)
    prows_rev = np.asarray(prows_rev, dtype=np.uint64)
    winfo_rev = np.asarray(winfo_rev, dtype=np.float64)
    base = np.uint64(base_disagree)

    best_pen = float(_table_pen(partab, np.array([base]), np.zeros(1))[0])
    best_mask = 0
    n_eval = 1
    if best_pen <= stop_pen:
        return best_pen, best_mask, n_eval, True

    for w in range(1, m + 1):
        it = combinations(range(kb), w)
        while True:
            chunk = np.array(list(islice(it, _CHUNK)), dtype=np.int64)
            if chunk.size == 0:
                break
            n = len(chunk)
            n_eval += n
            info_pen = winfo_rev[chunk[:, 0]].copy()
            for t in range(1, w):
                info_pen += winfo_rev[chunk[:, t]]
            live_idx = np.nonzero(info_pen < best_pen)[0]
            if len(live_idx) == 0:
                continue
            sel = chunk[live_idx]
            words = base ^ prows_rev[sel[:, 0]]
            for t in range(1, w):
                words ^= prows_rev[sel[:, t]]
            pen = _table_pen(partab, words, info_pen[live_idx])
            hits = np.nonzero(pen <= stop_pen)[0]
            if len(hits):
                # after any best update the running best stays above
                # stop_pen, so the first TEP at or below stop_pen is
                # exactly where the sequential scan halts
                h = int(hits[0])
                n_eval += int(live_idx[h]) + 1 - n
                return float(pen[h]), _mask_of(sel[h]), n_eval, True
            idx = int(np.argmin(pen))
            if pen[idx] < best_pen:
                best_pen = float(pen[idx])
                best_mask = _mask_of(sel[idx])
    return best_pen, best_mask, n_eval, False


def search_byte_teps(base_info_dis, base_par_dis, delta_info, delta_par, infotab, partab, omega, stop_pen):
    """Best byte-substitution TEP touching at most omega positions.

    Enumeration: substituted-set size ascending; sets in ascending
    lexicographic position order; within a set, alternative-rank tuples in
    lexicographic order (last position fastest). Returns
    (best_pen, best_eta_code, n_eval, early) with eta_code holding
    (alt_rank + 1) in byte i of substituted positions.
    """
    k, T = delta_info.shape
    delta_info = np.asarray(delta_info, dtype=np.uint64)
    delta_par = np.asarray(delta_par, dtype=np.uint64)
    bi = np.uint64(base_info_dis)
    bp = np.uint64(base_par_dis)

    def pens(info_words, par_words):
        pen = _table_pen(infotab, info_words, np.zeros(len(info_words)))
        return _table_pen(partab, par_words, pen)

    best_pen = float(pens(np.array([bi]), np.array([bp]))[0])
    best_code = 0
    n_eval = 1
    if best_pen <= stop_pen:
        return best_pen, best_code, n_eval, True

    for w in range(1, omega + 1):
        for positions in combinations(range(k), w):
            alts = np.array(list(product(range(T), repeat=w)), dtype=np.int64)
            info = np.full(len(alts), bi, dtype=np.uint64)
            par = np.full(len(alts), bp, dtype=np.uint64)
            for t, pos in enumerate(positions):
                info ^= delta_info[pos, alts[:, t]]
                par ^= delta_par[pos, alts[:, t]]
            pen = pens(info, par)
            n_eval += len(alts)
            hits = np.nonzero(pen <= stop_pen)[0]
            if len(hits):
                h = int(hits[0])
                code = 0
                for t, pos in enumerate(positions):
                    code |= (int(alts[h, t]) + 1) << (8 * pos)
                n_eval += h + 1 - len(alts)
                return float(pen[h]), code, n_eval, True
            idx = int(np.argmin(pen))
            if pen[idx] < best_pen:
                best_pen = float(pen[idx])
                code = 0
                for t, pos in enumerate(positions):
                    code |= (int(alts[idx, t]) + 1) << (8 * pos)
                best_code = code
    return best_pen, best_code, n_eval, False
