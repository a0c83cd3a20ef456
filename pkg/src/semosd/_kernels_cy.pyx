# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled TEP search kernels.

Scalar twins of ``_kernels_py``: identical enumeration orders and identical
floating-point accumulation order, so results match the fallback
bit-for-bit. These loops dominate simulation runtime (hundreds of millions
of candidate evaluations per sweep point).
"""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"


cdef inline double _bytes_pen(const double[:, ::1] tab, unsigned long long word, double base) nogil:
    cdef double pen = base
    cdef int b
    for b in range(8):
        pen = pen + tab[b, (word >> (8 * b)) & <unsigned long long>255]
    return pen


def search_bit_teps(const cnp.uint64_t[::1] prows_rev,
                    const double[::1] winfo_rev,
                    unsigned long long base_disagree,
                    const double[:, ::1] partab,
                    int m,
                    double stop_pen):
    """Best bit-flip TEP of weight <= m; see the python twin for semantics."""
    cdef int kb = prows_rev.shape[0]
    cdef double best_pen, pen, info_pen
    cdef unsigned long long best_mask = 0
    cdef long long n_eval = 1
    cdef int w, t, j
    cdef int idx[64]
    cdef double pref_pen[65]
    cdef unsigned long long pref_word[65]

    best_pen = _bytes_pen(partab, base_disagree, 0.0)
    if best_pen <= stop_pen:
        return best_pen, best_mask, n_eval, True

    if m > kb:
        m = kb
    for w in range(1, m + 1):
        for t in range(w):
            idx[t] = t
        pref_pen[0] = 0.0
        pref_word[0] = base_disagree
        for t in range(w):
            pref_pen[t + 1] = pref_pen[t] + winfo_rev[idx[t]]
            pref_word[t + 1] = pref_word[t] ^ prows_rev[idx[t]]
        while True:
            n_eval += 1
            info_pen = pref_pen[w]
            if info_pen < best_pen:
                pen = _bytes_pen(partab, pref_word[w], info_pen)
                if pen < best_pen:
                    best_pen = pen
                    best_mask = 0
                    for t in range(w):
                        best_mask |= (<unsigned long long>1) << idx[t]
                    if best_pen <= stop_pen:
                        return best_pen, best_mask, n_eval, True
            t = w - 1
            while t >= 0 and idx[t] == kb - w + t:
                t -= 1
            if t < 0:
                break
            idx[t] += 1
            for j in range(t + 1, w):
                idx[j] = idx[j - 1] + 1
            for j in range(t, w):
                pref_pen[j + 1] = pref_pen[j] + winfo_rev[idx[j]]
                pref_word[j + 1] = pref_word[j] ^ prows_rev[idx[j]]
    return best_pen, best_mask, n_eval, False


def search_byte_teps(unsigned long long base_info_dis,
                     unsigned long long base_par_dis,
                     const cnp.uint64_t[:, ::1] delta_info,
                     const cnp.uint64_t[:, ::1] delta_par,
                     const double[:, ::1] infotab,
                     const double[:, ::1] partab,
                     int omega,
                     double stop_pen):
    """Best byte-substitution TEP; see the python twin for semantics."""
    cdef int k = delta_info.shape[0]
    cdef int T = delta_info.shape[1]
    cdef double best_pen, pen
    cdef unsigned long long best_code = 0, code, info, par
    cdef long long n_eval = 1
    cdef int w, t, j
    cdef int pos[8]
    cdef int a[8]

    best_pen = _bytes_pen(partab, base_par_dis, _bytes_pen(infotab, base_info_dis, 0.0))
    if best_pen <= stop_pen:
        return best_pen, best_code, n_eval, True

    if omega > k:
        omega = k
    for w in range(1, omega + 1):
        for t in range(w):
            pos[t] = t
        while True:  # over position subsets
            for t in range(w):
                a[t] = 0
            while True:  # over alternative tuples, last position fastest
                info = base_info_dis
                par = base_par_dis
                for t in range(w):
                    info = info ^ delta_info[pos[t], a[t]]
                    par = par ^ delta_par[pos[t], a[t]]
                pen = _bytes_pen(partab, par, _bytes_pen(infotab, info, 0.0))
                n_eval += 1
                if pen < best_pen:
                    best_pen = pen
                    code = 0
                    for t in range(w):
                        code |= (<unsigned long long>(a[t] + 1)) << (8 * pos[t])
                    best_code = code
                    if best_pen <= stop_pen:
                        return best_pen, best_code, n_eval, True
                t = w - 1
                while t >= 0 and a[t] == T - 1:
                    a[t] = 0
                    t -= 1
                if t < 0:
                    break
                a[t] += 1
            t = w - 1
            while t >= 0 and pos[t] == k - w + t:
                t -= 1
            if t < 0:
                break
            pos[t] += 1
            for j in range(t + 1, w):
                pos[j] = pos[j - 1] + 1
    return best_pen, best_code, n_eval, False
