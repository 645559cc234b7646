# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled boundary kernels operating on 64-bit word arrays.

Same call signatures as ``vslam._pykernels``; masks are converted to
``(rows, words)`` uint64 matrices on entry. Small inputs are delegated to the
pure-Python implementation, where the conversion would cost more than it saves.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

from . import _pykernels

cnp.import_array()

BACKEND = "cython"

# below this many candidate checks the interpreter path wins
SMALL_WORK = 64


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


def _words(masks, Py_ssize_t nwords):
    nbytes = 8 * nwords
    buf = b"".join([m.to_bytes(nbytes, "little") for m in masks])
    return np.frombuffer(buf, dtype="<u8").reshape(len(masks), nwords)


def _nwords(*masks):
    cdef Py_ssize_t bl = 0
    for m in masks:
        bl = max(bl, m.bit_length())
    return max(1, (bl + 63) // 64)


cdef Py_ssize_t _literal_list(const uint64_t[::1] lower, const uint64_t[::1] s,
                              int64_t[::1] out) noexcept nogil:
    cdef Py_ssize_t k, n = 0
    cdef uint64_t x
    for k in range(lower.shape[0]):
        x = lower[k] & ~s[k]
        while x:
            out[n] = 64 * k + __builtin_ctzll(x)
            n += 1
            x &= x - 1
    return n


def _uup_plan(const uint64_t[:, ::1] U, const uint64_t[::1] s, const uint64_t[::1] lower):
    """Return (keep_rows, extend_rows, extend_literals)."""
    cdef Py_ssize_t m = U.shape[0], w = U.shape[1]
    cdef Py_ssize_t i, j, k, t, v, nlit, nexp = 0, nkeep = 0, npairs = 0
    cdef uint64_t x
    cdef int cnt, lit
    cdef bint dominated

    # single outside literal per row: >=0 literal, -1 none (expand), -2 several
    cdef int64_t[::1] single = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] keep = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] expand = np.empty(m, dtype=np.int64)
    for i in range(m):
        cnt = 0
        lit = -1
        for k in range(w):
            x = U[i, k] & ~s[k]
            if x:
                cnt += __builtin_popcountll(x)
                lit = 64 * k + __builtin_ctzll(x)
        if cnt == 0:
            single[i] = -1
            expand[nexp] = i
            nexp += 1
        else:
            single[i] = lit if cnt == 1 else -2
            keep[nkeep] = i
            nkeep += 1

    cdef int64_t[::1] lits = np.empty(64 * w, dtype=np.int64)
    nlit = _literal_list(lower, s, lits)

    # bucket kept rows by their single outside literal (CSR layout)
    cdef int64_t[::1] start = np.zeros(64 * w + 1, dtype=np.int64)
    for t in range(nkeep):
        i = keep[t]
        if single[i] >= 0:
            start[single[i] + 1] += 1
    for j in range(64 * w):
        start[j + 1] += start[j]
    cdef int64_t[::1] fill = np.array(start[:64 * w], dtype=np.int64)
    cdef int64_t[::1] bucket = np.empty(max(start[64 * w], 1), dtype=np.int64)
    for t in range(nkeep):
        i = keep[t]
        if single[i] >= 0:
            bucket[fill[single[i]]] = i
            fill[single[i]] += 1

    cdef int64_t[::1] ext_row = np.empty(max(nexp * nlit, 1), dtype=np.int64)
    cdef int64_t[::1] ext_lit = np.empty(max(nexp * nlit, 1), dtype=np.int64)
    with nogil:
        for t in range(nexp):
            i = expand[t]
            for j in range(nlit):
                lit = lits[j]
                dominated = False
                for v in range(start[lit], start[lit + 1]):
                    dominated = True
                    for k in range(w):
                        if U[bucket[v], k] & s[k] & ~U[i, k]:
                            dominated = False
                            break
                    if dominated:
                        break
                if not dominated:
                    ext_row[npairs] = i
                    ext_lit[npairs] = lit
                    npairs += 1
    return (np.asarray(keep[:nkeep]), np.asarray(ext_row[:npairs]),
            np.asarray(ext_lit[:npairs]))


def uup_update(list upper, lower, state):
    extra = lower & ~state
    if len(upper) * max(extra.bit_count(), 1) < SMALL_WORK:
        return _pykernels.uup_update(upper, lower, state)
    w = _nwords(lower, state, *upper)
    keep, rows, lits = _uup_plan(_words(upper, w), _words([state], w)[0], _words([lower], w)[0])
    out = [upper[i] for i in keep.tolist()]
    out.extend([upper[r] | (1 << l) for r, l in zip(rows.tolist(), lits.tolist())])
    return out


def _minimal_rows(const uint64_t[:, ::1] U, const int64_t[::1] order):
    cdef Py_ssize_t m = order.shape[0], w = U.shape[1]
    cdef Py_ssize_t a, b, k, i, j, nk = 0
    cdef bint covered, sub
    cdef int64_t[::1] kept = np.empty(max(m, 1), dtype=np.int64)
    with nogil:
        for a in range(m):
            i = order[a]
            covered = False
            for b in range(nk):
                j = kept[b]
                sub = True
                for k in range(w):
                    if U[j, k] & ~U[i, k]:
                        sub = False
                        break
                if sub:
                    covered = True
                    break
            if not covered:
                kept[nk] = i
                nk += 1
    return np.asarray(kept[:nk])


def minimize_antichain(sets):
    uniq = sorted(set(sets), key=lambda x: (x.bit_count(), x))
    if len(uniq) < 16:
        return _pykernels.minimize_antichain(uniq)
    w = _nwords(*uniq)
    order = np.arange(len(uniq), dtype=np.int64)
    return [uniq[i] for i in _minimal_rows(_words(uniq, w), order).tolist()]
