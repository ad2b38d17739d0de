# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: GF(2) elimination, symplectic Gram matrices and the
integer box search for null vectors."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()


cdef inline int _parity64(uint64_t v) nogil:
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return <int>(v & 1)


def symplectic_gram(cnp.ndarray[uint64_t, ndim=2] x, cnp.ndarray[uint64_t, ndim=2] z):
    """Return G[a, b] = 1 iff Pauli rows a and b anticommute."""
    cdef Py_ssize_t m = x.shape[0], w = x.shape[1]
    cdef cnp.ndarray[uint8_t, ndim=2] out = np.zeros((m, m), dtype=np.uint8)
    cdef Py_ssize_t a, b, k
    cdef uint64_t acc
    with nogil:
        for a in range(m):
            for b in range(a + 1, m):
                acc = 0
                for k in range(w):
                    acc ^= (x[a, k] & z[b, k]) ^ (z[a, k] & x[b, k])
                if _parity64(acc):
                    out[a, b] = 1
                    out[b, a] = 1
    return out


def gf2_rank(cnp.ndarray[uint64_t, ndim=2] rows):
    cdef cnp.ndarray[uint64_t, ndim=2] r = rows.copy()
    cdef Py_ssize_t m = r.shape[0], w = r.shape[1]
    cdef Py_ssize_t rank = 0, col, piv, i, k, word, bit
    cdef uint64_t mask, tmp
    for col in range(w * 64):
        word = col // 64
        bit = col % 64
        mask = (<uint64_t>1) << bit
        piv = -1
        for i in range(rank, m):
            if r[i, word] & mask:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(w):
                tmp = r[piv, k]
                r[piv, k] = r[rank, k]
                r[rank, k] = tmp
        for i in range(m):
            if i != rank and (r[i, word] & mask):
                for k in range(w):
                    r[i, k] ^= r[rank, k]
        rank += 1
        if rank == m:
            break
    return rank


def gf2_solve(cnp.ndarray[uint64_t, ndim=2] rows, cnp.ndarray[uint64_t, ndim=1] target):
    """Find a 0/1 selection of rows whose XOR equals target, or None."""
    cdef Py_ssize_t m = rows.shape[0], w = rows.shape[1]
    cdef Py_ssize_t cw = (m + 63) // 64
    cdef cnp.ndarray[uint64_t, ndim=2] r = rows.copy()
    cdef cnp.ndarray[uint64_t, ndim=2] comb = np.zeros((m, cw), dtype=np.uint64)
    cdef cnp.ndarray[uint64_t, ndim=1] t = target.copy()
    cdef cnp.ndarray[uint64_t, ndim=1] tc = np.zeros(cw, dtype=np.uint64)
    cdef Py_ssize_t rank = 0, col, piv, i, k, word
    cdef uint64_t mask, tmp
    for i in range(m):
        comb[i, i // 64] = (<uint64_t>1) << (i % 64)
    for col in range(w * 64):
        word = col // 64
        mask = (<uint64_t>1) << (col % 64)
        piv = -1
        for i in range(rank, m):
            if r[i, word] & mask:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(w):
                tmp = r[piv, k]; r[piv, k] = r[rank, k]; r[rank, k] = tmp
            for k in range(cw):
                tmp = comb[piv, k]; comb[piv, k] = comb[rank, k]; comb[rank, k] = tmp
        for i in range(m):
            if i != rank and (r[i, word] & mask):
                for k in range(w):
                    r[i, k] ^= r[rank, k]
                for k in range(cw):
                    comb[i, k] ^= comb[rank, k]
        if t[word] & mask:
            for k in range(w):
                t[k] ^= r[rank, k]
            for k in range(cw):
                tc[k] ^= comb[rank, k]
        rank += 1
    for k in range(w):
        if t[k] != 0:
            return None
    out = np.zeros(m, dtype=np.uint8)
    for i in range(m):
        if (tc[i // 64] >> (i % 64)) & 1:
            out[i] = 1
    return out


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


def null_box(cnp.ndarray[int64_t, ndim=2] A,
             cnp.ndarray[int64_t, ndim=2] eq,
             cnp.ndarray[int64_t, ndim=2] mod_rows,
             cnp.ndarray[int64_t, ndim=1] mod_vals,
             int cutoff):
    """Primitive, sign-canonical integer vectors l in [-cutoff, cutoff]^n with
    l^T A l = 0, eq @ l = 0 and (mod_rows @ l) % mod_vals = 0."""
    cdef Py_ssize_t n = A.shape[0], p = eq.shape[0], q = mod_rows.shape[0]
    cdef cnp.ndarray[int64_t, ndim=1] l = np.full(n, -cutoff, dtype=np.int64)
    cdef Py_ssize_t i, j, k
    cdef int64_t acc, g, r
    cdef int ok, first
    found = []
    while True:
        ok = 1
        first = 0
        for i in range(n):
            if l[i] != 0:
                first = 1 if l[i] > 0 else -1
                break
        if first <= 0:
            ok = 0
        if ok:
            g = 0
            for i in range(n):
                g = _gcd(g, l[i])
            if g != 1:
                ok = 0
        if ok:
            for k in range(p):
                acc = 0
                for i in range(n):
                    acc += eq[k, i] * l[i]
                if acc != 0:
                    ok = 0
                    break
        if ok:
            for k in range(q):
                acc = 0
                for i in range(n):
                    acc += mod_rows[k, i] * l[i]
                r = acc % mod_vals[k]
                if r != 0:
                    ok = 0
                    break
        if ok:
            acc = 0
            for i in range(n):
                for j in range(n):
                    acc += l[i] * A[i, j] * l[j]
            if acc != 0:
                ok = 0
        if ok:
            found.append(l.copy())
        i = n - 1
        while i >= 0:
            if l[i] < cutoff:
                l[i] += 1
                break
            l[i] = -cutoff
            i -= 1
        if i < 0:
            break
    if not found:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(found, dtype=np.int64)
