# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops for the Monte Carlo engine and the matrix search.

Mirrors ``_fallback`` exactly, including floating point operation order, so
both backends return identical counts for identical draws.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef double HALF = sqrt(0.5)


cdef inline unsigned char _detect(unsigned char bit, const double[:] d, double sg) noexcept nogil:
    cdef double hr = d[0] * HALF
    cdef double hi = d[1] * HALF
    cdef double nr = d[2] * HALF
    cdef double ni = d[3] * HALF
    cdef double s = 1.0 - 2.0 * bit
    cdef double metric = (hr * hr + hi * hi) * s * sg + (hr * nr + hi * ni)
    return 1 if metric < 0 else 0


def nc_block(const unsigned char[:, :] x, const double[:, :, :] up,
             const double[:, :, :, :] down, const double[:] sqrt_up,
             const double[:, :] sqrt_down, const unsigned char[:, :] f,
             const unsigned char[:, :, :] inv, bint debug):
    cdef Py_ssize_t R = x.shape[0], n = x.shape[1], m = n - 1
    cdef Py_ssize_t t, i, k, c, o
    cdef long long mismatches = 0
    cdef unsigned char acc, pred, bad, bc
    errors_arr = np.zeros((n, m), dtype=np.int64)
    cdef long long[:, :] errors = errors_arr
    cdef unsigned char[:] xt = np.empty(n, dtype=np.uint8)
    cdef unsigned char[:] r = np.empty(m, dtype=np.uint8)
    cdef unsigned char[:] rd = np.empty(m, dtype=np.uint8)
    cdef unsigned char[:] rhs = np.empty(m, dtype=np.uint8)
    with nogil:
        for t in range(R):
            for i in range(n):
                xt[i] = _detect(x[t, i], up[t, i], sqrt_up[i])
            for k in range(m):
                acc = 0
                for c in range(n):
                    acc ^= f[k, c] & xt[c]
                r[k] = acc
            for i in range(n):
                for k in range(m):
                    rd[k] = _detect(r[k], down[t, i, k], sqrt_down[i, k])
                    rhs[k] = rd[k] ^ (f[k, i] & x[t, i])
                bad = 0
                for k in range(m):
                    o = k if k < i else k + 1
                    acc = 0
                    for c in range(m):
                        acc ^= inv[i, k, c] & rhs[c]
                    acc ^= x[t, o]
                    errors[i, k] += acc
                    if debug:
                        bc = 0
                        for c in range(m):
                            bc ^= inv[i, k, c] & (r[c] ^ rd[c])
                        pred = (x[t, o] ^ xt[o]) ^ (x[t, i] ^ xt[i]) ^ bc
                        if pred != acc:
                            bad = 1
                mismatches += bad
    return errors_arr, int(mismatches)


def no_nc_block(const unsigned char[:, :] x, const double[:, :, :] up,
                const double[:, :, :, :] down, const double[:] sqrt_up,
                const double[:, :] sqrt_down):
    cdef Py_ssize_t R = x.shape[0], n = x.shape[1]
    cdef Py_ssize_t t, i, j
    cdef unsigned char xt, rd
    errors_arr = np.zeros((n, n), dtype=np.int64)
    cdef long long[:, :] errors = errors_arr
    with nogil:
        for t in range(R):
            for i in range(n):
                xt = _detect(x[t, i], up[t, i], sqrt_up[i])
                for j in range(n):
                    rd = _detect(xt, down[t, j, i], sqrt_down[j, i])
                    if j != i:
                        errors[i, j] += rd ^ x[t, i]
    return errors_arr


def inverse_column_weights(rows, int n_users):
    cdef int m = n_users - 1
    cdef int c, k, col, piv
    cdef unsigned long long low, bit, p, s
    cdef unsigned long long aug[64]
    cdef unsigned long long packed[64]
    if m > 31:
        raise ValueError("at most 32 users")
    for k in range(m):
        packed[k] = rows[k]
    out = []
    for c in range(n_users):
        low = (1ULL << c) - 1
        for k in range(m):
            s = (packed[k] & low) | ((packed[k] >> (c + 1)) << c)
            aug[k] = s | (1ULL << (m + k))
        for col in range(m):
            bit = 1ULL << col
            piv = col
            while piv < m and not (aug[piv] & bit):
                piv += 1
            if piv == m:
                raise ValueError(f"sub-matrix of user {c + 1} is singular")
            p = aug[piv]
            aug[piv] = aug[col]
            aug[col] = p
            for k in range(m):
                if k != col and (aug[k] & bit):
                    aug[k] ^= p
        w = []
        for col in range(m):
            s = 0
            for k in range(m):
                s += (aug[k] >> (m + col)) & 1
            w.append(int(s))
        out.append(w)
    return out
