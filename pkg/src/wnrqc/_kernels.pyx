# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled walk kernels.

Mirrors wnrqc._kernels_py exactly, including the order in which the
pre-drawn uniforms are consumed, so both backends are bit-identical.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def walk_run(double[::1] probs, int[::1] pairs_i, int[::1] pairs_j,
             int q, double sigma):
    cdef Py_ssize_t size = probs.shape[0]
    cdef Py_ssize_t s = pairs_i.shape[0]
    cdef double p_ss = 1.0 / (q * q + 1.0)
    cdef double p_ii = 1.0 - p_ss
    cdef double keep = 1.0 - sigma
    cdef Py_ssize_t t, idx, partner
    cdef long long mi, mj, both, m
    cdef double moved
    for t in range(s):
        mi = 1ll << pairs_i[t]
        mj = 1ll << pairs_j[t]
        both = mi | mj
        for idx in range(size):
            if (idx & mi) == 0 and (idx & mj) != 0:
                partner = idx ^ both
                moved = probs[idx] + probs[partner]
                probs[idx] = 0.0
                probs[partner] = 0.0
                probs[idx & ~mj] += p_ii * moved
                probs[idx | mi] += p_ss * moved
        if sigma > 0.0:
            for m in (mi, mj):
                for idx in range(size):
                    if (idx & m) != 0:
                        probs[idx & ~m] += sigma * probs[idx]
                        probs[idx] *= keep
    return np.asarray(probs)


def walk_zm1_batch(double[::1] init, double[::1] weights_m1,
                   int[:, ::1] pairs_i, int[:, ::1] pairs_j,
                   int q, double sigma):
    cdef Py_ssize_t ndiag = pairs_i.shape[0]
    cdef Py_ssize_t s = pairs_i.shape[1]
    cdef Py_ssize_t size = init.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(ndiag, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] scratch_arr = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] weights_arr = np.asarray(weights_m1)
    cdef double[::1] scratch = scratch_arr
    cdef double p_ss = 1.0 / (q * q + 1.0)
    cdef double p_ii = 1.0 - p_ss
    cdef double keep = 1.0 - sigma
    cdef Py_ssize_t d, t, idx, partner, w
    cdef long long mi, mj, both, m
    cdef double moved, acc
    for d in range(ndiag):
        for idx in range(size):
            scratch[idx] = init[idx]
        for t in range(s):
            mi = 1ll << pairs_i[d, t]
            mj = 1ll << pairs_j[d, t]
            both = mi | mj
            for idx in range(size):
                if (idx & mi) == 0 and (idx & mj) != 0:
                    partner = idx ^ both
                    moved = scratch[idx] + scratch[partner]
                    scratch[idx] = 0.0
                    scratch[partner] = 0.0
                    scratch[idx & ~mj] += p_ii * moved
                    scratch[idx | mi] += p_ss * moved
            if sigma > 0.0:
                for m in (mi, mj):
                    for idx in range(size):
                        if (idx & m) != 0:
                            scratch[idx & ~m] += sigma * scratch[idx]
                            scratch[idx] *= keep
        # np.dot keeps the reduction order identical to the numpy fallback
        out[d] = np.dot(scratch_arr, weights_arr)
    return out


def mc_final_weights(int n, int q, double sigma,
                     int[::1] pairs_i, int[::1] pairs_j,
                     double[:, ::1] uniforms):
    cdef Py_ssize_t nrows = uniforms.shape[0]
    cdef Py_ssize_t s = pairs_i.shape[0]
    cdef double p_init = 1.0 / (q + 1.0)
    cdef double p_ss = 1.0 / (q * q + 1.0)
    cdef cnp.ndarray[long long, ndim=1] out = np.empty(nrows, dtype=np.int64)
    cdef cnp.ndarray[char, ndim=1] bits_arr = np.zeros(n, dtype=np.int8)
    cdef char[::1] bits = bits_arr
    cdef Py_ssize_t r, t, k, base
    cdef int i, j
    cdef char to_s
    cdef long long w
    for r in range(nrows):
        for k in range(n):
            bits[k] = 1 if uniforms[r, k] < p_init else 0
        for t in range(s):
            base = n + 3 * t
            i = pairs_i[t]
            j = pairs_j[t]
            if bits[i] != bits[j]:
                to_s = 1 if uniforms[r, base] < p_ss else 0
                bits[i] = to_s
                bits[j] = to_s
            if sigma > 0.0:
                if bits[i] != 0 and uniforms[r, base + 1] < sigma:
                    bits[i] = 0
                if bits[j] != 0 and uniforms[r, base + 2] < sigma:
                    bits[j] = 0
        w = 0
        for k in range(n):
            w += bits[k]
        out[r] = w
    return out


def mc_final_weights_resample(int n, int q, double sigma, int s,
                              double[:, ::1] uniforms):
    cdef Py_ssize_t nrows = uniforms.shape[0]
    cdef double p_init = 1.0 / (q + 1.0)
    cdef double p_ss = 1.0 / (q * q + 1.0)
    cdef cnp.ndarray[long long, ndim=1] out = np.empty(nrows, dtype=np.int64)
    cdef cnp.ndarray[char, ndim=1] bits_arr = np.zeros(n, dtype=np.int8)
    cdef char[::1] bits = bits_arr
    cdef Py_ssize_t r, t, k, base
    cdef long long i, j
    cdef char to_s
    cdef long long w
    for r in range(nrows):
        for k in range(n):
            bits[k] = 1 if uniforms[r, k] < p_init else 0
        for t in range(s):
            base = n + 5 * t
            i = <long long>(uniforms[r, base] * n)
            if i > n - 1:
                i = n - 1
            j = <long long>(uniforms[r, base + 1] * (n - 1))
            if j > n - 2:
                j = n - 2
            if j >= i:
                j += 1
            if bits[i] != bits[j]:
                to_s = 1 if uniforms[r, base + 2] < p_ss else 0
                bits[i] = to_s
                bits[j] = to_s
            if sigma > 0.0:
                if bits[i] != 0 and uniforms[r, base + 3] < sigma:
                    bits[i] = 0
                if bits[j] != 0 and uniforms[r, base + 4] < sigma:
                    bits[j] = 0
        w = 0
        for k in range(n):
            w += bits[k]
        out[r] = w
    return out
