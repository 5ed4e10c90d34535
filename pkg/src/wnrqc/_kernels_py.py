"""Pure-numpy implementations of the hot walk kernels.

This module is the fallback selected at import time when the compiled
extension is unavailable.  Both implementations consume random numbers in
exactly the same order (a fixed budget per trajectory and per gate), so
results are bit-identical across backends for the same seed.

Random-number layout per trajectory row:
  fixed diagram:   [n initial bits][3 per gate: gate flip, noise i, noise j]
  resampled pairs: [n initial bits][5 per gate: pair a, pair b, gate flip,
                                    noise i, noise j]
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def walk_run(probs: np.ndarray, pairs_i: np.ndarray, pairs_j: np.ndarray,
             q: int, sigma: float) -> np.ndarray:
    """Evolve a 2^n configuration distribution in place through a gate list.

    Per gate: unequal (i, j) assignments collapse to both-I with probability
    q^2/(q^2+1), both-S with 1/(q^2+1); then each of the two sites flips
    S->I with probability sigma.
    """
    size = probs.shape[0]
    idx = np.arange(size, dtype=np.int64)
    p_ss = 1.0 / (q * q + 1.0)
    p_ii = 1.0 - p_ss
    for i, j in zip(pairs_i, pairs_j):
        mi = np.int64(1) << np.int64(i)
        mj = np.int64(1) << np.int64(j)
        g01 = idx[((idx & mi) == 0) & ((idx & mj) != 0)]
        g10 = g01 ^ (mi | mj)
        moved = probs[g01] + probs[g10]
        probs[g01] = 0.0
        probs[g10] = 0.0
        probs[g01 & ~mj] += p_ii * moved
        probs[g01 | mi] += p_ss * moved
        if sigma > 0.0:
            for m in (mi, mj):
                g1 = idx[(idx & m) != 0]
                probs[g1 & ~m] += sigma * probs[g1]
                probs[g1] *= 1.0 - sigma
    return probs


def walk_zm1_batch(init: np.ndarray, weights_m1: np.ndarray,
                   pairs_i: np.ndarray, pairs_j: np.ndarray,
                   q: int, sigma: float) -> np.ndarray:
    """Evolve one fresh copy of `init` per diagram row; return the
    (q^|nu| - 1)-weighted sums.  pairs_i/pairs_j have shape (D, s)."""
    out = np.empty(len(pairs_i), dtype=np.float64)
    scratch = np.empty_like(init)
    for d in range(len(pairs_i)):
        scratch[:] = init
        walk_run(scratch, pairs_i[d], pairs_j[d], q, sigma)
        out[d] = scratch @ weights_m1
    return out


def mc_final_weights(n: int, q: int, sigma: float,
                     pairs_i: np.ndarray, pairs_j: np.ndarray,
                     uniforms: np.ndarray) -> np.ndarray:
    """Final Hamming weights for a batch of trajectories on a fixed diagram.

    uniforms has shape (B, n + 3 s).
    """
    s = len(pairs_i)
    bits = uniforms[:, :n] < 1.0 / (q + 1.0)
    bits = np.ascontiguousarray(bits)
    p_ss = 1.0 / (q * q + 1.0)
    for t in range(s):
        base = n + 3 * t
        i, j = int(pairs_i[t]), int(pairs_j[t])
        bi = bits[:, i]
        bj = bits[:, j]
        uneq = bi != bj
        to_s = uniforms[:, base] < p_ss
        new = np.where(uneq, to_s, bi)
        bits[:, i] = new
        bits[:, j] = np.where(uneq, to_s, bj)
        if sigma > 0.0:
            bits[:, i] &= ~(uniforms[:, base + 1] < sigma)
            bits[:, j] &= ~(uniforms[:, base + 2] < sigma)
    return bits.sum(axis=1).astype(np.int64)


def mc_final_weights_resample(n: int, q: int, sigma: float, s: int,
                              uniforms: np.ndarray) -> np.ndarray:
    """Like mc_final_weights, but each trajectory draws its own uniform
    gate pair per step (complete-graph diagram average).

    uniforms has shape (B, n + 5 s).
    """
    nrows = uniforms.shape[0]
    rows = np.arange(nrows)
    bits = uniforms[:, :n] < 1.0 / (q + 1.0)
    bits = np.ascontiguousarray(bits)
    p_ss = 1.0 / (q * q + 1.0)
    for t in range(s):
        base = n + 5 * t
        i = np.minimum((uniforms[:, base] * n).astype(np.int64), n - 1)
        j = np.minimum((uniforms[:, base + 1] * (n - 1)).astype(np.int64), n - 2)
        j = j + (j >= i)
        bi = bits[rows, i]
        bj = bits[rows, j]
        uneq = bi != bj
        to_s = uniforms[:, base + 2] < p_ss
        bits[rows, i] = np.where(uneq, to_s, bi)
        bits[rows, j] = np.where(uneq, to_s, bj)
        if sigma > 0.0:
            bits[rows, i] &= ~(uniforms[:, base + 3] < sigma)
            bits[rows, j] &= ~(uniforms[:, base + 4] < sigma)
    return bits.sum(axis=1).astype(np.int64)
