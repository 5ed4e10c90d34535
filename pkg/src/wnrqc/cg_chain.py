"""Exact (n+1)-state Hamming-weight chain for the complete-graph architecture.

Uniformly random gate pairs make all configurations of equal Hamming weight
interchangeable, so the 2^n walk reduces exactly to a chain over the number
of S assignments w.  One gate from weight w:

  both sites S,  prob w(w-1)/(n(n-1)):      gate fixes SS, then noise on both
                                            sites: w, w-1, w-2 with probs
                                            (1-sigma)^2, 2 sigma(1-sigma), sigma^2
  sites differ,  prob 2w(n-w)/(n(n-1)):     gate -> both I with q^2/(q^2+1)
                                            (w-1, noise inert), else both S and
                                            noise gives w+1, w, w-1
  both sites I,  prob (n-w)(n-w-1)/(n(n-1)): nothing happens

The transition matrix is banded (w moves by at most -2..+1), so evolution
costs O(n) per gate and thousands-of-gates sweeps at n in the hundreds run
in well under a second.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .metrics import ZTriple
from .noise import NoiseChannel

# Direct q^w accumulation is safe while n ln q stays clear of the double
# exponent range; beyond this the weighted sum switches to log-space.
_LOG_SPACE_THRESHOLD = 600.0


def initial_weight_dist(n: int, q: int) -> np.ndarray:
    """Binomial start: P(w) = C(n, w) q^(n-w) / (q+1)^n, computed in log
    space so it stays finite for n in the hundreds."""
    w = np.arange(n + 1)
    logp = (np.array([math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                      for k in w])
            + (n - w) * math.log(q) - n * math.log(q + 1.0))
    return np.exp(logp)


class _BandedStep:
    """One-gate transition held as four diagonals (target offsets -2..+1)."""

    def __init__(self, n: int, q: int, sigma: float):
        if n < 2:
            raise ParameterError(f"weight chain requires n >= 2, got n={n}")
        if not 0.0 <= sigma <= 1.0:
            raise ParameterError(f"sigma={sigma} out of [0, 1]")
        w = np.arange(n + 1, dtype=np.float64)
        denom = n * (n - 1.0)
        phi_ss = w * (w - 1.0) / denom
        phi_is = 2.0 * w * (n - w) / denom
        phi_ii = (n - w) * (n - w - 1.0) / denom
        p_ss = 1.0 / (q * q + 1.0)
        p_ii = 1.0 - p_ss
        keep2 = (1.0 - sigma) ** 2
        one_flip = 2.0 * sigma * (1.0 - sigma)
        self.n = n
        self.stay = phi_ii + phi_ss * keep2 + phi_is * p_ss * one_flip
        self.down1 = phi_ss * one_flip + phi_is * (p_ii + p_ss * sigma**2)
        self.down2 = phi_ss * sigma**2
        self.up1 = phi_is * p_ss * keep2

    def apply(self, dist: np.ndarray) -> np.ndarray:
        out = self.stay * dist
        out[:-1] += self.down1[1:] * dist[1:]
        out[:-2] += self.down2[2:] * dist[2:]
        out[1:] += self.up1[:-1] * dist[:-1]
        return out

    def dense(self) -> np.ndarray:
        n = self.n
        mat = np.zeros((n + 1, n + 1))
        w = np.arange(n + 1)
        mat[w, w] = self.stay
        mat[w[1:] - 1, w[1:]] = self.down1[1:]
        mat[w[2:] - 2, w[2:]] = self.down2[2:]
        mat[w[:-1] + 1, w[:-1]] = self.up1[:-1]
        return mat


def cg_step_matrix(n: int, q: int, sigma: float,
                   noise: str = "gate_sites") -> np.ndarray:
    """Dense (n+1) x (n+1) column-stochastic one-gate transition matrix;
    entry [w', w] is the probability of moving from weight w to w'.

    noise="gate_sites" (default, used everywhere else in the package)
    applies the flip only to the two qudits the gate touched.
    noise="all_sites" is the alternative convention where every S site
    flips independently after each gate; it is exposed for comparison
    only and is not banded (weight can drop by any amount).
    """
    if noise == "gate_sites":
        return _BandedStep(n, q, sigma).dense()
    if noise != "all_sites":
        raise ParameterError(f"unknown noise convention {noise!r}")
    gate = _BandedStep(n, q, 0.0).dense()
    flips = np.zeros((n + 1, n + 1))
    for w in range(n + 1):
        for k in range(w + 1):
            flips[w - k, w] = (math.comb(w, k) * sigma**k
                               * (1.0 - sigma) ** (w - k))
    return flips @ gate


def weighted_excess(dist: np.ndarray, q: int) -> float:
    """sum_w P(w) (q^w - 1); log-space when q^n would stress the double
    exponent range."""
    n = len(dist) - 1
    w = np.arange(1, n + 1)
    p = dist[1:]
    if n * math.log(q) < _LOG_SPACE_THRESHOLD:
        return float(p @ (np.float_power(float(q), w) - 1.0))
    mask = p > 0.0
    if not mask.any():
        return 0.0
    logs = np.log(p[mask]) + w[mask] * math.log(q) + np.log1p(-np.float_power(float(q), -w[mask]))
    m = logs.max()
    return float(math.exp(m) * np.exp(logs - m).sum())


def evolve_weight_dist(dist: np.ndarray, n: int, q: int, sigma: float,
                       gates: int) -> np.ndarray:
    step = _BandedStep(n, q, sigma)
    for _ in range(gates):
        dist = step.apply(dist)
    return dist


def sweep_cg(n: int, q: int, channel: NoiseChannel, s_list) -> list:
    """(s, ZTriple) at each requested circuit size, single incremental pass.

    Matches pointwise run_ztriple_cg calls exactly: the state between
    checkpoints is reused, and the arithmetic per gate is identical.
    """
    s_list = [int(s) for s in s_list]
    if any(b < a for a, b in zip(s_list, s_list[1:])) or (s_list and s_list[0] < 0):
        raise ParameterError("s_list must be ascending and nonnegative")
    sigmas = (0.0, channel.sigma1, channel.sigma2)
    steps = [_BandedStep(n, q, sig) for sig in sigmas]
    dists = [initial_weight_dist(n, q) for _ in sigmas]
    out = []
    done = 0
    for s in s_list:
        for _ in range(s - done):
            dists = [step.apply(d) for step, d in zip(steps, dists)]
        done = s
        z = [weighted_excess(d, q) for d in dists]
        out.append((s, ZTriple(z0m1=z[0], z1m1=z[1], z2m1=z[2], provenance="exact")))
    return out


def run_ztriple_cg(n: int, q: int, s: int, channel: NoiseChannel) -> ZTriple:
    """Exact diagram-averaged (Z0, Z1, Z2) after s complete-graph gates."""
    if s < 0:
        raise ParameterError(f"s={s} must be >= 0")
    return sweep_cg(n, q, channel, [s])[0][1]
