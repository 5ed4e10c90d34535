"""Exact evolution of the full 2^n identity/swap configuration distribution.

State: a probability vector over bitmasks nu in {0,1}^n with bit=1 meaning
the site carries an S (swap) assignment.  Per two-qudit gate on (i, j):
equal assignments are fixed; unequal ones collapse to both-I with
probability q^2/(q^2+1) and both-S with 1/(q^2+1).  After each gate, noise
flips S->I independently at the two gate sites with probability sigma.

The quantity of interest is the q^|nu|-weighted sum of the final
distribution; it is accumulated as the excess sum(P(nu) * (q^|nu| - 1)),
which stays accurate when it is exponentially small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .architectures import CircuitDiagram, sample_pairs
from .errors import CapacityError, ParameterError

DEFAULT_N_CAP = 20


def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every bitmask in [0, 2^n)."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        counts[(np.arange(1 << n) >> b) & 1 == 1] += 1
    return counts


@dataclass
class ConfigVector:
    """Probability distribution over the 2^n configurations."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if self.probs.shape != (1 << self.n,):
            raise ParameterError(
                f"probs has shape {self.probs.shape}, expected ({1 << self.n},)"
            )

    def validate(self, atol: float = 1e-12) -> None:
        if (self.probs < -atol).any():
            raise ParameterError("negative probability entry")
        total = self.probs.sum()
        if abs(total - 1.0) > atol:
            raise ParameterError(f"probabilities sum to {total}, not 1")


def initial_vector(n: int, q: int) -> ConfigVector:
    """Product distribution: each site independently S with prob 1/(q+1)."""
    if n < 1:
        raise ParameterError(f"n={n} must be >= 1")
    w = popcounts(n)
    probs = q ** (n - w).astype(np.float64) / float(q + 1) ** n
    return ConfigVector(n=n, probs=probs)


def apply_gate(v: ConfigVector, pair, q: int) -> ConfigVector:
    i, j = pair
    if i == j or not (0 <= i < v.n and 0 <= j < v.n):
        raise ParameterError(f"bad gate pair {pair!r} for n={v.n}")
    probs = v.probs.copy()
    kernels.walk_run(probs, np.array([i], dtype=np.int32),
                     np.array([j], dtype=np.int32), q, 0.0)
    return ConfigVector(n=v.n, probs=probs)


def apply_noise(v: ConfigVector, site: int, sigma: float) -> ConfigVector:
    """Flip S->I at one site with probability sigma."""
    if not 0.0 <= sigma <= 1.0:
        raise ParameterError(f"sigma={sigma} out of [0, 1]")
    if not 0 <= site < v.n:
        raise ParameterError(f"site {site} out of range for n={v.n}")
    probs = v.probs.copy()
    mask = np.int64(1) << np.int64(site)
    idx = np.arange(1 << v.n, dtype=np.int64)
    g1 = idx[(idx & mask) != 0]
    probs[g1 & ~mask] += sigma * probs[g1]
    probs[g1] *= 1.0 - sigma
    return ConfigVector(n=v.n, probs=probs)


def evaluate(v: ConfigVector, q: int) -> float:
    """The q^|nu|-weighted sum of the distribution."""
    return 1.0 + evaluate_m1(v, q)


def evaluate_m1(v: ConfigVector, q: int) -> float:
    """Excess over 1 of the weighted sum: sum P(nu) (q^|nu| - 1), all terms
    nonnegative, so no cancellation at exponentially small values."""
    w = popcounts(v.n)
    return float(v.probs @ (np.float_power(q, w) - 1.0))


def _check_cap(n: int, n_cap: int) -> None:
    if n > n_cap:
        raise CapacityError(
            f"n={n} exceeds the exact-engine cap {n_cap}; raise n_cap explicitly "
            "or use the Monte Carlo estimator"
        )


def run_zm1(diagram: CircuitDiagram, q: int, sigma: float,
            n_cap: int = DEFAULT_N_CAP) -> float:
    """Evolve the initial product distribution through the diagram (gate +
    two-site noise per gate) and return the weighted excess sum."""
    if not 0.0 <= sigma <= 1.0:
        raise ParameterError(f"sigma={sigma} out of [0, 1]")
    _check_cap(diagram.n, n_cap)
    v = initial_vector(diagram.n, q)
    pairs = diagram.gates
    kernels.walk_run(v.probs, np.ascontiguousarray(pairs[:, 0]),
                     np.ascontiguousarray(pairs[:, 1]), q, sigma)
    return evaluate_m1(v, q)


def run_z(diagram: CircuitDiagram, q: int, sigma: float,
          n_cap: int = DEFAULT_N_CAP) -> float:
    return 1.0 + run_zm1(diagram, q, sigma, n_cap=n_cap)


def run_final_vector(diagram: CircuitDiagram, q: int, sigma: float,
                     n_cap: int = DEFAULT_N_CAP) -> ConfigVector:
    """Full final distribution (for invariant checks and cross-validation)."""
    _check_cap(diagram.n, n_cap)
    v = initial_vector(diagram.n, q)
    pairs = diagram.gates
    kernels.walk_run(v.probs, np.ascontiguousarray(pairs[:, 0]),
                     np.ascontiguousarray(pairs[:, 1]), q, sigma)
    return v


def run_zm1_cg_average(n: int, q: int, sigma: float, s: int,
                       n_diagrams: int, seed, n_cap: int = DEFAULT_N_CAP,
                       batch: int = 4096) -> tuple[float, float]:
    """Average the exact walk over seeded complete-graph diagrams.

    Returns (mean, standard error) of the weighted excess sum across
    n_diagrams independently drawn diagrams.
    """
    _check_cap(n, n_cap)
    if n_diagrams < 2:
        raise ParameterError("need at least 2 diagrams for a standard error")
    init = initial_vector(n, q).probs
    weights_m1 = np.float_power(q, popcounts(n)) - 1.0
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_diagrams:
        m = min(batch, n_diagrams - done)
        i, j = sample_pairs(n, m * s, rng)
        pi = np.ascontiguousarray(i.reshape(m, s), dtype=np.int32)
        pj = np.ascontiguousarray(j.reshape(m, s), dtype=np.int32)
        vals = kernels.walk_zm1_batch(init, weights_m1, pi, pj, q, sigma)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / n_diagrams
    var = max(total_sq / n_diagrams - mean * mean, 0.0) * n_diagrams / (n_diagrams - 1)
    return mean, float(np.sqrt(var / n_diagrams))
