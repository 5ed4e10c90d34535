"""Monte Carlo trajectory estimator for the weighted walk sum.

Estimates E[q^(final Hamming weight)] by sampling trajectories of the
biased walk with noise.  The payoff spans [1, q^n], so the estimator is
heavy-tailed: the all-S survivor mass (~q^-n of trajectories) carries a q^n
payoff.  Standard errors are always reported and a run whose relative error
exceeds a threshold is flagged rather than silently returned.

Reproducibility: trajectories consume a fixed budget of pre-drawn uniforms
per gate, generated batch-by-batch from seeds spawned off the master seed.
Results are therefore independent of batch execution order (parallel
batches merge deterministically) and identical across kernel backends.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .architectures import CircuitDiagram
from .errors import ParameterError
from .metrics import ZTriple
from .noise import NoiseChannel

DEFAULT_BATCH = 8192


@dataclass
class TrajectoryStats:
    samples: int
    mean: float
    se: float
    sum_payoff: float
    sum_payoff_sq: float
    high_variance: bool = False

    @property
    def zm1(self) -> float:
        return self.mean - 1.0


def sample_trajectory(diagram: CircuitDiagram, q: int, sigma: float,
                      rng: np.random.Generator) -> tuple[int, float]:
    """One trajectory, plain and readable; reference path for the kernels.

    Returns (final Hamming weight, payoff q^weight).
    """
    n = diagram.n
    bits = rng.random(n) < 1.0 / (q + 1.0)
    p_ss = 1.0 / (q * q + 1.0)
    for i, j in diagram:
        u_gate, u_i, u_j = rng.random(3)
        if bits[i] != bits[j]:
            bits[i] = bits[j] = u_gate < p_ss
        if bits[i] and u_i < sigma:
            bits[i] = False
        if bits[j] and u_j < sigma:
            bits[j] = False
    w = int(bits.sum())
    return w, float(q) ** w


def _stats_from_weights(weights: np.ndarray, q: int,
                        se_warn_ratio: float) -> TrajectoryStats:
    payoffs = np.float_power(float(q), weights)
    total = float(payoffs.sum())
    total_sq = float((payoffs * payoffs).sum())
    m = len(payoffs)
    mean = total / m
    var = max(total_sq / m - mean * mean, 0.0) * m / (m - 1)
    se = math.sqrt(var / m)
    return TrajectoryStats(samples=m, mean=mean, se=se, sum_payoff=total,
                           sum_payoff_sq=total_sq,
                           high_variance=(se > se_warn_ratio * mean))


def estimate_z(spec, q: int, sigma: float, samples: int, seed,
               batch: int = DEFAULT_BATCH, threads: int = 1,
               se_warn_ratio: float = 0.1) -> TrajectoryStats:
    """Mean and standard error of the payoff over independent trajectories.

    spec is either a CircuitDiagram (fixed gate sequence) or a tuple
    ("complete_graph", n, s), in which case every trajectory draws its own
    uniform pairs, realizing the diagram average.
    """
    if samples < 2:
        raise ParameterError("need samples >= 2")
    if not 0.0 <= sigma <= 1.0:
        raise ParameterError(f"sigma={sigma} out of [0, 1]")
    if isinstance(spec, CircuitDiagram):
        n, s = spec.n, spec.s
        pairs_i = np.ascontiguousarray(spec.gates[:, 0])
        pairs_j = np.ascontiguousarray(spec.gates[:, 1])
        per_row = n + 3 * s
        resample = False
    else:
        kind, n, s = spec
        if kind != "complete_graph":
            raise ParameterError(f"unknown architecture spec {spec!r}")
        per_row = n + 5 * s
        resample = True

    sizes = [batch] * (samples // batch)
    if samples % batch:
        sizes.append(samples % batch)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = root.spawn(len(sizes))

    def run_batch(args) -> np.ndarray:
        size, ss = args
        uniforms = np.random.default_rng(ss).random((size, per_row))
        if resample:
            return kernels.mc_final_weights_resample(n, q, sigma, s, uniforms)
        return kernels.mc_final_weights(n, q, sigma, pairs_i, pairs_j, uniforms)

    jobs = list(zip(sizes, seeds))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run_batch, jobs))
    else:
        chunks = [run_batch(j) for j in jobs]
    return _stats_from_weights(np.concatenate(chunks), q, se_warn_ratio)


def estimate_z_from_all_s(diagram: CircuitDiagram, q: int, sigma: float,
                          samples: int, seed,
                          se_warn_ratio: float = 0.1) -> TrajectoryStats:
    """Diagnostic stratified restart: every trajectory starts at the all-S
    configuration, probing the rare-event tail that drives the estimator
    variance.  Not an unbiased estimator of the full walk sum."""
    if samples < 2:
        raise ParameterError("need samples >= 2")
    n, s = diagram.n, diagram.s
    rng = np.random.default_rng(seed)
    uniforms = rng.random((samples, n + 3 * s))
    uniforms[:, :n] = 0.0  # initial draw forced below 1/(q+1): all sites S
    weights = kernels.mc_final_weights(
        n, q, sigma, np.ascontiguousarray(diagram.gates[:, 0]),
        np.ascontiguousarray(diagram.gates[:, 1]), uniforms)
    return _stats_from_weights(weights, q, se_warn_ratio)


def estimate_ztriple_mc(spec, q: int, channel: NoiseChannel, samples: int,
                        seed, batch: int = DEFAULT_BATCH,
                        threads: int = 1) -> ZTriple:
    """Monte Carlo (Z0, Z1, Z2) with independent streams per component."""
    seeds = np.random.SeedSequence(seed).spawn(3)
    stats = [estimate_z(spec, q, sig, samples, ss, batch=batch, threads=threads)
             for sig, ss in zip((0.0, channel.sigma1, channel.sigma2), seeds)]
    return ZTriple(z0m1=stats[0].zm1, z1m1=stats[1].zm1, z2m1=stats[2].zm1,
                   provenance="mc", se=tuple(st.se for st in stats))
