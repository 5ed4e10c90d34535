"""Approximate rejection sampling from a white-noise sampler plus a
probability oracle.

Given per-outcome estimates p'(x) of the noisy distribution and the known
fidelity F, the signal part is recovered as

    pbar(x) = max(0, (p'(x) - (1-F) q^-n) / F)

and candidates x drawn uniformly are accepted when pbar(x) <= 2k q^-n and a
uniform eta clears the acceptance threshold.  Accepted samples follow pbar
restricted to the capped set W and renormalized, which is close to the
ideal distribution whenever the sampler was close to white noise.

Two acceptance variants with identical output law:
  * default: eta <= F pbar(x) q^n / (2k), i.e. the threshold carries the raw
    signal mass; the acceptance rate is proportional to F, so expected
    rounds scale as 1/F. This surfaces the factor-of-F runtime cost of
    sampling through a fidelity-F device as a measurable round count.
  * normalize_acceptance=True: eta <= pbar(x) q^n / (2k); the 1/F is divided
    out and expected rounds stay at most 4k for any F (the per-query cost
    of a real estimator would then carry the 1/F instead).

The probability oracle models an estimator with bounded relative error:
a fixed error realization is drawn once per oracle (one random string for
all x), exact mode has nu = mu = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class ProbOracle:
    """Evaluator x -> p'(x) with declared relative error bound nu and
    failure probability mu, realized as a frozen value table."""

    values: np.ndarray
    nu: float
    mu: float

    @classmethod
    def exact(cls, p_noisy: np.ndarray) -> "ProbOracle":
        return cls(values=np.asarray(p_noisy, dtype=np.float64), nu=0.0, mu=0.0)

    @classmethod
    def noisy(cls, p_noisy: np.ndarray, nu: float, mu: float, seed) -> "ProbOracle":
        """Inject relative error: within +-2 nu p on all but a mu fraction
        of entries, up to +-10 nu p on the failures."""
        if nu < 0.0 or not 0.0 <= mu <= 1.0:
            raise ParameterError(f"bad oracle error parameters nu={nu} mu={mu}")
        p = np.asarray(p_noisy, dtype=np.float64)
        rng = np.random.default_rng(seed)
        rel = 2.0 * nu * rng.uniform(-1.0, 1.0, size=len(p))
        fail = rng.random(len(p)) < mu
        rel[fail] = 10.0 * nu * rng.uniform(-1.0, 1.0, size=int(fail.sum()))
        return cls(values=p * (1.0 + rel), nu=nu, mu=mu)

    def evaluate(self, x: int) -> float:
        return float(self.values[x])


@dataclass(frozen=True)
class RejectionConfig:
    k: float
    fidelity: float
    max_rounds: int | None = None

    def __post_init__(self):
        if self.k <= 1.0:
            raise ParameterError(f"k={self.k} must exceed 1")
        if not 0.0 < self.fidelity <= 1.0:
            raise ParameterError(f"fidelity={self.fidelity} out of (0, 1]")

    def resolved_max_rounds(self, dim: int) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        return int(math.ceil(4.0 * self.k * math.log(dim) ** 2))


def signal_estimates(oracle: ProbOracle, fidelity: float, dim: int) -> np.ndarray:
    """pbar(x) for all x: the oracle's estimate of the ideal distribution."""
    return np.maximum(0.0, (oracle.values - (1.0 - fidelity) / dim) / fidelity)


@dataclass
class RejectionOutcome:
    x: int
    rounds: int
    fallback: bool  # max_rounds hit, uniform output substituted


def rejection_sample(oracle: ProbOracle, cfg: RejectionConfig, n: int, q: int,
                     rng: np.random.Generator,
                     normalize_acceptance: bool = False) -> RejectionOutcome:
    """One output sample; rounds counts candidate draws including the
    accepted one."""
    dim = q ** n
    pbar = signal_estimates(oracle, cfg.fidelity, dim)
    cap = 2.0 * cfg.k / dim
    scale = 1.0 if normalize_acceptance else cfg.fidelity
    max_rounds = cfg.resolved_max_rounds(dim)
    for rounds in range(1, max_rounds + 1):
        x = int(rng.integers(0, dim))
        eta = rng.random()
        if pbar[x] <= cap and eta <= scale * pbar[x] * dim / (2.0 * cfg.k):
            return RejectionOutcome(x=x, rounds=rounds, fallback=False)
    return RejectionOutcome(x=int(rng.integers(0, dim)), rounds=max_rounds,
                            fallback=True)


def rejection_sample_batch(oracle: ProbOracle, cfg: RejectionConfig, n: int,
                           q: int, count: int, seed,
                           normalize_acceptance: bool = False):
    """count independent output samples, drawn in vectorized waves.

    Returns (xs, rounds, n_fallback).  Each slot's candidate sequence is
    the same round-by-round process as rejection_sample; only the order in
    which randomness is consumed across slots differs.
    """
    dim = q ** n
    pbar = signal_estimates(oracle, cfg.fidelity, dim)
    cap = 2.0 * cfg.k / dim
    scale = 1.0 if normalize_acceptance else cfg.fidelity
    max_rounds = cfg.resolved_max_rounds(dim)
    rng = np.random.default_rng(seed)

    xs = np.empty(count, dtype=np.int64)
    rounds = np.zeros(count, dtype=np.int64)
    pending = np.arange(count)
    wave = 0
    while len(pending) and wave < max_rounds:
        wave += 1
        cands = rng.integers(0, dim, size=len(pending))
        etas = rng.random(len(pending))
        ok = (pbar[cands] <= cap) & (etas <= scale * pbar[cands] * dim / (2.0 * cfg.k))
        rounds[pending] += 1
        xs[pending[ok]] = cands[ok]
        pending = pending[~ok]
    n_fallback = len(pending)
    if n_fallback:
        xs[pending] = rng.integers(0, dim, size=n_fallback)
    return xs, rounds, n_fallback


def conditional_output_distribution(oracle: ProbOracle, cfg: RejectionConfig,
                                    n: int, q: int) -> np.ndarray:
    """The exact law of accepted samples: pbar restricted to the capped set
    and renormalized (fallbacks excluded)."""
    dim = q ** n
    pbar = signal_estimates(oracle, cfg.fidelity, dim)
    out = np.where(pbar <= 2.0 * cfg.k / dim, pbar, 0.0)
    total = out.sum()
    if total <= 0.0:
        raise ParameterError("empty acceptance region")
    return out / total


def tvd_threshold_check(p1: np.ndarray, p2: np.ndarray, threshold: float):
    """Both sides of the tail-mass comparison

        sum p1 1(p1 > T)  <=  4 (1/2)||p1 - p2||_1 + sum p2 1(p2 > T/2)

    returned as (lhs, rhs) so callers can assert lhs <= rhs.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    if p1.shape != p2.shape:
        raise ParameterError("p1 and p2 must have the same shape")
    if not (np.isfinite(p1).all() and np.isfinite(p2).all()):
        raise ParameterError("inputs must be finite")
    lhs = float(p1[p1 > threshold].sum())
    eps = 0.5 * float(np.abs(p1 - p2).sum())
    rhs = 4.0 * eps + float(p2[p2 > threshold / 2.0].sum())
    return lhs, rhs


def white_noise_mixture(p_ideal: np.ndarray, fidelity: float) -> np.ndarray:
    return fidelity * np.asarray(p_ideal, dtype=np.float64) + (1.0 - fidelity) / len(p_ideal)


def reduction_experiment(p_ideal: np.ndarray, n: int, q: int, fidelity: float,
                         k: float, nu: float, mu: float, count: int, seed,
                         normalize_acceptance: bool = False) -> dict:
    """End-to-end demo: build the white-noise distribution for a known
    ideal vector, sample through the reduction, and report acceptance,
    rounds and the measured distance to ideal with its bound terms."""
    dim = q ** n
    if len(p_ideal) != dim:
        raise ParameterError("p_ideal length does not match q^n")
    p_wn = white_noise_mixture(p_ideal, fidelity)
    if nu == 0.0:
        oracle = ProbOracle.exact(p_wn)
    else:
        oracle = ProbOracle.noisy(p_wn, nu, mu, np.random.SeedSequence((seed, 1)))
    cfg = RejectionConfig(k=k, fidelity=fidelity)
    xs, rounds, n_fallback = rejection_sample_batch(
        oracle, cfg, n, q, count, np.random.SeedSequence((seed, 2)),
        normalize_acceptance=normalize_acceptance)
    counts = np.bincount(xs, minlength=dim)
    empirical = counts / counts.sum()
    tvd = 0.5 * float(np.abs(empirical - p_ideal).sum())
    z_prime = dim * float(p_ideal @ p_ideal)
    return {
        "n": n, "q": q, "F": fidelity, "k": k, "nu": nu, "mu": mu,
        "samples": count,
        "accept_rate": count / float(rounds.sum()),
        "mean_rounds": float(rounds.mean()),
        "fallbacks": int(n_fallback),
        "tvd_to_ideal": tvd,
        "bound_terms": {
            "z_prime": z_prime,
            "z_prime_over_k": z_prime / k,
            "nu_term": 5.0 * nu / fidelity,
            "mu": mu,
        },
    }
