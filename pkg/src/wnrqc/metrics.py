"""Headline quantities derived from the three second-moment values.

With Z0 (two ideal copies), Z1 (one noisy, one ideal) and Z2 (two noisy
copies), the fidelity estimate and distance bounds are

    fbar              = (Z1-1)/(Z0-1)
    tvd to uniform   <= (1/2) sqrt(Z2-1)
    tvd to white     <= (1/2) fbar sqrt((Z0-1)((Z0-1)(Z2-1)/(Z1-1)^2 - 1))

All arithmetic here works with the excess values Z-1 directly; at large
circuit size they are exponentially small and would be destroyed by
computing Z first and subtracting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .coupled_walk import s_destined_weight
from .errors import DegenerateInputError, ParameterError
from .noise import NoiseChannel, make_depolarizing


@dataclass(frozen=True)
class ZTriple:
    """(Z0, Z1, Z2) stored as excesses over 1, with provenance.

    se is the per-component standard error triple for Monte Carlo
    provenance, None for exact engines.
    """

    z0m1: float
    z1m1: float
    z2m1: float
    provenance: str = "exact"
    se: tuple | None = None

    @property
    def z0(self) -> float:
        return 1.0 + self.z0m1

    @property
    def z1(self) -> float:
        return 1.0 + self.z1m1

    @property
    def z2(self) -> float:
        return 1.0 + self.z2m1

    @classmethod
    def from_values(cls, z0: float, z1: float, z2: float,
                    provenance: str = "exact", se=None) -> "ZTriple":
        return cls(z0 - 1.0, z1 - 1.0, z2 - 1.0, provenance=provenance, se=se)


@dataclass
class BoundReport:
    """Fidelity estimate and distance bounds for one (n, channel, s) point."""

    fbar: float
    tvd_uniform_bound: float
    tvd_wn_bound: float | None
    ratio: float | None          # tvd_wn_bound / fbar
    radicand: float
    valid: bool                  # ratio < 1, required for meaningfulness
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "fbar": self.fbar,
            "tvd_uniform_bound": self.tvd_uniform_bound,
            "tvd_wn_bound": self.tvd_wn_bound,
            "ratio": self.ratio,
            "radicand": self.radicand,
            "valid": self.valid,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def bounds_from_ztriple(zt: ZTriple, alternate_f: bool = False) -> BoundReport:
    """Bounds at the optimal F = fbar (default) or the alternate
    F = (Z2-1)/(Z1-1) (exposed, not endorsed; can exceed 1 for coherent
    channels, which the report flags)."""
    if zt.z0m1 <= 0.0 or zt.z1m1 <= 0.0:
        raise DegenerateInputError(
            f"z0-1={zt.z0m1}, z1-1={zt.z1m1}: no collision signal to normalize by"
        )
    fbar = zt.z1m1 / zt.z0m1
    flags: list[str] = []
    tvd_uniform = 0.5 * math.sqrt(max(zt.z2m1, 0.0))
    if zt.z2m1 < 0.0:
        flags.append("negative_z2m1")

    f_used = fbar
    if alternate_f:
        f_used = zt.z2m1 / zt.z1m1
        flags.append("alternate_f")
        if f_used > 1.0:
            flags.append("alternate_f_exceeds_1")

    if alternate_f:
        # General quadratic form (Z2-1) - 2F(Z1-1) + F^2 (Z0-1).
        radicand = zt.z2m1 - 2.0 * f_used * zt.z1m1 + f_used**2 * zt.z0m1
        scale = 1.0
    else:
        # Optimal-F form, kept as z0m1 * (R - 1) with R a pure
        # product/quotient so the cancellation in R - 1 is benign.
        big_r = zt.z0m1 * zt.z2m1 / (zt.z1m1 * zt.z1m1)
        radicand = zt.z0m1 * (big_r - 1.0)
        scale = fbar

    if radicand < 0.0:
        flags.append("negative_radicand")
        tvd_wn = None
        ratio = None
        valid = False
    else:
        tvd_wn = 0.5 * scale * math.sqrt(radicand)
        ratio = tvd_wn / fbar
        valid = ratio < 1.0
    return BoundReport(fbar=fbar, tvd_uniform_bound=tvd_uniform,
                       tvd_wn_bound=tvd_wn, ratio=ratio, radicand=radicand,
                       valid=valid, flags=flags)


# ---------------------------------------------------------------------------
# Toy model: global re-equilibration between single-site noise locations.
# ---------------------------------------------------------------------------

def _limiting_z0m1(n: int, q: int) -> float:
    qinv = float(q) ** (-n)
    return (1.0 - qinv) / (1.0 + qinv)


def toy_model_ztriple(n: int, q: int, eps: float, s: int) -> ZTriple:
    """Closed forms for the re-equilibrating toy circuit with depolarizing
    noise of strength eps: after each of the 2s noise locations the surviving
    all-S mass shrinks by 1 - sigma (1-q^-2)/(1-q^-2n), where sigma is the
    walk flip rate of the corresponding Z-quantity."""
    chan = make_depolarizing(q, eps)
    q2n = float(q) ** (-2 * n)
    for sig in (chan.sigma1, chan.sigma2):
        if not 0.0 <= sig * (1.0 - q ** -2) / (1.0 - q2n) <= 1.0:
            raise ParameterError(f"toy model per-location loss out of [0,1] for sigma={sig}")
    z0m1 = _limiting_z0m1(n, q)

    def zm1(sig: float) -> float:
        retention = 1.0 - sig * (1.0 - q ** -2.0) / (1.0 - q2n)
        return z0m1 * retention ** (2 * s)

    return ZTriple(z0m1=z0m1, z1m1=zm1(chan.sigma1), z2m1=zm1(chan.sigma2),
                   provenance="exact")


def reequilibration_zm1(n: int, q: int, sigma: float, s: int) -> float:
    """Independent engine for the toy circuit: explicitly collapse the
    Hamming-weight distribution onto the two fixed points with the
    absorption weights after every noise location.

    Serves as the oracle for toy_model_ztriple; shares no arithmetic with
    the closed forms beyond the absorption weight itself.
    """
    weights = np.arange(n + 1)
    binom = np.array([math.comb(n, w) for w in range(n + 1)], dtype=np.float64)
    p = binom * np.float_power(float(q), n - weights) / float(q + 1) ** n

    def collapse(dist: np.ndarray) -> tuple[float, float]:
        ls = s_destined_weight(weights, n, q)
        mass_s = float(dist @ ls)
        return float(dist.sum()) - mass_s, mass_s

    a_i, a_s = collapse(p)
    for _ in range(2 * s):
        dist = np.zeros(n + 1)
        dist[0] = a_i
        dist[n] = (1.0 - sigma) * a_s
        dist[n - 1] = sigma * a_s
        a_i, a_s = collapse(dist)
    qn = float(q) ** n
    return a_s * (qn - 1.0)


def reequilibration_ztriple(n: int, q: int, channel: NoiseChannel, s: int) -> ZTriple:
    return ZTriple(z0m1=reequilibration_zm1(n, q, 0.0, s),
                   z1m1=reequilibration_zm1(n, q, channel.sigma1, s),
                   z2m1=reequilibration_zm1(n, q, channel.sigma2, s),
                   provenance="exact")


# ---------------------------------------------------------------------------
# Constant-free lower bounds (checked, never assumed).
# ---------------------------------------------------------------------------

def s_loss_rate_per_layer(n: int, q: int, sigma: float) -> float:
    """Fraction of all-S-destined mass lost per brickwork layer (n noise
    locations) in the layered lower bound."""
    return (1.0 - (1.0 - sigma * (1.0 - q ** -2.0)) ** n) / (1.0 - float(q) ** (-2 * n))


def s_loss_rate_per_gate_cg(n: int, q: int, sigma: float) -> float:
    """Fraction of all-S-destined mass lost per complete-graph gate (two
    noise locations)."""
    return (1.0 - (1.0 - sigma * (1.0 - q ** -2.0)) ** 2) / (1.0 - float(q) ** (-2 * n))


def zm1_lower_bound_cg(n: int, q: int, sigma: float, s: int) -> float:
    return _limiting_z0m1(n, q) * (1.0 - s_loss_rate_per_gate_cg(n, q, sigma)) ** s


def zm1_lower_bound_ring(n: int, q: int, sigma: float, depth: int) -> float:
    return _limiting_z0m1(n, q) * (1.0 - s_loss_rate_per_layer(n, q, sigma)) ** depth


def destined_mass_lower_bound_cg(n: int, q: int, sigma: float, s: int) -> float:
    return (1.0 - s_loss_rate_per_gate_cg(n, q, sigma)) ** s / (float(q) ** n + 1.0)


def destined_mass_lower_bound_ring(n: int, q: int, sigma: float, depth: int) -> float:
    return (1.0 - s_loss_rate_per_layer(n, q, sigma)) ** depth / (float(q) ** n + 1.0)


# ---------------------------------------------------------------------------
# Fidelity decay fit and threshold scan.
# ---------------------------------------------------------------------------

@dataclass
class FidelityDecayFit:
    slope: float        # fitted d ln(fbar) / ds
    target: float       # -2 r (1 + 1/q)
    rel_dev: float      # slope/target - 1
    n_points: int


def fidelity_decay_check(sweep, channel: NoiseChannel, min_s: float = 0.0) -> FidelityDecayFit:
    """Least-squares fit of ln(fbar) against s over a ZTriple sweep.

    min_s excludes the anti-concentration transient (callers typically pass
    3 n ln n).  sweep is an iterable of (s, ZTriple).
    """
    pts = [(s, zt.z1m1 / zt.z0m1) for s, zt in sweep if s >= min_s]
    if len(pts) < 2:
        raise ParameterError("need at least 2 sweep points past min_s for a fit")
    svals = np.array([p[0] for p in pts], dtype=np.float64)
    logf = np.log([p[1] for p in pts])
    slope = float(np.polyfit(svals, logf, 1)[0])
    target = -2.0 * channel.r * (1.0 + 1.0 / channel.q)
    rel = slope / target - 1.0 if target != 0.0 else math.nan
    return FidelityDecayFit(slope=slope, target=target,
                            rel_dev=rel, n_points=len(pts))


@dataclass
class ThresholdResult:
    status: str                      # "converged" | "inconclusive"
    eps_star: float | None
    bracket: tuple
    trace: list = field(default_factory=list)


def _ratio_slope_top_quartile(n, q, channel, s_grid) -> tuple[float, float]:
    """Mean d ln(ratio)/ds over the top quartile of the s grid, from an
    exact complete-graph sweep.  Returns (slope, mean s of the window)."""
    from . import cg_chain  # deferred: cg_chain imports ZTriple from here

    sweep = cg_chain.sweep_cg(n, q, channel, list(s_grid))
    cut = s_grid[0] + 0.75 * (s_grid[-1] - s_grid[0])
    pts = [(s, bounds_from_ztriple(zt).ratio) for s, zt in sweep if s >= cut]
    svals = np.array([p[0] for p in pts], dtype=np.float64)
    ratios = np.array([p[1] for p in pts], dtype=np.float64)
    if (ratios == 0.0).all():
        # exactly zero error (noiseless channel): decaying by definition
        return -math.inf, float(svals.mean())
    if (ratios <= 0.0).any() or np.isnan(ratios).any():
        return math.inf, float(svals.mean())
    return float(np.polyfit(svals, np.log(ratios), 1)[0]), float(svals.mean())


def threshold_scan(n: int, q: int, channel_family, s_range,
                   bracket=None, dead_band: float | None = None,
                   rel_tol: float = 0.02, max_iter: int = 40,
                   grid_points: int = 49) -> ThresholdResult:
    """Bisect the noise strength separating bounded-ratio decay from
    exponential growth of the white-noise error ratio.

    channel_family maps eps -> NoiseChannel.  An eps point classifies as
    "growing" when the mean slope of ln(ratio) over the top quartile of
    s_range exceeds the dead band.  Below threshold the ratio still creeps
    up sub-exponentially as sqrt(s) e^{s delta}, contributing a slope of
    about 1/(2s) + delta, so the default dead band is three times that
    drift; pass an explicit dead_band to override.
    """
    s_min, s_max = s_range
    if s_max <= s_min:
        raise ParameterError("s_range must be increasing")
    s_grid = np.unique(np.linspace(s_min, s_max, grid_points).astype(np.int64))
    if bracket is None:
        bracket = (0.1 / n, 0.9 / n)
    lo, hi = bracket
    trace = []

    def growing(eps: float) -> bool:
        channel = channel_family(eps)
        slope, s_mean = _ratio_slope_top_quartile(n, q, channel, s_grid)
        band = dead_band
        if band is None:
            band = 3.0 * (0.5 / s_mean + max(channel.delta, 0.0))
        trace.append((eps, slope, band))
        return slope > band

    if growing(lo) or not growing(hi):
        return ThresholdResult(status="inconclusive", eps_star=None,
                               bracket=(lo, hi), trace=trace)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= rel_tol * mid:
            break
        if growing(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(status="converged", eps_star=0.5 * (lo + hi),
                           bracket=(lo, hi), trace=trace)
