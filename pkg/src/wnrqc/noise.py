"""Unital single-qudit noise channels, reduced to the two scalars that matter.

For second-moment analysis of noisy random circuits a unital channel enters
only through its average infidelity ``r`` (Haar-averaged state infidelity)
and its unitarity ``u`` (rescaled Haar-averaged output purity).  From these
the identity/swap walk gets its per-noise-location S->I flip probabilities:

    sigma1 = r * q / (q - 1)     (one noisy copy, fidelity-type walk)
    sigma2 = 1 - u               (two noisy copies, purity-type walk)

and the incoherence gap

    delta = 2 r (1 + 1/q) - (1 - u)(1 - 1/q^2),

which is O(eps^2) for incoherent channels such as depolarizing and dephasing
but O(r) for coherent ones such as a rotation.

Channels are represented only by ``(q, r, u)`` plus a constructor tag; Kraus
operator realizations live in :mod:`wnrqc.qoracle`, the only place that needs
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

_CHANNEL_KINDS = ("depolarizing", "dephasing", "rotation", "custom")


@dataclass(frozen=True)
class NoiseDerived:
    """Walk-level parameters derived from (q, r, u)."""

    sigma1: float
    sigma2: float
    delta: float


@dataclass(frozen=True)
class NoiseChannel:
    """A unital single-qudit channel summarized by local dimension q,
    average infidelity r and unitarity u.

    ``kind``/``param`` record which constructor produced the channel (and
    with which strength), so that an exact Kraus realization can be rebuilt
    downstream.  ``kind='custom'`` has no Kraus realization.
    """

    q: int
    r: float
    u: float
    kind: str = "custom"
    param: float = float("nan")

    def __post_init__(self):
        if self.q < 2 or int(self.q) != self.q:
            raise ParameterError(f"local dimension q={self.q} must be an integer >= 2")
        if not 0.0 <= self.r <= 1.0:
            raise ParameterError(f"average infidelity r={self.r} out of [0, 1]")
        if not 0.0 <= self.u <= 1.0:
            raise ParameterError(f"unitarity u={self.u} out of [0, 1]")
        if self.kind not in _CHANNEL_KINDS:
            raise ParameterError(f"unknown channel kind {self.kind!r}")
        # sigma1 is a flip probability; (q, r) combinations that push it
        # past 1 do not define a valid walk and are rejected, not clamped.
        if self.r * self.q / (self.q - 1) > 1.0 + 1e-15:
            raise ParameterError(
                f"r={self.r} gives S->I flip probability {self.r * self.q / (self.q - 1)} > 1"
            )

    @property
    def sigma1(self) -> float:
        """S->I flip probability per noise location in the one-noisy-copy walk."""
        return min(self.r * self.q / (self.q - 1), 1.0)

    @property
    def sigma2(self) -> float:
        """S->I flip probability per noise location in the two-noisy-copy walk."""
        return 1.0 - self.u

    @property
    def delta(self) -> float:
        """Incoherence gap 2r(1+1/q) - (1-u)(1-1/q^2)."""
        q = self.q
        return 2.0 * self.r * (1.0 + 1.0 / q) - (1.0 - self.u) * (1.0 - 1.0 / q**2)

    @property
    def derived(self) -> NoiseDerived:
        return NoiseDerived(sigma1=self.sigma1, sigma2=self.sigma2, delta=self.delta)


def make_depolarizing(q: int, eps: float) -> NoiseChannel:
    """Depolarizing channel: with probability eps a uniformly random
    non-identity generalized Pauli is applied.

    r = eps*q/(q+1),  u = (1 - eps*q^2/(q^2-1))^2.
    Requires eps <= (q^2-1)/q^2 so the reset probability stays <= 1.
    """
    if not 0.0 <= eps <= (q * q - 1.0) / (q * q):
        raise ParameterError(f"depolarizing eps={eps} out of [0, (q^2-1)/q^2]")
    r = eps * q / (q + 1.0)
    gamma = eps * q * q / (q * q - 1.0)
    u = (1.0 - gamma) ** 2
    return NoiseChannel(q=q, r=r, u=u, kind="depolarizing", param=eps)


def make_dephasing(q: int, eps: float) -> NoiseChannel:
    """Dephasing channel: with probability eps*q/(q-1) a computational-basis
    measurement is performed.

    r = eps*q/(q+1),  u = 1 - q^2/(q^2-1) * (2 eps - eps^2 q/(q-1)).
    Requires eps <= (q-1)/q so the measurement probability stays <= 1.
    """
    if not 0.0 <= eps <= (q - 1.0) / q:
        raise ParameterError(f"dephasing eps={eps} out of [0, (q-1)/q]")
    r = eps * q / (q + 1.0)
    u = 1.0 - (q * q / (q * q - 1.0)) * (2.0 * eps - eps * eps * q / (q - 1.0))
    return NoiseChannel(q=q, r=r, u=u, kind="dephasing", param=eps)


def make_rotation(q: int, theta: float) -> NoiseChannel:
    """Coherent rotation channel rho -> e^{-i theta |0><0|} rho e^{+i theta |0><0|}.

    r = 2(q-1)/(q(q+1)) * (1 - cos theta), u = 1 identically (pure states
    stay pure, so there is no decay toward uniform).
    """
    r = 2.0 * (q - 1.0) / (q * (q + 1.0)) * (1.0 - math.cos(theta))
    return NoiseChannel(q=q, r=r, u=1.0, kind="rotation", param=theta)


def make_custom(q: int, r: float, u: float) -> NoiseChannel:
    """Channel with explicitly given (r, u); no Kraus realization."""
    return NoiseChannel(q=q, r=r, u=u, kind="custom")


def channel_from_spec(spec: dict) -> NoiseChannel:
    """Parse a channel from a config mapping.

    Expected shape: {"kind": depolarizing|dephasing|rotation|custom, "q": int,
    and "eps" | "theta" | ("r", "u") according to kind}.
    """
    if not isinstance(spec, dict):
        raise ParameterError(f"channel spec must be a mapping, got {type(spec).__name__}")
    known = {"kind", "q", "eps", "theta", "r", "u"}
    unknown = set(spec) - known
    if unknown:
        raise ParameterError(f"unknown channel spec keys: {sorted(unknown)}")
    kind = spec.get("kind")
    q = spec.get("q")
    if kind not in _CHANNEL_KINDS:
        raise ParameterError(f"channel spec kind={kind!r} not one of {_CHANNEL_KINDS}")
    if q is None:
        raise ParameterError("channel spec missing q")
    if kind == "depolarizing":
        if "eps" not in spec:
            raise ParameterError("depolarizing spec requires eps")
        return make_depolarizing(int(q), float(spec["eps"]))
    if kind == "dephasing":
        if "eps" not in spec:
            raise ParameterError("dephasing spec requires eps")
        return make_dephasing(int(q), float(spec["eps"]))
    if kind == "rotation":
        if "theta" not in spec:
            raise ParameterError("rotation spec requires theta")
        return make_rotation(int(q), float(spec["theta"]))
    if "r" not in spec or "u" not in spec:
        raise ParameterError("custom spec requires r and u")
    return make_custom(int(q), float(spec["r"]), float(spec["u"]))
