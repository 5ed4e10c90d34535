"""Coupled noiseless/noisy walk on the accessible pair-state subspace.

Runs two correlated copies of the configuration walk: copy X sees no noise,
copy Y sees the same gate outcomes plus S->I noise flips.  Because noise
only ever turns S into I, a site can be in one of three joint states:

    II (X=I, Y=I),  SS (X=S, Y=S),  SI (X=S, Y=I)

and never IS; the state space is the 3^n accessible subspace, encoded here
base-3 with digit 0=II, 1=SS, 2=SI (site k = digit of 3^k).

The payoff of this bookkeeping is the *S-destined mass*: the probability,
weighted per configuration by the chance that purely noiseless continuation
of the Y copy would reach the all-S fixed point.  A configuration whose Y
copy has Hamming weight w reaches all-S with probability

    (q^(-2n+2w) - q^(-2n)) / (1 - q^(-2n))

which is the absorption probability of the biased walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .architectures import CircuitDiagram
from .errors import CapacityError, ParameterError

DEFAULT_N_CAP = 12

_GATE_FIRST = {1: 0, 2: 0, 3: 2}   # outcome with prob q^2/(q^2+1), keyed by digit sum
_GATE_SECOND = {1: 1, 2: 2, 3: 1}  # outcome with prob 1/(q^2+1)


def s_destined_weight(w, n: int, q: int):
    """Probability that a single-copy configuration of Hamming weight w is
    absorbed at the all-S fixed point under noiseless dynamics."""
    w = np.asarray(w, dtype=np.float64)
    qi = 1.0 / float(q)
    return qi ** (2.0 * (n - w)) * (1.0 - qi ** (2.0 * w)) / (1.0 - qi ** (2.0 * n))


def i_destined_weight(w, n: int, q: int):
    return 1.0 - s_destined_weight(w, n, q)


@dataclass
class CoupledVector:
    """Distribution over the 3^n accessible pair-configurations."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if self.probs.shape != (3 ** self.n,):
            raise ParameterError(
                f"probs has shape {self.probs.shape}, expected ({3 ** self.n},)"
            )

    def validate(self, atol: float = 1e-12) -> None:
        if (self.probs < -atol).any():
            raise ParameterError("negative probability entry")
        total = self.probs.sum()
        if abs(total - 1.0) > atol:
            raise ParameterError(f"probabilities sum to {total}, not 1")


@dataclass
class DestinedMassReport:
    """S-destined mass and its split over agreement-map Hamming weights.

    w_profile[w] accumulates the S-destined weight of configurations whose
    per-site agreement string (S where X and Y agree) has weight w, so the
    entries sum to m_ss.
    """

    t: int
    m_ss: float
    w_profile: np.ndarray
    m_ss_se: float | None = None
    w_profile_se: np.ndarray | None = field(default=None)


def _digits(n: int, site: int) -> np.ndarray:
    idx = np.arange(3 ** n, dtype=np.int64)
    return (idx // 3 ** site) % 3


def initial_coupled_vector(n: int, q: int, n_cap: int = DEFAULT_N_CAP) -> CoupledVector:
    """Both copies start identically: per site II with prob q/(q+1), SS with
    prob 1/(q+1), SI unpopulated."""
    if n > n_cap:
        raise CapacityError(f"n={n} exceeds coupled exact cap {n_cap}")
    site = np.array([q / (q + 1.0), 1.0 / (q + 1.0), 0.0])
    probs = np.array([1.0])
    for _ in range(n):
        probs = np.kron(site, probs)
    return CoupledVector(n=n, probs=probs)


def coupled_step(v: CoupledVector, pair, q: int, sigma: float) -> CoupledVector:
    """One gate on (i, j) for both copies, then Y-only noise at both sites.

    Gate rule per joint site pair (digit a at i, digit b at j):
      a == b                  -> unchanged
      {II, SS} ({0,1})        -> both II w.p. q^2/(q^2+1), both SS otherwise
      {II, SI} ({0,2})        -> both II w.p. q^2/(q^2+1), both SI otherwise
      {SS, SI} ({1,2})        -> both SI w.p. q^2/(q^2+1), both SS otherwise
    then each site's SS digit flips to SI with probability sigma.
    """
    i, j = pair
    n = v.n
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ParameterError(f"bad gate pair {pair!r} for n={n}")
    if not 0.0 <= sigma <= 1.0:
        raise ParameterError(f"sigma={sigma} out of [0, 1]")
    p_ss = 1.0 / (q * q + 1.0)
    p_ii = 1.0 - p_ss
    di = _digits(n, i)
    dj = _digits(n, j)
    probs = v.probs
    out = np.where(di == dj, probs, 0.0)
    idx = np.arange(3 ** n, dtype=np.int64)
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            src = idx[(di == a) & (dj == b)]
            if not len(src):
                continue
            first = _GATE_FIRST[a + b]
            second = _GATE_SECOND[a + b]
            np.add.at(out, src + (first - a) * 3 ** i + (first - b) * 3 ** j,
                      p_ii * probs[src])
            np.add.at(out, src + (second - a) * 3 ** i + (second - b) * 3 ** j,
                      p_ss * probs[src])
    if sigma > 0.0:
        for site, dig in ((i, di), (j, dj)):
            g1 = idx[dig == 1]
            out[g1 + 3 ** site] += sigma * out[g1]
            out[g1] *= 1.0 - sigma
    return CoupledVector(n=n, probs=out)


def coupled_step_cg(v: CoupledVector, q: int, sigma: float) -> CoupledVector:
    """One gate averaged uniformly over all n(n-1)/2 pairs (the exact
    complete-graph diagram average)."""
    n = v.n
    acc = np.zeros_like(v.probs)
    npairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            acc += coupled_step(v, (i, j), q, sigma).probs
            npairs += 1
    return CoupledVector(n=n, probs=acc / npairs)


def y_weights(n: int) -> np.ndarray:
    """Hamming weight of the Y copy (count of SS digits) per basis state."""
    w = np.zeros(3 ** n, dtype=np.int64)
    for k in range(n):
        w += _digits(n, k) == 1
    return w


def _marginal_masks(n: int, noisy_copy: bool) -> np.ndarray:
    """Bitmask of the X copy (S at digits 1 and 2) or Y copy (S at digit 1)
    for every joint basis state."""
    masks = np.zeros(3 ** n, dtype=np.int64)
    for k in range(n):
        d = _digits(n, k)
        s_here = (d == 1) if noisy_copy else (d != 0)
        masks[s_here] |= np.int64(1) << np.int64(k)
    return masks


def x_marginal(v: CoupledVector) -> np.ndarray:
    """2^n distribution of the noiseless copy."""
    return np.bincount(_marginal_masks(v.n, noisy_copy=False), weights=v.probs,
                       minlength=1 << v.n)


def y_marginal(v: CoupledVector) -> np.ndarray:
    """2^n distribution of the noisy copy."""
    return np.bincount(_marginal_masks(v.n, noisy_copy=True), weights=v.probs,
                       minlength=1 << v.n)


def agreement_weights(n: int) -> np.ndarray:
    """Weight of the per-site agreement string: n minus the SI count."""
    w = np.full(3 ** n, n, dtype=np.int64)
    for k in range(n):
        w -= _digits(n, k) == 2
    return w


def destined_mass(v: CoupledVector, q: int, t: int = 0) -> DestinedMassReport:
    n = v.n
    ls = s_destined_weight(y_weights(n), n, q)
    contrib = v.probs * ls
    m_ss = float(contrib.sum())
    profile = np.bincount(agreement_weights(n), weights=contrib, minlength=n + 1)
    return DestinedMassReport(t=t, m_ss=m_ss, w_profile=profile)


def run_coupled(diagram: CircuitDiagram, q: int, sigma: float,
                n_cap: int = DEFAULT_N_CAP, cg_average: bool = False,
                report_every: int = 1):
    """Evolve the coupled walk over a diagram, collecting destined-mass
    reports (t=0 included).  With cg_average=True the diagram only sets the
    number of gates; each step is the exact pair average."""
    v = initial_coupled_vector(diagram.n, q, n_cap=n_cap)
    reports = [destined_mass(v, q, t=0)]
    for t, (i, j) in enumerate(diagram, start=1):
        if cg_average:
            v = coupled_step_cg(v, q, sigma)
        else:
            v = coupled_step(v, (i, j), q, sigma)
        if t % report_every == 0 or t == diagram.s:
            reports.append(destined_mass(v, q, t=t))
    return v, reports


def mc_coupled(diagram: CircuitDiagram, q: int, sigma: float, samples: int,
               seed, resample_pairs: bool = False,
               track_first_flip: bool = False):
    """Trajectory estimates of the destined-mass reports.

    Unbiased for the exact pipeline: each trajectory carries the
    L_S(|Y|) weight of its current configuration.  With
    resample_pairs=True each trajectory draws its own uniform pair per
    gate (complete-graph average).  track_first_flip=True additionally
    returns each trajectory's first noise-flip step (0 if none occurred),
    the tag needed to split mass by the error that redirected it.
    """
    if samples < 2:
        raise ParameterError("need samples >= 2")
    n, s = diagram.n, diagram.s
    rng = np.random.default_rng(seed)
    digits = (rng.random((samples, n)) < 1.0 / (q + 1.0)).astype(np.int8)  # 0=II, 1=SS
    p_ss = 1.0 / (q * q + 1.0)
    rows = np.arange(samples)
    # Indexed by digit sum a+b for unequal digits (sums 1, 2, 3); entries at
    # 0 and 4 are never used (equal digits bypass the lookup).
    first = np.array([0, 0, 0, 2, 0], dtype=np.int8)
    second = np.array([0, 1, 2, 1, 0], dtype=np.int8)

    def report(t):
        wy = (digits == 1).sum(axis=1)
        wa = n - (digits == 2).sum(axis=1)
        ls = s_destined_weight(wy, n, q)
        m = float(ls.mean())
        se = float(ls.std(ddof=1) / np.sqrt(samples))
        prof = np.zeros(n + 1)
        prof_se = np.zeros(n + 1)
        for w in range(n + 1):
            vals = np.where(wa == w, ls, 0.0)
            prof[w] = vals.mean()
            prof_se[w] = vals.std(ddof=1) / np.sqrt(samples)
        return DestinedMassReport(t=t, m_ss=m, w_profile=prof,
                                  m_ss_se=se, w_profile_se=prof_se)

    reports = [report(0)]
    first_flip = np.zeros(samples, dtype=np.int64)
    for t in range(s):
        if resample_pairs:
            i = np.minimum((rng.random(samples) * n).astype(np.int64), n - 1)
            j = np.minimum((rng.random(samples) * (n - 1)).astype(np.int64), n - 2)
            j = j + (j >= i)
        else:
            gi, gj = diagram.gates[t]
            i = np.full(samples, gi, dtype=np.int64)
            j = np.full(samples, gj, dtype=np.int64)
        a = digits[rows, i]
        b = digits[rows, j]
        uneq = a != b
        pick_first = rng.random(samples) < p_ss
        key = (a + b).astype(np.intp)
        outcome = np.where(pick_first, second[key], first[key])
        digits[rows, i] = np.where(uneq, outcome, a)
        digits[rows, j] = np.where(uneq, outcome, b)
        if sigma > 0.0:
            for vec in (i, j):
                hit = (digits[rows, vec] == 1) & (rng.random(samples) < sigma)
                digits[rows[hit], vec[hit]] = 2
                newly = hit & (first_flip == 0)
                first_flip[newly] = t + 1
        reports.append(report(t + 1))
    if track_first_flip:
        return reports, first_flip
    return reports


def dump_destined_mass_csv(reports, path) -> None:
    """Diagnostic CSV: one row per report, columns t, m_ss, w0..wn."""
    nw = len(reports[0].w_profile)
    with open(path, "w", encoding="ascii") as f:
        f.write("# schema: wnrqc.coupled.v1\n")
        f.write("t,m_ss," + ",".join(f"w{k}" for k in range(nw)) + "\n")
        for r in reports:
            cells = [str(r.t), format(r.m_ss, ".17g")]
            cells += [format(x, ".17g") for x in r.w_profile]
            f.write(",".join(cells) + "\n")
