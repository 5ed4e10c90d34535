import numpy as np
import pytest

from wnrqc.architectures import gen_ring1d
from wnrqc.coupled_walk import (CoupledVector, coupled_step, coupled_step_cg,
                                destined_mass, dump_destined_mass_csv,
                                initial_coupled_vector, mc_coupled,
                                run_coupled, s_destined_weight, x_marginal,
                                y_marginal)
from wnrqc.errors import CapacityError, ParameterError
from wnrqc.metrics import (destined_mass_lower_bound_cg,
                           destined_mass_lower_bound_ring)
from wnrqc.walk_exact import run_final_vector, run_zm1


def test_initial_destined_mass_is_fixed_point_fraction():
    # sum_w C(n,w) q^(n-w)/(q+1)^n * L_S(w) = 1/(q^n + 1)
    for n, q in ((3, 2), (6, 2), (4, 3)):
        rep = destined_mass(initial_coupled_vector(n, q), q)
        assert rep.m_ss == pytest.approx(1 / (q**n + 1), rel=1e-13)
        assert rep.w_profile.sum() == pytest.approx(rep.m_ss, rel=1e-12)
        # the joint start has no disagreement sites, so all mass is at w=n
        assert rep.w_profile[n] == pytest.approx(rep.m_ss, rel=1e-13)


def test_gate_rule_both_copies_unequal():
    # X=(S,I), Y=(S,I) on the pair: jointly to (II,II) w.p. q^2/(q^2+1),
    # (SS,SS) w.p. 1/(q^2+1).  Site digits: (SS at i, II at j) = (1, 0).
    probs = np.zeros(9)
    probs[1 * 1 + 0 * 3] = 1.0  # digit_0 = 1, digit_1 = 0
    v = CoupledVector(n=2, probs=probs)
    out = coupled_step(v, (0, 1), 2, 0.0)
    assert out.probs[0] == pytest.approx(4 / 5)   # (II, II)
    assert out.probs[1 + 3] == pytest.approx(1 / 5)  # (SS, SS)


def test_gate_rule_only_noisy_copy_unequal():
    # sites (SS, SI): X equal at (S,S), Y unequal; Y pair flips.
    probs = np.zeros(9)
    probs[1 + 2 * 3] = 1.0
    v = CoupledVector(n=2, probs=probs)
    out = coupled_step(v, (0, 1), 2, 0.0)
    assert out.probs[2 + 2 * 3] == pytest.approx(4 / 5)  # Y -> II: both SI
    assert out.probs[1 + 1 * 3] == pytest.approx(1 / 5)  # Y -> SS: both SS


def test_noiseless_evolution_stays_on_diagonal():
    # sigma=0 from the correlated start: X = Y forever (no SI digit)
    n, q = 5, 2
    v = initial_coupled_vector(n, q)
    for (i, j) in gen_ring1d(n + 1, 4).gates[:8]:
        if max(i, j) < n:
            v = coupled_step(v, (i, j), q, 0.0)
    digits_si = np.zeros(3**n, dtype=bool)
    idx = np.arange(3**n)
    for k in range(n):
        digits_si |= (idx // 3**k) % 3 == 2
    assert v.probs[digits_si].sum() == 0.0


def test_marginals_match_single_copy_walks():
    n, q, sigma = 6, 2, 0.07
    d = gen_ring1d(n, 5)
    v, _ = run_coupled(d, q, sigma)
    assert np.allclose(x_marginal(v), run_final_vector(d, q, 0.0).probs, atol=1e-14)
    assert np.allclose(y_marginal(v), run_final_vector(d, q, sigma).probs, atol=1e-14)


def test_sigma_zero_m_ss_constant():
    d = gen_ring1d(6, 6)
    _, reports = run_coupled(d, 2, 0.0)
    vals = [r.m_ss for r in reports]
    assert max(abs(v - vals[0]) for v in vals) < 1e-15


def test_decay_lemma_exact():
    # m_ss(t') >= (1-sigma)^{2(t'-t)} m_ss(t) for all t' >= t
    n, q, sigma = 6, 2, 0.08
    _, reports = run_coupled(gen_ring1d(n, 8), q, sigma)
    for t1 in range(len(reports)):
        for t2 in range(t1, len(reports)):
            lhs = reports[t2].m_ss
            rhs = (1 - sigma) ** (2 * (t2 - t1)) * reports[t1].m_ss
            assert lhs >= rhs - 1e-15


def test_z_lower_bound_cross_module():
    # Z_sigma - 1 >= (q^n - 1) m_ss(s) against the exact walk, same diagram
    q = 2
    for n, depth, sigma in ((4, 6, 0.05), (6, 4, 0.03), (6, 8, 0.01)):
        d = gen_ring1d(n, depth)
        _, reports = run_coupled(d, q, sigma)
        zm1 = run_zm1(d, q, sigma)
        assert zm1 >= (q**n - 1) * reports[-1].m_ss - 1e-14


def test_ring_layers_destined_mass_lower_bound():
    q = 2
    for n, depth in ((4, 8), (6, 6)):
        for sigma in (0.1 / n, 0.3 / n):
            _, reports = run_coupled(gen_ring1d(n, depth), q, sigma)
            bound = destined_mass_lower_bound_ring(n, q, sigma, depth)
            assert reports[-1].m_ss >= bound - 1e-15


def test_cg_averaged_destined_mass_lower_bound():
    n, q = 6, 2
    for sigma in (0.1 / n, 0.3 / n):
        v = initial_coupled_vector(n, q)
        for t in range(1, 25):
            v = coupled_step_cg(v, q, sigma)
            m = destined_mass(v, q, t=t).m_ss
            assert m >= destined_mass_lower_bound_cg(n, q, sigma, t) - 1e-15


def test_clustering_profile_monotone_decay():
    # conditioned on being S-destined, mass decays monotonically with the
    # number of disagreement sites (qualitative check; constants are open)
    n, q, sigma = 4, 2, 0.05
    v = initial_coupled_vector(n, q)
    for _ in range(30):
        v = coupled_step_cg(v, q, sigma)
    rep = destined_mass(v, q)
    ratios = rep.w_profile / rep.m_ss
    assert all(ratios[w] >= ratios[w - 1] - 1e-12 for w in range(1, n + 1))


def test_mc_coupled_matches_exact():
    n, q, sigma = 6, 2, 0.05
    d = gen_ring1d(n, 6)
    _, exact = run_coupled(d, q, sigma)
    est = mc_coupled(d, q, sigma, 30000, seed=3)
    for rm, re in zip(est, exact):
        assert abs(rm.m_ss - re.m_ss) < 3.5 * rm.m_ss_se


def test_mc_coupled_seed_determinism():
    d = gen_ring1d(4, 3)
    a = mc_coupled(d, 2, 0.1, 5000, seed=2)
    b = mc_coupled(d, 2, 0.1, 5000, seed=2)
    assert all(x.m_ss == y.m_ss for x, y in zip(a, b))


def test_capacity_and_validation():
    with pytest.raises(CapacityError):
        initial_coupled_vector(13, 2)
    with pytest.raises(ParameterError):
        CoupledVector(n=2, probs=np.zeros(5))
    v = initial_coupled_vector(3, 2)
    with pytest.raises(ParameterError):
        coupled_step(v, (0, 0), 2, 0.1)


def test_csv_dump_schema(tmp_path):
    _, reports = run_coupled(gen_ring1d(4, 2), 2, 0.05)
    path = tmp_path / "coupled.csv"
    dump_destined_mass_csv(reports, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# schema: wnrqc.coupled.v1"
    assert lines[1].split(",")[:2] == ["t", "m_ss"]
    assert len(lines) == 2 + len(reports)


def test_destination_weights_are_absorption_probabilities():
    # recursion oracle: Q(w) = q^2/(q^2+1) Q(w-1) + 1/(q^2+1) Q(w+1) with
    # Q(0)=0, Q(n)=1, solved by brute linear algebra
    n, q = 7, 2
    a = np.zeros((n + 1, n + 1))
    b = np.zeros(n + 1)
    a[0, 0] = 1.0
    a[n, n] = 1.0
    b[n] = 1.0
    for w in range(1, n):
        a[w, w] = 1.0
        a[w, w - 1] = -q**2 / (q**2 + 1)
        a[w, w + 1] = -1 / (q**2 + 1)
    sol = np.linalg.solve(a, b)
    for w in range(n + 1):
        assert s_destined_weight(w, n, q) == pytest.approx(sol[w], abs=1e-12)


def test_mc_first_flip_tagging():
    d = gen_ring1d(4, 4)
    _, flips = mc_coupled(d, 2, 0.0, 500, seed=1, track_first_flip=True)
    assert (flips == 0).all()  # no noise, no redirection
    _, flips = mc_coupled(d, 2, 0.6, 500, seed=1, track_first_flip=True)
    tagged = flips[flips > 0]
    assert len(tagged) > 0 and tagged.min() >= 1 and tagged.max() <= d.s
