import math

import numpy as np
import pytest

from wnrqc.errors import DegenerateInputError, ParameterError
from wnrqc.metrics import (ZTriple, bounds_from_ztriple,
                           fidelity_decay_check, reequilibration_ztriple,
                           threshold_scan, toy_model_ztriple)
from wnrqc.noise import make_depolarizing


def test_noiseless_bounds():
    zt = ZTriple(z0m1=1.0, z1m1=1.0, z2m1=1.0)
    rep = bounds_from_ztriple(zt)
    assert rep.fbar == 1.0
    assert rep.tvd_wn_bound == 0.0
    assert rep.ratio == 0.0
    assert rep.valid


def test_ztriple_properties():
    zt = ZTriple.from_values(1.9, 1.3, 1.1)
    assert zt.z0m1 == pytest.approx(0.9)
    assert zt.z1 == pytest.approx(1.3)


def test_degenerate_inputs_rejected():
    with pytest.raises(DegenerateInputError):
        bounds_from_ztriple(ZTriple(z0m1=0.0, z1m1=0.5, z2m1=0.5))
    with pytest.raises(DegenerateInputError):
        bounds_from_ztriple(ZTriple(z0m1=1.0, z1m1=-1e-6, z2m1=0.5))


def test_negative_radicand_flagged_not_nan():
    # MC noise can push z2-1 below the consistency floor
    zt = ZTriple(z0m1=1.0, z1m1=0.5, z2m1=0.1, provenance="mc")
    rep = bounds_from_ztriple(zt)
    assert rep.tvd_wn_bound is None and rep.ratio is None
    assert "negative_radicand" in rep.flags
    assert not rep.valid


def test_bound_formula_against_general_quadratic():
    # optimal-F form  ==  (Z2-1) - 2F(Z1-1) + F^2(Z0-1) at F = fbar
    zt = ZTriple(z0m1=0.97, z1m1=0.21, z2m1=0.05)
    rep = bounds_from_ztriple(zt)
    fbar = zt.z1m1 / zt.z0m1
    quad = zt.z2m1 - 2 * fbar * zt.z1m1 + fbar**2 * zt.z0m1
    assert rep.tvd_wn_bound == pytest.approx(0.5 * math.sqrt(quad), rel=1e-12)


def test_fbar_minimizes_quadratic():
    zt = ZTriple(z0m1=0.97, z1m1=0.21, z2m1=0.05)
    fbar = zt.z1m1 / zt.z0m1

    def quad(f):
        return zt.z2m1 - 2 * f * zt.z1m1 + f**2 * zt.z0m1

    for bump in (0.99, 1.01):
        assert quad(fbar * bump) >= quad(fbar)


def test_alternate_f_mode():
    zt = ZTriple(z0m1=0.97, z1m1=0.21, z2m1=0.05)
    rep = bounds_from_ztriple(zt, alternate_f=True)
    assert "alternate_f" in rep.flags
    f_alt = zt.z2m1 / zt.z1m1
    quad = zt.z2m1 - 2 * f_alt * zt.z1m1 + f_alt**2 * zt.z0m1
    assert rep.tvd_wn_bound == pytest.approx(0.5 * math.sqrt(quad), rel=1e-12)


def test_report_serialization():
    rep = bounds_from_ztriple(ZTriple(z0m1=0.9, z1m1=0.3, z2m1=0.11))
    d = rep.to_dict()
    assert set(d) == {"fbar", "tvd_uniform_bound", "tvd_wn_bound", "ratio",
                      "radicand", "valid", "flags"}
    assert "fbar" in rep.to_json()


def test_toy_model_s0_and_eps0():
    zt = toy_model_ztriple(6, 2, 0.05, 0)
    assert zt.z1m1 == pytest.approx((2**6 - 1) / (2**6 + 1), rel=1e-14)
    zt = toy_model_ztriple(6, 2, 0.0, 40)
    assert zt.z1m1 / zt.z0m1 == 1.0  # fbar = 1 without noise


def test_toy_model_matches_reequilibration_engine():
    for n, eps, s in ((4, 0.05, 10), (12, 0.1, 60), (20, 0.003, 100)):
        ch = make_depolarizing(2, eps)
        closed = toy_model_ztriple(n, 2, eps, s)
        engine = reequilibration_ztriple(n, 2, ch, s)
        for a, b in zip((closed.z0m1, closed.z1m1, closed.z2m1),
                        (engine.z0m1, engine.z1m1, engine.z2m1)):
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_toy_model_ratio_closed_form():
    # ratio^2 = (1/4)(q^n-1)/(q^n+1) ((z0m1 z2m1/z1m1^2) - 1) with the exact
    # finite-eps factors; check internal consistency of the report
    zt = toy_model_ztriple(8, 2, 0.02, 30)
    rep = bounds_from_ztriple(zt)
    big_r = zt.z0m1 * zt.z2m1 / zt.z1m1**2
    assert rep.ratio == pytest.approx(0.5 * math.sqrt(zt.z0m1 * (big_r - 1)), rel=1e-12)


def test_toy_model_precondition():
    with pytest.raises(ParameterError):
        toy_model_ztriple(4, 2, 0.76, 5)


def test_fidelity_decay_zero_noise():
    sweep = [(s, toy_model_ztriple(8, 2, 0.0, s)) for s in (10, 20, 40)]
    fit = fidelity_decay_check(sweep, make_depolarizing(2, 0.0))
    assert fit.slope == pytest.approx(0.0, abs=1e-14)


def test_fidelity_decay_toy_model_slope():
    # toy-model fbar decays per gate at 2*ln(1-eps/(1-q^-2n)) ~ -2 eps
    eps = 0.004
    ch = make_depolarizing(2, eps)
    sweep = [(s, toy_model_ztriple(10, 2, eps, s)) for s in range(50, 400, 25)]
    fit = fidelity_decay_check(sweep, ch, min_s=0)
    assert abs(fit.rel_dev) < 0.01


def test_fidelity_decay_needs_points():
    with pytest.raises(ParameterError):
        fidelity_decay_check([(10, toy_model_ztriple(4, 2, 0.01, 10))],
                             make_depolarizing(2, 0.01), min_s=0)


def test_threshold_scan_inconclusive_without_bracket():
    res = threshold_scan(16, 2, lambda e: make_depolarizing(2, e),
                         (200, 1000), bracket=(1e-5, 2e-5))
    assert res.status == "inconclusive"
    assert res.eps_star is None


def test_threshold_scan_small_n_converges():
    n = 16
    s_min = int(10 * n * math.log(n))
    res = threshold_scan(n, 2, lambda e: make_depolarizing(2, e),
                         (s_min, 5 * s_min))
    assert res.status == "converged"
    # 0.3/n heuristic within a loose factor at this small size
    assert 0.1 / n < res.eps_star < 0.6 / n


def test_fbar_in_unit_interval_on_incoherent_grid():
    from wnrqc.cg_chain import run_ztriple_cg
    from wnrqc.noise import make_dephasing

    for n in (4, 8, 12):
        for make, eps_frac in ((make_depolarizing, 0.3), (make_dephasing, 0.3)):
            ch = make(2, eps_frac / n * (1 - 2**-2))  # sigma1 ~ eps_frac/n
            assert ch.sigma1 <= 0.3 / n * 1.01
            for s in (5, 50, 300):
                rep = bounds_from_ztriple(run_ztriple_cg(n, 2, s, ch))
                assert 0.0 < rep.fbar <= 1.0


def test_noiseless_ratio_classified_decaying():
    from wnrqc.metrics import _ratio_slope_top_quartile
    import numpy as np

    slope, _ = _ratio_slope_top_quartile(
        8, 2, make_depolarizing(2, 0.0), np.array([50, 100, 150, 200]))
    assert slope == -math.inf
