import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fima_stable.dependence import (DependenceQuery, alpha_increment, asymptotic_C, build_report, dependence_grid,
                                    empirical_r, lemma_bound_gap, lemma_constants, lrd_exponent_fit, lrd_verdict,
                                    phi_psi, r_from_I, theoretical_I, theoretical_K)
from fima_stable.fima import FimaModel
from fima_stable.frac_calc import zero_kernel
from fima_stable.stable_core import RandomStream, StableLaw

# mpmath at 30 digits (scripts/derive_oracles.py)
K_11 = 0.0790572305028716
C_11 = 0.541330525330216
C_1_M05 = -0.580021371870974
I_11 = {50.0: 0.257632525732358, 500.0: 0.157884007533554, 5000.0: 0.0988260391911102}
I_5_1_M05 = -0.47074264677491
PHI_M100_2 = 0.00219599763414615
L_EXP = 1 / math.gamma(0.2)


# ---------------------------------------------------------------- constants

def test_K_reference_and_trivial_values(default_model):
    assert theoretical_K(default_model, 1.0, 1.0) == pytest.approx(K_11, rel=1e-10)
    assert theoretical_K(default_model, 0.0, 0.0) == 1.0
    assert theoretical_K(default_model, 2.0, 1.0) < theoretical_K(default_model, 1.0, 1.0)


@pytest.mark.parametrize("t", sorted(I_11))
def test_I_reference(default_model, t):
    assert theoretical_I(default_model, 1.0, 1.0, t) == pytest.approx(I_11[t], rel=1e-8)


def test_I_reference_with_mixed_signs(default_model):
    assert theoretical_I(default_model, 1.0, -0.5, 5.0) == pytest.approx(I_5_1_M05, rel=1e-8)


def test_C_reference(default_model):
    assert asymptotic_C(default_model, 1.0, 1.0) == pytest.approx(C_11, rel=1e-8)
    assert asymptotic_C(default_model, 1.0, -0.5) == pytest.approx(C_1_M05, rel=1e-8)
    assert asymptotic_C(default_model, 0.0, 1.0) == 0.0
    assert asymptotic_C(default_model, 1.0, 0.0) == 0.0


def test_I_vanishes_for_one_zero_frequency_or_zero_kernel(default_model):
    assert theoretical_I(default_model, 1.0, 0.0, 7.0) == 0.0
    assert theoretical_I(default_model, 0.0, 1.0, 7.0) == 0.0
    z = FimaModel(zero_kernel(), 0.2, StableLaw(1.5))
    assert theoretical_I(z, 1.0, 1.0, 7.0) == 0.0
    assert theoretical_K(z, 1.0, 1.0) == 1.0


def test_I_approaches_its_power_law(default_model):
    C = asymptotic_C(default_model, 1.0, 1.0)
    ratios = [theoretical_I(default_model, 1.0, 1.0, t) / (C * t ** -0.2) for t in (50.0, 5000.0)]
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1)
    assert ratios[1] == pytest.approx(1.0, abs=0.01)


def test_I_decays_at_the_power_law_rate(default_model):
    # With exponent -0.2, I(5000)/I(50) tends to 100^-0.2 = 0.398; a tenfold drop
    # over two decades is not attainable, so the decay is checked at its own rate.
    ratio = theoretical_I(default_model, 1.0, 1.0, 5000.0) / theoretical_I(default_model, 1.0, 1.0, 50.0)
    assert 0.3 < ratio < 0.45
    assert theoretical_I(default_model, 1.0, 1.0, 1e10) < theoretical_I(default_model, 1.0, 1.0, 50.0) / 10


def test_L_for_exponential_kernel(default_model):
    assert default_model.frac_kernel().mass == pytest.approx(L_EXP, rel=1e-12)
    assert L_EXP == pytest.approx(0.21782, abs=1e-5)


# ---------------------------------------------------------------- identity

def test_r_from_I_examples():
    assert r_from_I(1.0, 0.0) == 0.0
    assert r_from_I(0.5, 0.01) == pytest.approx(0.5 * (math.exp(-0.01) - 1), rel=1e-14)
    assert r_from_I(0.5, 0.01) == pytest.approx(-0.004975, abs=1e-6)
    with pytest.raises(ValueError):
        r_from_I(0.0, 0.1)


@given(st.floats(1e-6, 1.0), st.floats(1e-12, 1e-2))
def test_r_is_close_to_minus_K_I(K, I):
    r = r_from_I(K, I)
    assert r < 0
    assert abs(r + K * I) <= K * I * I
    assert abs(r / (-K * I) - 1) <= I


def test_report_rows_satisfy_identity(default_model):
    rep = build_report(default_model, DependenceQuery(1.0, 1.0, (50.0, 200.0, 800.0, 5000.0)))
    for rec in rep.records:
        assert rec.theoretical_r == r_from_I(rep.K, rec.theoretical_I)
    assert rep.fit_source == "theoretical_I"
    assert 0.15 <= rep.theta_hat <= 0.25
    assert rep.lrd_verdict


# ---------------------------------------------------------------- lemmas

@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1.01, 2.0))
def test_increment_inequality(r, s, a):
    gap = lemma_bound_gap(np.array([r]), np.array([s]), a)[0]
    scale = max(abs(r), abs(s), 1e-300) ** a
    assert gap >= -1e-12 * scale


def test_alpha_increment_matches_naive_where_safe():
    for A, B in ((1.0, 0.3), (-2.0, 0.5), (0.1, -3.0), (1.0, -1.0), (1.0, -2.5)):
        naive = abs(A + B) ** 1.5 - abs(A) ** 1.5 - abs(B) ** 1.5
        assert alpha_increment(A, B, 1.5) == pytest.approx(naive, rel=1e-12, abs=1e-15)
    # far from catastrophic: relative accuracy survives B/A = 1e-12
    assert alpha_increment(1.0, 1e-12, 1.5) == pytest.approx(1.5e-12, rel=1e-6)


def test_phi_psi_reference_and_trivial(default_model):
    phi, psi = phi_psi(default_model, -100.0, 2.0)
    assert phi == pytest.approx(PHI_M100_2, rel=1e-9)
    assert psi > 0
    assert phi_psi(default_model, -100.0, 2.0, theta1=0.0)[0] == 0.0
    with pytest.raises(ValueError):
        phi_psi(default_model, 1.0, 2.0)
    with pytest.raises(ValueError):
        phi_psi(default_model, -1.0, 1.0)


GRID_T = (-10.0, -1e2, -1e3, -1e4)
GRID_X = (1.1, 1.5, 2.0, 5.0, 20.0)


def test_phi_psi_bounds_on_grid(default_model):
    K1, K2 = lemma_constants(default_model, 1.0, 1.0)
    d = default_model.d
    for t in GRID_T:
        for x in GRID_X:
            phi, psi = phi_psi(default_model, t, x)
            assert abs(t * phi) <= K1 * (x - 1) ** (d - 1)
            assert abs(t * psi) <= K2 * x ** (d - 1)


def test_phi_psi_limits_on_grid(default_model):
    d, L = default_model.d, L_EXP
    for x in GRID_X:
        res = []
        for t in (-1e2, -1e4):
            phi, psi = phi_psi(default_model, t, x)
            res.append(max(abs(-t * phi - L * (x - 1) ** (d - 1)), abs(-t * psi - L * x ** (d - 1))))
        assert res[1] <= 0.1 * res[0]


# ---------------------------------------------------------------- fit

def test_fit_on_exact_power_laws():
    t = np.geomspace(8, 512, 7)
    th, band = lrd_exponent_fit(t, t ** -0.2)
    assert th == pytest.approx(0.2, abs=1e-12) and band < 1e-10
    th, _ = lrd_exponent_fit(t, 3.7 * t ** -0.26)
    assert th == pytest.approx(0.26, abs=1e-12)
    assert th == pytest.approx(-(1.8 * (0.3 - 1) + 1), abs=1e-12)


def test_fit_errors():
    with pytest.raises(ValueError, match="4 lags"):
        lrd_exponent_fit([1, 10, 100], [1, 1, 1])
    with pytest.raises(ValueError, match="1.5 decades"):
        lrd_exponent_fit([1, 2, 3, 30], [1, 1, 1, 1])
    with pytest.raises(ValueError, match=r"\[10.0, 1000.0\]"):
        lrd_exponent_fit([1, 10, 100, 1000], [1, 0, 1, 0])


def test_verdict():
    assert lrd_verdict(0.2, 0.05)
    assert not lrd_verdict(0.2, 0.3)
    assert not lrd_verdict(1.2, 0.05)
    assert not lrd_verdict(-0.1, 0.05)


def test_query_validation():
    with pytest.raises(ValueError):
        DependenceQuery(1.0, 1.0, (5.0, 2.0))
    with pytest.raises(ValueError):
        DependenceQuery(1.0, 1.0, (0.0, 2.0))
    assert DependenceQuery(0.0, 0.0).degenerate


# ---------------------------------------------------------------- empirical

def _small(model, theta1, theta2, lags=(1.0, 2.0, 4.0, 8.0)):
    q = DependenceQuery(theta1, theta2, lags)
    return q, dependence_grid(model, q)


def test_empirical_degenerate_and_replica_floor(default_model):
    q, g = _small(default_model, 0.0, 0.0)
    e = empirical_r(default_model, q, 1000, g, RandomStream(1))
    assert np.all(e.r == 0)
    with pytest.raises(ValueError, match="1000"):
        empirical_r(default_model, q, 999, g, RandomStream(1))


def test_scrambled_pairing_is_null(default_model):
    q, g = _small(default_model, 1.0, 1.0)
    e = empirical_r(default_model, q, 4000, g, RandomStream(2), pairing="scrambled")
    assert np.all(np.abs(e.r.real) < 3 * e.se_re)


def test_empirical_matches_theory_in_its_orientation(default_model):
    # asymmetric frequencies separate r(th1, th2; t) from r(th2, th1; t)
    q, g = _small(default_model, 1.0, -0.5)
    e = empirical_r(default_model, q, 8000, g, RandomStream(3), threads=2)
    K = theoretical_K(default_model, 1.0, -0.5)
    right = np.array([r_from_I(K, theoretical_I(default_model, -0.5, 1.0, t)) for t in q.t_values])
    wrong = np.array([r_from_I(K, theoretical_I(default_model, 1.0, -0.5, t)) for t in q.t_values])
    assert np.all(np.abs(e.r.real - right) < 3 * e.se_re)
    assert np.all(np.abs(e.r.real - wrong) > 3 * e.se_re)
    assert np.all(np.abs(e.r.imag) < 4 * e.se_im + 1e-3)


def test_report_roundtrip(default_model, tmp_path):
    q, g = _small(default_model, 1.0, 1.0, lags=(1.0, 4.0, 16.0, 64.0))
    e = empirical_r(default_model, q, 2000, g, RandomStream(4))
    rep = build_report(default_model, q, empirical=e)
    assert rep.fit_source == "empirical_r"
    rep.write_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].split(",") == list(rep.CSV_COLUMNS)
    assert len(lines) == 5
    assert float(lines[2].split(",")[1]) == rep.records[1].empirical_re
    rep.write_json(tmp_path / "r.json")
    back = json.loads((tmp_path / "r.json").read_text())
    assert back == json.loads(json.dumps(rep.summary()))
    assert back["schema_version"] == 1 and back["target_theta"] == pytest.approx(0.2)
