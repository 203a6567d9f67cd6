import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from fima_stable.frac_calc import (DEFAULT_QUAD, FracOrder, FractionalKernel, Kernel, QuadratureError, QuadSpec,
                                   RLIntegralMinus, b_alpha_p_norm, bump, exp_kernel, gamma_kernel, indicator,
                                   indicator_kernel, indicator_rl_minus, kernel_corpus, linear_combination,
                                   lp_norm, norm_bound_constants, rl_derivative_minus, rl_integral_minus,
                                   rl_integral_plus, simple_function, truncated_exp_kernel, zero_kernel)
from fima_stable.stable_core import MomentSpec, StableLaw

# Reference values from mpmath at 30 digits (scripts/derive_oracles.py)
F_EXP_AT_1 = 0.490773772622828
F_EXP_AT_10 = 0.0380746076192571
F_EXP_NORM_POWER = 1.26879162602377      # int_0^inf F(u)^1.5 du, d = 0.2
B_NORM_INDICATOR = 2.22797957496753      # ||1_(0,1]||_{1.5,1} at d = 0.2


def kummer_F(u, d):
    """I_+^d exp(-.) at u via the confluent hypergeometric function."""
    return float(mp.mpf(u) ** d / mp.gamma(d + 1) * mp.hyp1f1(1, d + 1, -u))


# ---------------------------------------------------------------- types

def test_frac_order_message():
    with pytest.raises(ValueError, match=r"d must lie in \(0, 1 - 1/alpha\) = \(0, 0.3333\)"):
        FracOrder(0.5, 1.5)
    with pytest.raises(ValueError):
        FracOrder(0.0)
    assert FracOrder(0.2, 1.5).hurst == pytest.approx(0.2 + 1 / 1.5)


def test_quad_spec_validation():
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadSpec(tail_cutoff_policy="ignore")
    with pytest.raises(ValueError):
        QuadSpec(max_subdivisions=0)


def test_kernel_certificate_is_checked():
    with pytest.raises(ValueError, match="decay certificate"):
        Kernel(lambda t: np.exp(-0.5 * t), 1.0, 1.0, "too slow")
    assert exp_kernel(1.0).cutoff(1e-12) == pytest.approx(math.log(1e12))
    assert indicator_kernel(0.0, 1.0).cutoff(1e-12) == 1.0


def test_gamma_kernel_certificate_is_tight():
    g = gamma_kernel(2.0, 1.0)
    t = np.linspace(0, 60, 100001)
    ratio = g(t) / (g.decay_C * np.exp(-g.decay_c * t))
    assert ratio.max() == pytest.approx(1.0, rel=1e-6)


def test_function_constructors():
    f = simple_function([0, 1, 3], [2.0, -1.0])
    np.testing.assert_array_equal(f(np.array([-1, 0, 0.5, 1, 2, 3, 4.0])), [0, 0, 2, 2, -1, -1, 0])
    assert f.scalar_eval()(1.0) == 2.0
    c = linear_combination([1.0, 2.0], [indicator(0, 1), indicator(0.5, 2)])
    assert c(0.75) == 3.0 and c(1.5) == 2.0
    assert bump(0, 1)(0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        simple_function([0, 1], [1, 2])


# ---------------------------------------------------------------- I_-^d

@pytest.mark.parametrize("x", [-50.0, -3.0, -0.5, 0.0, 0.25, 0.999, 1.0, 2.0])
@pytest.mark.parametrize("d", [0.1, 0.2, 0.45])
def test_indicator_closed_form(x, d):
    got = rl_integral_minus(indicator(0.0, 1.0), d, x)
    assert got == pytest.approx(indicator_rl_minus(0.0, 1.0, d, x), rel=1e-11, abs=1e-14)


def test_rl_minus_series_region_is_continuous():
    phi = RLIntegralMinus(indicator(0.0, 1.0), 0.2)
    z = phi.tail.start
    for x in (-z * (1 - 1e-9), -z * (1 + 1e-9), -10 * z):
        assert phi(x) == pytest.approx(indicator_rl_minus(0.0, 1.0, 0.2, x), rel=1e-12)


@given(st.floats(-5, 5), st.floats(0.05, 0.5), st.floats(-3, 3), st.floats(-3, 3))
def test_rl_minus_is_linear(x, d, a, b):
    f1, f2 = indicator(0.0, 1.0), indicator(0.5, 2.0)
    combo = linear_combination([a, b], [f1, f2])
    lhs = rl_integral_minus(combo, d, x)
    rhs = a * indicator_rl_minus(0.0, 1.0, d, x) + b * indicator_rl_minus(0.5, 2.0, d, x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-11)


@given(st.floats(0.05, 0.3), st.floats(0.05, 0.3), st.floats(-4, 0.9))
def test_semigroup_on_indicator(d1, d2, x):
    # the inner integral has cusps at 0 and 1; nested double-precision quadrature
    # cannot resolve them from a point closer than this
    assume(min(abs(x), abs(x - 1.0)) > 1e-6)
    inner = RLIntegralMinus(indicator(0.0, 1.0), d2)
    got = rl_integral_minus(inner, d1, x, QuadSpec(rel_tol=1e-9, abs_tol=1e-11))
    assert got == pytest.approx(indicator_rl_minus(0.0, 1.0, d1 + d2, x), rel=1e-6)


def test_derivative_inverts_integral():
    d = 0.2
    ind = RLIntegralMinus(indicator(0.0, 1.0), d)
    assert rl_derivative_minus(ind, d, 0.5) == pytest.approx(1.0, rel=1e-9)
    assert abs(rl_derivative_minus(ind, d, -0.5)) < 1e-8
    bp = bump(0.0, 2.0)
    val = rl_derivative_minus(RLIntegralMinus(bp, d), d, 0.7)
    assert val == pytest.approx(bp(0.7), rel=1e-6)


def test_derivative_step_underflow_reported():
    with pytest.raises(ValueError, match="step underflow"):
        rl_derivative_minus(indicator(0.0, 1.0), 0.2, 1.0)


# ---------------------------------------------------------------- I_+^d of kernels

@pytest.mark.parametrize("u", [1e-4, 0.01, 0.5, 1.0, 5.0, 10.0, 30.0, 45.0, 100.0, 1e4])
def test_fractional_exp_kernel_matches_kummer(u):
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    assert F(u) == pytest.approx(kummer_F(u, 0.2), rel=1e-9)


def test_fractional_kernel_frozen_values():
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    assert F(1.0) == pytest.approx(F_EXP_AT_1, rel=1e-11)
    assert F(10.0) == pytest.approx(F_EXP_AT_10, rel=1e-11)
    assert F.mass == pytest.approx(1 / math.gamma(0.2), rel=1e-12)
    assert F(0.0) == 0.0 and F(-1.0) == 0.0


def test_rl_integral_plus_matches_object():
    g = gamma_kernel(1.0, 1.0)
    F = FractionalKernel(g, 0.25)
    for u in (0.3, 2.0, 7.0):
        assert rl_integral_plus(g, 0.25, u) == pytest.approx(F(u), rel=1e-10)


def test_truncated_kernel_large_lag_series():
    # int_0^5 e^{-t} (u - t)^{d-1} dt / Gamma(d) by direct quadrature at a large lag
    g = truncated_exp_kernel(1.0, 5.0)
    F = FractionalKernel(g, 0.2)
    u = 60.0
    ref = float(mp.quad(lambda t: mp.exp(-t) * (u - t) ** (-0.8), [0, 5])) / math.gamma(0.2)
    assert u >= F.u_asym
    assert F(u) == pytest.approx(ref, rel=1e-12)


def test_cell_means_match_direct_average():
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    dt = 0.25
    means = F.cell_means(dt, 200)
    for m in (1, 2, 9, 50, 200):
        a, b = (m - 1) * dt, m * dt
        ref = float(mp.quad(lambda u: kummer_F(float(u), 0.2), [a, b])) / dt
        # exact antiderivative differences for m <= 8, Simpson's rule (error ~ dt^4) beyond
        assert means[m - 1] == pytest.approx(ref, rel=1e-12 if m <= 8 else 1e-7)


def test_zero_kernel():
    F = FractionalKernel(zero_kernel(), 0.2)
    assert F.is_zero and F(3.0) == 0.0
    assert np.all(F.cell_means(0.5, 10) == 0.0)


# ---------------------------------------------------------------- norms

def test_lp_norm_indicator():
    assert lp_norm(indicator(0.0, 2.0), 1.5) == pytest.approx(2 ** (2 / 3), rel=1e-12)


def test_lp_norm_of_fractional_kernel():
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    assert lp_norm(F, 1.5) ** 1.5 == pytest.approx(F_EXP_NORM_POWER, rel=1e-9)


def test_lp_norm_divergent_tail_is_reported():
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    with pytest.raises(QuadratureError):
        lp_norm(F, 1.0)


def test_b_alpha_p_norm_reference():
    val = b_alpha_p_norm(indicator(0.0, 1.0), StableLaw(1.5), MomentSpec(1.0), 0.2)
    assert val == pytest.approx(B_NORM_INDICATOR, rel=1e-11)


@pytest.mark.parametrize("alpha,d", [(1.5, 0.2), (1.8, 0.3)])
def test_norm_bound_holds_on_corpus(alpha, d):
    law, spec = StableLaw(alpha), MomentSpec(1.0)
    M, N = norm_bound_constants(None, law, spec, d)
    for g in kernel_corpus():
        lhs = b_alpha_p_norm(g, law, spec, d)
        rhs = M * lp_norm(g, 1.0) + N * lp_norm(g, alpha)
        assert lhs <= rhs


def test_norm_bound_constants_need_admissible_d():
    with pytest.raises(ValueError, match="1 - 1/alpha"):
        norm_bound_constants(None, StableLaw(1.5), MomentSpec(1.0), 0.4)


def test_tail_cutoff_policies_agree():
    g = exp_kernel(1.0)
    a = FractionalKernel(g, 0.2, QuadSpec())
    b = FractionalKernel(g, 0.2, QuadSpec(tail_cutoff_policy="none"))
    for u in (0.5, 5.0, 20.0):
        assert a(u) == pytest.approx(b(u), rel=1e-10)


def test_default_quad_is_shared():
    assert DEFAULT_QUAD == QuadSpec()
