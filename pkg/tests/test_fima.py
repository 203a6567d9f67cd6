import math

import numpy as np
import pytest

from fima_stable.fima import (FimaModel, PartialSumPlan, combo_alpha_norm, far_depth_for, fima_direct, fima_scale,
                              fima_via_lfsm, fima_weights, gap_ratio, lln_mesh, lln_ratio, stationarity_evidence)
from fima_stable.frac_calc import exp_kernel, gamma_kernel, indicator_kernel, zero_kernel
from fima_stable.path_sim import GridSpec, coarsen, simulate_noise_ensemble
from fima_stable.stable_core import RandomStream, StableLaw, empirical_cf

F_EXP_NORM_POWER = 1.26879162602377  # mpmath, scripts/derive_oracles.py


def test_model_validation():
    with pytest.raises(ValueError, match=r"\(0, 0.3333\)"):
        FimaModel(exp_kernel(), 0.5, StableLaw(1.5))
    with pytest.raises(ValueError):
        FimaModel(exp_kernel(), 0.2, StableLaw(2.0))


def test_model_constants(default_model):
    assert default_model.hurst == pytest.approx(0.2 + 2 / 3)
    assert default_model.decay_exponent == pytest.approx(-0.2)
    assert fima_scale(default_model) == pytest.approx(F_EXP_NORM_POWER ** (2 / 3), rel=1e-10)


def _shared_noise(model, window=(0.0, 2.0), dt=2 ** -5, replicas=20, seed=5):
    F = model.frac_kernel()
    grid = GridSpec(window[0], window[1], dt, math.ceil(F.u_asym) + 2, far_depth_for(model))
    return grid, simulate_noise_ensemble(grid, model.law, RandomStream(seed), replicas)


def test_direct_and_lfsm_routes_agree(default_model):
    grid, noise = _shared_noise(default_model)
    a = fima_direct(default_model, grid, noise)
    b = fima_via_lfsm(default_model, grid, noise)
    assert np.median(gap_ratio(a, b)) < 0.01


def test_direct_matches_dense_weights(default_model):
    grid, noise = _shared_noise(default_model, replicas=3)
    a = fima_direct(default_model, grid, noise)
    W = fima_weights(default_model, noise.edges, noise.n_far, grid.output_times(), grid.dt, grid.far_nodes)
    np.testing.assert_allclose(a.values, noise.increments @ W.T, rtol=1e-9, atol=1e-12)


def test_refinement_is_coupled(default_model):
    grid, fine = _shared_noise(default_model, dt=2 ** -6, replicas=10)
    coarse = coarsen(fine, 2)
    gaps = [np.median(gap_ratio(fima_direct(default_model, n.grid, n), fima_via_lfsm(default_model, n.grid, n)))
            for n in (coarse, fine)]
    assert gaps[1] < 0.75 * gaps[0]


def test_marginal_law_of_direct_path(default_model):
    grid, noise = _shared_noise(default_model, window=(0.0, 1.0), dt=0.25, replicas=20_000)
    y = fima_direct(default_model, grid, noise).values[:, -1]
    z = y / fima_scale(default_model)
    assert abs(empirical_cf(z, 1.0) - math.exp(-1.0)) < 4 * math.sqrt(2 / z.size)


def test_zero_kernel_gives_zero_path():
    m = FimaModel(zero_kernel(), 0.2, StableLaw(1.5))
    grid = GridSpec(0.0, 1.0, 0.25, 2.0)
    noise = simulate_noise_ensemble(grid, m.law, RandomStream(1), 2)
    assert np.all(fima_direct(m, grid, noise).values == 0.0)
    assert np.all(fima_via_lfsm(m, grid, noise).values == 0.0)


def test_short_truncation_is_rejected(default_model):
    grid = GridSpec(0.0, 1.0, 0.25, 5.0, 1e6)
    noise = simulate_noise_ensemble(grid, default_model.law, RandomStream(1), 1)
    with pytest.raises(ValueError, match="trunc_T"):
        fima_direct(default_model, grid, noise)


@pytest.mark.parametrize("kernel", [exp_kernel(1.0), gamma_kernel(1.0, 1.0), indicator_kernel(0.0, 1.0)])
def test_stationarity_of_combination_norms(kernel):
    m = FimaModel(kernel, 0.2, StableLaw(1.5))
    rep = stationarity_evidence(m, [0.0, 2.5, 40.0], [(0.0, 1.0), (1.0, -0.5), (3.0, 2.0)])
    assert rep.max_rel_deviation < 1e-8


def test_single_term_norm_is_scale_power(default_model):
    assert combo_alpha_norm(default_model, [(0.0, 2.0)]) == pytest.approx(2 ** 1.5 * F_EXP_NORM_POWER, rel=1e-9)
    assert combo_alpha_norm(default_model, [(0.0, 0.0)]) == 0.0


def test_cancelling_combination_has_finite_norm(default_model):
    # equal and opposite weights: the leading tail cancels
    v = combo_alpha_norm(default_model, [(0.0, 1.0), (1.0, -1.0)])
    assert 0.0 < v < 2 * F_EXP_NORM_POWER


def test_partial_sum_plan():
    p = PartialSumPlan("growth", 16, beta=2.0, checkpoints=(4, 16))
    np.testing.assert_array_equal(p.times()[:4], [1, 4, 9, 16])
    np.testing.assert_array_equal(p.counts(), [4, 16])
    np.testing.assert_array_equal(PartialSumPlan(n_max=8).counts(), [1, 2, 4, 8])
    for bad in ({"rule": "random"}, {"n_max": 0}, {"K": -1.0}, {"checkpoints": (4, 2)}):
        with pytest.raises(ValueError):
            PartialSumPlan(**bad)


def test_lln_mesh_covers_every_time():
    t = np.array([1.0, 2.0, 10.0])
    e = lln_mesh(t, 0.25, 1.0, 1.2, 100.0)
    assert np.all(np.diff(e) > 0)
    for tj in t:
        assert np.any(np.isclose(e, tj))
    assert e[0] <= t[0] - 101.0 + 1e-9


def test_lln_estimate_matches_theory(default_model):
    plan = PartialSumPlan("natural", 64, 0.7, checkpoints=(8, 64))
    res = lln_ratio(default_model, plan, 2000, RandomStream(21))
    assert np.all(np.abs(res.estimate - res.theory) < 4 * res.std_error)
    assert res.estimate[1] < res.estimate[0]


def test_lln_needs_replicas(default_model):
    with pytest.raises(ValueError):
        lln_ratio(default_model, PartialSumPlan(n_max=4), 10, RandomStream(0))
