import os
import subprocess
import sys

import numpy as np
import pytest

from fima_stable import _kernels
from fima_stable.frac_calc import FractionalKernel, exp_kernel

needs_numba = pytest.mark.skipif("numba" not in _kernels.available_backends(), reason="numba not importable")


@pytest.fixture
def both():
    prev = _kernels.get_backend()

    def run(fn, *args):
        out = {}
        for b in _kernels.available_backends():
            _kernels.set_backend(b)
            out[b] = fn(*args)
        return out

    yield run
    _kernels.set_backend(prev)


@needs_numba
@pytest.mark.parametrize("alpha", [1.1, 1.5, 2.0])
def test_cms_parity(both, alpha):
    rng = np.random.default_rng(0)
    u, e = rng.random(10_000), rng.exponential(size=10_000)
    out = both(_kernels.cms_symmetric, u, e, alpha)
    np.testing.assert_allclose(out["numba"], out["numpy"], rtol=1e-12, atol=1e-300)


@needs_numba
def test_ecf_parity(both):
    x = np.random.default_rng(1).standard_cauchy(50_001)
    out = both(_kernels.ecf_sums, x, np.array([0.1, 1.0, 7.0]))
    for k in (0, 1):
        np.testing.assert_allclose(out["numba"][k], out["numpy"][k], rtol=1e-10, atol=1e-8)


@needs_numba
def test_lagged_sum_parity(both):
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    ds, vals = F.lookup_table()
    times = np.arange(1.0, 301.0) ** 1.5
    nodes = np.concatenate([np.linspace(-500, 300, 97), [1.0, 8.0]])
    checkpoints = np.array([1, 10, 100, 300])
    args = (times, nodes, checkpoints, F.d, ds, vals, F.u_asym, F.tail.radius, F.tail.coefs)
    out = both(_kernels.lagged_kernel_sums, *args)
    np.testing.assert_allclose(out["numba"], out["numpy"], rtol=1e-11, atol=1e-14)


def test_lagged_sum_against_direct_evaluation():
    F = FractionalKernel(exp_kernel(1.0), 0.2)
    ds, vals = F.lookup_table()
    times = np.array([1.0, 2.0, 5.0, 80.0])
    nodes = np.array([-3.0, 0.5, 4.0])
    W = _kernels.lagged_kernel_sums(times, nodes, np.array([2, 4]), F.d, ds, vals, F.u_asym, F.tail.radius,
                                    F.tail.coefs)
    ref = np.array([[sum(F(t - x) for t in times[:n]) for x in nodes] for n in (2, 4)])
    np.testing.assert_allclose(W, ref, rtol=1e-6)


def test_lagged_sum_validation():
    z = np.zeros(3)
    for cps in ([], [2, 1], [0], [5]):
        with pytest.raises(ValueError):
            _kernels.lagged_kernel_sums(np.arange(1.0, 4.0), z, np.array(cps, dtype=np.int64), 0.2, 1.0,
                                        np.ones(4), 1.0, 1.0, np.ones(1))


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError, match="unknown or unavailable"):
        _kernels.set_backend("fortran")


def test_backend_selected_from_environment():
    env = dict(os.environ, FIMA_STABLE_BACKEND="numpy")
    code = "from fima_stable import _kernels; print(_kernels.get_backend())"
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "numpy"
