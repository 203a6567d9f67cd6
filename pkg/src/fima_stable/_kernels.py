"""Hot loops with a numba implementation and a pure-numpy fallback.

The backend is chosen once at import from ``FIMA_STABLE_BACKEND``
(``numba`` or ``numpy``; default ``numba`` when it is importable) and can be
switched at runtime with :func:`set_backend`. Both backends produce the same
values up to floating-point reassociation.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_BLOCK = 4096

_backend = "numpy"


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if numba is not None else ("numpy",)


def set_backend(name: str) -> None:
    global _backend
    name = name.strip().lower()
    if name not in available_backends():
        raise ValueError(f"unknown or unavailable backend {name!r}; choose from {available_backends()}")
    _backend = name


def get_backend() -> str:
    return _backend


set_backend(os.environ.get("FIMA_STABLE_BACKEND", "numba" if numba is not None else "numpy"))


# --------------------------------------------------------------------------
# Chambers-Mallows-Stuck transform, symmetric branch, unit scale.

def _cms_numpy(u: np.ndarray, e: np.ndarray, alpha: float) -> np.ndarray:
    v = np.pi * (u - 0.5)
    if alpha == 2.0:
        return 2.0 * np.sin(v) * np.sqrt(e)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / e) ** ((1.0 - alpha) / alpha))


def _cms_loop(u, e, alpha):
    out = np.empty(u.shape[0])
    inv = 1.0 / alpha
    ex = (1.0 - alpha) / alpha
    for i in range(u.shape[0]):
        v = math.pi * (u[i] - 0.5)
        if alpha == 2.0:
            out[i] = 2.0 * math.sin(v) * math.sqrt(e[i])
        else:
            out[i] = (math.sin(alpha * v) / math.cos(v) ** inv
                      * (math.cos((1.0 - alpha) * v) / e[i]) ** ex)
    return out


# --------------------------------------------------------------------------
# Empirical characteristic function: block partial sums of cos / sin.

def _ecf_numpy(x: np.ndarray, thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    re = np.empty(thetas.size)
    im = np.empty(thetas.size)
    for k, th in enumerate(thetas):
        arg = th * x
        re[k] = np.cos(arg).sum()
        im[k] = np.sin(arg).sum()
    return re, im


def _ecf_blocks(x, thetas, block):
    nb = (x.shape[0] + block - 1) // block
    re = np.zeros((thetas.shape[0], nb))
    im = np.zeros((thetas.shape[0], nb))
    for k in range(thetas.shape[0]):
        th = thetas[k]
        for b in range(nb):
            sr = 0.0
            si = 0.0
            for i in range(b * block, min((b + 1) * block, x.shape[0])):
                a = th * x[i]
                sr += math.cos(a)
                si += math.sin(a)
            re[k, b] = sr
            im[k, b] = si
    return re, im


# --------------------------------------------------------------------------
# Lagged kernel sums W_n(x_k) = sum_{j < n} F(t_j - x_k), recorded at n in
# ``checkpoints``. F is evaluated from a table linear in s = u^d below
# ``u_max`` and from its large-lag series u^(d-1) sum_n coefs[n] (radius/u)^n
# above. ``times`` must be nondecreasing.

def _frac_eval_scalar(u, d, ds, vals, u_max, radius, coefs):
    if u <= 0.0:
        return 0.0
    if u < u_max:
        s = u ** d / ds
        i = int(s)
        if i >= vals.shape[0] - 1:
            return vals[vals.shape[0] - 1]
        w = s - i
        return vals[i] * (1.0 - w) + vals[i + 1] * w
    v = radius / u
    total = 0.0
    vn = 1.0
    for n in range(coefs.shape[0]):
        term = coefs[n] * vn
        total += term
        if n > 1 and abs(term) < 1e-17 * abs(total):
            break
        vn *= v
    return total * u ** (d - 1.0)


def _lagged_loop(times, nodes, checkpoints, d, ds, vals, u_max, radius, coefs):
    out = np.zeros((checkpoints.shape[0], nodes.shape[0]))
    n_max = checkpoints[checkpoints.shape[0] - 1]
    for k in range(nodes.shape[0]):
        x = nodes[k]
        acc = 0.0
        c = 0
        j0 = np.searchsorted(times[:n_max], x, side="right")
        while c < checkpoints.shape[0] and checkpoints[c] <= j0:
            c += 1
        for j in range(j0, n_max):
            acc += _frac_eval_core(times[j] - x, d, ds, vals, u_max, radius, coefs)
            while c < checkpoints.shape[0] and checkpoints[c] == j + 1:
                out[c, k] = acc
                c += 1
    return out


def frac_eval_numpy(u: np.ndarray, d: float, ds: float, vals: np.ndarray,
                    u_max: float, radius: float, coefs: np.ndarray) -> np.ndarray:
    """Vectorized counterpart of the scalar table/series evaluator."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    near = (u > 0) & (u < u_max)
    if near.any():
        s = u[near] ** d / ds
        i = np.minimum(s.astype(np.int64), vals.size - 2)
        w = np.clip(s - i, 0.0, 1.0)
        out[near] = vals[i] * (1.0 - w) + vals[i + 1] * w
    far = u >= u_max
    if far.any():
        v = radius / u[far]
        out[far] = np.polynomial.polynomial.polyval(v, coefs) * u[far] ** (d - 1.0)
    return out


def _lagged_numpy(times, nodes, checkpoints, d, ds, vals, u_max, radius, coefs):
    n_max = int(checkpoints[-1])
    t = times[:n_max]
    out = np.empty((checkpoints.size, nodes.size))
    chunk = max(1, 2_000_000 // max(n_max, 1))
    for a in range(0, nodes.size, chunk):
        lags = t[None, :] - nodes[a:a + chunk, None]
        csum = np.cumsum(frac_eval_numpy(lags, d, ds, vals, u_max, radius, coefs), axis=1)
        out[:, a:a + chunk] = csum[:, checkpoints - 1].T
    return out


if numba is not None:
    _cms_jit = numba.njit(cache=True)(_cms_loop)
    _ecf_jit = numba.njit(cache=True)(_ecf_blocks)
    _frac_eval_core = numba.njit(cache=True)(_frac_eval_scalar)
    _lagged_jit = numba.njit(cache=True)(_lagged_loop)
else:  # pragma: no cover
    _frac_eval_core = _frac_eval_scalar


# --------------------------------------------------------------------------
# Public dispatchers.

def cms_symmetric(u: np.ndarray, e: np.ndarray, alpha: float) -> np.ndarray:
    """Unit-scale symmetric stable variates from uniforms ``u`` in (0, 1) and
    unit exponentials ``e``."""
    u = np.ascontiguousarray(u, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    if _backend == "numba":
        return _cms_jit(u, e, float(alpha))
    return _cms_numpy(u, e, float(alpha))


def ecf_sums(x: np.ndarray, thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sums of cos(theta x) and sin(theta x) over ``x`` for each theta."""
    x = np.ascontiguousarray(x, dtype=float).ravel()
    thetas = np.ascontiguousarray(thetas, dtype=float).ravel()
    if _backend == "numba":
        re, im = _ecf_jit(x, thetas, _BLOCK)
        return re.sum(axis=1), im.sum(axis=1)
    return _ecf_numpy(x, thetas)


def lagged_kernel_sums(times: np.ndarray, nodes: np.ndarray, checkpoints: np.ndarray,
                       d: float, ds: float, vals: np.ndarray, u_max: float,
                       radius: float, coefs: np.ndarray) -> np.ndarray:
    """Matrix ``W[c, k] = sum_{j < checkpoints[c]} F(times[j] - nodes[k])``."""
    times = np.ascontiguousarray(times, dtype=float)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    checkpoints = np.ascontiguousarray(checkpoints, dtype=np.int64)
    if checkpoints.size == 0 or np.any(np.diff(checkpoints) < 0) or checkpoints[0] < 1:
        raise ValueError("checkpoints must be a nonempty nondecreasing sequence of counts >= 1")
    if checkpoints[-1] > times.size:
        raise ValueError("checkpoint exceeds the number of times")
    args = (float(d), float(ds), np.ascontiguousarray(vals, dtype=float), float(u_max), float(radius),
            np.ascontiguousarray(coefs, dtype=float))
    if _backend == "numba":
        return _lagged_jit(times, nodes, checkpoints, *args)
    return _lagged_numpy(times, nodes, checkpoints, *args)
