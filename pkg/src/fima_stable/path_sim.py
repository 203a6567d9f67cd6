"""Discretized stable noise, stable integrals and linear fractional stable motion.

A :class:`GridSpec` describes uniform cells of width ``dt`` covering
``[t_start - trunc_T, t_end]``. Optionally a far field of geometrically
growing cells extends it ``far_depth`` further to the left; far cells are
integrated with Gauss-Legendre cell averages. Each cell carries one stable
increment with scale ``width**(1/alpha) * sigma``.
"""

from __future__ import annotations

import io
import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .frac_calc import DEFAULT_QUAD, QuadSpec, RLIntegralMinus, _order
from .stable_core import RandomStream, StableLaw, standard_variates

_SNAP = 1e-9


@dataclass(frozen=True)
class GridSpec:
    t_start: float
    t_end: float
    dt: float
    trunc_T: float = 0.0
    far_depth: float = 0.0
    far_ratio: float = 1.1
    far_nodes: int = 3

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError("t_start must be < t_end")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        n = (self.t_end - self.t_start) / self.dt
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise ValueError(f"dt={self.dt} does not divide the window [{self.t_start}, {self.t_end}]")
        if self.trunc_T < 0 or self.far_depth < 0:
            raise ValueError("trunc_T and far_depth must be >= 0")
        if not self.far_ratio > 1.0:
            raise ValueError("far_ratio must exceed 1")
        if self.far_nodes < 1:
            raise ValueError("far_nodes must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))

    @property
    def n_burn(self) -> int:
        return int(math.ceil(self.trunc_T / self.dt - _SNAP))

    @property
    def left_edge(self) -> float:
        return self.t_start - self.n_burn * self.dt

    def uniform_edges(self) -> np.ndarray:
        return self.left_edge + self.dt * np.arange(self.n_burn + self.n_steps + 1)

    def far_edges(self) -> np.ndarray:
        """Ascending edges of the far field, ending at ``left_edge``."""
        if self.far_depth <= 0:
            return np.array([self.left_edge])
        widths = []
        w, total = self.dt, 0.0
        while total < self.far_depth:
            w *= self.far_ratio
            widths.append(w)
            total += w
        edges = self.left_edge - np.concatenate([[0.0], np.cumsum(widths)])
        return edges[::-1]

    def edges(self) -> np.ndarray:
        far = self.far_edges()
        return np.concatenate([far[:-1], self.uniform_edges()])

    @property
    def n_far(self) -> int:
        return self.far_edges().size - 1

    def output_times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_steps + 1)

    def with_far_depth(self, depth: float) -> "GridSpec":
        return GridSpec(self.t_start, self.t_end, self.dt, self.trunc_T, depth, self.far_ratio, self.far_nodes)


@dataclass
class NoisePath:
    """Cell increments of the stable motion; ``increments`` is (cells,) or (replicas, cells)."""

    grid: GridSpec
    increments: np.ndarray
    law: StableLaw
    stream: RandomStream
    edges: np.ndarray = field(repr=False, default=None)
    n_far: int = 0

    def __post_init__(self):
        if self.edges is None:
            self.edges = self.grid.edges()
            self.n_far = self.grid.n_far
        if self.increments.shape[-1] != self.edges.size - 1:
            raise ValueError("one increment per cell required")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def n_cells(self) -> int:
        return self.edges.size - 1

    @property
    def replicas(self) -> int:
        return 1 if self.increments.ndim == 1 else self.increments.shape[0]

    @property
    def cell_scale(self) -> float:
        """Scale of a uniform-cell increment, dt^(1/alpha) * sigma."""
        return self.grid.dt ** (1.0 / self.law.alpha) * self.law.scale

    def replica(self, r: int) -> "NoisePath":
        inc = self.increments if self.increments.ndim == 1 else self.increments[r]
        return NoisePath(self.grid, inc, self.law, self.stream.child(r) if self.increments.ndim > 1 else self.stream,
                         self.edges, self.n_far)


@dataclass
class SamplePath:
    """Values at increasing times; ``values`` is (times,) or (replicas, times)."""

    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape[-1] != self.times.size:
            raise ValueError("times and values must have equal lengths")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


# --------------------------------------------------------------------------
# Noise.

def _cell_noise(widths: np.ndarray, law: StableLaw, stream: RandomStream) -> np.ndarray:
    z = standard_variates(law.alpha, widths.size, stream.generator())
    return law.scale * widths ** (1.0 / law.alpha) * z


def simulate_noise(grid: GridSpec, law: StableLaw, stream: RandomStream) -> NoisePath:
    """One increment per cell, deterministic in ``stream``."""
    edges = grid.edges()
    inc = _cell_noise(np.diff(edges), law, stream)
    return NoisePath(grid, inc, law, stream, edges, grid.n_far)


def noise_on_edges(edges: np.ndarray, law: StableLaw, stream: RandomStream, replicas: int = 1,
                   threads: int = 1) -> np.ndarray:
    """(replicas, cells) increments; row r uses ``stream.child(r)``."""
    widths = np.diff(np.asarray(edges, dtype=float))
    out = np.empty((replicas, widths.size))

    def fill(rows):
        for r in rows:
            out[r] = _cell_noise(widths, law, stream.child(r))

    chunks = [range(a, min(a + 256, replicas)) for a in range(0, replicas, 256)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(fill, chunks))
    else:
        for c in chunks:
            fill(c)
    return out


def simulate_noise_ensemble(grid: GridSpec, law: StableLaw, stream: RandomStream, replicas: int,
                            threads: int = 1) -> NoisePath:
    """Independent replicas; replica r is driven by ``stream.child(r)``."""
    edges = grid.edges()
    inc = noise_on_edges(edges, law, stream, replicas, threads)
    return NoisePath(grid, inc, law, stream, edges, grid.n_far)


def coarsen(noise: NoisePath, factor: int = 2) -> NoisePath:
    """Same noise realization on a grid with ``factor`` times the step.

    Uniform increments are summed in groups of ``factor`` (exactly the law of
    the merged cells); far cells are kept as they are.
    """
    g = noise.grid
    coarse = GridSpec(g.t_start, g.t_end, g.dt * factor, g.trunc_T, g.far_depth, g.far_ratio, g.far_nodes)
    nf = noise.n_far
    uni = noise.edges[nf:]
    if (uni.size - 1) % factor or coarse.n_burn * factor != g.n_burn:
        raise ValueError("grid cannot be coarsened by this factor (window or trunc_T not aligned)")
    inc = noise.increments
    u = inc[..., nf:]
    summed = u.reshape(*u.shape[:-1], -1, factor).sum(axis=-1)
    new_inc = np.concatenate([inc[..., :nf], summed], axis=-1)
    edges = np.concatenate([noise.edges[:nf], uni[::factor]])
    return NoisePath(coarse, new_inc, noise.law, noise.stream, edges, nf)


# --------------------------------------------------------------------------
# Cell weights.

def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def far_nodes(edges: np.ndarray, n_far: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes (n_far, nodes) and unit-sum weights for the far cells."""
    x, w = _gauss_legendre(nodes)
    a = edges[:n_far]
    h = np.diff(edges[:n_far + 1])
    return a[:, None] + h[:, None] * x[None, :], w


def cell_weights(f, noise: NoisePath) -> np.ndarray:
    """Left-point values on uniform cells, Gauss-Legendre averages on far cells.

    The left point is taken as a right limit, f(x_i+), so a step function gets
    the value it has on the cell whatever its convention at the jumps.
    """
    nf = noise.n_far
    w = np.empty(noise.n_cells)
    w[nf:] = np.asarray(f(np.nextafter(noise.edges[nf:-1], np.inf)), dtype=float)
    if nf:
        xs, gw = far_nodes(noise.edges, nf, noise.grid.far_nodes)
        w[:nf] = np.asarray(f(xs.ravel()), dtype=float).reshape(xs.shape) @ gw
    return w


def stable_integral(f, noise: NoisePath):
    """sum_i f(x_i) dL_i; returns a float or one value per replica."""
    w = cell_weights(f, noise)
    out = noise.increments @ w
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# LFSM.

def _lfsm_point(t: float, x: np.ndarray, d: float) -> np.ndarray:
    """(t-x)_+^d - (-x)_+^d without cancellation for x far below both 0 and t."""
    x = np.asarray(x, dtype=float)
    out = np.maximum(t - x, 0.0) ** d - np.maximum(-x, 0.0) ** d
    m = (x < 0.0) & (x < t)
    if np.any(m):
        y = -x[m]
        out[m] = y ** d * np.expm1(d * np.log1p(t / y))
    return out


def lfsm_weights(times: np.ndarray, edges: np.ndarray, n_far: int, d: float, rule: str = "mean",
                 nodes: int = 3) -> np.ndarray:
    """Kernel weights (times, cells) of M_d(t) = sum_i w_i(t) dL_i.

    ``rule="mean"`` averages the kernel over each uniform cell (closed form);
    ``rule="left"`` takes its left-point value. Far cells always use
    Gauss-Legendre averages.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    a, b = edges[n_far:-1], edges[n_far + 1:]
    W = np.empty((times.size, edges.size - 1))
    if rule == "mean":
        P = lambda y: np.maximum(y, 0.0) ** (d + 1.0) / (d + 1.0)  # noqa: E731
        base = (P(-a) - P(-b)) / (b - a)
        for k, t in enumerate(times):
            W[k, n_far:] = (P(t - a) - P(t - b)) / (b - a) - base
    elif rule == "left":
        for k, t in enumerate(times):
            W[k, n_far:] = np.maximum(t - a, 0.0) ** d - np.maximum(-a, 0.0) ** d
    else:
        raise ValueError(f"unknown rule {rule!r}")
    if n_far:
        xs, gw = far_nodes(edges, n_far, nodes)
        for k, t in enumerate(times):
            W[k, :n_far] = _lfsm_point(t, xs.ravel(), d).reshape(xs.shape) @ gw
    W[times == 0.0] = 0.0
    return W / special.gamma(d + 1.0)


def simulate_lfsm(grid: GridSpec, d, noise: NoisePath, times=None, rule: str = "mean") -> SamplePath:
    """M_d at ``times`` (default: the grid's output times) on the given noise.

    M_d(0) is exactly 0 since the kernel vanishes identically there.
    """
    dd = _order(d)
    t = grid.output_times() if times is None else np.asarray(times, dtype=float)
    if t.size and t.min() < noise.edges[noise.n_far] - _SNAP and noise.n_far == 0:
        raise ValueError("noise does not reach the requested times")
    W = lfsm_weights(t, noise.edges, noise.n_far, dd, rule, grid.far_nodes)
    vals = noise.increments @ W.T
    meta = {"process": "lfsm", "d": dd, "rule": rule, "alpha": noise.law.alpha, "dt": grid.dt,
            "master_seed": noise.stream.master_seed, "stream_index": noise.stream.stream_index}
    return SamplePath(t, vals, meta)


def integrate_wrt_lfsm(g, d, noise: NoisePath, q: QuadSpec = DEFAULT_QUAD):
    """int g dM_d computed as the stable integral of I_-^d g."""
    phi = RLIntegralMinus(g, d, q)
    return stable_integral(phi, noise)


def lfsm_kernel_norm(d, alpha: float) -> float:
    """|| [(1-x)_+^d - (-x)_+^d] / Gamma(d+1) ||_alpha (the scale of M_d(1))."""
    from scipy import integrate

    dd = _order(d)
    g1 = special.gamma(dd + 1.0)
    k = lambda x: abs(float(_lfsm_point(1.0, np.array([x]), dd)[0])) / g1  # noqa: E731
    body = integrate.quad(lambda x: k(x) ** alpha, -1.0, 1.0, points=[0.0], epsabs=1e-13, epsrel=1e-11,
                          limit=200)[0]
    span = 1e12
    expo = alpha * (dd - 1.0) + 1.0
    if expo >= 0:
        raise ValueError("d must be < 1 - 1/alpha for a finite LFSM scale")
    tail = integrate.quad(lambda w: k(-math.exp(w)) ** alpha * math.exp(w), 0.0, math.log(span),
                          epsabs=1e-13, epsrel=1e-11, limit=200)[0]
    rest = (dd / g1) ** alpha * span ** expo / (-expo)
    return (body + tail + rest) ** (1.0 / alpha)


def truncation_bound(d, law: StableLaw, trunc_T: float, horizon: float) -> float:
    """Bound on the alpha-norm (times sigma) of the LFSM kernel at time ``horizon``
    restricted to (-inf, -trunc_T]."""
    dd = _order(d)
    a = law.alpha
    if not trunc_T > horizon > 0:
        raise ValueError("need trunc_T > horizon > 0")
    den = a * (1.0 - dd) - 1.0
    if not den > 0:
        raise ValueError(f"d must lie in (0, 1 - 1/alpha) = (0, {1 - 1 / a:.4f})")
    return (law.scale * dd * horizon / special.gamma(dd + 1.0) * den ** (-1.0 / a)
            * trunc_T ** ((a * (dd - 1.0) + 1.0) / a))


def certified_depth(d, law: StableLaw, horizon: float, rel: float = 1e-3) -> float:
    """Smallest depth T with truncation_bound(T) <= rel * scale of M_d(horizon)."""
    dd = _order(d)
    a = law.alpha
    scale = law.scale * horizon ** (dd + 1.0 / a) * lfsm_kernel_norm(dd, a)
    b1 = truncation_bound(dd, law, 2.0 * horizon, horizon) / (2.0 * horizon) ** ((a * (dd - 1.0) + 1.0) / a)
    T = (rel * scale / b1) ** (a / (a * (dd - 1.0) + 1.0))
    return max(T, 2.0 * horizon)


# --------------------------------------------------------------------------
# Path export.

_MAGIC = b"FIMAPATH"


def write_path_csv(path: SamplePath, target) -> None:
    """CSV with header ``t,value`` (one column per replica for ensembles)."""
    vals = np.atleast_2d(path.values)
    cols = ["value"] if vals.shape[0] == 1 else [f"value_{r}" for r in range(vals.shape[0])]
    buf = io.StringIO()
    buf.write(",".join(["t", *cols]) + "\n")
    for k, t in enumerate(path.times):
        buf.write(",".join([repr(float(t)), *(repr(float(v)) for v in vals[:, k])]) + "\n")
    Path(target).write_text(buf.getvalue())


def read_path_csv(source) -> SamplePath:
    data = np.loadtxt(source, delimiter=",", skiprows=1, ndmin=2)
    vals = data[:, 1:].T
    return SamplePath(data[:, 0], vals[0] if vals.shape[0] == 1 else vals)


def write_path_binary(path: SamplePath, target) -> None:
    """Binary frame: magic, uint32 header length, JSON header, then little-endian
    float64 times followed by the value rows."""
    vals = np.atleast_2d(path.values)
    header = json.dumps({"n_times": int(path.times.size), "n_rows": int(vals.shape[0]), "meta": path.meta},
                        sort_keys=True, default=float).encode()
    with open(target, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(path.times.astype("<f8").tobytes())
        fh.write(vals.astype("<f8").tobytes())


def read_path_binary(source) -> SamplePath:
    raw = Path(source).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError("not a path frame")
    (hlen,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12:12 + hlen])
    body = np.frombuffer(raw[12 + hlen:], dtype="<f8")
    n, rows = header["n_times"], header["n_rows"]
    times = body[:n].copy()
    vals = body[n:n + n * rows].reshape(rows, n).copy()
    return SamplePath(times, vals[0] if rows == 1 else vals, header["meta"])
