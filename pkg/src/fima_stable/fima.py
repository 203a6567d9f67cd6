"""Fractionally integrated moving averages of stable noise.

Y_d(t) = int_{-inf}^t F(t - x) dL(x) with F = I_+^d g, built two ways:
directly from F, or by integrating g against the LFSM increments of the same
noise. Also quadrature evidence of stationarity and the law of large numbers
for partial sums S_n = sum_{j<=n} Y_d(t_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import signal, special

from . import _kernels
from .frac_calc import DEFAULT_QUAD, FracOrder, FractionalKernel, Kernel, QuadSpec, quad, power_tail_integral
from .path_sim import GridSpec, NoisePath, SamplePath, far_nodes, noise_on_edges
from .stable_core import MomentSpec, RandomStream, StableLaw, stable_abs_moment


@dataclass(frozen=True)
class FimaModel:
    kernel: Kernel
    d: float
    law: StableLaw

    def __post_init__(self):
        if not self.law.alpha < 2.0:
            raise ValueError(f"alpha must lie in (1, 2) for a FIMA model, got {self.law.alpha}")
        FracOrder(self.d, self.law.alpha)

    @property
    def alpha(self) -> float:
        return self.law.alpha

    @property
    def order(self) -> FracOrder:
        return FracOrder(self.d, self.law.alpha)

    @property
    def hurst(self) -> float:
        return self.d + 1.0 / self.law.alpha

    @property
    def decay_exponent(self) -> float:
        """alpha(d - 1) + 1, the power of the dependence decay."""
        return self.alpha * (self.d - 1.0) + 1.0

    def frac_kernel(self, q: QuadSpec = DEFAULT_QUAD) -> FractionalKernel:
        return _frac_kernel(self.kernel, self.d, q)


@lru_cache(maxsize=32)
def _frac_kernel(g: Kernel, d: float, q: QuadSpec) -> FractionalKernel:
    return FractionalKernel(g, d, q)


def _conv(inc: np.ndarray, h: np.ndarray, n: int) -> np.ndarray:
    """Causal convolution along the last axis, first ``n`` outputs."""
    if inc.ndim == 1:
        return signal.fftconvolve(inc, h)[:n]
    return signal.fftconvolve(inc, h[None, :], axes=-1)[:, :n]


def _meta(model: FimaModel, grid: GridSpec, noise: NoisePath, **extra) -> dict:
    return {"kernel": model.kernel.description, "d": model.d, "alpha": model.alpha, "sigma": model.law.scale,
            "dt": grid.dt, "trunc_T": grid.trunc_T, "far_depth": grid.far_depth,
            "master_seed": noise.stream.master_seed, "stream_index": noise.stream.stream_index, **extra}


def _check_far(F: FractionalKernel, grid: GridSpec, noise: NoisePath):
    if noise.n_far and grid.trunc_T < F.u_asym - 1e-9:
        raise ValueError(f"trunc_T={grid.trunc_T} too small for a far field: need >= {F.u_asym:.4g}")


def fima_direct(model: FimaModel, grid: GridSpec, noise: NoisePath, q: QuadSpec = DEFAULT_QUAD,
                rule: str = "mean") -> SamplePath:
    """Y_d on the grid's output times as sum_i F(t_k - x_i) dL_i.

    ``rule="mean"`` weights each uniform cell by the mean of F over it,
    ``rule="left"`` by F at the left point. Far cells use Gauss-Legendre means.
    """
    F = model.frac_kernel(q)
    nf = noise.n_far
    n_uni = noise.n_cells - nf
    nb = grid.n_burn
    times = grid.output_times()
    if n_uni != nb + grid.n_steps:
        raise ValueError("noise does not cover the grid window")
    shape = noise.increments.shape[:-1] + (times.size,)
    if F.is_zero:
        return SamplePath(times, np.zeros(shape), _meta(model, grid, noise, method="direct", rule=rule))
    _check_far(F, grid, noise)
    h = np.zeros(n_uni + 1)
    if rule == "mean":
        h[1:] = F.cell_means(grid.dt, n_uni)
    elif rule == "left":
        h[1:] = F.point_values(grid.dt, n_uni)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    y = _conv(noise.increments[..., nf:], h, n_uni + 1)[..., nb:]
    if nf:
        xs, gw = far_nodes(noise.edges, nf, grid.far_nodes)
        Wf = np.empty((times.size, nf))
        for k, t in enumerate(times):
            Wf[k] = F.tail(t - xs) @ gw
        y = y + noise.increments[..., :nf] @ Wf.T
    return SamplePath(times, y, _meta(model, grid, noise, method="direct", rule=rule))


def fima_via_lfsm(model: FimaModel, grid: GridSpec, noise: NoisePath, q: QuadSpec = DEFAULT_QUAD) -> SamplePath:
    """Y_d(t_k) = sum_j g(t_k - s_j - dt/2) dM_j from the LFSM increments of the
    same noise (cell-mean LFSM kernel, midpoint rule in g)."""
    g = model.kernel
    d = model.d
    dt = grid.dt
    F = model.frac_kernel(q)
    nf = noise.n_far
    n_uni = noise.n_cells - nf
    nb = grid.n_burn
    times = grid.output_times()
    shape = noise.increments.shape[:-1] + (times.size,)
    meta = _meta(model, grid, noise, method="via_lfsm")
    if F.is_zero:
        return SamplePath(times, np.zeros(shape), meta)
    _check_far(F, grid, noise)
    Tg = F.T
    mg = int(math.ceil(Tg / dt - 1e-9)) + 1
    if mg > nb:
        raise ValueError(f"trunc_T={grid.trunc_T} must exceed the kernel cutoff {Tg:.4g} by one step")
    gd1 = special.gamma(d + 1.0)
    m = np.arange(n_uni + 2, dtype=float)
    kbar = np.where(m >= 1, dt ** d * (m ** (d + 1.0) - np.maximum(m - 1.0, 0.0) ** (d + 1.0)) / (d + 1.0), 0.0) / gd1
    hM = np.diff(kbar)[:n_uni]
    dM = _conv(noise.increments[..., nf:], hM, n_uni)
    j_lo = nb - mg
    if nf:
        xs, gw = far_nodes(noise.edges, nf, grid.far_nodes)
        s = noise.edges[nf:][j_lo:n_uni]
        Wf = np.empty((s.size, nf))
        for j, sj in enumerate(s):
            y = sj - xs
            Wf[j] = (y ** d * np.expm1(d * np.log1p(dt / y))) @ gw
        dM[..., j_lo:] += noise.increments[..., :nf] @ Wf.T / gd1
    hg = np.zeros(mg + 1)
    hg[1:] = g((np.arange(1, mg + 1) - 0.5) * dt)
    y = _conv(dM, hg, n_uni + 1)[..., nb:]
    return SamplePath(times, y, meta)


def gap_ratio(direct: SamplePath, other: SamplePath) -> np.ndarray:
    """Per replica max_k |direct - other| / max_k |direct|."""
    a = np.atleast_2d(direct.values)
    b = np.atleast_2d(other.values)
    return np.max(np.abs(a - b), axis=-1) / np.max(np.abs(a), axis=-1)


def fima_weights(model: FimaModel, edges: np.ndarray, n_far: int, times, dt: float, nodes: int = 3,
                 q: QuadSpec = DEFAULT_QUAD) -> np.ndarray:
    """Dense weights (times, cells) of Y_d(t) = sum_i w_i(t) dL_i with the cell-mean rule
    on uniform cells of width ``dt`` (aligned with ``times``) and Gauss-Legendre far cells."""
    F = model.frac_kernel(q)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    W = np.zeros((times.size, edges.size - 1))
    if F.is_zero:
        return W
    uni = edges[n_far:]
    means = F.cell_means(dt, uni.size - 1)
    for k, t in enumerate(times):
        m = np.rint((t - uni[:-1]) / dt).astype(np.int64)
        ok = m >= 1
        W[k, n_far:][ok] = means[m[ok] - 1]
    if n_far:
        if (times.min() - uni[0]) < F.u_asym - 1e-9:
            raise ValueError("uniform region too short for a far field")
        xs, gw = far_nodes(edges, n_far, nodes)
        for k, t in enumerate(times):
            W[k, :n_far] = F.tail(t - xs) @ gw
    return W


# --------------------------------------------------------------------------
# Stationarity evidence.

def combo_alpha_norm(model: FimaModel, combos, shift: float = 0.0, q: QuadSpec = DEFAULT_QUAD) -> float:
    """|| sum_i theta_i F(t_i + shift - .) ||_alpha^alpha by quadrature in x."""
    F = model.frac_kernel(q)
    a = model.alpha
    terms = [(float(t) + shift, float(th)) for t, th in combos if th != 0.0]
    if not terms or F.is_zero:
        return 0.0
    ts = np.array([t for t, _ in terms])
    th = np.array([c for _, c in terms])
    fs = F.scalar_eval()
    t_lo, t_hi = ts.min(), ts.max()
    x0 = t_lo - F.u_asym
    pts = set(ts.tolist())
    for t in ts:
        pts.update(t - b for b in F.breakpoints if b > 0)
    integrand = lambda x: abs(sum(c * fs(t - x) for t, c in terms)) ** a  # noqa: E731
    near = quad(integrand, x0, t_hi, q, sorted(pts))

    class _Combo:
        def __init__(self):
            self.d = F.d
            self.leading = float(np.sum(th)) * F.tail.leading
            self.coefs = np.array([self.leading])

        def __call__(self, z):
            return float(sum(c * F.tail(z + (t - t_lo)) for t, c in terms))

    combo = _Combo()
    if combo.leading == 0.0:
        # cancelling leading terms: the tail decays one power faster
        far = quad(lambda w: abs(combo(F.u_asym * math.exp(w))) ** a * F.u_asym * math.exp(w), 0.0,
                   math.log(1e12), q)
    else:
        far = power_tail_integral(combo, a, F.u_asym, q)
    return near + far


@dataclass
class StationarityReport:
    shifts: list
    norms: list
    max_rel_deviation: float

    def as_dict(self) -> dict:
        return {"shifts": self.shifts, "norms": self.norms, "max_rel_deviation": self.max_rel_deviation}


def stationarity_evidence(model: FimaModel, shifts, combos, q: QuadSpec = DEFAULT_QUAD) -> StationarityReport:
    """alpha-norms of sum_i theta_i Y_d(t_i + h) for each shift h and their spread."""
    norms = [combo_alpha_norm(model, combos, float(h), q) for h in shifts]
    ref = max(abs(v) for v in norms) if norms else 0.0
    dev = 0.0 if ref == 0.0 else (max(norms) - min(norms)) / ref
    return StationarityReport([float(h) for h in shifts], norms, dev)


# --------------------------------------------------------------------------
# Law of large numbers.

@dataclass(frozen=True)
class PartialSumPlan:
    """Times t_j (``natural``: j; ``growth``: max(a, K j^beta)) and checkpoints n."""

    rule: str = "natural"
    n_max: int = 4096
    p: float = 0.7
    K: float = 1.0
    beta: float = 1.0
    a: float = 1.0
    checkpoints: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.rule not in ("natural", "growth"):
            raise ValueError("rule must be 'natural' or 'growth'")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not (self.K > 0 and self.beta > 0 and self.a > 0) or not all(
                math.isfinite(v) for v in (self.K, self.beta, self.a)):
            raise ValueError("K, beta and a must be positive and finite")
        if self.checkpoints is not None:
            c = self.checkpoints
            if any(n < 1 or n > self.n_max for n in c) or list(c) != sorted(set(c)):
                raise ValueError("checkpoints must be increasing counts in [1, n_max]")

    def times(self) -> np.ndarray:
        j = np.arange(1, self.n_max + 1, dtype=float)
        if self.rule == "natural":
            return j
        return np.maximum(self.a, self.K * j ** self.beta)

    def counts(self) -> np.ndarray:
        if self.checkpoints is not None:
            return np.array(self.checkpoints, dtype=np.int64)
        return 2 ** np.arange(int(math.log2(self.n_max)) + 1, dtype=np.int64)


def lln_mesh(times: np.ndarray, dt: float, near: float, ratio: float, depth: float) -> np.ndarray:
    """Cell edges on (t_1 - near - depth, t_n]: uniform cells of width ``dt`` within
    ``near`` below every t_j, geometric cells (growth ``ratio``) elsewhere."""

    def graded(length: float) -> list:
        # widths growing from dt, rescaled to fill ``length`` exactly
        ws, total = [], 0.0
        w = dt
        while total < length:
            w *= ratio
            ws.append(w)
            total += w
        return [x * length / total for x in ws]

    tj = np.unique(np.asarray(times, dtype=float))
    pieces = []
    # past: depth below t_1 - near, then uniform up to t_1
    start = tj[0] - near
    past = graded(depth)
    e = [start]
    for w in past:
        e.append(e[-1] - w)
    pieces.append(np.array(e[::-1]))
    prev = start
    for t in tj:
        lo = max(prev, t - near)
        if lo > prev:
            g = graded(lo - prev)
            e = [lo]
            for w in g:
                e.append(e[-1] - w)
            pieces.append(np.array(e[::-1][1:]))
        n = int(round((t - lo) / dt))
        if n >= 1:
            pieces.append(np.linspace(lo, t, n + 1)[1:])
        else:
            pieces.append(np.array([t]))
        prev = t
    edges = np.concatenate(pieces)
    return edges


@dataclass
class LLNResult:
    counts: np.ndarray
    estimate: np.ndarray
    std_error: np.ndarray
    theory: np.ndarray
    meta: dict = field(default_factory=dict)

    def rows(self):
        return list(zip(self.counts.tolist(), self.estimate.tolist(), self.std_error.tolist(), self.theory.tolist()))


def lln_ratio(model: FimaModel, plan: PartialSumPlan, replicas: int, stream: RandomStream,
              dt: float = 0.25, near: float = 4.0, ratio: float = 1.2, depth: float | None = None,
              q: QuadSpec = DEFAULT_QUAD, threads: int = 1) -> LLNResult:
    """Monte Carlo estimates of ||S_n/n||_p = (E|S_n/n|^p)^(1/p) at the plan's counts.

    One noise path per replica (``stream.child(r)``) drives every Y_d(t_j).
    ``theory`` is lambda^(1/p) times the alpha-norm of the discretized kernel
    sum, divided by n: the exact value for the simulated model.
    """
    if replicas < 100:
        raise ValueError("lln_ratio needs at least 100 replicas")
    spec = MomentSpec(plan.p)
    spec.check(model.alpha)
    counts = plan.counts()
    times = plan.times()
    F = model.frac_kernel(q)
    if F.is_zero:
        z = np.zeros(counts.size)
        return LLNResult(counts, z, z.copy(), z.copy(), {"replicas": replicas})
    if depth is None:
        depth = far_depth_for(model, q)
    edges = lln_mesh(times, dt, near, ratio, depth)
    widths = np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    ds, vals = F.lookup_table()
    W = _kernels.lagged_kernel_sums(times, mids, counts, F.d, ds, vals, F.u_asym, F.tail.radius, F.tail.coefs)
    a, p = model.alpha, plan.p
    lam = stable_abs_moment(a, p)
    theory = lam ** (1.0 / p) * model.law.scale * (np.abs(W) ** a @ widths) ** (1.0 / a) / counts
    batch = max(1, int(4_000_000 // widths.size))
    s1 = np.zeros(counts.size)
    s2 = np.zeros(counts.size)
    for b0 in range(0, replicas, batch):
        nb = min(batch, replicas - b0)
        inc = noise_on_edges(edges, model.law, stream.child(b0), nb, threads)
        S = inc @ W.T / counts
        X = np.abs(S) ** p
        s1 += X.sum(axis=0)
        s2 += (X ** 2).sum(axis=0)
    mean = s1 / replicas
    var = np.maximum(s2 / replicas - mean ** 2, 0.0)
    est = mean ** (1.0 / p)
    se = est / (p * mean) * np.sqrt(var / replicas)
    meta = {"replicas": replicas, "cells": int(widths.size), "dt": dt, "near": near, "ratio": ratio,
            "depth": depth, "rule": plan.rule, "p": p}
    return LLNResult(counts, est, se, theory, meta)


def fima_scale(model: FimaModel, q: QuadSpec = DEFAULT_QUAD) -> float:
    """Marginal scale ||I_+^d g||_alpha * sigma of Y_d(t)."""
    from .frac_calc import lp_norm

    return model.law.scale * lp_norm(model.frac_kernel(q), model.alpha, None, q)


def far_depth_for(model: FimaModel, q: QuadSpec = DEFAULT_QUAD, rel: float = 1e-3) -> float:
    """Depth D beyond which the neglected kernel tail is below ``rel`` times the marginal scale.

    Uses the large-lag asymptote F(u) ~ L u^(d-1):
    ||F 1_{u > D}||_alpha ~ |L| (D^(alpha(d-1)+1) / (alpha(1-d)-1))^(1/alpha).
    """
    F = model.frac_kernel(q)
    if F.is_zero:
        return 0.0
    a, d = model.alpha, model.d
    e = a * (d - 1.0) + 1.0
    scale = fima_scale(model, q) / model.law.scale
    L = abs(F.mass) if F.mass != 0.0 else abs(F.tail.coefs[1])
    D = ((rel * scale / L) ** a * (-e)) ** (1.0 / e)
    return max(D, F.u_asym)
