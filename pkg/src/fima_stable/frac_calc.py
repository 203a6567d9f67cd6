"""Riemann-Liouville fractional integrals and derivatives, L^p norms and the
stable-integral norm ||g||_{alpha,p} = lambda(alpha,p)^{1/p} ||I_-^d g||_alpha.

Conventions::

    (I_-^d f)(x) = 1/Gamma(d) * int_x^inf  f(t) (t - x)^(d-1) dt
    (I_+^d f)(x) = 1/Gamma(d) * int_-inf^x f(t) (x - t)^(d-1) dt

Integrals adjacent to the power singularity are split: a tiny cell
``[x, x + eps]`` is integrated exactly with ``f`` frozen, the rest of the near
region is mapped through ``s = (t - x)^d`` (which removes the singularity) and
the far region is handed to adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .stable_core import MomentSpec, StableLaw, stable_abs_moment

INF = math.inf
SERIES_TERMS = 96
SERIES_RATIO = 1.5  # series used where |argument| >= SERIES_RATIO * support radius


class QuadratureError(RuntimeError):
    """Adaptive quadrature missed its tolerance; carries the partial value."""

    def __init__(self, message: str, partial: float, tolerance: float):
        super().__init__(f"{message} (partial value {partial:.6g}, tolerance {tolerance:.3g})")
        self.partial = partial
        self.tolerance = tolerance


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature settings.

    ``tail_cutoff_policy``: ``"decay-certificate"`` truncates kernels at
    T = ln(C/abs_tol)/c; ``"none"`` integrates to the end of the support.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_cutoff_policy: str = "decay-certificate"
    singular_cell: float = 1e-9
    near_width: float = 1.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.tail_cutoff_policy not in ("decay-certificate", "none"):
            raise ValueError(f"unknown tail_cutoff_policy {self.tail_cutoff_policy!r}")
        if not (self.singular_cell > 0 and self.near_width > 0):
            raise ValueError("singular_cell and near_width must be positive")


DEFAULT_QUAD = QuadSpec()


@dataclass(frozen=True)
class FracOrder:
    """Fractional order ``d``; with ``alpha_bound`` set it must satisfy d < 1 - 1/alpha."""

    d: float
    alpha_bound: float | None = None

    def __post_init__(self):
        if not (0.0 < self.d < 1.0):
            raise ValueError(f"d must lie in (0, 1), got {self.d}")
        if self.alpha_bound is not None:
            a = self.alpha_bound
            if not (1.0 < a <= 2.0):
                raise ValueError(f"alpha must lie in (1, 2], got {a}")
            if not self.d < 1.0 - 1.0 / a:
                raise ValueError(f"d must lie in (0, 1 - 1/alpha) = (0, {1.0 - 1.0 / a:.4f}), got {self.d}")

    @property
    def hurst(self) -> float:
        if self.alpha_bound is None:
            raise ValueError("hurst index needs alpha_bound")
        return self.d + 1.0 / self.alpha_bound


def _order(d) -> float:
    return d.d if isinstance(d, FracOrder) else FracOrder(float(d)).d


# --------------------------------------------------------------------------
# Functions with known support and breakpoints.

@dataclass(frozen=True)
class Function1D:
    """A vectorized real function with support and breakpoint metadata."""

    func: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float] = (-INF, INF)
    breakpoints: tuple[float, ...] = ()
    label: str = ""
    scalar: Callable[[float], float] | None = field(default=None, compare=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        lo, hi = self.support
        m = (x > lo) & (x <= hi) if math.isfinite(lo) else (x <= hi)
        if np.any(m):
            out[m] = self.func(x[m])
        return float(out) if out.ndim == 0 else out

    def scalar_eval(self) -> Callable[[float], float]:
        if self.scalar is not None:
            return self.scalar
        return lambda t: float(self(t))


def indicator(a: float, b: float) -> Function1D:
    """1 on (a, b], 0 elsewhere."""
    if not a < b:
        raise ValueError("indicator needs a < b")
    return Function1D(lambda t: np.ones_like(t), (a, b), (a, b), f"1_({a},{b}]",
                      lambda t: 1.0 if a < t <= b else 0.0)


def simple_function(edges: Sequence[float], values: Sequence[float]) -> Function1D:
    """Step function sum_i values[i] * 1_(edges[i], edges[i+1]]."""
    e = np.asarray(edges, dtype=float)
    v = np.asarray(values, dtype=float)
    if e.size != v.size + 1 or np.any(np.diff(e) <= 0):
        raise ValueError("need strictly increasing edges, one more than values")

    def f(t):
        i = np.searchsorted(e, t, side="left") - 1
        return v[np.clip(i, 0, v.size - 1)]

    def fs(t):
        if t <= e[0] or t > e[-1]:
            return 0.0
        return float(v[int(np.searchsorted(e, t, side="left")) - 1])

    return Function1D(f, (float(e[0]), float(e[-1])), tuple(float(x) for x in e), "simple", fs)


def bump(a: float, b: float, height: float = 1.0) -> Function1D:
    """Smooth compactly supported bump exp(1 - 1/(1 - z^2)) on (a, b)."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)

    def fs(t):
        z = (t - mid) / half
        return height * math.exp(1.0 - 1.0 / (1.0 - z * z)) if abs(z) < 1.0 else 0.0

    def f(t):
        z = (t - mid) / half
        out = np.zeros_like(t)
        m = np.abs(z) < 1.0
        out[m] = height * np.exp(1.0 - 1.0 / (1.0 - z[m] ** 2))
        return out

    return Function1D(f, (a, b), (), f"bump({a},{b})", fs)


def linear_combination(coefs: Sequence[float], funcs: Sequence) -> Function1D:
    """sum_i coefs[i] * funcs[i] with merged support and breakpoints."""
    coefs = [float(c) for c in coefs]
    sups = [_support(f) for f in funcs]
    lo = min(s[0] for s in sups)
    hi = max(s[1] for s in sups)
    bps = sorted({b for f, s in zip(funcs, sups) for b in (*_breaks(f), *s) if math.isfinite(b)})
    scal = [_scalar(f) for f in funcs]

    def f(t):
        return sum(c * np.asarray(g(t), dtype=float) for c, g in zip(coefs, funcs))

    def fs(t):
        return sum(c * g(t) for c, g in zip(coefs, scal))

    return Function1D(f, (lo, hi), tuple(bps), "combination", fs)


# --------------------------------------------------------------------------
# Short-memory kernels.

@dataclass(frozen=True)
class Kernel:
    """g on [0, inf), zero on negatives, with |g(t)| <= C exp(-c t)."""

    eval: Callable[[np.ndarray], np.ndarray]
    decay_C: float
    decay_c: float
    description: str = ""
    support_end: float = INF
    breakpoints: tuple[float, ...] = ()
    scalar: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.decay_C > 0 and self.decay_c > 0):
            raise ValueError("decay constants C and c must be positive")
        top = min(self.support_end, 60.0 / self.decay_c)
        t = np.linspace(0.0, top, 20001)
        if math.isfinite(self.support_end):
            t = np.union1d(t, [self.support_end])
        g = np.abs(np.asarray(self.eval(t), dtype=float))
        bound = self.decay_C * np.exp(-self.decay_c * t)
        bad = g > bound * (1.0 + 1e-9) + 1e-300
        if np.any(bad):
            raise ValueError(f"kernel {self.description!r} violates its decay certificate at t={t[bad][0]:.6g}")

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, self.support_end)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        m = (t >= 0.0) & (t <= self.support_end)
        if np.any(m):
            out[m] = self.eval(t[m])
        return float(out) if out.ndim == 0 else out

    def scalar_eval(self) -> Callable[[float], float]:
        if self.scalar is not None:
            ev, end = self.scalar, self.support_end
            return lambda t: ev(t) if 0.0 <= t <= end else 0.0
        return lambda t: float(self(t))

    def cutoff(self, abs_tol: float) -> float:
        """Certified truncation point T = ln(C/abs_tol)/c, capped by the support."""
        T = max(0.0, math.log(self.decay_C / abs_tol) / self.decay_c)
        return min(T, self.support_end)

    @property
    def is_zero(self) -> bool:
        return self.description == "zero"


def exp_kernel(c: float = 1.0) -> Kernel:
    return Kernel(lambda t: np.exp(-c * t), 1.0, c, f"exp({c:g})", scalar=lambda t: math.exp(-c * t))


def truncated_exp_kernel(c: float = 1.0, b: float = 5.0) -> Kernel:
    return Kernel(lambda t: np.exp(-c * t), 1.0, c, f"truncexp({c:g},{b:g})", support_end=b,
                  breakpoints=(b,), scalar=lambda t: math.exp(-c * t))


def gamma_kernel(k: float = 1.0, c: float = 1.0) -> Kernel:
    """t^k e^{-ct}; certificate C = (2k/(c e))^k with rate c/2."""
    if k <= 0:
        raise ValueError("gamma kernel needs k > 0")
    C = (2.0 * k / (c * math.e)) ** k
    return Kernel(lambda t: t ** k * np.exp(-c * t), C, c / 2.0, f"gamma({k:g},{c:g})",
                  scalar=lambda t: t ** k * math.exp(-c * t))


def indicator_kernel(a: float = 0.0, b: float = 1.0) -> Kernel:
    """1_(a, b] with 0 <= a < b; certificate C = e^b, c = 1."""
    if not (0.0 <= a < b):
        raise ValueError("indicator kernel needs 0 <= a < b")
    return Kernel(lambda t: ((t > a) & (t <= b)).astype(float), math.exp(b), 1.0,
                  f"indicator({a:g},{b:g})", support_end=b, breakpoints=(a, b) if a > 0 else (b,),
                  scalar=lambda t: 1.0 if a < t <= b else 0.0)


def zero_kernel() -> Kernel:
    return Kernel(lambda t: np.zeros_like(t), 1.0, 1.0, "zero", support_end=0.0, scalar=lambda t: 0.0)


def kernel_corpus() -> list[Kernel]:
    """The four reference kernels: exponential, truncated exponential, u e^{-u}, indicator."""
    return [exp_kernel(1.0), truncated_exp_kernel(1.0, 5.0), gamma_kernel(1.0, 1.0), indicator_kernel(0.0, 1.0)]


# --------------------------------------------------------------------------
# Metadata helpers.

def _support(f) -> tuple[float, float]:
    return tuple(getattr(f, "support", (-INF, INF)))


def _breaks(f) -> tuple[float, ...]:
    return tuple(getattr(f, "breakpoints", ()))


def _scalar(f) -> Callable[[float], float]:
    if hasattr(f, "scalar_eval"):
        return f.scalar_eval()
    return lambda t: float(f(t))


def _effective_support(f, q: QuadSpec) -> tuple[float, float]:
    if isinstance(f, Kernel):
        if f.is_zero:
            return (0.0, 0.0)
        if q.tail_cutoff_policy == "decay-certificate":
            return (0.0, f.cutoff(q.abs_tol))
    return _support(f)


def _all_breaks(f, lo: float, hi: float) -> list[float]:
    pts = {b for b in _breaks(f) if math.isfinite(b)}
    pts.update(x for x in (lo, hi) if math.isfinite(x))
    return sorted(pts)


# --------------------------------------------------------------------------
# Quadrature core.

def quad(func: Callable[[float], float], a: float, b: float, q: QuadSpec,
         points: Sequence[float] = ()) -> float:
    """Adaptive Gauss-Kronrod integral of ``func`` over [a, b] (ends may be infinite)."""
    if a == b:
        return 0.0
    if a > b:
        return -quad(func, b, a, q, points)
    pts = sorted({p for p in points if a < p < b and math.isfinite(p)})
    if not (math.isfinite(a) and math.isfinite(b)) and pts:
        edges = [a, *pts, b]
        return sum(quad(func, lo, hi, q) for lo, hi in zip(edges[:-1], edges[1:]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(func, a, b, epsabs=q.abs_tol, epsrel=q.rel_tol, limit=q.max_subdivisions,
                             points=pts or None, full_output=1)
    val, err = res[0], res[1]
    tol = max(q.abs_tol, q.rel_tol * abs(val))
    if not math.isfinite(val) or (len(res) > 3 and err > 1e3 * tol):
        raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] did not converge", val, tol)
    return val


def rl_core(fs: Callable[[float], float], order: float, x: float, lo: float, hi: float,
            breaks: Sequence[float], q: QuadSpec) -> float:
    """int over (x, inf) of f(t) (t - x)^(order-1) dt, with f supported on [lo, hi].

    No 1/Gamma factor. Valid for any order > 0.
    """
    a = max(x, lo)
    if not hi > a:
        return 0.0
    total = 0.0
    if a - x < q.near_width:
        b1 = min(hi, x + q.near_width)
        inv = 1.0 / order
        if a == x:
            # the frozen cell must not swallow a breakpoint of f
            nxt = min((p for p in breaks if p > x), default=INF)
            eps = min(q.singular_cell, 0.5 * (b1 - a), 0.5 * (nxt - x))
            total += fs(x + 0.5 * eps) * eps ** order / order
            s0 = eps ** order
        else:
            s0 = (a - x) ** order
        s1 = (b1 - x) ** order
        spts = [(p - x) ** order for p in breaks if a < p < b1]
        total += quad(lambda s: fs(x + s ** inv), s0, s1, q, spts) * inv
        a = b1
    if hi > a:
        pm1 = order - 1.0
        pts = [p for p in breaks if a < p < hi]
        total += quad(lambda t: fs(t) * (t - x) ** pm1, a, hi, q, pts)
    return total


# --------------------------------------------------------------------------
# Large-argument power series of fractional integrals of compactly supported f.

@dataclass(frozen=True)
class PowerTail:
    """value(z) = z^(d-1) * sum_n coefs[n] * (radius/z)^n for z >= start."""

    d: float
    radius: float
    coefs: np.ndarray
    start: float

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        v = self.radius / z
        return np.polynomial.polynomial.polyval(v, self.coefs) * z ** (self.d - 1.0)

    @property
    def leading(self) -> float:
        return float(self.coefs[0])


def power_tail(fs, lo: float, hi: float, breaks, d: float, sign: float, q: QuadSpec,
               terms: int = SERIES_TERMS) -> PowerTail:
    """Series of int f(t) (z + sign*t)^(d-1) dt / Gamma(d) for large z.

    ``sign=-1`` gives I_+^d f at z (f supported on [0, hi]); ``sign=+1`` gives
    I_-^d f at x = -z.
    """
    radius = max(abs(lo), abs(hi))
    if radius == 0.0:
        return PowerTail(d, 1.0, np.zeros(1), 1.0)
    pts = [p for p in breaks if lo < p < hi]
    inner = QuadSpec(rel_tol=max(q.rel_tol, 1e-12), abs_tol=1e-3 * q.abs_tol, max_subdivisions=q.max_subdivisions)
    coefs = np.empty(terms)
    poch = 1.0
    for n in range(terms):
        mom = quad(lambda t: fs(t) * (t / radius) ** n, lo, hi, inner, pts)
        coefs[n] = poch * (-sign) ** n * mom
        poch *= (n + 1.0 - d) / (n + 1.0)
    coefs /= math.gamma(d)
    return PowerTail(d, radius, coefs, SERIES_RATIO * radius)


def power_tail_integral(tail: PowerTail, p: float, z0: float, q: QuadSpec, span: float = 1e12) -> float:
    """int_{z0}^inf |tail(z)|^p dz: log-variable quadrature plus closed-form remainder."""
    expo = p * (tail.d - 1.0) + 1.0
    if expo >= 0.0:
        raise QuadratureError(f"|f|^{p} has a non-integrable power tail (exponent {expo - 1:.4g})", INF, 0.0)
    if not np.any(tail.coefs):
        return 0.0
    z1 = z0 * span
    body = quad(lambda w: abs(float(tail(z0 * math.exp(w)))) ** p * z0 * math.exp(w), 0.0, math.log(span), q)
    rest = abs(tail.leading) ** p * z1 ** expo / (-expo)
    return body + rest


# --------------------------------------------------------------------------
# Fractional integrals as callable objects.

class RLIntegralMinus:
    """x -> (I_-^d f)(x) for a function with support bounded above."""

    def __init__(self, f, d, q: QuadSpec = DEFAULT_QUAD):
        self.f = f
        self.d = _order(d)
        self.q = q
        lo, hi = _effective_support(f, q)
        self.lo, self.hi = lo, hi
        self._fs = _scalar(f)
        self._breaks = _all_breaks(f, lo, hi)
        self.support = (-INF, hi)
        self.breakpoints = tuple(self._breaks)
        self.tail = None
        if math.isfinite(lo) and math.isfinite(hi) and hi > lo:
            self.tail = power_tail(self._fs, lo, hi, self._breaks, self.d, +1.0, q)
        self._gd = math.gamma(self.d)

    def _scalar_value(self, x: float) -> float:
        if not self.hi > self.lo or x >= self.hi:
            return 0.0
        if self.tail is not None and -x >= self.tail.start:
            return float(self.tail(-x))
        return rl_core(self._fs, self.d, x, self.lo, self.hi, self._breaks, self.q) / self._gd

    def scalar_eval(self):
        return self._scalar_value

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.array([self._scalar_value(float(v)) for v in x.ravel()]).reshape(x.shape)
        return float(out) if out.ndim == 0 else out


class FractionalKernel:
    """u -> F(u) = (I_+^d g)(u) for a kernel g; zero for u <= 0.

    Quadrature below ``u_asym``, convergent large-lag series above it. Cell
    means over lag cells are cached per step size.
    """

    def __init__(self, g: Kernel, d, q: QuadSpec = DEFAULT_QUAD):
        self.g = g
        self.d = _order(d)
        self.q = q
        lo, hi = _effective_support(g, q)
        self.T = hi
        self.is_zero = not hi > lo
        gs = _scalar(g)
        self._gs = gs
        # reflected kernel t -> g(-t) supported on [-T, 0]
        self._refl = lambda t: gs(-t)
        self._rbreaks = sorted({-b for b in _all_breaks(g, lo, hi)})
        self.support = (0.0, INF)
        self.breakpoints = tuple(b for b in _all_breaks(g, lo, hi))
        if self.is_zero:
            self.tail = PowerTail(self.d, 1.0, np.zeros(1), 1.0)
        else:
            self.tail = power_tail(gs, 0.0, hi, _all_breaks(g, lo, hi), self.d, -1.0, q)
        self.u_asym = self.tail.start
        self._gd = math.gamma(self.d)
        self._gd1 = math.gamma(self.d + 1.0)
        self._cache: dict = {}

    @property
    def mass(self) -> float:
        """L = int g / Gamma(d), the leading large-lag coefficient."""
        return self.tail.leading

    def _quad_value(self, u: float, order: float) -> float:
        return rl_core(self._refl, order, -u, -self.T, 0.0, self._rbreaks, self.q)

    def _scalar_value(self, u: float) -> float:
        if u <= 0.0 or self.is_zero:
            return 0.0
        if u >= self.u_asym:
            return float(self.tail(u))
        return self._quad_value(u, self.d) / self._gd

    def scalar_eval(self):
        return self._scalar_value

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        flat = u.ravel()
        out = np.zeros(flat.shape)
        far = flat >= self.u_asym
        if np.any(far) and not self.is_zero:
            out[far] = self.tail(flat[far])
        for i in np.flatnonzero((flat > 0) & ~far):
            out[i] = self._scalar_value(float(flat[i]))
        out = out.reshape(u.shape)
        return float(out) if out.ndim == 0 else out

    def integral_order_plus_one(self, u: float) -> float:
        """(I_+^{d+1} g)(u), an antiderivative of F vanishing at 0."""
        if u <= 0.0 or self.is_zero:
            return 0.0
        return self._quad_value(u, self.d + 1.0) / self._gd1

    def point_values(self, dt: float, n: int) -> np.ndarray:
        """F(m*dt) for m = 1..n."""
        key = ("point", float(dt), int(n))
        if key not in self._cache:
            self._cache[key] = self(dt * np.arange(1, n + 1))
        return self._cache[key]

    def cell_means(self, dt: float, n: int, near: int = 8) -> np.ndarray:
        """Mean of F over the lag cells [(m-1)dt, m dt] for m = 1..n.

        Cells within ``near`` steps of a kink of F (lag 0 and the kernel's
        breakpoints) use differences of I_+^{d+1} g; the others use Simpson's rule.
        """
        key = ("mean", float(dt), int(n), int(near))
        if key in self._cache:
            return self._cache[key]
        if self.is_zero:
            out = np.zeros(n)
        else:
            m = np.arange(1, n + 1)
            left, right = (m - 1) * dt, m * dt
            kinks = np.array([0.0, *[b for b in self.breakpoints if 0.0 < b]])
            dist = np.min(np.maximum(0.0, np.maximum(left[:, None] - kinks[None, :], kinks[None, :] - right[:, None])),
                          axis=1)
            exact = dist < near * dt
            half = self(0.5 * dt * np.arange(0, 2 * n + 1))
            out = (half[0:-1:2] + 4.0 * half[1::2] + half[2::2]) / 6.0
            idx = np.flatnonzero(exact)
            if idx.size:
                ends = np.union1d(idx, idx + 1)
                phi = {int(k): self.integral_order_plus_one(k * dt) for k in ends}
                out[idx] = np.array([(phi[int(k) + 1] - phi[int(k)]) / dt for k in idx])
        self._cache[key] = out
        return out

    def lookup_table(self, size: int = 8193) -> tuple[float, np.ndarray]:
        """Values of F on a grid uniform in s = u^d over [0, u_asym^d]: (ds, values)."""
        key = ("table", size)
        if key not in self._cache:
            s = np.linspace(0.0, self.u_asym ** self.d, size)
            u = s ** (1.0 / self.d)
            vals = self(np.minimum(u, np.nextafter(self.u_asym, 0)))
            self._cache[key] = (s[1] - s[0], vals)
        return self._cache[key]


def frac_integral_minus(f, d, q: QuadSpec = DEFAULT_QUAD) -> RLIntegralMinus:
    return RLIntegralMinus(f, d, q)


def frac_integral_plus(g: Kernel, d, q: QuadSpec = DEFAULT_QUAD) -> FractionalKernel:
    return FractionalKernel(g, d, q)


# --------------------------------------------------------------------------
# Operations.

def _vectorize(fn, x):
    arr = np.asarray(x, dtype=float)
    out = np.array([fn(float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def rl_integral_minus(f, d, x, q: QuadSpec = DEFAULT_QUAD):
    """(I_-^d f)(x); ``x`` may be an array."""
    dd = _order(d)
    lo, hi = _effective_support(f, q)
    fs = _scalar(f)
    br = _all_breaks(f, lo, hi)
    gd = math.gamma(dd)
    return _vectorize(lambda v: rl_core(fs, dd, v, lo, hi, br, q) / gd, x)


def rl_integral_plus(g, d, x, q: QuadSpec = DEFAULT_QUAD):
    """(I_+^d g)(x); zero for x <= 0 when g is a kernel."""
    dd = _order(d)
    lo, hi = _effective_support(g, q)
    gs = _scalar(g)
    refl = lambda t: gs(-t)  # noqa: E731
    br = sorted({-b for b in _all_breaks(g, lo, hi)})
    gd = math.gamma(dd)
    return _vectorize(lambda v: rl_core(refl, dd, -v, -hi, -lo, br, q) / gd, x)


def rl_derivative_minus(phi, d, x, q: QuadSpec = DEFAULT_QUAD, h: float | None = None):
    """(D_-^d phi)(x) = -1/Gamma(1-d) d/dx int_x^inf phi(t)(t-x)^(-d) dt.

    Central differences with one Richardson step. The default step keeps a
    quarter of the distance to the nearest breakpoint of ``phi``.
    """
    dd = _order(d)
    lo, hi = _support(phi)
    fs = _scalar(phi)
    br = _all_breaks(phi, lo, hi)
    g1 = math.gamma(1.0 - dd)

    def one(xv: float) -> float:
        step = h
        if step is None:
            gap = min((abs(xv - b) for b in br), default=INF)
            step = min(1e-2, 0.25 * gap)
        if not step > 1e-8 * max(1.0, abs(xv)):
            raise ValueError(f"finite-difference step underflow at x={xv:.6g} (step {step:.3g})")

        def J(y):
            return rl_core(fs, 1.0 - dd, y, lo, hi, br, q)

        def central(hh):
            return -(J(xv + hh) - J(xv - hh)) / (2.0 * hh)

        return (4.0 * central(0.5 * step) - central(step)) / 3.0 / g1

    return _vectorize(one, x)


def lp_norm(f, p: float, domain: tuple[float, float] | None = None, q: QuadSpec = DEFAULT_QUAD) -> float:
    """(int |f|^p)^(1/p) over ``domain`` (default: the support of f)."""
    if not p > 0:
        raise ValueError("p must be positive")
    lo, hi = _effective_support(f, q)
    if domain is not None:
        lo, hi = max(lo, domain[0]), min(hi, domain[1])
    if not hi > lo:
        return 0.0
    fs = _scalar(f)
    br = _all_breaks(f, lo, hi)
    integrand = lambda t: abs(fs(t)) ** p  # noqa: E731
    tail = getattr(f, "tail", None)
    total = 0.0
    if isinstance(f, RLIntegralMinus) and tail is not None and lo == -INF:
        z0 = max(tail.start, -hi)
        total += power_tail_integral(tail, p, z0, q)
        lo = -z0
    if isinstance(f, FractionalKernel) and hi == INF:
        z0 = max(f.u_asym, lo)
        total += power_tail_integral(f.tail, p, z0, q)
        hi = z0
    if hi > lo:
        total += quad(integrand, lo, hi, q, br)
    if not math.isfinite(total):
        raise QuadratureError("divergent L^p integral", total, 0.0)
    return total ** (1.0 / p)


def b_alpha_p_norm(g, law: StableLaw, spec: MomentSpec, d, q: QuadSpec = DEFAULT_QUAD) -> float:
    """lambda(alpha,p)^(1/p) * ||I_-^d g||_alpha."""
    spec.check(law.alpha)
    lam = stable_abs_moment(law.alpha, spec.p)
    return lam ** (1.0 / spec.p) * lp_norm(RLIntegralMinus(g, d, q), law.alpha, None, q)


def norm_bound_constants(g, law: StableLaw, spec: MomentSpec, d) -> tuple[float, float]:
    """Constants (M, N) with ||g||_{alpha,p} <= M ||g||_1 + N ||g||_alpha."""
    dd = _order(d)
    a = law.alpha
    den = a * (1.0 - dd) - 1.0
    if not den > 0.0:
        raise ValueError(f"d must lie in (0, 1 - 1/alpha) = (0, {1.0 - 1.0 / a:.4f}), got {dd}")
    spec.check(a)
    lam_p = stable_abs_moment(a, spec.p) ** (1.0 / spec.p)
    M = lam_p / (math.gamma(dd) * den ** (1.0 / a))
    N = lam_p / (math.gamma(dd) * dd)
    return M, N


def indicator_rl_minus(a: float, b: float, d: float, x):
    """Closed form of I_-^d 1_(a,b] at x: [(b-x)_+^d - (a-x)_+^d] / Gamma(d+1)."""
    x = np.asarray(x, dtype=float)
    val = (np.maximum(b - x, 0.0) ** d - np.maximum(a - x, 0.0) ** d) / special.gamma(d + 1.0)
    return float(val) if val.ndim == 0 else val
