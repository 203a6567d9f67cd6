"""The characteristic-function dependence measure of a FIMA process.

For a positive lag tau, with F = I_+^d g::

    I(tau) = int_0^inf |th1 F(y) + th2 F(y + tau)|^a - |th1 F(y)|^a - |th2 F(y + tau)|^a dy
    K      = exp(-(|th1|^a + |th2|^a) ||F||_a^a)

with the noise scale folded into the thetas.
    r      = K (exp(-I) - 1)

``th1`` multiplies the earlier of the two values. As tau grows,
I(tau) ~ C tau^(a(d-1)+1).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .fima import FimaModel, fima_weights, far_depth_for
from .frac_calc import DEFAULT_QUAD, QuadSpec, lp_norm, quad, rl_core, _scalar
from .path_sim import GridSpec, noise_on_edges
from .stable_core import RandomStream

SCHEMA_VERSION = 1


def alpha_increment(A: float, B: float, a: float) -> float:
    """|A+B|^a - |A|^a - |B|^a, accurate when one argument dominates."""
    if abs(A) < abs(B):
        A, B = B, A
    if A == 0.0:
        return 0.0
    z = B / A
    return abs(A) ** a * (math.expm1(a * math.log1p(z)) - abs(z) ** a) if z > -1.0 else -2.0 * abs(A) ** a


def lemma_bound_gap(r: np.ndarray, s: np.ndarray, a: float) -> np.ndarray:
    """a|r||s|^(a-1) + (a+1)|r|^a - ||r+s|^a - |r|^a - |s|^a|; nonnegative when the bound holds."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    lhs = np.abs(np.abs(r + s) ** a - np.abs(r) ** a - np.abs(s) ** a)
    return a * np.abs(r) * np.abs(s) ** (a - 1.0) + (a + 1.0) * np.abs(r) ** a - lhs


# --------------------------------------------------------------------------
# Theory.

def frac_kernel_alpha_power(model: FimaModel, q: QuadSpec = DEFAULT_QUAD) -> float:
    """||I_+^d g||_alpha^alpha."""
    return lp_norm(model.frac_kernel(q), model.alpha, None, q) ** model.alpha


def theoretical_K(model: FimaModel, theta1: float, theta2: float, q: QuadSpec = DEFAULT_QUAD) -> float:
    a = model.alpha
    w = (abs(theta1) ** a + abs(theta2) ** a) * model.law.scale ** a
    if w == 0.0:
        return 1.0
    return math.exp(-w * frac_kernel_alpha_power(model, q))


def theoretical_I(model: FimaModel, theta1: float, theta2: float, t: float, q: QuadSpec = DEFAULT_QUAD) -> float:
    """I(theta1, theta2) at lag ``t`` > 0 (theta1 on the earlier time)."""
    if not t > 0:
        raise ValueError("lag t must be positive")
    theta1, theta2 = theta1 * model.law.scale, theta2 * model.law.scale
    F = model.frac_kernel(q)
    if theta1 == 0.0 or theta2 == 0.0 or F.is_zero:
        return 0.0
    a = model.alpha
    fs = F.scalar_eval()
    ua = F.u_asym
    kinks = [b for b in F.breakpoints if b > 0]
    pts = set(kinks)
    pts.update(b - t for b in kinks if 0 < b - t < ua)
    if t < ua:
        pts.add(ua - t)
    near = quad(lambda y: alpha_increment(theta1 * fs(y), theta2 * fs(y + t), a), 0.0, ua, q, sorted(pts))
    # y >= u_asym: both factors on the large-lag series; integrate in w = log(y / u_asym)
    tail = F.tail
    span = 1e12 * max(1.0, t / ua)
    wmax = math.log(span)
    wpts = [math.log(t / ua)] if t > ua else []

    def body(w):
        y = ua * math.exp(w)
        return alpha_increment(theta1 * float(tail(y)), theta2 * float(tail(y + t)), a) * y

    far = quad(body, 0.0, wmax, q, wpts)
    e = a * (model.d - 1.0)
    c0 = abs(theta1 + theta2) ** a - abs(theta1) ** a - abs(theta2) ** a
    Y = ua * span
    rest = c0 * abs(tail.leading) ** a * Y ** (e + 1.0) / (-(e + 1.0))
    return near + far + rest


def asymptotic_C(model: FimaModel, theta1: float, theta2: float, q: QuadSpec = DEFAULT_QUAD,
                 span: float = 1e8) -> float:
    """C = L^alpha int_1^inf h(x) dx with
    h(x) = |th1 (x-1)^(d-1) + th2 x^(d-1)|^a - |th1 (x-1)^(d-1)|^a - |th2 x^(d-1)|^a.

    [1, 2]: substitution x - 1 = u^(1/kappa), kappa = 1 + (d-1)(a-1), which
    absorbs the x -> 1 singularity; [2, span]: log variable; beyond: two-term
    closed-form tail.
    """
    if theta1 == 0.0 or theta2 == 0.0:
        return 0.0
    theta1, theta2 = theta1 * model.law.scale, theta2 * model.law.scale
    a, d = model.alpha, model.d
    F = model.frac_kernel(q)
    L = F.mass

    def h(x):
        return alpha_increment(theta1 * (x - 1.0) ** (d - 1.0), theta2 * x ** (d - 1.0), a)

    kappa = 1.0 + (d - 1.0) * (a - 1.0)
    inv = 1.0 / kappa
    head = quad(lambda u: h(1.0 + u ** inv) * inv * u ** (inv - 1.0) if u > 0 else 0.0, 0.0, 1.0, q)
    mid = quad(lambda w: h(2.0 * math.exp(w)) * 2.0 * math.exp(w), 0.0, math.log(span / 2.0), q)
    e = a * (d - 1.0)
    s12 = theta1 + theta2
    c0 = abs(s12) ** a - abs(theta1) ** a - abs(theta2) ** a
    c1 = a * (1.0 - d) * theta1 * (math.copysign(abs(s12) ** (a - 1.0), s12)
                                   - math.copysign(abs(theta1) ** (a - 1.0), theta1))
    rest = c0 * span ** (e + 1.0) / (-(e + 1.0)) + c1 * span ** e / (-e)
    return abs(L) ** a * (head + mid + rest)


def r_from_I(K: float, I: float) -> float:
    """K (e^{-I} - 1)."""
    if not K > 0:
        raise ValueError("K must be positive")
    return K * math.expm1(-I)


def lemma_constants(model: FimaModel, theta1: float, theta2: float) -> tuple[float, float]:
    """(K1, K2) with |t phi| <= K1 (x-1)^(d-1) and |t psi| <= K2 x^(d-1)."""
    g = model.kernel
    d = model.d
    base = g.decay_C * (1.0 + math.exp(-1.0)) / (math.gamma(d) * g.decay_c * 2.0 ** (d - 1.0))
    return abs(theta1) * base, abs(theta2) * base


def phi_psi(model: FimaModel, t: float, x: float, q: QuadSpec = DEFAULT_QUAD, theta1: float = 1.0,
            theta2: float = 1.0) -> tuple[float, float]:
    """phi(t,x) = th1/Gamma(d) int_1^x g(t(1-u)) (x-u)^(d-1) du and
    psi(t,x) = th2/Gamma(d) int_0^x g(-tu) (x-u)^(d-1) du for t < 0, x > 1."""
    if not t < 0:
        raise ValueError("t must be negative")
    if not x > 1:
        raise ValueError("x must exceed 1")
    g = model.kernel
    d = model.d
    gs = _scalar(g)
    s = -t
    Tg = g.cutoff(q.abs_tol) if q.tail_cutoff_policy == "decay-certificate" else g.support_end
    kinks = [b for b in (*g.breakpoints, Tg) if 0 < b < math.inf]
    gd = math.gamma(d)

    def part(start):
        # int_start^x g(s (u - start)) (x-u)^(d-1) du, reflected so the singular end sits at -x
        hi_u = min(x, start + Tg / s) if math.isfinite(Tg) else x
        lo, hi = -hi_u, -start
        br = sorted({-start - b / s for b in kinks if start + b / s < x} | {lo, hi} |
                    {-start - k / s for k in (1.0, 4.0, 16.0) if start + k / s < hi_u})
        return rl_core(lambda v: gs(s * (-v - start)), d, -x, lo, hi, br, q)

    phi = theta1 * part(1.0) / gd if theta1 != 0.0 else 0.0
    psi = theta2 * part(0.0) / gd if theta2 != 0.0 else 0.0
    return phi, psi


# --------------------------------------------------------------------------
# Empirical estimate.

@dataclass(frozen=True)
class DependenceQuery:
    theta1: float = 1.0
    theta2: float = 1.0
    t_values: tuple[float, ...] = (8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0)

    def __post_init__(self):
        t = list(self.t_values)
        if not t or any(v <= 0 for v in t) or t != sorted(t):
            raise ValueError("t_values must be positive and sorted")

    @property
    def degenerate(self) -> bool:
        return self.theta1 == 0.0 and self.theta2 == 0.0


@dataclass
class EmpiricalR:
    t: np.ndarray
    r: np.ndarray          # complex
    se_re: np.ndarray
    se_im: np.ndarray
    replicas: int


def _blocked_jackknife(sums: np.ndarray, counts: np.ndarray):
    """Delete-one-block jackknife of r = m_joint - m_a m_b.

    ``sums`` has shape (blocks, 3, lags) holding complex block sums of the joint
    and the two marginal exponentials.
    """
    total = sums.sum(axis=0)
    n = counts.sum()

    def r_of(s, m):
        mj, ma, mb = s[0] / m, s[1] / m, s[2] / m
        return mj - ma * mb

    full = r_of(total, n)
    B = sums.shape[0]
    loo = np.array([r_of(total - sums[b], n - counts[b]) for b in range(B)])
    mean = loo.mean(axis=0)
    se_re = np.sqrt((B - 1) / B * np.sum((loo.real - mean.real) ** 2, axis=0))
    se_im = np.sqrt((B - 1) / B * np.sum((loo.imag - mean.imag) ** 2, axis=0))
    return full, se_re, se_im


def dependence_grid(model: FimaModel, query: DependenceQuery, dt: float = 0.25,
                    q: QuadSpec = DEFAULT_QUAD) -> GridSpec:
    """Uniform cells over [-(u_asym+1), max lag] plus the certified far field."""
    F = model.frac_kernel(q)
    trunc = math.ceil((F.u_asym + 1.0) / dt) * dt
    return GridSpec(0.0, float(max(query.t_values)), dt, trunc, far_depth_for(model, q))


def empirical_r(model: FimaModel, query: DependenceQuery, replicas: int, grid: GridSpec, stream: RandomStream,
                q: QuadSpec = DEFAULT_QUAD, blocks: int = 50, pairing: str = "matched",
                threads: int = 1) -> EmpiricalR:
    """E exp(i(th1 Y(t) + th2 Y(0))) - E exp(i th1 Y(t)) E exp(i th2 Y(0)) over replicas.

    ``pairing="scrambled"`` pairs Y(t) of replica k with Y(0) of replica k+1
    (within a batch), which nulls the dependence.
    """
    if replicas < 1000:
        raise ValueError("empirical_r needs at least 1000 replicas")
    if pairing not in ("matched", "scrambled"):
        raise ValueError("pairing must be 'matched' or 'scrambled'")
    t = np.asarray(query.t_values, dtype=float)
    if grid.t_start != 0.0 or t.max() > grid.t_end + 1e-12:
        raise ValueError("grid must start at 0 and reach the largest lag")
    if query.degenerate:
        z = np.zeros(t.size)
        return EmpiricalR(t, z.astype(complex), z, z.copy(), replicas)
    edges = grid.edges()
    times = np.concatenate([[0.0], t])
    W = fima_weights(model, edges, grid.n_far, times, grid.dt, grid.far_nodes, q)
    blocks = min(blocks, replicas)
    bounds = np.linspace(0, replicas, blocks + 1).astype(int)
    sums = np.zeros((blocks, 3, t.size), dtype=complex)
    counts = np.diff(bounds)
    th1, th2 = query.theta1, query.theta2
    for b in range(blocks):
        r0, r1 = bounds[b], bounds[b + 1]
        step = max(1, int(2_000_000 // edges.size))
        for a0 in range(r0, r1, step):
            a1 = min(r1, a0 + step)
            inc = noise_on_edges(edges, model.law, stream.child(a0), a1 - a0, threads)
            Y = inc @ W.T
            y0, yt = Y[:, :1], Y[:, 1:]
            if pairing == "scrambled":
                y0 = np.roll(y0, 1, axis=0)
            ea = np.exp(1j * th1 * yt)
            eb = np.exp(1j * th2 * y0)
            sums[b, 0] += (ea * eb).sum(axis=0)
            sums[b, 1] += ea.sum(axis=0)
            sums[b, 2] += np.broadcast_to(eb, ea.shape).sum(axis=0)
    r, se_re, se_im = _blocked_jackknife(sums, counts)
    return EmpiricalR(t, r, se_re, se_im, replicas)


# --------------------------------------------------------------------------
# Exponent fit and report.

def lrd_exponent_fit(t: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of log|value| against log t.

    Returns (theta_hat, band) with theta_hat = -slope and band = 2 standard
    errors of the slope.
    """
    t = np.asarray(t, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    if t.size < 4:
        raise ValueError("need at least 4 lags")
    if np.log10(t.max() / t.min()) < 1.5 - 1e-12:
        raise ValueError("lags must span at least 1.5 decades")
    bad = t[~(v > 0)]
    if bad.size:
        raise ValueError(f"nonpositive values at lags {bad.tolist()}")
    x, y = np.log(t), np.log(v)
    xc = x - x.mean()
    sxx = np.sum(xc ** 2)
    slope = np.sum(xc * (y - y.mean())) / sxx
    resid = y - y.mean() - slope * xc
    se = math.sqrt(max(np.sum(resid ** 2), 0.0) / (t.size - 2) / sxx)
    return float(-slope), float(2.0 * se)


def lrd_verdict(theta_hat: float, band: float) -> bool:
    """True iff the fitted decay exponent -theta_hat lies in (-1, 0) with its band."""
    slope = -theta_hat
    return slope - band > -1.0 and slope + band < 0.0


@dataclass
class LagRecord:
    t: float
    empirical_re: float | None
    empirical_im: float | None
    se_re: float | None
    se_im: float | None
    theoretical_I: float
    theoretical_r: float


@dataclass
class DependenceReport:
    records: list[LagRecord]
    K: float
    C: float
    L: float
    theta_hat: float
    band: float
    target: float
    lrd_verdict: bool
    fit_source: str
    extra: dict = field(default_factory=dict)

    CSV_COLUMNS = ("t", "empirical_re", "empirical_im", "se_re", "se_im", "theoretical_I", "theoretical_r")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.CSV_COLUMNS)
            for rec in self.records:
                w.writerow(["" if v is None else repr(float(v)) for v in (getattr(rec, c) for c in self.CSV_COLUMNS)])

    def summary(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "K": self.K, "C": self.C, "L": self.L,
                "theta_hat": self.theta_hat, "band": self.band, "target_exponent": self.target,
                "target_theta": -self.target, "lrd_verdict": self.lrd_verdict, "fit_source": self.fit_source,
                **self.extra}

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def as_dict(self) -> dict:
        return {"summary": self.summary(), "records": [asdict(r) for r in self.records]}


def build_report(model: FimaModel, query: DependenceQuery, q: QuadSpec = DEFAULT_QUAD,
                 empirical: EmpiricalR | None = None) -> DependenceReport:
    """Theory at every lag (theta's swapped to match the empirical orientation),
    optional empirical columns, and the exponent fit (on |empirical r| when
    available, else on theoretical I)."""
    th1, th2 = query.theta1, query.theta2
    K = theoretical_K(model, th1, th2, q)
    C = asymptotic_C(model, th2, th1, q)
    L = model.frac_kernel(q).mass
    recs = []
    for k, t in enumerate(query.t_values):
        I = theoretical_I(model, th2, th1, t, q)
        rt = r_from_I(K, I)
        if empirical is None:
            recs.append(LagRecord(float(t), None, None, None, None, I, rt))
        else:
            recs.append(LagRecord(float(t), float(empirical.r[k].real), float(empirical.r[k].imag),
                                  float(empirical.se_re[k]), float(empirical.se_im[k]), I, rt))
    ts = [r.t for r in recs]
    if empirical is not None:
        theta_hat, band = lrd_exponent_fit(ts, [r.empirical_re for r in recs])
        src = "empirical_r"
    else:
        theta_hat, band = lrd_exponent_fit(ts, [r.theoretical_I for r in recs])
        src = "theoretical_I"
    return DependenceReport(recs, K, C, L, theta_hat, band, model.decay_exponent,
                            lrd_verdict(theta_hat, band), src)
