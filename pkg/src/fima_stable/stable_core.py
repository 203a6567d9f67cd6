"""Symmetric alpha-stable laws: characteristic functions, variates, moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from . import _kernels

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class StableLaw:
    """S_alpha(scale, 0, 0). ``alpha == 2`` is the Gaussian with variance 2*scale**2."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")

    def scaled(self, factor: float) -> "StableLaw":
        return StableLaw(self.alpha, self.scale * factor)


@dataclass(frozen=True)
class RandomStream:
    """Counter-based stream keyed by ``(master_seed, stream_index)``.

    Each call to :meth:`generator` restarts the stream at counter zero, so the
    draws are a pure function of the key and of how many values are requested.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be non-negative")
        if not (0 <= self.master_seed <= _MASK64):
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        key = self.master_seed | (self.stream_index << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset: int) -> "RandomStream":
        return RandomStream(self.master_seed, self.stream_index + offset)


@dataclass(frozen=True)
class MomentSpec:
    """Order ``p`` of an absolute moment; any 0 < p < alpha is admitted."""

    p: float = 1.0

    def __post_init__(self):
        if not (self.p > 0.0 and math.isfinite(self.p)):
            raise ValueError(f"moment order p must be positive, got {self.p}")

    def check(self, alpha: float) -> None:
        if self.p >= alpha:
            raise ValueError(f"moment order p={self.p} must be < alpha={alpha} (moment infinite)")

    def lam(self, alpha: float) -> float:
        self.check(alpha)
        return stable_abs_moment(alpha, self.p)


# --------------------------------------------------------------------------
# lambda(alpha, p) = E|L_alpha(1)|^p

def lambda_closed_form(alpha: float, p: float) -> float:
    """Classical closed form of E|X|^p for unit-scale symmetric stable X."""
    if not (0.0 < p < alpha):
        raise ValueError(f"need 0 < p < alpha, got p={p}, alpha={alpha}")
    return (2.0 ** p * math.gamma((1.0 + p) / 2.0) * math.gamma(1.0 - p / alpha)
            / (math.gamma(1.0 - p / 2.0) * math.sqrt(math.pi)))


@dataclass(frozen=True)
class LambdaEntry:
    alpha: float
    p: float
    value: float
    closed_form: float
    mc_mean: float
    mc_spread: float
    draws: int
    seeds: tuple[int, ...]


def _key(alpha: float, p: float) -> tuple[float, float]:
    return (round(float(alpha), 6), round(float(p), 6))


@lru_cache(maxsize=1)
def lambda_table() -> dict[tuple[float, float], LambdaEntry]:
    """Parse the shipped ``data/lambda_table.txt``."""
    text = resources.files(__package__).joinpath("data/lambda_table.txt").read_text()
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        f = line.split()
        entry = LambdaEntry(float(f[0]), float(f[1]), float(f[2]), float(f[3]), float(f[4]),
                            float(f[5]), int(f[6]), tuple(int(s) for s in f[7].split(",")))
        table[_key(entry.alpha, entry.p)] = entry
    return table


@lru_cache(maxsize=256)
def stable_abs_moment(alpha: float, p: float) -> float:
    """lambda(alpha, p): tabulated value when pinned, closed form otherwise."""
    if not (0.0 < p < alpha):
        raise ValueError(f"moment order p={p} must lie in (0, alpha={alpha})")
    entry = lambda_table().get(_key(alpha, p))
    if entry is not None:
        return entry.value
    return lambda_closed_form(alpha, p)


# --------------------------------------------------------------------------

def characteristic_function(law: StableLaw, theta):
    """exp(-(scale*|theta|)**alpha); scalar in, float out."""
    val = np.exp(-(law.scale * np.abs(np.asarray(theta, dtype=float))) ** law.alpha)
    return float(val) if np.ndim(val) == 0 else val


def standard_variates(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unit-scale draws consuming ``rng`` (uniforms first, then exponentials)."""
    u = rng.random(n)
    u[u == 0.0] = 0.5  # keeps U strictly inside (-pi/2, pi/2)
    e = rng.standard_exponential(n)
    return _kernels.cms_symmetric(u, e, alpha)


def sample_sas(law: StableLaw, n: int, stream: RandomStream) -> np.ndarray:
    """n i.i.d. S_alpha(scale, 0, 0) draws, a pure function of ``stream`` and ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return law.scale * standard_variates(law.alpha, int(n), stream.generator())


def abs_moment(law: StableLaw, spec: MomentSpec) -> float:
    """E|X|^p for X ~ law."""
    spec.check(law.alpha)
    return stable_abs_moment(law.alpha, spec.p) * law.scale ** spec.p


def empirical_cf(samples, theta):
    """Mean of exp(i*theta*x); ``theta`` may be a scalar or an array."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empirical_cf needs a nonempty sample")
    th = np.asarray(theta, dtype=float)
    re, im = _kernels.ecf_sums(x, th.ravel())
    out = (re + 1j * im) / x.size
    return complex(out[0]) if th.ndim == 0 else out.reshape(th.shape)


def ecf_standard_error(n: int) -> float:
    """Conservative standard error of an empirical CF: sqrt(2/n)."""
    return math.sqrt(2.0 / n)
