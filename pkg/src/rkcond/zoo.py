"""Test operators with known spectra, Cesàro means and the l^p interpolation analogue."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleGeometry, OverflowGuard
from .linalg_core import MAX_DIM, as_matrix, as_scalar, identity, resolvent, singular_values
from .regions import stolz_curve
from .rk_condition import RKParams

OVERFLOW_CEILING = 1e300


def diag_from_spectrum(points) -> np.ndarray:
    pts = [as_scalar(z) for z in points]
    if not 1 <= len(pts) <= MAX_DIM:
        raise ValueError(f"need between 1 and {MAX_DIM} points, got {len(pts)}")
    return np.diag(np.array(pts, dtype=np.complex128))


def stolz_spectrum(sigma: float, a: float, count: int) -> list[complex]:
    """Points on ``|1 - z|**a = sigma (1 - |z|)`` with ``|1 - z| = 2**-j``, ``j = 1..count``.

    All points lie in the upper half-plane and accumulate at 1.
    """
    if not sigma > 1 or not a >= 1 or count < 1:
        raise DomainError(f"need sigma > 1, a >= 1, count >= 1; got ({sigma}, {a}, {count})")
    out = []
    for j in range(1, count + 1):
        z = stolz_curve(sigma, a, 2.0 ** -j)
        if z is None:
            raise InfeasibleGeometry(f"no boundary point with |1 - z| = 2^-{j} for sigma={sigma}, a={a}")
        out.append(z)
    return out


def jordan(rho, d: int) -> np.ndarray:
    if d < 1:
        raise ValueError("d must be >= 1")
    m = as_scalar(rho) * identity(d)
    if d > 1:
        m += np.diag(np.ones(d - 1, dtype=np.complex128), 1)
    return m


# -- Cesàro machinery -------------------------------------------------------


class CesaroContext:
    """Cached Cesàro numbers ``k_alpha(n)`` built from the ratio recurrence.

    ``alpha = 0`` is accepted: ``k_0`` is the unit impulse at 0.
    """

    def __init__(self, alpha: float, capacity: int = 10_000):
        alpha = float(alpha)
        if not math.isfinite(alpha) or alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {alpha}")
        self.alpha = alpha
        self.capacity = int(capacity)
        self._cache = [1.0]
        self._lock = threading.Lock()

    def _extend(self, n: int) -> None:
        with self._lock:
            cache = self._cache
            a = self.alpha
            for m in range(len(cache), n + 1):
                cache.append(cache[m - 1] * (m - 1 + a) / m)

    def numbers(self, n: int) -> np.ndarray:
        """``k_alpha(0..n)`` as an array."""
        if n < 0 or n > self.capacity:
            raise ValueError(f"n must lie in [0, {self.capacity}], got {n}")
        if n >= len(self._cache):
            self._extend(n)
        return np.array(self._cache[: n + 1])

    def successor(self) -> "CesaroContext":
        return CesaroContext(self.alpha + 1, self.capacity)


def cesaro_number(ctx: CesaroContext, n: int) -> float:
    return float(ctx.numbers(n)[n])


def _powers(t: np.ndarray, n: int) -> np.ndarray:
    d = t.shape[0]
    p = np.empty((n + 1, d, d), dtype=np.complex128)
    p[0] = identity(d)
    for j in range(1, n + 1):
        p[j] = t @ p[j - 1]
        if not np.all(np.isfinite(p[j])) or np.abs(p[j]).max() > OVERFLOW_CEILING:
            raise OverflowGuard(f"powers of T exceed {OVERFLOW_CEILING:g} at j = {j}", partial=j - 1)
    return p


def cesaro_mean(t, ctx: CesaroContext, n: int) -> np.ndarray:
    """``k_{alpha+1}(n)^{-1} sum_{j=0}^n k_alpha(n - j) T^j``."""
    t = as_matrix(t)
    if not 0 <= n <= 10_000:
        raise ValueError("n must lie in [0, 1e4]")
    k = ctx.numbers(n)
    pw = _powers(t, n)
    s = np.tensordot(k[::-1], pw, axes=(0, 0))
    return s / cesaro_number(ctx.successor(), n)


def c_alpha_bound_estimate(t, ctx: CesaroContext, n_max: int) -> float:
    """``max_{n <= n_max} ||M_T^alpha(n)||_2``, a lower bound for the (C, alpha) constant."""
    t = as_matrix(t)
    if n_max < 8:
        raise ValueError("n_max must be >= 8")
    k = ctx.numbers(n_max)
    k_next = ctx.successor().numbers(n_max)
    pw = _powers(t, n_max)
    best = 0.0
    chunk = 256
    for start in range(0, n_max + 1, chunk):
        ns = range(start, min(start + chunk, n_max + 1))
        means = np.stack([np.tensordot(k[n::-1], pw[: n + 1], axes=(0, 0)) / k_next[n] for n in ns])
        best = max(best, float(singular_values(means)[:, 0].max()))
    return best


def rk_from_c_alpha(alpha: float, c: float) -> RKParams:
    """RK parameters ``(0, alpha + 1, max(1, 2**alpha c))`` implied by (C, alpha) boundedness."""
    if alpha < 0 or c < 1:
        raise DomainError(f"need alpha >= 0 and c >= 1, got ({alpha}, {c})")
    return RKParams(0.0, alpha + 1.0, max(1.0, 2.0 ** alpha * c))


# -- l^p norms and interpolation ----------------------------------------------


def _parse_p(p) -> float:
    if isinstance(p, str):
        p = p.strip().lower()
        if p in ("inf", "infinity", "∞"):
            return math.inf
        p = float(p)
    return float(p)


def lp_operator_norm(t, p) -> float:
    t = as_matrix(t)
    p = _parse_p(p)
    a = np.abs(t)
    if p == 1:
        return float(a.sum(axis=0).max())
    if p == math.inf:
        return float(a.sum(axis=1).max())
    if p == 2:
        return float(singular_values(t)[0])
    raise DomainError(f"p must be 1, 2 or inf, got {p}")


def interpolated_exponent(p0, p1, theta: float) -> float:
    """``p`` with ``1/p = (1 - theta)/p0 + theta/p1``."""
    p0, p1 = _parse_p(p0), _parse_p(p1)
    inv = (1 - theta) / p0 + theta / p1
    return math.inf if inv == 0 else 1.0 / inv


def interpolate_rk(c0: float, p0, c1: float, p1, theta: float) -> tuple[float, RKParams]:
    """Kreiss constant ``c0`` on ``l^p0`` and Ritt constant ``c1`` on ``l^p1`` give a
    ``(theta, 1 - theta)`` bound on ``l^p`` with constant ``c0**(1-theta) c1**theta``."""
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    for q in (_parse_p(p0), _parse_p(p1)):
        if not q >= 1:
            raise DomainError(f"exponents must be >= 1, got {q}")
    p = interpolated_exponent(p0, p1, theta)
    return p, RKParams(theta, 1.0 - theta, c0 ** (1 - theta) * c1 ** theta)


@dataclass(frozen=True)
class LpRatioReport:
    max_ratio: float
    bound: float
    samples: int
    passed: bool

    def as_dict(self) -> dict:
        return {"max_ratio": self.max_ratio, "bound": self.bound,
                "samples": self.samples, "passed": self.passed}


RATIO_RTOL = 1e-12


def random_vectors(rng: np.random.Generator, samples: int, dim: int) -> np.ndarray:
    mag = rng.exponential(1.0, size=(samples, dim))
    phase = rng.uniform(0.0, 2 * math.pi, size=(samples, dim))
    return mag * np.exp(1j * phase)


def sampled_lp_ratio_check(t, lam, p: float, bound: float, samples: int, seed: int = 0) -> LpRatioReport:
    """Largest sampled ``||R(lam) x||_p / ||x||_p``; can falsify the bound, never certify it.

    ``passed`` allows a relative slack of 1e-12 for rounding.
    """
    t = as_matrix(t)
    lam = as_scalar(lam)
    if abs(lam) <= 1:
        raise DomainError("|lambda| must exceed 1")
    p = _parse_p(p)
    if not 1 < p < math.inf:
        raise DomainError(f"p must lie in (1, inf), got {p}")
    res = resolvent(t, lam)
    x = random_vectors(np.random.default_rng(seed), samples, t.shape[0])
    y = x @ res.T
    ratios = np.linalg.norm(y, ord=p, axis=1) / np.linalg.norm(x, ord=p, axis=1)
    m = float(ratios.max())
    return LpRatioReport(m, float(bound), int(samples), m <= bound * (1 + RATIO_RTOL))


# -- named presets -------------------------------------------------------------

PRESETS = ("diag", "stolz", "jordan", "cesaro-witness")


@dataclass(frozen=True)
class Preset:
    name: str
    matrix: np.ndarray
    spectrum: list
    description: str


def preset(name: str, **kw) -> Preset:
    """Build a named test operator.

    ``diag``: ``points`` (default 0.9, 0.5).  ``stolz``: ``sigma=2, a=1, count=20``.
    ``jordan``: ``rho=1, d=2``.  ``cesaro-witness``: Jordan block at -1, which is
    (C, 1) bounded while its powers grow linearly.
    """
    if name == "diag":
        pts = [as_scalar(z) for z in kw.get("points", (0.9, 0.5))]
        return Preset(name, diag_from_spectrum(pts), pts, "diagonal matrix")
    if name == "stolz":
        sigma, a, count = float(kw.get("sigma", 2.0)), float(kw.get("a", 1.0)), int(kw.get("count", 20))
        pts = stolz_spectrum(sigma, a, count)
        return Preset(name, diag_from_spectrum(pts), pts,
                      f"diagonal with {count} points on the boundary of the Stolz domain (sigma={sigma}, a={a})")
    if name == "jordan":
        rho, d = as_scalar(kw.get("rho", 1.0)), int(kw.get("d", 2))
        return Preset(name, jordan(rho, d), [rho] * d, f"{d}x{d} Jordan block at {rho}")
    if name == "cesaro-witness":
        return Preset(name, jordan(-1.0, 2), [complex(-1.0)] * 2,
                      "Jordan block at -1: Cesàro (C,1) bounded, powers grow like n")
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
