"""The (alpha, beta)-RK resolvent bound and its numerical verification.

An operator satisfies the bound when, for every ``|lam| > 1``::

    ||R(lam, T)|| <= C |lam|**(alpha + beta - 1) / (|lam - 1|**alpha * (|lam| - 1)**beta)

``alpha = 1, beta = 0`` is the Ritt condition and ``alpha = 0, beta = 1`` the
Kreiss condition.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .linalg_core import as_matrix, as_scalar, resolvent_norms

DEFAULT_SAFETY = 1.01


@dataclass(frozen=True)
class RKParams:
    alpha: float
    beta: float
    c: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError(f"alpha and beta must be >= 0, got ({self.alpha}, {self.beta})")
        if self.c < 1:
            raise DomainError(f"the constant must satisfy C >= 1, got {self.c}")

    @property
    def q(self) -> float:
        return 1.0 / self.c

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "c": self.c}


def _default_radii() -> tuple[float, ...]:
    return tuple(1.0 + np.logspace(-6, math.log10(9.0), 48))


def _default_angles() -> tuple[float, ...]:
    return tuple(2 * math.pi * np.arange(256) / 256)


@dataclass(frozen=True)
class LambdaGrid:
    """Polar grid on ``|lam| > 1``; radii are log-spaced in ``r - 1``."""

    radii: tuple[float, ...] = field(default_factory=_default_radii)
    angles: tuple[float, ...] = field(default_factory=_default_angles)

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not self.radii or not self.angles:
            raise DomainError("grid must be non-empty")
        if min(self.radii) <= 1.0:
            raise DomainError("all grid radii must be > 1")

    @classmethod
    def make(cls, n_radii=48, n_angles=256, min_offset=1e-6, max_offset=9.0) -> "LambdaGrid":
        radii = 1.0 + np.logspace(math.log10(min_offset), math.log10(max_offset), n_radii)
        angles = 2 * math.pi * np.arange(n_angles) / n_angles
        return cls(tuple(radii), tuple(angles))

    def refined(self, density: int = 4, extend_decades: float = 2.0) -> "LambdaGrid":
        """A denser grid that also reaches ``extend_decades`` closer to the unit circle.

        Used to probe whether an estimated constant is stable or diverging.
        """
        offsets = np.array(self.radii) - 1.0
        lo, hi = offsets.min(), offsets.max()
        return LambdaGrid.make(
            n_radii=density * len(self.radii),
            n_angles=density * len(self.angles),
            min_offset=lo * 10.0 ** (-extend_decades),
            max_offset=hi,
        )

    def points(self) -> np.ndarray:
        """All grid points, radius-major: shape ``(len(radii), len(angles))``."""
        r = np.array(self.radii)[:, None]
        th = np.array(self.angles)[None, :]
        return r * np.exp(1j * th)


def _check_outside(lam: complex) -> None:
    if abs(lam) <= 1.0:
        raise DomainError(f"|lambda| must exceed 1, got |{lam!r}| = {abs(lam)}")


def rk_bound(lam, params: RKParams) -> float:
    """Right-hand side of the resolvent bound at ``lam``."""
    lam = as_scalar(lam)
    _check_outside(lam)
    m = abs(lam)
    return params.c * m ** (params.alpha + params.beta - 1) / (
        abs(lam - 1) ** params.alpha * (m - 1) ** params.beta
    )


def _weights(lams: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    m = np.abs(lams)
    return np.abs(lams - 1) ** alpha * (m - 1) ** beta * m ** (1 - alpha - beta)


def rk_ratio(t, lam, alpha: float, beta: float) -> float:
    """Smallest ``C`` for which the bound holds at this single ``lam``."""
    lam = as_scalar(lam)
    _check_outside(lam)
    lams = np.array([lam])
    return float(resolvent_norms(t, lams)[0] * _weights(lams, alpha, beta)[0])


def rk_ratios(t, lams, alpha: float, beta: float) -> np.ndarray:
    lams = np.asarray(lams, dtype=np.complex128)
    if np.any(np.abs(lams) <= 1.0):
        raise DomainError("all lambda must satisfy |lambda| > 1")
    return resolvent_norms(t, lams) * _weights(lams, alpha, beta)


@dataclass(frozen=True)
class MinCEstimate:
    c_hat: float
    argmax: complex
    ratios: np.ndarray  # shape (len(radii), len(angles))


def estimate_min_c(t, alpha: float, beta: float, grid: LambdaGrid | None = None,
                   workers: int = 1) -> MinCEstimate:
    """Maximum of :func:`rk_ratio` over the grid (a lower bound for the true minimal C).

    With ``workers > 1`` radii are swept in a thread pool; the result does not
    depend on ``workers`` (ties resolve to the smallest radius index, then the
    smallest angle index).
    """
    t = as_matrix(t)
    grid = grid or LambdaGrid()
    pts = grid.points()

    def row(i):
        return rk_ratios(t, pts[i], alpha, beta)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(pts.shape[0])))
    else:
        rows = [row(i) for i in range(pts.shape[0])]
    ratios = np.vstack(rows)
    flat = int(np.argmax(ratios))
    i, j = divmod(flat, ratios.shape[1])
    return MinCEstimate(float(ratios[i, j]), complex(pts[i, j]), ratios)


def pointwise_inclusion_bounds(lam, alpha: float, beta: float, c: float) -> tuple[float, float, float]:
    """The bounds for ``(alpha+beta, 0)``, ``(alpha, beta)`` and ``(0, alpha+beta)`` at ``lam``.

    Always non-decreasing because ``|lam| - 1 <= |lam - 1|``.
    """
    s = alpha + beta
    return (
        rk_bound(lam, RKParams(s, 0.0, c)),
        rk_bound(lam, RKParams(alpha, beta, c)),
        rk_bound(lam, RKParams(0.0, s, c)),
    )


def torus_constant(params: RKParams) -> float:
    """Constant ``C_{alpha,beta}`` of the boundary estimate on the unit circle (needs beta < 1)."""
    a, b, c = params.alpha, params.beta, params.c
    if b >= 1:
        raise DomainError(f"torus constant needs beta < 1, got beta = {b}")
    if b == 0:
        return c
    base = c ** (1 / (1 - b)) / (b ** (b / (1 - b)) * (1 - b))
    if a + b > 1:
        base *= 2 ** (a / (1 - b))
    return base


def torus_exponent(params: RKParams) -> float:
    if params.beta >= 1:
        raise DomainError(f"torus exponent needs beta < 1, got beta = {params.beta}")
    return params.alpha / (1 - params.beta)


def torus_bound(theta: float, params: RKParams) -> float:
    """``C_{alpha,beta} / |e^{i theta} - 1|**(alpha / (1 - beta))``."""
    s = abs(math.sin(theta / 2))
    if s == 0.0 or math.isclose(math.remainder(theta, 2 * math.pi), 0.0, abs_tol=1e-15):
        raise DomainError("torus bound is undefined at theta = 0 mod 2*pi")
    return torus_constant(params) / (2 * s) ** torus_exponent(params)
