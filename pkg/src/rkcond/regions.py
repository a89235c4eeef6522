"""Spectral localization regions implied by an (alpha, beta)-RK bound.

Region families (all subsets of the closed unit disk):

* ``ClosedUnitDisk`` -- no localization beyond ``|z| <= 1``.
* ``OpenDiskUnionOne`` -- ``|z| < 1`` together with the point 1.
* ``OmegaGap(q, a)`` -- ``|z| <= 1 - q |e^{i arg z} - 1|**a``, with ``z = 1`` excluded.
* ``SectorAtOne(omega)`` -- ``1 - closure(Sigma_omega)`` intersected with the disk.
* ``StolzClosure(sigma, a)`` -- closure of ``{|1 - z|**a < sigma (1 - |z|)} U {1}``.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .rk_condition import RKParams, torus_constant, torus_exponent

BISECT_TOL = 1e-12

CLOSED_UNIT_DISK = "ClosedUnitDisk"
OPEN_DISK_UNION_ONE = "OpenDiskUnionOne"
OMEGA_GAP = "OmegaGap"
SECTOR_AT_ONE = "SectorAtOne"
STOLZ_CLOSURE = "StolzClosure"

VARIANTS = (CLOSED_UNIT_DISK, OPEN_DISK_UNION_ONE, OMEGA_GAP, SECTOR_AT_ONE, STOLZ_CLOSURE)


@dataclass(frozen=True)
class RegionDescriptor:
    variant: str
    q: float | None = None
    a: float | None = None
    omega: float | None = None
    sigma: float | None = None
    provenance: str = ""
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        v = self.variant
        if v not in VARIANTS:
            raise DomainError(f"unknown region variant {v!r}")
        if v == OMEGA_GAP:
            if self.q is None or self.a is None or not (0 < self.q <= 1) or self.a < 0:
                raise DomainError(f"OmegaGap needs q in (0, 1] and a >= 0, got q={self.q}, a={self.a}")
        elif v == SECTOR_AT_ONE:
            if self.omega is None or not (0 <= self.omega < math.pi / 2):
                raise DomainError(f"SectorAtOne needs omega in [0, pi/2), got {self.omega}")
        elif v == STOLZ_CLOSURE:
            if self.sigma is None or self.a is None or self.sigma <= 0 or self.a < 1:
                raise DomainError(f"StolzClosure needs sigma > 0 and a >= 1, got sigma={self.sigma}, a={self.a}")

    @classmethod
    def disk(cls, provenance=""):
        return cls(CLOSED_UNIT_DISK, provenance=provenance)

    @classmethod
    def omega_gap(cls, q, a, provenance=""):
        return cls(OMEGA_GAP, q=float(q), a=float(a), provenance=provenance)

    @classmethod
    def sector(cls, omega, provenance=""):
        return cls(SECTOR_AT_ONE, omega=float(omega), provenance=provenance)

    @classmethod
    def stolz(cls, sigma, a=1.0, provenance="", notes=()):
        return cls(STOLZ_CLOSURE, sigma=float(sigma), a=float(a), provenance=provenance, notes=tuple(notes))

    def as_dict(self) -> dict:
        out = {"variant": self.variant}
        for key in ("q", "a", "omega", "sigma"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        out["provenance"] = self.provenance
        out["notes"] = list(self.notes)
        return out


def region_for(params: RKParams) -> RegionDescriptor:
    """Best proven localization of the spectrum for an (alpha, beta, C) triple."""
    a, b = params.alpha, params.beta
    if b >= 1:
        return RegionDescriptor.disk("beta >= 1: only the trivial bound |z| <= 1")
    c_ab = torus_constant(params)
    expo = torus_exponent(params)
    s = a + b
    if math.isclose(s, 1.0, rel_tol=0.0, abs_tol=1e-12):
        omega = math.acos(1.0 / c_ab)
        return RegionDescriptor.stolz(
            c_ab, 1.0,
            provenance="alpha + beta = 1: Ritt condition on the circle, Stolz domain with sigma = C_ab",
            notes=(f"sector angle omega = arccos(1/C_ab) = {omega!r}",),
        )
    if s < 1:
        return RegionDescriptor.omega_gap(
            1.0 / c_ab, expo,
            provenance="alpha + beta < 1: spectrum in the open disk, gap set Omega(1/C_ab, alpha/(1-beta))",
        )
    return RegionDescriptor.stolz(
        2.0 * c_ab, expo,
        provenance="alpha + beta > 1: alpha/(1-beta)-Stolz domain with sigma = 2 C_ab",
    )


def sector_for_ritt(params: RKParams) -> RegionDescriptor:
    """Sector form of the alpha + beta = 1 localization."""
    return RegionDescriptor.sector(math.acos(1.0 / torus_constant(params)),
                                   provenance="alpha + beta = 1: sector 1 - Sigma_omega")


def kreiss_floor_ok(params: RKParams) -> bool:
    """Whether ``C_{alpha,beta} >= 2**(alpha/(1-beta) - 1)``; smaller constants force an empty spectrum."""
    return torus_constant(params) >= 2.0 ** (torus_exponent(params) - 1.0)


# -- membership --------------------------------------------------------------


def _one_minus_modulus(z: complex) -> float:
    # 1 - |z| without cancellation near the unit circle: (1 - |z|^2) / (1 + |z|), 1 - |z|^2 = 2 Re w - |w|^2
    w = 1 - z
    return (2 * w.real - (w.real * w.real + w.imag * w.imag)) / (1 + abs(z))


def stolz_excess(z: complex, sigma: float, a: float) -> float:
    """``|1 - z|**a - sigma (1 - |z|)``; non-positive inside the Stolz closure."""
    return abs(1 - z) ** a - sigma * _one_minus_modulus(z)


def _stolz_degenerate(sigma: float, a: float) -> bool:
    # the open set is empty when sigma <= 1 and a == 1 (triangle inequality)
    return sigma <= 1 and a == 1


def omega_gap_radius(theta: float, q: float, a: float) -> float:
    """Outer radius ``max(0, 1 - q |e^{i theta} - 1|**a)`` of the gap set along ``theta``."""
    return max(0.0, 1.0 - q * (2 * abs(math.sin(theta / 2))) ** a)


def _contains(region: RegionDescriptor, z: complex, inflate: float) -> bool:
    v = region.variant
    if v == CLOSED_UNIT_DISK:
        return abs(z) <= 1.0 * (1 + inflate)
    if v == OPEN_DISK_UNION_ONE:
        return z == 1 or abs(z) < 1.0 + inflate
    if v == OMEGA_GAP:
        if z == 1:
            return False
        return abs(z) <= omega_gap_radius(cmath.phase(z), region.q, region.a) * (1 + inflate)
    if v == SECTOR_AT_ONE:
        if z == 1:
            return True
        if abs(z) > 1.0 * (1 + inflate):
            return False
        return abs(cmath.phase(1 - z)) <= region.omega * (1 + inflate)
    # Stolz closure
    if z == 1:
        return True
    sigma = region.sigma * (1 + inflate)
    if abs(z) > 1 or _stolz_degenerate(sigma, region.a):
        return False
    return stolz_excess(z, sigma, region.a) <= 0.0


def contains(region: RegionDescriptor, z) -> bool:
    """Exact membership test (boundary included where the family is closed)."""
    return _contains(region, complex(z), 0.0)


def region_margin(region: RegionDescriptor, z, inflate: float = 0.0) -> float:
    """Signed distance-like excess; positive values lie outside the (inflated) region."""
    z = complex(z)
    v = region.variant
    f = 1 + inflate
    if v in (CLOSED_UNIT_DISK, OPEN_DISK_UNION_ONE):
        return abs(z) - f
    if v == OMEGA_GAP:
        if z == 1:
            return 0.0  # excluded point; reported as a violation with zero margin
        return abs(z) - omega_gap_radius(cmath.phase(z), region.q, region.a) * f
    if v == SECTOR_AT_ONE:
        if z == 1:
            return 0.0
        return max(abs(z) - f, abs(cmath.phase(1 - z)) - region.omega * f)
    if z == 1:
        return 0.0
    return max(abs(z) - 1.0, stolz_excess(z, region.sigma * f, region.a))


@dataclass(frozen=True)
class SpectrumCheck:
    region: RegionDescriptor
    tol: float
    violations: tuple[tuple[complex, float], ...]
    max_margin: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "tol": self.tol,
            "max_margin": self.max_margin,
            "violations": [{"re": z.real, "im": z.imag, "margin": m} for z, m in self.violations],
        }


def check_spectrum(eigs, region: RegionDescriptor, tol: float = 0.0) -> SpectrumCheck:
    """Test each eigenvalue against ``region`` inflated by the relative tolerance ``tol``."""
    if tol < 0:
        raise DomainError("tol must be >= 0")
    violations = []
    worst = -math.inf
    for z in eigs:
        z = complex(z)
        margin = region_margin(region, z, tol)
        worst = max(worst, margin)
        if not _contains(region, z, tol):
            violations.append((z, margin))
    return SpectrumCheck(region, tol, tuple(violations), worst)


# -- boundaries --------------------------------------------------------------


def _bisect(f, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    """Root of ``f`` between ``lo`` (f <= 0) and ``hi`` (f > 0); returns the inside end."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def _stolz_radius_from_origin(theta: float, sigma: float, a: float) -> float:
    u = cmath.exp(1j * theta)
    if math.sin(theta / 2) == 0:
        return 1.0
    return _bisect(lambda r: stolz_excess(r * u, sigma, a), 0.0, 1.0)


def _stolz_point_from_one(phi: float, sigma: float, a: float) -> complex | None:
    d = cmath.exp(1j * phi)
    hi = 2 * math.cos(phi)

    def f(rho):
        return stolz_excess(1 - rho * d, sigma, a)

    lo = 1e-12
    if f(lo) > 0:
        return None
    return 1 - _bisect(f, lo, hi) * d


def boundary_points(region: RegionDescriptor, n: int, workers: int = 1) -> list[complex]:
    """``n`` points on the region boundary, ordered by angle.

    Disk, gap and Stolz boundaries are traced radially at ``theta_k = 2 pi k / n``;
    Stolz radii are found by bisection to ``1e-12``.
    """
    if n < 4:
        raise DomainError("need at least 4 boundary points")
    thetas = [2 * math.pi * k / n for k in range(n)]
    v = region.variant
    if v in (CLOSED_UNIT_DISK, OPEN_DISK_UNION_ONE):
        return [cmath.exp(1j * th) for th in thetas]
    if v == OMEGA_GAP:
        return [omega_gap_radius(th, region.q, region.a) * cmath.exp(1j * th) for th in thetas]
    if v == SECTOR_AT_ONE:
        return _sector_boundary(region.omega, n)
    sigma, a = region.sigma, region.a
    if _stolz_degenerate(sigma, a):
        return [1.0 + 0j] * n
    if sigma > 1:
        def point(th):
            return _stolz_radius_from_origin(th, sigma, a) * cmath.exp(1j * th)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(point, thetas))
        return [point(th) for th in thetas]
    # 0 is outside: trace rays from z = 1 instead
    phis = [-math.pi / 2 + math.pi * (k + 0.5) / n for k in range(n)]
    pts = [p for p in (_stolz_point_from_one(phi, sigma, a) for phi in phis) if p is not None]
    return sorted(pts, key=lambda z: cmath.phase(z) % (2 * math.pi))


def _sector_boundary(omega: float, n: int) -> list[complex]:
    # two rays from 1 at angles pi -/+ omega, each running to the unit circle, plus the arc between
    pts = []
    half = n // 3
    for sgn in (1, -1):
        d = cmath.exp(1j * sgn * (math.pi - omega))
        # |1 + t d| = 1 -> t = -2 Re d
        t_end = -2 * d.real
        pts += [1 + t_end * (k + 1) / half * d for k in range(half)]
    end_angle = cmath.phase(pts[half - 1])
    rest = n - 2 * half
    arc = [cmath.exp(1j * (end_angle + (2 * math.pi - 2 * end_angle) * (k + 1) / (rest + 1))) for k in range(rest)]
    pts = [complex(1.0)] + pts + arc
    return sorted(pts[:n], key=lambda z: cmath.phase(z) % (2 * math.pi))


def boundary_residual(region: RegionDescriptor, z: complex) -> float:
    """Residual of the defining boundary equation at ``z``."""
    v = region.variant
    z = complex(z)
    if v in (CLOSED_UNIT_DISK, OPEN_DISK_UNION_ONE):
        return abs(abs(z) - 1.0)
    if v == OMEGA_GAP:
        return abs(abs(z) - omega_gap_radius(cmath.phase(z), region.q, region.a))
    if v == SECTOR_AT_ONE:
        if z == 1 or abs(abs(z) - 1) < 1e-12:
            return 0.0
        return abs(abs(cmath.phase(1 - z)) - region.omega)
    if z == 1:
        return 0.0
    return abs(stolz_excess(z, region.sigma, region.a))


def stolz_curve(sigma: float, a: float, rho: float) -> complex:
    """Upper-half-plane point with ``|1 - z| = rho`` on ``|1 - z|**a = sigma (1 - |z|)``.

    Solved by bisection on the angle ``phi`` of ``1 - z``; returns the endpoint
    inside the closure so that ``contains`` holds exactly.
    """
    def z_of(phi):
        return 1 - rho * cmath.exp(-1j * phi)

    def f(phi):
        return stolz_excess(z_of(phi), sigma, a)

    lo, hi = 0.0, math.pi / 2
    if f(lo) > 0 or f(hi) <= 0:
        return None
    return z_of(_bisect(f, lo, hi))


def unit_disk_path(n: int = 720) -> np.ndarray:
    th = 2 * np.pi * np.arange(n) / n
    return np.exp(1j * th)
