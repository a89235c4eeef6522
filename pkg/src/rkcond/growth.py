"""Asymptotic growth of ||T^n|| and ||T^{n+1} - T^n|| for (alpha, beta)-RK operators.

Regimes are compared under a total order: exponential decay first, then
``n^e (log n)^p`` ordered by ``e`` and, for equal ``e``, by ``p``.  Only
exponents are tracked; the constants in front are never needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.integrate import quad

from .errors import DomainError

EXP_DECAY = "ExpDecay"
POLY = "Poly"
POLY_LOG = "PolyLog"
SPECIAL = "Special"

K_MAX = 64
THRESHOLD_TOL = 1e-9  # alpha(k+1) compared against 1 or 2, and integer-inverse detection
TIE_TOL = 1e-12


@dataclass(frozen=True)
class GrowthRegime:
    kind: str
    exponent: float = 0.0
    has_log: bool = False
    log_inside_power: bool = False
    case: str = ""
    source: str = ""
    optimal_k: int | None = None

    def __post_init__(self):
        if self.kind == POLY and self.has_log:
            raise ValueError("Poly regime cannot carry a log factor")
        if self.kind == POLY_LOG and not self.has_log:
            raise ValueError("PolyLog regime must carry a log factor")
        if not math.isfinite(self.exponent):
            raise ValueError("exponent must be finite")

    @property
    def log_power(self) -> float:
        if not self.has_log:
            return 0.0
        # (log n / n)^p carries log^p; otherwise a single log factor
        return -self.exponent if self.log_inside_power else 1.0

    def sort_key(self) -> tuple:
        if self.kind == EXP_DECAY:
            return (0, 0.0, 0.0)
        return (1, self.exponent, self.log_power)

    def describe(self) -> str:
        if self.kind == EXP_DECAY:
            return "O(exp(-w n))"
        if self.log_inside_power:
            return f"O((log n / n)^{-self.exponent:g})"
        body = "1" if self.exponent == 0 else f"n^{self.exponent:g}"
        if self.has_log:
            body = "log n" if self.exponent == 0 else body + " log n"
        return f"O({body})"

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "exponent": self.exponent,
            "has_log": self.has_log,
            "log_inside_power": self.log_inside_power,
            "case": self.case,
            "optimal_k": self.optimal_k,
        }


def poly(exponent, has_log=False, **kw) -> GrowthRegime:
    return GrowthRegime(POLY_LOG if has_log else POLY, float(exponent), bool(has_log), **kw)


def regime_le(a: GrowthRegime, b: GrowthRegime, tol: float = 1e-10) -> bool:
    """``a`` grows no faster than ``b`` (exponents compared with tolerance)."""
    ka, kb = a.sort_key(), b.sort_key()
    if ka[0] != kb[0]:
        return ka[0] < kb[0]
    if ka[0] == 0:
        return True
    if ka[1] < kb[1] - tol:
        return True
    if ka[1] > kb[1] + tol:
        return False
    return ka[2] <= kb[2] + tol


def same_regime(a: GrowthRegime, b: GrowthRegime, tol: float = 1e-10) -> bool:
    return regime_le(a, b, tol) and regime_le(b, a, tol)


# -- the I and J integrals and their bounds ---------------------------------

CONSTANT = "Constant"
LOG = "Log"
POWER = "Power"

R_MAX = 1.5


def _check_r(r: float, gamma: float) -> None:
    if not (1.0 < r < R_MAX):
        raise DomainError(f"r must lie in (1, {R_MAX}), got {r}")
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")


def _half_period_quad(f, r: float) -> float:
    h = r - 1.0
    points = [p for p in (h, 10 * h, 100 * h) if p < math.pi]
    val, _ = quad(f, 0.0, math.pi, points=points, limit=500, epsabs=0.0, epsrel=1e-12)
    return 2.0 * val


def integral_I_numeric(r: float, gamma: float) -> float:
    """``int_{-pi}^{pi} |r e^{it} - 1|^{-gamma} dt`` by adaptive quadrature."""
    _check_r(r, gamma)
    return _half_period_quad(lambda t: (r * r + 1 - 2 * r * math.cos(t)) ** (-gamma / 2), r)


def integral_J_numeric(r: float, gamma: float) -> float:
    """``int_{-pi}^{pi} |e^{it} - 1| |r e^{it} - 1|^{-gamma} dt`` by adaptive quadrature."""
    _check_r(r, gamma)
    return _half_period_quad(
        lambda t: 2 * math.sin(t / 2) * (r * r + 1 - 2 * r * math.cos(t)) ** (-gamma / 2), r)


@dataclass(frozen=True)
class IntegralBound:
    gamma: float
    regime: str
    constant: float
    power_exponent: float = 0.0

    def value(self, r: float) -> float:
        h = r - 1.0
        if self.regime == CONSTANT:
            return self.constant
        if self.regime == LOG:
            return self.constant * math.log(1.0 / h)
        return self.constant * h ** self.power_exponent


def _is(x: float, target: float) -> bool:
    return abs(x - target) <= THRESHOLD_TOL


def integral_bound_I(r: float, gamma: float) -> IntegralBound:
    """Bound form of the I integral with explicit constants valid on ``(1, 1.5)``.

    gamma < 1: ``2^{1-gamma} pi / (1 - gamma)``; gamma = 1: ``pi asinh(4) / log 2``
    times ``log(1/(r-1))``; gamma > 1: ``pi gamma / (gamma - 1)`` times ``(r-1)^{1-gamma}``.
    """
    _check_r(r, gamma)
    if _is(gamma, 1.0):
        # pi * asinh(2/h) / log(1/h) increases on (0, 1/2); take its value at h = 1/2
        return IntegralBound(gamma, LOG, math.pi * math.asinh(4.0) / math.log(2.0))
    if gamma < 1:
        return IntegralBound(gamma, CONSTANT, 2 ** (1 - gamma) * math.pi / (1 - gamma))
    return IntegralBound(gamma, POWER, math.pi * gamma / (gamma - 1), 1.0 - gamma)


def integral_bound_J(r: float, gamma: float) -> IntegralBound:
    """Bound form of the J integral; the power regime has exponent ``2 - gamma``.

    Constants: gamma < 2: ``(pi^2/4) (4.25)^{1-gamma/2} / (1 - gamma/2)``;
    gamma = 2: ``(pi^2/4) log(17) / log 2``; gamma > 2: ``pi^2 / (2 (gamma - 2))``.
    """
    _check_r(r, gamma)
    k = math.pi ** 2 / 4
    if _is(gamma, 2.0):
        return IntegralBound(gamma, LOG, k * math.log(17.0) / math.log(2.0))
    if gamma < 2:
        e = 1 - gamma / 2
        return IntegralBound(gamma, CONSTANT, k * (0.25 + 4.0) ** e / e)
    return IntegralBound(gamma, POWER, math.pi ** 2 / (2 * (gamma - 2)), 2.0 - gamma)


# -- per-k exponents -------------------------------------------------------


def power_bound_exponent(alpha: float, beta: float, k: int) -> tuple[float, bool]:
    """Exponent (and log flag) of the power bound obtained with ``k`` integrations by parts."""
    if alpha < 0 or beta < 0 or k < 0:
        raise DomainError("alpha, beta, k must be non-negative")
    a = alpha * (k + 1)
    if _is(a, 1.0):
        return k * (beta - 1) + beta, True
    if a < 1:
        return k * (beta - 1) + beta, False
    return (alpha + beta - 1) * (k + 1), False


def diff_bound_exponent(alpha: float, beta: float, k: int) -> tuple[float, bool]:
    """Exponent (and log flag) of the difference bound with ``k`` integrations by parts."""
    if alpha < 0 or beta < 0 or k < 0:
        raise DomainError("alpha, beta, k must be non-negative")
    a = alpha * (k + 1)
    if _is(a, 2.0):
        return k * (beta - 1) + beta, True
    if a < 2:
        return k * (beta - 1) + beta, False
    return (alpha + beta - 1) * (k + 1) - 1, False


def best_over_k(exponent_fn, alpha: float, beta: float, k_max: int = K_MAX) -> GrowthRegime:
    """Smallest regime over ``k = 0..k_max`` under the total order (first minimiser wins)."""
    best = None
    for k in range(k_max + 1):
        e, lg = exponent_fn(alpha, beta, k)
        cand = poly(e, lg, optimal_k=k)
        if best is None or not regime_le(best, cand, tol=0.0):
            best = cand
    return best


# -- classification ----------------------------------------------------------


def _inverse_integer(alpha: float) -> int | None:
    inv = 1.0 / alpha
    m = round(inv)
    return m if abs(inv - m) < THRESHOLD_TOL else None


def classify_powers(alpha: float, beta: float) -> GrowthRegime:
    """Growth of ``||T^n||`` over the whole quadrant ``alpha, beta >= 0``."""
    if alpha < 0 or beta < 0:
        raise DomainError("alpha and beta must be >= 0")
    s = alpha + beta
    sum_is_one = abs(s - 1.0) <= TIE_TOL
    alpha_is_one = abs(alpha - 1.0) <= TIE_TOL

    if alpha > 1 and not alpha_is_one:
        return poly(s - 1, case="8", source="alpha > 1: k = 0", optimal_k=0)
    if alpha_is_one:
        if beta == 0:
            return poly(0.0, case="6", source="alpha = 1, beta = 0 (Ritt): k = 1", optimal_k=1)
        return poly(beta, True, case="7", source="alpha = 1, beta > 0: k = 0", optimal_k=0)
    # 0 <= alpha < 1
    if s < 1 and not sum_is_one:
        return GrowthRegime(EXP_DECAY, case="1",
                            source="alpha + beta < 1: spectral radius < 1")
    if alpha == 0:
        return poly(beta, case="2", source="alpha = 0, beta >= 1: k = 0", optimal_k=0)
    if beta >= 1:
        return poly(beta, case="5", source="0 < alpha < 1, beta >= 1: k = 0", optimal_k=0)
    if sum_is_one:
        return poly(0.0, case="3", source="0 < alpha < 1, alpha + beta = 1: smallest k with alpha(k+1) > 1",
                    optimal_k=int(math.floor(1.0 / alpha + THRESHOLD_TOL)))
    # case 4: 0 < alpha < 1, 0 < beta < 1, alpha + beta > 1
    excess = (s - 1) / alpha
    m1 = _inverse_integer(alpha)
    if m1 is not None:
        m = m1 - 1
        return poly(excess, True, case="4.1", source="alpha = 1/(m+1): k = m", optimal_k=m)
    fl = math.floor(1.0 / alpha)
    eta = 1.0 / alpha - fl
    e_low = fl * (beta - 1) + 1          # k = floor(1/alpha) - 1
    e_high = (s - 1) * (fl + 1)          # k = floor(1/alpha)
    if abs(eta - excess) <= TIE_TOL or abs(e_low - e_high) <= TIE_TOL:
        return poly(min(e_low, e_high), case="4.2.2",
                    source="eta = (alpha+beta-1)/alpha: both branches agree", optimal_k=fl - 1)
    if eta > excess:
        return poly(e_high, case="4.2.1", source="eta >= (alpha+beta-1)/alpha: k = floor(1/alpha)",
                    optimal_k=fl)
    return poly(e_low, case="4.2.2", source="eta <= (alpha+beta-1)/alpha: k = floor(1/alpha) - 1",
                optimal_k=fl - 1)


def classify_differences(alpha: float, beta: float) -> GrowthRegime:
    """Growth of ``||T^{n+1} - T^n||``: best of the k-family, the improved rate and the log-free case."""
    if alpha < 0 or beta < 0:
        raise DomainError("alpha and beta must be >= 0")
    powers = classify_powers(alpha, beta)
    if powers.kind == EXP_DECAY:
        # ||T^{n+1} - T^n|| <= (1 + ||T||) ||T^n||
        return replace(powers, source="inherits exponential decay of the powers")
    best = best_over_k(diff_bound_exponent, alpha, beta)
    best = replace(best, case="k-min", source=f"difference bound minimised over k <= {K_MAX}")
    candidates = [best]
    s = alpha + beta
    if beta < 1 and s >= 1 - TIE_TOL and alpha > 0:
        p = (1 - beta) / alpha
        candidates.append(GrowthRegime(POLY_LOG, -p, True, True, case="improved",
                                       source="beta < 1, alpha + beta >= 1: (log n / n)^((1-beta)/alpha)"))
    if abs(s - 1) <= TIE_TOL and alpha > 0:
        candidates.append(poly(-1.0, case="sum-one", source="alpha + beta = 1: log-free O(1/n)",
                               optimal_k=best.optimal_k))
    out = candidates[0]
    for cand in candidates[1:]:
        if not regime_le(out, cand, tol=1e-12):
            out = cand
    return out


def is_ritt(alpha: float, beta: float) -> bool:
    """Whether every (alpha, beta)-RK operator is Ritt: ``alpha + beta = 1`` and ``alpha > 0``."""
    return abs(alpha + beta - 1) <= TIE_TOL and alpha > 0


@dataclass(frozen=True)
class NoPairWitness:
    horn: str
    explanation: str

    def as_dict(self) -> dict:
        return {"horn": self.horn, "explanation": self.explanation}


def no_power_bounded_pair_witness(alpha: float, beta: float) -> NoPairWitness:
    """Why the (alpha, beta)-RK class is not exactly the power-bounded operators."""
    if abs(alpha + beta - 1) > TIE_TOL:
        return NoPairWitness(
            "inclusion",
            "Ritt operators are power bounded and power bounded operators are Kreiss, so the class "
            "would have to sit between RK(1,0) and RK(0,1), forcing alpha + beta = 1.")
    if beta < 1:
        return NoPairWitness(
            "ritt",
            "alpha + beta = 1 with beta < 1 makes every member Ritt, so every power bounded "
            "operator would be Ritt, which is false.")
    return NoPairWitness(
        "kreiss",
        "(0, 1)-RK is the Kreiss class, so every Kreiss operator would be power bounded, which is false.")
