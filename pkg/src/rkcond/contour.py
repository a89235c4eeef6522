"""Cauchy-integral representations of T^n and T^{n+1} - T^n, and measured norm sequences.

After ``k`` integrations by parts::

    T^n = C(n+k, k)^{-1} (2 pi i)^{-1} oint lam^{n+k} R(lam)^{k+1} dlam
    T^{n+1} - T^n = C(n+k+1, k)^{-1} (2 pi i)^{-1} oint lam^{n+k} (lam - s) R(lam)^{k+1} dlam

with ``s = 1 + k/(n+1)``.  The contour is the circle ``|lam| = r`` and the
trapezoid rule on it converges geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData, OverflowGuard, SingularResolvent
from .growth import EXP_DECAY, GrowthRegime, poly
from .linalg_core import as_matrix, identity, mat_power, singular_values

OVERFLOW_CEILING = 1e300
MIN_NODES = 64
_CHUNK = 2048
_COND_LIMIT = 1e14


@dataclass(frozen=True)
class ContourSpec:
    radius: float
    nodes: int

    def __post_init__(self):
        if not self.radius > 1:
            raise ValueError(f"contour radius must exceed 1, got {self.radius}")
        if self.nodes < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes, got {self.nodes}")


def default_nodes(n: int, radius: float) -> int:
    # floor of 8n for the lam^n oscillation; the log term keeps the aliasing factor r^{-N} below e^{-32}
    return max(256, 8 * n, math.ceil(32.0 / math.log(radius)))


def power_contour_spec(n: int) -> ContourSpec:
    r = 1.0 + 1.0 / n
    return ContourSpec(r, default_nodes(n, r))


def diff_contour_spec(n: int, k: int) -> ContourSpec:
    r = 1.0 + (k if k >= 1 else 1) / (n + 1)
    return ContourSpec(r, default_nodes(n, r))


def _quadrature(t: np.ndarray, spec: ContourSpec, lam_exp: int, k: int, shift: float | None) -> np.ndarray:
    """``(1/N) sum_j lam_j^{lam_exp+1} [lam_j - shift] R(lam_j)^{k+1}`` summed in node order."""
    d = t.shape[0]
    eye = identity(d)
    big_n = spec.nodes
    acc = np.zeros((d, d), dtype=np.complex128)
    idx_all = np.arange(big_n)
    for start in range(0, big_n, _CHUNK):
        idx = idx_all[start:start + _CHUNK]
        lam = spec.radius * np.exp(2j * np.pi * idx / big_n)
        # phase of lam^{p} from exact integer arithmetic
        p = lam_exp + 1
        w = spec.radius ** p * np.exp(2j * np.pi * ((p * idx) % big_n) / big_n)
        if shift is not None:
            w = w * (lam - shift)
        shifted = lam[:, None, None] * eye - t
        try:
            res = np.linalg.inv(shifted)
        except np.linalg.LinAlgError:
            raise SingularResolvent(complex(lam[0])) from None
        cond = np.linalg.norm(shifted, axis=(1, 2)) * np.linalg.norm(res, axis=(1, 2))
        bad = ~np.isfinite(cond) | (cond > _COND_LIMIT * d)
        if bad.any():
            raise SingularResolvent(complex(lam[int(np.argmax(bad))]))
        term = res
        for _ in range(k):
            term = term @ res
        acc += np.einsum("j,jab->ab", w, term)
    return acc / big_n


def power_via_contour(t, n: int, k: int = 0, spec: ContourSpec | None = None) -> np.ndarray:
    """Approximate ``T^n`` by the k-fold integrated Cauchy formula (default radius ``1 + 1/n``)."""
    t = as_matrix(t)
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    spec = spec or power_contour_spec(n)
    return _quadrature(t, spec, n + k, k, None) / math.comb(n + k, k)


def diff_via_contour(t, n: int, k: int = 0, spec: ContourSpec | None = None) -> np.ndarray:
    """Approximate ``T^{n+1} - T^n``; default radius ``1 + k/(n+1)`` (``1 + 1/(n+1)`` for k = 0)."""
    t = as_matrix(t)
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    spec = spec or diff_contour_spec(n, k)
    shift = 1.0 + k / (n + 1)
    return _quadrature(t, spec, n + k, k, shift) / math.comb(n + k + 1, k)


def relative_error(approx, exact) -> float:
    scale = np.linalg.norm(exact)
    err = np.linalg.norm(np.asarray(approx) - np.asarray(exact))
    return float(err / scale) if scale > 0 else float(err)


def contour_crosscheck(t, ns, k: int = 1) -> list[dict]:
    """Relative Frobenius error of the contour formulas against direct powers at each ``n``."""
    t = as_matrix(t)
    out = []
    for n in ns:
        pn = mat_power(t, n)
        pn1 = t @ pn
        out.append({
            "n": int(n),
            "power_error": relative_error(power_via_contour(t, n, k), pn),
            "diff_error": relative_error(diff_via_contour(t, n, k), pn1 - pn),
        })
    return out


# -- measured sequences ------------------------------------------------------

LOG_T_THRESHOLD = 4.0
MIN_FIT_N = 16  # transients below this are never fitted


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    samples: int
    log_coef: float = 0.0
    log_slope: float = float("nan")   # slope of the log-augmented fit
    log_t: float = 0.0
    log_detected: bool = False
    exp_rate: float = 0.0             # d(log y)/dn of the log-linear fit
    exp_r2: float = 0.0
    loglog_r2: float = 0.0
    exp_drop: float = 0.0             # decay of log y across the window (nats)

    @property
    def exp_decay(self) -> bool:
        return (self.exp_rate < 0 and self.exp_r2 >= 0.999 and self.exp_r2 > self.loglog_r2
                and self.exp_drop >= math.log(10.0))


def _r2(y, yhat) -> float:
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0
    return 1.0 - ss_res / ss_tot


def fit_slopes(n_values, norms) -> SlopeFit:
    """Log-log slope, a log-factor test and a log-linear (exponential) fit over ``n >= 16``.

    The log test regresses ``log y`` on ``[1, log n, log log n]``; a factor is
    reported when the ``log log n`` coefficient has t-statistic above 4 and
    lies in ``[0.5, 1.5]``.
    """
    n = np.asarray(n_values, dtype=float)
    y = np.asarray(norms, dtype=float)
    mask = (y > 0) & (n >= MIN_FIT_N)
    n, y = n[mask], y[mask]
    if len(n) < 3:
        return SlopeFit(float("nan"), float("nan"), int(len(n)))
    ln, ly = np.log(n), np.log(y)
    slope, intercept = np.polyfit(ln, ly, 1)
    loglog_r2 = _r2(ly, slope * ln + intercept)

    x = np.column_stack([np.ones_like(ln), ln, np.log(ln)])
    coef, _, rank, _ = np.linalg.lstsq(x, ly, rcond=None)
    resid = ly - x @ coef
    dof = len(ly) - 3
    log_t = 0.0
    if rank == 3 and dof > 0:
        s2 = float(resid @ resid) / dof
        cov = np.linalg.inv(x.T @ x)
        se = math.sqrt(max(s2 * cov[2, 2], 0.0))
        if se > 0:
            log_t = float(coef[2] / se)
        elif abs(coef[2]) > 1e-8:
            log_t = math.copysign(math.inf, coef[2])
    log_detected = bool(log_t > LOG_T_THRESHOLD and 0.5 <= coef[2] <= 1.5)

    rate, b0 = np.polyfit(n, ly, 1)
    exp_r2 = _r2(ly, rate * n + b0)
    return SlopeFit(
        slope=float(slope), intercept=float(intercept), samples=int(len(n)),
        log_coef=float(coef[2]), log_slope=float(coef[1]), log_t=log_t, log_detected=log_detected,
        exp_rate=float(rate), exp_r2=exp_r2, loglog_r2=loglog_r2,
        exp_drop=float(-(rate * (n[-1] - n[0]))),
    )


@dataclass(frozen=True)
class NormSequenceReport:
    n_values: np.ndarray
    power_norms: np.ndarray
    diff_norms: np.ndarray
    fitted_power_slope: float
    fitted_diff_slope: float
    log_detected: bool
    gelfand_estimate: float
    power_fit: SlopeFit = field(repr=False, default=None)
    diff_fit: SlopeFit = field(repr=False, default=None)
    window: tuple[int, int] = (1, 1)

    def as_dict(self) -> dict:
        def fnum(x):
            return None if not math.isfinite(x) else float(x)
        return {
            "n_max": int(self.n_values[-1]) if len(self.n_values) else 0,
            "fit_window": list(self.window),
            "fitted_power_slope": fnum(self.fitted_power_slope),
            "fitted_diff_slope": fnum(self.fitted_diff_slope),
            "log_detected": self.log_detected,
            "diff_log_detected": bool(self.diff_fit.log_detected) if self.diff_fit else False,
            "gelfand_estimate": fnum(self.gelfand_estimate),
        }


def fit_window(n_max: int) -> tuple[int, int]:
    return max(1, n_max // 4), n_max


def _build_report(ns, pn, dn, window) -> NormSequenceReport:
    lo, hi = window
    sel = (ns >= lo) & (ns <= hi)
    pfit = fit_slopes(ns[sel], pn[sel])
    dfit = fit_slopes(ns[sel], dn[sel])
    last = pn[-1] if len(pn) else 0.0
    gel = float(last ** (1.0 / ns[-1])) if len(ns) and last > 0 else 0.0
    return NormSequenceReport(ns, pn, dn, pfit.slope, dfit.slope, pfit.log_detected, gel, pfit, dfit, window)


def norm_sequence(t, n_max: int, chunk: int = 256) -> NormSequenceReport:
    """``||T^n||_2`` and ``||T^{n+1} - T^n||_2`` for ``n = 1..n_max`` by running products.

    Raises :class:`OverflowGuard` (with the truncated report in ``.partial``)
    once a power norm exceeds ``1e300``.
    """
    t = as_matrix(t)
    if not 1 <= n_max <= 10**6:
        raise ValueError("n_max must lie in [1, 1e6]")
    d = t.shape[0]
    power_norms = np.empty(n_max)
    diff_norms = np.empty(n_max)
    current = t.copy()  # T^1
    n = 1
    while n <= n_max:
        m = min(chunk, n_max - n + 1)
        stack = np.empty((m + 1, d, d), dtype=np.complex128)
        stack[0] = current
        stop = None
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(1, m + 1):
                stack[i] = t @ stack[i - 1]
                if not np.all(np.isfinite(stack[i])) or np.abs(stack[i]).max() > OVERFLOW_CEILING:
                    stop = i
                    break
        usable = m if stop is None else stop - 1
        pn = singular_values(stack[:usable])[:, 0] if usable else np.empty(0)
        dn = singular_values(stack[1:usable + 1] - stack[:usable])[:, 0] if usable else np.empty(0)
        over = pn > OVERFLOW_CEILING
        if stop is not None or over.any():
            keep = int(np.argmax(over)) if over.any() else usable
            end = n - 1 + keep
            power_norms[n - 1:end] = pn[:keep]
            diff_norms[n - 1:end] = dn[:keep]
            ns = np.arange(1, end + 1)
            partial = _build_report(ns, power_norms[:end], diff_norms[:end], fit_window(max(end, 1)))
            raise OverflowGuard(f"||T^n|| exceeded {OVERFLOW_CEILING:g} near n = {end + 1}", partial)
        power_norms[n - 1:n - 1 + m] = pn
        diff_norms[n - 1:n - 1 + m] = dn
        current = stack[m]
        n += m
    ns = np.arange(1, n_max + 1)
    return _build_report(ns, power_norms, diff_norms, fit_window(n_max))


def _regime_from_fit(fit: SlopeFit, label: str) -> GrowthRegime:
    if fit.exp_decay:
        return GrowthRegime(EXP_DECAY, case="empirical", source=f"{label}: log-linear decay")
    if fit.log_detected:
        return poly(fit.log_slope, True, case="empirical", source=f"{label}: log factor detected")
    return poly(fit.slope, case="empirical", source=f"{label}: log-log slope")


def fit_regime(report: NormSequenceReport, min_samples: int = 32) -> tuple[GrowthRegime, GrowthRegime]:
    """Empirical ``(powers, differences)`` regimes from the fitted slopes."""
    if report.power_fit is None or report.power_fit.samples < min_samples:
        got = 0 if report.power_fit is None else report.power_fit.samples
        raise InsufficientData(f"need >= {min_samples} samples in the fit window, got {got}")
    if report.diff_fit.samples < 3:
        diff = GrowthRegime(EXP_DECAY, case="empirical", source="differences vanish")
    else:
        diff = _regime_from_fit(report.diff_fit, "differences")
    return _regime_from_fit(report.power_fit, "powers"), diff


def report_from_sequences(n_values, power_norms, diff_norms) -> NormSequenceReport:
    """Wrap externally produced sequences (e.g. synthetic ones) for :func:`fit_regime`."""
    ns = np.asarray(n_values, dtype=int)
    return _build_report(ns, np.asarray(power_norms, float), np.asarray(diff_norms, float),
                         fit_window(int(ns[-1])))


def gelfand_radius(t, n: int) -> float:
    """``||T^n||^{1/n}``, which tends to the spectral radius."""
    val = singular_values(mat_power(t, n))[0]
    return float(val ** (1.0 / n)) if val > 0 else 0.0


def sequence_csv(report: NormSequenceReport) -> str:
    lines = ["n,power_norm,diff_norm"]
    for n, p, d in zip(report.n_values, report.power_norms, report.diff_norms):
        lines.append(f"{int(n)},{p:.17g},{d:.17g}")
    return "\n".join(lines) + "\n"
