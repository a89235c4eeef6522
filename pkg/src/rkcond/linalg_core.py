"""Dense complex linear algebra for small square matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the validating constructor used at every public entry point.  Singular
values come from a one-sided (Hestenes) Jacobi iteration that is vectorised
over a leading batch axis, so a whole grid of shifted matrices ``lam*I - T``
can be processed in one call.
"""

from __future__ import annotations

import cmath
import json
import math
from pathlib import Path

import numpy as np

from .errors import SingularResolvent

MAX_DIM = 512
SINGULAR_RTOL = 1e-14

_JACOBI_TOL = 1e-15
_JACOBI_MAX_SWEEPS = 60


def as_scalar(z) -> complex:
    """Coerce to a finite Python complex."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex scalar: {z!r}")
    return z


def as_matrix(a) -> np.ndarray:
    """Validate and copy ``a`` into a square complex128 array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if not 1 <= m.shape[0] <= MAX_DIM:
        raise ValueError(f"matrix dimension must be in [1, {MAX_DIM}], got {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def mat_power(t, n: int) -> np.ndarray:
    """``T**n`` by binary exponentiation; ``T**0`` is the identity."""
    t = as_matrix(t)
    if n < 0:
        raise ValueError("n must be non-negative")
    result = identity(t.shape[0])
    base = t
    while n:
        if n & 1:
            result = result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # n even; every unordered pair appears exactly once over n - 1 rounds
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def singular_values(a) -> np.ndarray:
    """Singular values of one matrix or a stack of matrices, descending.

    Accepts shape ``(m, n)`` or ``(..., m, n)`` with ``m >= n``.  The columns
    are orthogonalised by complex Jacobi rotations; the singular values are
    the final column norms.
    """
    a = np.asarray(a, dtype=np.complex128)
    lead = a.shape[:-2]
    m, n = a.shape[-2:]
    if m < n:
        raise ValueError("singular_values expects m >= n")
    # work on columns as rows: x[b, j, :] is column j of matrix b
    x = np.array(a.reshape((-1, m, n)).swapaxes(1, 2))
    # scale each matrix to unit max entry so squared column norms cannot overflow
    mag = np.abs(x).max(axis=(1, 2)) if x.size else np.zeros(x.shape[0])
    mag = np.where(mag > 0, mag, 1.0)
    x /= mag[:, None, None]
    padded = n % 2 == 1 and n > 1
    if padded:
        x = np.concatenate([x, np.zeros((x.shape[0], 1, m), dtype=np.complex128)], axis=1)
    ncol = x.shape[1]
    rounds = _round_robin(ncol) if ncol > 1 else []

    for _ in range(_JACOBI_MAX_SWEEPS):
        worst = 0.0
        for p, q in rounds:
            xp = x[:, p, :]
            xq = x[:, q, :]
            alpha = np.einsum("bhm,bhm->bh", xp.conj(), xp).real
            beta = np.einsum("bhm,bhm->bh", xq.conj(), xq).real
            gamma = np.einsum("bhm,bhm->bh", xp.conj(), xq)
            g = np.abs(gamma)
            scale = np.sqrt(alpha * beta)
            active = (g > _JACOBI_TOL * scale) & (scale > 0)
            if not active.any():
                continue
            worst = max(worst, float(np.max(np.where(active, g / np.where(scale > 0, scale, 1.0), 0.0))))
            g_safe = np.where(active, g, 1.0)
            zeta = (beta - alpha) / (2.0 * g_safe)
            sign = np.where(zeta >= 0, 1.0, -1.0)
            t = sign / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            phase = np.where(active, gamma / g_safe, 1.0)
            bq = xq * phase.conj()[..., None]
            c = c[..., None]
            s = s[..., None]
            x[:, p, :] = c * xp - s * bq
            x[:, q, :] = s * xp + c * bq
        if worst <= _JACOBI_TOL:
            break

    sv = np.sqrt(np.einsum("bjm,bjm->bj", x.conj(), x).real) * mag[:, None]
    if padded:
        sv = sv[:, :n]
    sv = -np.sort(-sv, axis=1)
    return sv.reshape(lead + (n,))


def singular_extremes(a) -> tuple[float, float]:
    """``(sigma_max, sigma_min)`` of a square matrix."""
    sv = singular_values(as_matrix(a))
    return float(sv[0]), float(sv[-1])


def _shifted(t: np.ndarray, lams: np.ndarray) -> np.ndarray:
    eye = identity(t.shape[0])
    return lams[:, None, None] * eye - t[None, :, :]


def resolvent_norms(t, lams) -> np.ndarray:
    """``||R(lam, T)||_2`` for every ``lam`` in ``lams`` (1-D).

    Raises :class:`SingularResolvent` for the first ``lam`` (in input order)
    where ``sigma_min(lam*I - T) < 1e-14 * sigma_max``.
    """
    t = as_matrix(t)
    lams = np.atleast_1d(np.asarray(lams, dtype=np.complex128))
    sv = singular_values(_shifted(t, lams))
    smax = sv[:, 0]
    smin = sv[:, -1]
    bad = smin <= SINGULAR_RTOL * smax
    if bad.any():
        i = int(np.argmax(bad))
        raise SingularResolvent(lams[i], float(smin[i]), float(smax[i]))
    return 1.0 / smin


def resolvent_norm(t, lam) -> float:
    """``||(lam*I - T)^{-1}||_2 = 1 / sigma_min(lam*I - T)``."""
    return float(resolvent_norms(t, [as_scalar(lam)])[0])


def resolvent(t, lam) -> np.ndarray:
    """The resolvent matrix itself (LAPACK solve), after the singularity check."""
    t = as_matrix(t)
    lam = as_scalar(lam)
    resolvent_norm(t, lam)
    return np.linalg.solve(lam * identity(t.shape[0]) - t, identity(t.shape[0]))


def is_triangular(t, atol: float = 0.0) -> bool:
    t = np.asarray(t)
    return bool(np.all(np.abs(np.tril(t, -1)) <= atol) or np.all(np.abs(np.triu(t, 1)) <= atol))


def triangular_spectrum(t) -> list[complex]:
    """Eigenvalues of a triangular matrix, read off the diagonal."""
    t = as_matrix(t)
    if not is_triangular(t):
        raise ValueError("matrix is not triangular; supply its spectrum explicitly")
    return [complex(z) for z in np.diag(t)]


# -- matrix file format ----------------------------------------------------


def _pairs_to_complex(pairs) -> list[complex]:
    out = []
    for pair in pairs:
        if isinstance(pair, (int, float)):
            out.append(as_scalar(pair))
            continue
        if len(pair) != 2:
            raise ValueError(f"complex entries are [re, im] pairs, got {pair!r}")
        out.append(as_scalar(complex(float(pair[0]), float(pair[1]))))
    return out


def matrix_from_dict(doc: dict) -> tuple[np.ndarray, list[complex] | None]:
    """Parse ``{"dim": d, "entries": [[re, im], ...]}`` (row-major, d*d entries).

    An optional ``"spectrum"`` list of ``[re, im]`` pairs is returned alongside
    the matrix for non-triangular inputs.
    """
    try:
        dim = doc["dim"]
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix document needs 'dim' and 'entries'") from exc
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError(f"'dim' must be a positive integer, got {dim!r}")
    if len(entries) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries for dim={dim}, got {len(entries)}")
    values = _pairs_to_complex(entries)
    mat = as_matrix(np.array(values).reshape(dim, dim))
    spectrum = doc.get("spectrum")
    if spectrum is not None:
        spectrum = _pairs_to_complex(spectrum)
    return mat, spectrum


def matrix_to_dict(t, spectrum=None) -> dict:
    t = as_matrix(t)
    doc = {
        "dim": int(t.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in t.reshape(-1)],
    }
    if spectrum is not None:
        doc["spectrum"] = [[float(complex(z).real), float(complex(z).imag)] for z in spectrum]
    return doc


def read_matrix(path) -> tuple[np.ndarray, list[complex] | None]:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_dict(json.load(fh))


def write_matrix(path, t, spectrum=None) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(t, spectrum)) + "\n", encoding="utf-8")


def unit_phase(theta: float) -> complex:
    return cmath.exp(1j * theta)
