import math

import numpy as np
import pytest

from rkcond.contour import (
    ContourSpec,
    contour_crosscheck,
    diff_contour_spec,
    diff_via_contour,
    fit_regime,
    fit_slopes,
    gelfand_radius,
    norm_sequence,
    power_contour_spec,
    power_via_contour,
    relative_error,
    report_from_sequences,
    sequence_csv,
)
from rkcond.errors import InsufficientData, OverflowGuard, SingularResolvent
from rkcond.growth import EXP_DECAY, POLY, POLY_LOG
from rkcond.linalg_core import mat_power
from rkcond.zoo import jordan, preset

from conftest import random_triangular


def test_contour_spec_validation():
    with pytest.raises(ValueError):
        ContourSpec(1.0, 128)
    with pytest.raises(ValueError):
        ContourSpec(1.1, 32)


def test_default_specs():
    s = power_contour_spec(10)
    assert s.radius == pytest.approx(1.1) and s.nodes >= 256
    assert diff_contour_spec(9, 2).radius == pytest.approx(1.2)
    assert diff_contour_spec(9, 0).radius == pytest.approx(1.1)
    assert power_contour_spec(100).nodes >= 800


def test_power_contour_examples():
    assert np.allclose(power_via_contour(np.diag([0.5]), 3, 0), [[0.125]], atol=1e-10)
    assert np.allclose(power_via_contour(np.eye(2), 7, 2), np.eye(2), atol=1e-10)


def test_power_contour_random_triangular(rng):
    t = random_triangular(rng, 6, radius=0.9)
    assert relative_error(power_via_contour(t, 20, 1), mat_power(t, 20)) <= 1e-8


def test_diff_contour_examples():
    assert np.allclose(diff_via_contour(np.eye(2), 5, 1), 0, atol=1e-10)
    assert np.allclose(diff_via_contour(np.diag([0.5]), 3, 0), [[-0.0625]], atol=1e-10)


def test_diff_contour_zoo_matrix():
    t = preset("stolz", count=6).matrix + np.triu(np.full((6, 6), 0.05), 1)
    exact = mat_power(t, 26) - mat_power(t, 25)
    assert relative_error(diff_via_contour(t, 25, 2), exact) <= 1e-8


def test_contour_explicit_spec_with_eight_n_nodes(rng):
    # the 8n node floor is enough at moderate spectral radius
    t = random_triangular(rng, 4, radius=0.7)
    n = 30
    spec = ContourSpec(1 + 1 / n, max(256, 8 * n))
    assert relative_error(power_via_contour(t, n, 2, spec), mat_power(t, n)) <= 1e-8


def test_doubling_nodes_does_not_hurt(rng):
    for _ in range(20):
        t = random_triangular(rng, int(rng.integers(2, 6)), radius=0.95)
        n, k = int(rng.integers(5, 40)), int(rng.integers(0, 4))
        exact = mat_power(t, n)
        errs = [relative_error(power_via_contour(t, n, k, ContourSpec(1 + 1 / n, nodes)), exact)
                for nodes in (64, 128, 256, 512)]
        floor = 10 * min(errs)  # round-off plateau
        for a, b in zip(errs, errs[1:]):
            assert b <= max(a, floor)


def test_contour_singular_node():
    # eigenvalue exactly on the default circle at lambda = r
    n = 4
    t = np.diag([1 + 1 / n])
    with pytest.raises(SingularResolvent):
        power_via_contour(t, n, 0)


def test_binomial_prefactor():
    n = 10 ** 5
    for k in range(5):
        assert math.comb(n + k, k) * n ** -k == pytest.approx(1 / math.factorial(k), rel=1e-3)


def test_crosscheck_rows(rng):
    rows = contour_crosscheck(random_triangular(rng, 3), [1, 10], k=1)
    assert [r["n"] for r in rows] == [1, 10]
    assert all(r["power_error"] < 1e-10 and r["diff_error"] < 1e-10 for r in rows)


def test_norm_sequence_gelfand_diag():
    rep = norm_sequence(np.diag([0.9, 0.5]), 200)
    assert rep.gelfand_estimate == pytest.approx(0.9, abs=1e-3)
    assert len(rep.n_values) == len(rep.power_norms) == len(rep.diff_norms) == 200
    assert np.all(rep.power_norms >= 0) and np.all(rep.diff_norms >= 0)


def test_norm_sequence_matches_direct(rng):
    t = random_triangular(rng, 4)
    rep = norm_sequence(t, 300, chunk=64)
    for n in (1, 64, 65, 300):
        assert rep.power_norms[n - 1] == pytest.approx(np.linalg.norm(mat_power(t, n), 2), rel=1e-10)
        d = mat_power(t, n + 1) - mat_power(t, n)
        assert rep.diff_norms[n - 1] == pytest.approx(np.linalg.norm(d, 2), rel=1e-9, abs=1e-300)


def test_norm_sequence_jordan_slope():
    rep = norm_sequence(jordan(1, 2), 1000)
    assert rep.fitted_power_slope == pytest.approx(1, abs=0.05)
    assert not rep.log_detected


def test_norm_sequence_ritt_preset():
    rep = norm_sequence(preset("stolz").matrix, 10 ** 4)
    assert abs(rep.fitted_power_slope) <= 0.05
    assert rep.fitted_diff_slope == pytest.approx(-1, abs=0.1)


def test_norm_sequence_overflow_keeps_partial():
    with pytest.raises(OverflowGuard) as info:
        norm_sequence(np.diag([10.0]), 1000)
    part = info.value.partial
    assert 0 < len(part.n_values) < 1000
    assert part.power_norms[-1] <= 1e300


def test_gelfand_triangular_zoo(rng):
    for _ in range(5):
        t = random_triangular(rng, 4, radius=0.9, offdiag=0.1)
        rep = norm_sequence(t, 1000)
        assert rep.gelfand_estimate == pytest.approx(np.abs(np.diag(t)).max(), abs=1e-2)
        assert gelfand_radius(t, 1000) == pytest.approx(rep.gelfand_estimate, rel=1e-10)


def test_fit_regime_mapping():
    n = np.arange(1, 401)
    p, d = fit_regime(report_from_sequences(n, np.ones(400) * 3, 2.0 / n))
    assert p.kind == POLY and p.exponent == pytest.approx(0, abs=1e-9)
    assert d.kind == POLY and d.exponent == pytest.approx(-1, abs=1e-9)
    p, _ = fit_regime(report_from_sequences(n, n.astype(float), 1.0 / n))
    assert p.kind == POLY and p.exponent == pytest.approx(1, abs=1e-9)


def test_fit_regime_detects_log():
    n = np.arange(1, 2001)
    p, _ = fit_regime(report_from_sequences(n, n ** 0.4 * np.log(n), n ** -0.6))
    assert p.kind == POLY_LOG and p.exponent == pytest.approx(0.4, abs=1e-6)


def test_fit_regime_exp_decay():
    rep = norm_sequence(np.diag([0.5]), 100)
    p, d = fit_regime(rep)
    assert p.kind == EXP_DECAY and d.kind == EXP_DECAY


def test_fit_regime_needs_samples():
    n = np.arange(1, 41)
    with pytest.raises(InsufficientData):
        fit_regime(report_from_sequences(n, np.ones(40), np.ones(40)))


def test_fit_slopes_handles_zero_sequences():
    fit = fit_slopes([1, 2, 3], [0, 0, 0])
    assert math.isnan(fit.slope)


def test_fit_ignores_small_n():
    fit = fit_slopes(np.arange(1, 16), np.arange(1, 16) ** 2.0)
    assert math.isnan(fit.slope)


def test_sequence_csv_format():
    rep = norm_sequence(np.diag([0.5]), 3)
    lines = sequence_csv(rep).splitlines()
    assert lines[0] == "n,power_norm,diff_norm"
    assert lines[1] == "1,0.5,0.25"
    assert len(lines) == 4
