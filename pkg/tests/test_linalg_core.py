import json
import math

import numpy as np
import pytest

from rkcond.errors import SingularResolvent
from rkcond.linalg_core import (
    as_matrix,
    is_triangular,
    mat_power,
    matrix_from_dict,
    matrix_to_dict,
    read_matrix,
    resolvent,
    resolvent_norm,
    resolvent_norms,
    singular_extremes,
    singular_values,
    triangular_spectrum,
    write_matrix,
)

from conftest import random_triangular


def test_mat_power_identity():
    assert np.allclose(mat_power(np.eye(3), 5), np.eye(3))


def test_mat_power_scalar_diag():
    assert np.allclose(mat_power(np.diag([0.5]), 3), np.diag([0.125]))


def test_mat_power_nilpotent():
    assert np.array_equal(mat_power([[0, 1], [0, 0]], 2), np.zeros((2, 2)))


def test_mat_power_zero_is_identity():
    assert np.array_equal(mat_power([[2, 1], [3, 4]], 0), np.eye(2))


def test_mat_power_rejects_negative():
    with pytest.raises(ValueError):
        mat_power(np.eye(2), -1)


def test_singular_extremes_diag():
    smax, smin = singular_extremes(np.diag([3.0, 1.0]))
    assert smax == pytest.approx(3.0, rel=1e-14)
    assert smin == pytest.approx(1.0, rel=1e-14)


def test_singular_extremes_unitary(rng):
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    smax, smin = singular_extremes(q)
    assert smax == pytest.approx(1.0, abs=1e-13)
    assert smin == pytest.approx(1.0, abs=1e-13)


def test_singular_extremes_shear():
    # A^H A has eigenvalues (3 +- sqrt 5) / 2
    smax, smin = singular_extremes([[1, 1], [0, 1]])
    assert smax == pytest.approx(math.sqrt((3 + math.sqrt(5)) / 2), rel=1e-14)
    assert smin == pytest.approx(math.sqrt((3 - math.sqrt(5)) / 2), rel=1e-14)
    assert smax == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-14)


def test_singular_values_match_lapack(rng):
    for dim in (1, 2, 3, 7, 16, 33):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        ref = np.linalg.svd(a, compute_uv=False)
        assert np.allclose(singular_values(a), ref, rtol=1e-12, atol=0)


def test_singular_values_batched(rng):
    a = rng.normal(size=(4, 3, 5, 5)) + 1j * rng.normal(size=(4, 3, 5, 5))
    sv = singular_values(a)
    assert sv.shape == (4, 3, 5)
    assert np.allclose(sv, np.linalg.svd(a, compute_uv=False), rtol=1e-12)


def test_singular_values_huge_entries_do_not_overflow():
    sv = singular_values(np.diag([1e250, 3e249]))
    assert sv[0] == pytest.approx(1e250, rel=1e-14)


def test_singular_values_zero_matrix():
    assert np.array_equal(singular_values(np.zeros((3, 3))), np.zeros(3))


def test_singular_values_phase_invariance(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    d1 = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 6)))
    d2 = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 6)))
    assert np.allclose(singular_values(d1 @ a @ d2), singular_values(a), rtol=1e-12)


def test_resolvent_norm_zero_matrix():
    assert resolvent_norm(np.zeros((2, 2)), 2) == pytest.approx(0.5, rel=1e-15)


def test_resolvent_norm_diagonal(rng):
    d = rng.normal(size=6) + 1j * rng.normal(size=6)
    lam = 3 + 0.5j
    assert resolvent_norm(np.diag(d), lam) == pytest.approx(1 / np.min(np.abs(lam - d)), rel=1e-12)


def test_resolvent_norm_shear_at_two():
    t = np.array([[1, 1], [0, 1]])
    inv = np.linalg.inv(2 * np.eye(2) - t)
    expected = np.linalg.svd(inv, compute_uv=False)[0]
    assert resolvent_norm(t, 2) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-13)


def test_resolvent_norm_times_sigma_min(rng):
    t = random_triangular(rng, 5)
    for lam in (1.5, -2j, 1.01 + 0.3j):
        smin = np.linalg.svd(lam * np.eye(5) - t, compute_uv=False)[-1]
        assert resolvent_norm(t, lam) * smin == pytest.approx(1.0, rel=1e-12)


def test_resolvent_singular_raises():
    with pytest.raises(SingularResolvent) as info:
        resolvent_norm(np.diag([0.5, 2.0]), 2.0)
    assert info.value.lam == 2.0


def test_resolvent_norms_reports_first_singular_point():
    with pytest.raises(SingularResolvent) as info:
        resolvent_norms(np.diag([2.0, 3.0]), [5.0, 3.0, 2.0])
    assert info.value.lam == 3.0


def test_resolvent_matrix():
    t = np.array([[0.5, 1], [0, 0.25]])
    assert np.allclose(resolvent(t, 2) @ (2 * np.eye(2) - t), np.eye(2))


def test_as_matrix_validation():
    with pytest.raises(ValueError):
        as_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((513, 513)))
    assert as_matrix(2.0).shape == (1, 1)


def test_triangular_helpers():
    t = np.array([[1, 2], [0, 3]])
    assert is_triangular(t)
    assert triangular_spectrum(t) == [1, 3]
    with pytest.raises(ValueError):
        triangular_spectrum([[1, 2], [3, 4]])


def test_matrix_json_round_trip(tmp_path, rng):
    t = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    path = tmp_path / "m.json"
    write_matrix(path, t, spectrum=[1, 2j])
    back, spec = read_matrix(path)
    assert np.array_equal(back, t)
    assert spec == [1, 2j]


def test_matrix_json_rejects_wrong_length():
    with pytest.raises(ValueError):
        matrix_from_dict({"dim": 2, "entries": [[1, 0]] * 3})
    with pytest.raises(ValueError):
        matrix_from_dict({"entries": []})
    with pytest.raises(ValueError):
        matrix_from_dict({"dim": 1, "entries": [[1, 0, 0]]})


def test_matrix_to_dict_layout():
    doc = matrix_to_dict([[1, 2j], [3, 4]])
    assert doc["dim"] == 2
    assert doc["entries"][1] == [0.0, 2.0]
    json.dumps(doc)
