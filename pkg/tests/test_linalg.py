import math

import numpy as np
import pytest

from pmoduli.errors import InvalidInputError
from pmoduli.linalg import (SingularSpectrum, SquareMatrix, determinant,
                            diagonal_singular_values, matrix_inverse,
                            singular_values)


def test_identity_spectrum():
    spec = singular_values(np.eye(3))
    assert spec.values == (1.0, 1.0, 1.0)
    assert spec.abs_det == 1.0


def test_rotation_spectrum():
    spec = singular_values(SquareMatrix.rotation_2d(0.7))
    assert spec.abs_det == pytest.approx(1.0, abs=1e-15)
    assert spec.values[0] == pytest.approx(1.0, rel=1e-14)
    assert spec.values[1] == pytest.approx(1.0, rel=1e-14)


def test_diagonal_spectrum():
    # singular values of a diagonal matrix are |entries| sorted descending
    spec = singular_values(np.diag([1.0, 1.0, 0.5 ** -0.4]))
    assert spec.values[0] == pytest.approx(2.0 ** 0.4, rel=1e-14)
    assert spec.values[1:] == (1.0, 1.0)
    assert spec.abs_det == pytest.approx(2.0 ** 0.4, rel=1e-14)


def test_determinant_examples():
    assert determinant(np.eye(4)) == 1.0
    assert determinant(np.diag([2.0, 3.0])) == 6.0
    for ang in (0.3, 1.2, -2.5):
        assert determinant(SquareMatrix.rotation_2d(ang)) == pytest.approx(
            1.0, abs=1e-15)


def test_determinant_triangular_exact():
    tri = np.array([[2.0, 5.0, -1.0], [0.0, 3.0, 7.0], [0.0, 0.0, -4.0]])
    assert determinant(tri) == -24.0


def test_nonfinite_rejected():
    with pytest.raises(InvalidInputError):
        singular_values(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        determinant(np.array([[np.inf, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        singular_values(np.ones((5, 5)))


def test_product_matches_determinant():
    rng = np.random.default_rng(42)
    for _ in range(10_000):
        n = int(rng.integers(2, 5))
        m = rng.uniform(-1.0, 1.0, size=(n, n))
        det = abs(determinant(m))
        if det < 1e-12:
            continue
        spec = singular_values(m)
        assert math.prod(spec.values) == pytest.approx(det, rel=1e-9)


def _random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def test_orthogonal_invariance():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        m = rng.uniform(-1.0, 1.0, size=(n, n))
        q = _random_orthogonal(rng, n)
        r = _random_orthogonal(rng, n)
        s1 = np.asarray(singular_values(m).values)
        s2 = np.asarray(singular_values(q @ m @ r).values)
        assert np.all(np.abs(s1 - s2) <= 1e-10 * max(1.0, s1[0]))


def test_scaling_invariance():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(2, 5))
        m = rng.uniform(-1.0, 1.0, size=(n, n))
        c = float(rng.uniform(-3.0, 3.0))
        if abs(c) < 1e-3:
            continue
        s1 = np.asarray(singular_values(m).values)
        s2 = np.asarray(singular_values(c * m).values)
        np.testing.assert_allclose(s2, abs(c) * s1, rtol=1e-12, atol=1e-300)


def test_spectrum_validation():
    with pytest.raises(InvalidInputError):
        SingularSpectrum(values=(1.0, 2.0), abs_det=2.0)  # not descending
    with pytest.raises(InvalidInputError):
        SingularSpectrum(values=(2.0, -1.0), abs_det=2.0)
    with pytest.raises(InvalidInputError):
        SingularSpectrum(values=(2.0, 2.0), abs_det=1.0)  # product mismatch


def test_square_matrix_validation():
    with pytest.raises(InvalidInputError):
        SquareMatrix(dim=2, entries=(1.0, 0.0, 0.0))
    with pytest.raises(InvalidInputError):
        SquareMatrix(dim=5, entries=(0.0,) * 25)


def test_diagonal_batch():
    diags = np.array([[3.0, -1.0, 0.5], [0.2, 2.0, -4.0]])
    out = diagonal_singular_values(diags)
    np.testing.assert_allclose(out, [[3.0, 1.0, 0.5], [4.0, 2.0, 0.2]])


def test_matrix_inverse_roundtrip():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        m = rng.uniform(-1.0, 1.0, size=(n, n)) + 2.0 * np.eye(n)
        np.testing.assert_allclose(matrix_inverse(m) @ m, np.eye(n),
                                   atol=1e-12)
