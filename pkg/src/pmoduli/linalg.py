"""Dense numerical kernel for small square matrices (n in {2, 3, 4}).

Provides exact cofactor determinants and the full singular spectrum via
one-sided Jacobi iteration.  Everything here is real arithmetic; the
matrices represent derivatives of mappings between domains of R^n, so
only tiny dimensions are supported and accuracy is preferred over speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SUPPORTED_DIMS = (2, 3, 4)

# Convergence of the Jacobi sweeps is measured on the off-diagonal part of
# the Gram matrix M^T M, whose entries scale like ||M||_F^2.
_JACOBI_RTOL = 1e-14
_MAX_SWEEPS = 60


def as_matrix_array(m) -> np.ndarray:
    """Coerce input to a validated (n, n) float array, n in {2, 3, 4}."""
    if isinstance(m, SquareMatrix):
        return m.to_array()
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in SUPPORTED_DIMS:
        raise InvalidInputError(f"matrix dimension must be one of {SUPPORTED_DIMS}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix entries must be finite")
    return a


@dataclass(frozen=True)
class SquareMatrix:
    """An n x n real matrix, stored row-major, n in {2, 3, 4}."""

    dim: int
    entries: tuple

    def __post_init__(self):
        if self.dim not in SUPPORTED_DIMS:
            raise InvalidInputError(f"dim must be one of {SUPPORTED_DIMS}")
        if len(self.entries) != self.dim * self.dim:
            raise InvalidInputError(
                f"expected {self.dim * self.dim} entries, got {len(self.entries)}"
            )
        if not all(math.isfinite(e) for e in self.entries):
            raise InvalidInputError("matrix entries must be finite")

    @classmethod
    def from_array(cls, a) -> "SquareMatrix":
        arr = as_matrix_array(a)
        return cls(dim=arr.shape[0], entries=tuple(float(v) for v in arr.ravel()))

    @classmethod
    def identity(cls, n: int) -> "SquareMatrix":
        return cls.from_array(np.eye(n))

    @classmethod
    def diagonal(cls, diag) -> "SquareMatrix":
        return cls.from_array(np.diag(np.asarray(diag, dtype=float)))

    @classmethod
    def rotation_2d(cls, angle: float) -> "SquareMatrix":
        c, s = math.cos(angle), math.sin(angle)
        return cls.from_array([[c, -s], [s, c]])

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.dim, self.dim)


@dataclass(frozen=True)
class SingularSpectrum:
    """All singular values of a small matrix, sorted descending, plus |det|."""

    values: tuple
    abs_det: float

    def __post_init__(self):
        vals = self.values
        if any(v < 0 for v in vals):
            raise InvalidInputError("singular values must be nonnegative")
        if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            raise InvalidInputError("singular values must be sorted descending")
        if self.abs_det < 0:
            raise InvalidInputError("abs_det must be nonnegative")
        # Cross-check: the singular value product recovers |det|.  Skipped for
        # near-singular input where relative comparison is meaningless.
        if self.abs_det > 1e-12:
            prod = math.prod(vals)
            if abs(prod - self.abs_det) > 1e-10 * self.abs_det:
                raise InvalidInputError(
                    f"singular value product {prod} inconsistent with |det| {self.abs_det}"
                )

    @property
    def sigma_max(self) -> float:
        return self.values[0]

    @property
    def sigma_min(self) -> float:
        return self.values[-1]


def determinant(m) -> float:
    """Signed determinant by cofactor expansion; exact for triangular input."""
    a = as_matrix_array(m)
    return _det(a)


def _det(a: np.ndarray) -> float:
    n = a.shape[0]
    if n == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if n == 3:
        return float(
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
    # n == 4: expand along the first row.
    total = 0.0
    cols = np.arange(4)
    for j in range(4):
        minor = a[1:][:, cols != j]
        sign = 1.0 if j % 2 == 0 else -1.0
        total += sign * a[0, j] * _det(minor)
    return float(total)


def singular_values(m) -> SingularSpectrum:
    """Full singular spectrum via cyclic one-sided Jacobi sweeps.

    Columns of the working copy are rotated pairwise until the off-diagonal
    norm of the implicit Gram matrix drops below 1e-14 * ||M||_F^2; the
    singular values are then the column norms.
    """
    a = as_matrix_array(m)
    sigma = _jacobi_singular_values(a)
    return SingularSpectrum(values=tuple(sigma), abs_det=abs(_det(a)))


def _jacobi_singular_values(a: np.ndarray) -> np.ndarray:
    work = a.astype(float).copy()
    n = work.shape[0]
    frob_sq = float(np.sum(work * work))
    if frob_sq == 0.0:
        return np.zeros(n)
    tol = _JACOBI_RTOL * frob_sq
    for _ in range(_MAX_SWEEPS):
        off_sq = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci = work[:, i]
                cj = work[:, j]
                g = float(ci @ cj)
                off_sq += g * g
                if g == 0.0:
                    continue
                aii = float(ci @ ci)
                ajj = float(cj @ cj)
                theta = 0.5 * math.atan2(2.0 * g, aii - ajj)
                c, s = math.cos(theta), math.sin(theta)
                new_i = c * ci + s * cj
                new_j = -s * ci + c * cj
                work[:, i] = new_i
                work[:, j] = new_j
        if math.sqrt(off_sq) <= tol:
            break
    sigma = np.sqrt(np.sum(work * work, axis=0))
    sigma.sort()
    return sigma[::-1]


def diagonal_singular_values(diags: np.ndarray) -> np.ndarray:
    """Vectorized singular values of diagonal matrices: |entries| sorted descending.

    ``diags`` has shape (m, n); returns shape (m, n).
    """
    s = np.sort(np.abs(np.asarray(diags, dtype=float)), axis=-1)
    return s[..., ::-1]


def matrix_inverse(m) -> np.ndarray:
    """Inverse of a small nondegenerate matrix (adjugate over cofactor det)."""
    a = as_matrix_array(m)
    det = _det(a)
    if det == 0.0:
        raise InvalidInputError("matrix is singular; no inverse")
    n = a.shape[0]
    if n == 2:
        adj = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]])
        return adj / det
    cof = np.empty((n, n))
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[rows != i][:, rows != j]
            cof[i, j] = (-1.0) ** (i + j) * _det(minor)
    return cof.T / det
