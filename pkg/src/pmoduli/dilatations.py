"""Pointwise and mean dilatations of linear maps and differentiable mappings.

The pointwise quantities are ratios built from the singular spectrum of a
derivative matrix.  The mean dilatations integrate powers of them over a
mapping's domain box on meshes graded toward declared singular faces, with
divergence detected from the growth of the refinement sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMatrixError, InvalidInputError
from .linalg import as_matrix_array, diagonal_singular_values, singular_values
from .mappings import Mapping
from .quadrature import QuadratureSpec, tensor_quadrature


def inner_dilatation(m, alpha: float) -> float:
    """|det M| / sigma_min^alpha."""
    if alpha < 1.0:
        raise InvalidInputError("alpha must be >= 1")
    spec = singular_values(as_matrix_array(m))
    if spec.sigma_min == 0.0:
        raise DegenerateMatrixError("minimal stretch is zero")
    return spec.abs_det / spec.sigma_min ** alpha


def outer_dilatation(m, alpha: float) -> float:
    """sigma_max^alpha / |det M|."""
    if alpha < 1.0:
        raise InvalidInputError("alpha must be >= 1")
    spec = singular_values(as_matrix_array(m))
    if spec.abs_det == 0.0:
        raise DegenerateMatrixError("determinant is zero")
    return spec.sigma_max ** alpha / spec.abs_det


def linear_dilatation(m) -> float:
    """sigma_max / sigma_min >= 1."""
    spec = singular_values(as_matrix_array(m))
    if spec.sigma_min == 0.0:
        raise DegenerateMatrixError("minimal stretch is zero")
    return spec.sigma_max / spec.sigma_min


@dataclass(frozen=True)
class DilatationParams:
    """Exponent pairs for the mean dilatations: 1 <= alpha < beta and
    1 <= gamma < delta."""

    alpha: float
    beta: float | None = None
    gamma: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.alpha < 1.0:
            raise InvalidInputError("alpha must be >= 1")
        if self.beta is not None and not self.alpha < self.beta:
            raise InvalidInputError("mean-inner use requires alpha < beta")
        if (self.gamma is None) != (self.delta is None):
            raise InvalidInputError("gamma and delta must be given together")
        if self.gamma is not None and not 1.0 <= self.gamma < self.delta:
            raise InvalidInputError("mean-outer use requires 1 <= gamma < delta")


@dataclass(frozen=True)
class MeanDilatationResult:
    """Outcome of a mean-dilatation quadrature.

    ``divergent`` marks integrals that exceeded the divergence cap or whose
    graded-mesh refinement sequence kept growing instead of stabilizing;
    ``value`` is None in that case.  ``levels`` records the refinement
    sequence used for the decision.
    """

    value: float | None
    divergent: bool
    levels: tuple = ()
    notes: tuple = field(default=())

    @property
    def is_finite(self) -> bool:
        return not self.divergent


def mean_inner_dilatation(mapping: Mapping, params: DilatationParams,
                          quad: QuadratureSpec) -> MeanDilatationResult:
    """Integral of H_inner(x; alpha)^(beta/(beta-alpha)) over the domain box."""
    if params.beta is None:
        raise InvalidInputError("mean-inner dilatation needs beta")
    power = params.beta / (params.beta - params.alpha)
    return _mean_dilatation(mapping, "inner", params.alpha, power, quad)


def mean_outer_dilatation(mapping: Mapping, params: DilatationParams,
                          quad: QuadratureSpec) -> MeanDilatationResult:
    """Integral of H_outer(x; delta)^(gamma/(delta-gamma)) over the domain box."""
    if params.gamma is None or params.delta is None:
        raise InvalidInputError("mean-outer dilatation needs gamma and delta")
    power = params.gamma / (params.delta - params.gamma)
    return _mean_dilatation(mapping, "outer", params.delta, power, quad)


def pointwise_dilatation_batch(mapping: Mapping, points: np.ndarray,
                               kind: str, order: float) -> np.ndarray:
    """Vectorized H_inner / H_outer / H over a batch of in-domain points.

    Uses closed-form spectra for diagonal/constant derivatives; falls back
    to per-point Jacobi SVD otherwise.
    """
    points = np.asarray(points, dtype=float)
    if mapping.jacobian_is_constant:
        jac = mapping.jacobian_matrix(_interior_probe(mapping))
        val = _dilatation_from_spectrum(*_spectrum_of(jac), kind, order)
        return np.full(points.shape[0], val)
    if mapping.jacobian_is_diagonal:
        diags = mapping.jacobian_diag_batch(points)
        sig = diagonal_singular_values(diags)
        absdet = np.abs(np.prod(diags, axis=-1))
        return _dilatation_from_spectrum_batch(sig, absdet, kind, order)
    jacs = mapping.jacobian_batch(points)
    out = np.empty(points.shape[0])
    for i, j in enumerate(jacs):
        out[i] = _dilatation_from_spectrum(*_spectrum_of(j), kind, order)
    return out


def _interior_probe(mapping: Mapping) -> np.ndarray:
    lo = np.asarray(mapping.domain.lo)
    hi = np.asarray(mapping.domain.hi)
    probe = lo + 0.734 * (hi - lo)  # fixed interior point, off any grid line
    return probe


def _spectrum_of(jac: np.ndarray):
    spec = singular_values(jac)
    return np.asarray(spec.values), spec.abs_det


def _dilatation_from_spectrum(sigma, absdet, kind, order) -> float:
    smin = sigma[-1]
    smax = sigma[0]
    if kind == "inner":
        if smin == 0.0:
            raise DegenerateMatrixError("minimal stretch is zero")
        return float(absdet / smin ** order)
    if kind == "outer":
        if absdet == 0.0:
            raise DegenerateMatrixError("determinant is zero")
        return float(smax ** order / absdet)
    if smin == 0.0:
        raise DegenerateMatrixError("minimal stretch is zero")
    return float(smax / smin)


def _dilatation_from_spectrum_batch(sig, absdet, kind, order):
    smin = sig[:, -1]
    smax = sig[:, 0]
    if kind == "inner":
        if np.any(smin == 0.0):
            raise DegenerateMatrixError("minimal stretch is zero")
        return absdet / smin ** order
    if kind == "outer":
        if np.any(absdet == 0.0):
            raise DegenerateMatrixError("determinant is zero")
        return smax ** order / absdet
    if np.any(smin == 0.0):
        raise DegenerateMatrixError("minimal stretch is zero")
    return smax / smin


# Refinement schedule for divergence detection: base mesh plus three
# factor-2 refinements gives the three successive growth ratios the
# divergence rule needs.
_REFINEMENTS = 3
_GROWTH_FACTOR = 1.5
_STABILIZATION_CONTRACTION = 0.5


def _mean_dilatation(mapping, kind, order, power, quad) -> MeanDilatationResult:
    box = mapping.domain

    def integrand(points):
        return pointwise_dilatation_batch(mapping, points, kind, order) ** power

    singular = mapping.singular_axes()
    values = []
    notes = []
    n_cells = quad.cells_per_axis
    for level in range(_REFINEMENTS + 1):
        v = tensor_quadrature(integrand, box.lo, box.hi, n_cells, quad.rule,
                              quad.graded_exponent, singular)
        values.append(v)
        if v > quad.divergence_cap or not np.isfinite(v):
            return MeanDilatationResult(value=None, divergent=True,
                                        levels=tuple(values),
                                        notes=("divergence cap exceeded",))
        if level >= 1 and abs(values[-1] - values[-2]) <= 1e-13 * abs(values[-1]):
            return MeanDilatationResult(value=v, divergent=False,
                                        levels=tuple(values), notes=tuple(notes))
        n_cells *= 2
    ratios = [values[i + 1] / values[i] for i in range(len(values) - 1)
              if values[i] != 0.0]
    if len(ratios) == _REFINEMENTS and all(r > _GROWTH_FACTOR for r in ratios):
        return MeanDilatationResult(value=None, divergent=True,
                                    levels=tuple(values),
                                    notes=("refinement sequence grows",))
    d_prev = abs(values[-2] - values[-3])
    d_last = abs(values[-1] - values[-2])
    stabilized = d_last <= _STABILIZATION_CONTRACTION * d_prev + 1e-12 * abs(values[-1])
    if not stabilized:
        return MeanDilatationResult(value=None, divergent=True,
                                    levels=tuple(values),
                                    notes=("refinement sequence fails to stabilize",))
    return MeanDilatationResult(value=values[-1], divergent=False,
                                levels=tuple(values), notes=tuple(notes))
