"""Measurable weights Q: G -> [0, inf) with spherical means and sphere norms.

Constant and radial weights have closed-form sphere statistics; pointwise
fields fall back to product quadrature on the sphere (trapezoid on the
circle, Gauss-Legendre x trapezoid in 3D).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .quadrature import sphere_quadrature_nodes, unit_sphere_area


class RadialWeight:
    """Weight field with evaluators for Q(x), the spherical mean q_{x0}(r)
    and the sphere norm ||Q||_s(r) = (integral of Q^s over the sphere)^(1/s).
    """

    def __init__(self, kind: str, *, q0: float | None = None,
                 profile=None, field=None, description: str = ""):
        self.kind = kind
        self.q0 = q0
        self.profile = profile
        self.field = field
        self.description = description or kind

    @classmethod
    def constant(cls, q0: float) -> "RadialWeight":
        if q0 < 0:
            raise InvalidInputError("weight must be nonnegative")
        return cls("constant", q0=float(q0), description=f"Q={q0}")

    @classmethod
    def radial(cls, profile, description: str = "radial") -> "RadialWeight":
        """Weight depending only on the distance to the anchor point."""
        return cls("radial", profile=profile, description=description)

    @classmethod
    def radial_power(cls, coeff: float, exponent: float) -> "RadialWeight":
        if coeff < 0:
            raise InvalidInputError("weight must be nonnegative")
        return cls("radial", profile=lambda r: coeff * r ** exponent,
                   description=f"Q={coeff}*r^{exponent}")

    @classmethod
    def pointwise(cls, field, description: str = "pointwise") -> "RadialWeight":
        """Arbitrary measurable field; sphere statistics use quadrature."""
        return cls("field", field=field, description=description)

    @property
    def is_analytic_radial(self) -> bool:
        return self.kind in ("constant", "radial")

    def powered(self, exponent: float) -> "RadialWeight":
        """Pointwise power Q^exponent as a new weight."""
        desc = f"({self.description})^{exponent}"
        if self.kind == "constant":
            return RadialWeight.constant(self.q0 ** exponent)
        if self.kind == "radial":
            prof = self.profile
            return RadialWeight.radial(lambda r: prof(r) ** exponent, desc)
        fld = self.field
        return RadialWeight.pointwise(lambda x: fld(x) ** exponent, desc)

    def value(self, x, center=None) -> float:
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return self.q0
        if self.kind == "radial":
            if center is None:
                raise InvalidInputError("radial weight needs an anchor point")
            r = float(np.linalg.norm(x - np.asarray(center, dtype=float)))
            return float(self.profile(r))
        return float(self.field(x))

    def value_batch(self, xs, center=None) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == "constant":
            return np.full(xs.shape[0], self.q0)
        if self.kind == "radial":
            r = np.linalg.norm(xs - np.asarray(center, dtype=float), axis=-1)
            return np.asarray([self.profile(v) for v in r], dtype=float)
        return np.asarray([self.field(x) for x in xs], dtype=float)

    def _radial_value(self, r: float) -> float:
        if self.kind == "constant":
            return self.q0
        return float(self.profile(r))

    def sphere_mean(self, center, r: float, n: int) -> float:
        """Mean value of Q over the sphere |x - center| = r."""
        if r <= 0:
            raise InvalidInputError("sphere radius must be positive")
        if self.is_analytic_radial:
            return self._radial_value(r)
        pts, wts = sphere_quadrature_nodes(n)
        xs = np.asarray(center, dtype=float) + r * pts
        vals = self.value_batch(xs)
        return float(np.dot(vals, wts) / wts.sum())

    def sphere_norm(self, center, r: float, n: int, s: float) -> float:
        """||Q||_s(r) with the (n-1)-area measure of the sphere of radius r."""
        if r <= 0:
            raise InvalidInputError("sphere radius must be positive")
        if s <= 0:
            raise InvalidInputError("exponent s must be positive")
        area = unit_sphere_area(n) * r ** (n - 1)
        if self.is_analytic_radial:
            return self._radial_value(r) * area ** (1.0 / s)
        pts, wts = sphere_quadrature_nodes(n)
        xs = np.asarray(center, dtype=float) + r * pts
        vals = self.value_batch(xs)
        integral = float(np.dot(vals ** s, wts)) * r ** (n - 1)
        return integral ** (1.0 / s)
