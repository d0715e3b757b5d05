"""Catalog of analytic test mappings with exact derivatives and inverses.

Every mapping here has a closed-form derivative: the verification harness
needs trustworthy pointwise dilatations, so numeric-only mappings are not
admitted.  Points outside a mapping's domain are rejected, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, SingularityError
from .linalg import matrix_inverse


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box in R^n."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise InvalidInputError("box bounds must have equal dimension")
        if any(not (l < h) for l, h in zip(self.lo, self.hi)):
            raise InvalidInputError("box requires lo < hi on every axis")

    @classmethod
    def cube(cls, n: int, lo: float = 0.0, hi: float = 1.0) -> "Box":
        return cls(lo=(lo,) * n, hi=(hi,) * n)

    @classmethod
    def around(cls, center, radius: float) -> "Box":
        c = np.asarray(center, dtype=float)
        return cls(lo=tuple(c - radius), hi=tuple(c + radius))

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, x, margin: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return bool(np.all(x > lo + margin) and np.all(x < hi - margin))

    def contains_batch(self, xs, margin: float = 0.0) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all(xs > lo + margin, axis=-1) & np.all(xs < hi - margin, axis=-1)


class Mapping:
    """Base class; subclasses provide f, f' and optionally an inverse."""

    kind = "abstract"

    def __init__(self, dim: int, domain: Box):
        if domain.dim != dim:
            raise InvalidInputError("domain dimension mismatch")
        self.dim = dim
        self.domain = domain

    # Structural hints used by quadrature fast paths.
    jacobian_is_constant = False
    jacobian_is_diagonal = False

    def singular_axes(self) -> dict:
        """Axes whose domain faces carry a derivative singularity."""
        return {}

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InvalidInputError(f"expected a point in R^{self.dim}")
        if not self.domain.contains(x):
            raise DomainError(f"point {x.tolist()} outside mapping domain")
        return x

    def evaluate(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self._apply(x[None, :])[0]

    def evaluate_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if not np.all(self.domain.contains_batch(xs)):
            raise DomainError("batch contains points outside mapping domain")
        return self._apply(xs)

    def jacobian_matrix(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self._jacobian(x[None, :])[0]

    def jacobian_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if not np.all(self.domain.contains_batch(xs)):
            raise DomainError("batch contains points outside mapping domain")
        return self._jacobian(xs)

    def jacobian_diag_batch(self, xs) -> np.ndarray:
        """Diagonal entries of f'(x) for mappings with diagonal derivative."""
        raise NotImplementedError

    def inverse(self):
        return None

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, **self.params()}

    def _apply(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jacobian(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class LinearMap(Mapping):
    """f(x) = A x for a nondegenerate n x n matrix A."""

    kind = "linear"

    def __init__(self, matrix, domain: Box):
        a = np.asarray(matrix, dtype=float)
        super().__init__(a.shape[0], domain)
        if a.shape != (self.dim, self.dim):
            raise InvalidInputError("linear map matrix must be square")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("linear map matrix must be finite")
        self.matrix = a

    jacobian_is_constant = True

    @property
    def jacobian_is_diagonal(self) -> bool:
        return bool(np.all(self.matrix == np.diag(np.diag(self.matrix))))

    def _apply(self, xs):
        return xs @ self.matrix.T

    def _jacobian(self, xs):
        return np.broadcast_to(self.matrix, (xs.shape[0],) + self.matrix.shape).copy()

    def jacobian_diag_batch(self, xs):
        if not self.jacobian_is_diagonal:
            raise NotImplementedError
        return np.broadcast_to(np.diag(self.matrix), (len(xs), self.dim)).copy()

    def inverse(self):
        image = _map_box_corners(self, self.domain)
        return LinearMap(matrix_inverse(self.matrix), image)

    def params(self):
        return {"matrix": self.matrix.ravel().tolist()}


class ScalingMap(Mapping):
    """f(x) = lambda * x, lambda > 0."""

    kind = "scaling"
    jacobian_is_constant = True
    jacobian_is_diagonal = True

    def __init__(self, lam: float, domain: Box):
        if not lam > 0:
            raise InvalidInputError("scaling factor must be positive")
        super().__init__(domain.dim, domain)
        self.lam = float(lam)

    def _apply(self, xs):
        return self.lam * xs

    def _jacobian(self, xs):
        return np.broadcast_to(self.lam * np.eye(self.dim),
                               (xs.shape[0], self.dim, self.dim)).copy()

    def jacobian_diag_batch(self, xs):
        return np.full((len(xs), self.dim), self.lam)

    def inverse(self):
        lo = tuple(self.lam * v for v in self.domain.lo)
        hi = tuple(self.lam * v for v in self.domain.hi)
        return ScalingMap(1.0 / self.lam, Box(lo=lo, hi=hi))

    def params(self):
        return {"lam": self.lam}


class RadialPowerMap(Mapping):
    """f(x) = x0 + (x - x0) |x - x0|^(beta - 1): spheres about x0 map to spheres.

    The derivative at radius r has singular values beta * r^(beta-1) (radial
    direction) and r^(beta-1) (tangential, multiplicity n-1); the center is
    excluded from the domain.
    """

    kind = "radial_power"

    def __init__(self, beta_exp: float, center, domain: Box):
        if not beta_exp > 0:
            raise InvalidInputError("beta_exp must be positive")
        c = np.asarray(center, dtype=float)
        super().__init__(c.size, domain)
        self.beta_exp = float(beta_exp)
        self.center = c

    def _check_point(self, x):
        x = super()._check_point(x)
        if np.all(x == self.center):
            raise SingularityError("radial power map is singular at its center")
        return x

    def _radii(self, xs):
        y = xs - self.center
        r = np.sqrt(np.sum(y * y, axis=-1))
        if np.any(r == 0.0):
            raise SingularityError("radial power map is singular at its center")
        return y, r

    def _apply(self, xs):
        y, r = self._radii(xs)
        return self.center + y * (r ** (self.beta_exp - 1.0))[:, None]

    def _jacobian(self, xs):
        y, r = self._radii(xs)
        n = self.dim
        unit = y / r[:, None]
        outer = unit[:, :, None] * unit[:, None, :]
        eye = np.eye(n)
        scale = (r ** (self.beta_exp - 1.0))[:, None, None]
        return scale * (eye + (self.beta_exp - 1.0) * outer)

    def inverse(self):
        image = _map_box_image_ball(self)
        return RadialPowerMap(1.0 / self.beta_exp, self.center, image)

    def params(self):
        return {"beta_exp": self.beta_exp, "center": self.center.tolist()}


class AxisStretchMap(Mapping):
    """f(x) = (x_1, ..., x_{n-1}, x_n^(1-c) / (1-c)) on the open unit cube.

    The derivative diag(1, ..., 1, x_n^(-c)) blows up toward the face
    x_n = 0, which is the singular face graded meshes must resolve.
    """

    kind = "axis_stretch"
    jacobian_is_diagonal = True

    def __init__(self, c: float, dim: int):
        if not 0.0 < c < 1.0:
            raise InvalidInputError("axis stretch exponent c must lie in (0, 1)")
        super().__init__(dim, Box.cube(dim))
        self.c = float(c)

    def singular_axes(self):
        return {self.dim - 1: "lo"}

    def _apply(self, xs):
        out = xs.copy()
        out[:, -1] = xs[:, -1] ** (1.0 - self.c) / (1.0 - self.c)
        return out

    def _jacobian(self, xs):
        m = xs.shape[0]
        jac = np.broadcast_to(np.eye(self.dim), (m, self.dim, self.dim)).copy()
        jac[:, -1, -1] = xs[:, -1] ** (-self.c)
        return jac

    def jacobian_diag_batch(self, xs):
        xs = np.asarray(xs, dtype=float)
        d = np.ones((len(xs), self.dim))
        d[:, -1] = xs[:, -1] ** (-self.c)
        return d

    def params(self):
        return {"c": self.c}


class CompositeMap(Mapping):
    """Chain f = maps[-1] o ... o maps[0]; derivative by the chain rule."""

    kind = "composite"

    def __init__(self, maps):
        if not maps:
            raise InvalidInputError("composite needs at least one mapping")
        dims = {m.dim for m in maps}
        if len(dims) != 1:
            raise InvalidInputError("composite mappings must share a dimension")
        super().__init__(maps[0].dim, maps[0].domain)
        self.maps = tuple(maps)

    def _apply(self, xs):
        out = xs
        for i, m in enumerate(self.maps):
            if i > 0 and not np.all(m.domain.contains_batch(out)):
                raise DomainError("intermediate image leaves a composite factor domain")
            out = m._apply(out)
        return out

    def _jacobian(self, xs):
        jac = self.maps[0]._jacobian(xs)
        out = self.maps[0]._apply(xs)
        for m in self.maps[1:]:
            if not np.all(m.domain.contains_batch(out)):
                raise DomainError("intermediate image leaves a composite factor domain")
            jac = np.einsum("mij,mjk->mik", m._jacobian(out), jac)
            out = m._apply(out)
        return jac

    def inverse(self):
        invs = []
        for m in reversed(self.maps):
            mi = m.inverse()
            if mi is None:
                return None
            invs.append(mi)
        return CompositeMap(invs)

    def params(self):
        return {"maps": [m.describe() for m in self.maps]}


def identity_map(dim: int, domain: Box) -> ScalingMap:
    return ScalingMap(1.0, domain)


def _map_box_corners(mapping: Mapping, box: Box) -> Box:
    """Image box of a linear map: bounding box of mapped corners."""
    n = box.dim
    corners = np.array(np.meshgrid(*[[box.lo[d], box.hi[d]] for d in range(n)],
                                   indexing="ij")).reshape(n, -1).T
    imgs = mapping._apply(corners)
    return Box(lo=tuple(imgs.min(axis=0)), hi=tuple(imgs.max(axis=0)))


def _map_box_image_ball(mapping: "RadialPowerMap") -> Box:
    """Bounding box of the image of a radial power map's domain box."""
    box = mapping.domain
    c = mapping.center
    half = max(max(abs(l - ci), abs(h - ci))
               for l, h, ci in zip(box.lo, box.hi, c))
    r_img = (half * math.sqrt(box.dim)) ** mapping.beta_exp
    return Box.around(c, r_img * 1.000001)


def evaluate(mapping: Mapping, x) -> np.ndarray:
    """Image f(x); raises DomainError outside the mapping domain."""
    return mapping.evaluate(x)


def jacobian_matrix(mapping: Mapping, x) -> np.ndarray:
    """Exact derivative matrix f'(x)."""
    return mapping.jacobian_matrix(x)


def finite_difference_jacobian(mapping: Mapping, x, h: float) -> np.ndarray:
    """Central-difference derivative, entrywise error O(h^2).

    Oracle for ``jacobian_matrix``; the full stencil must stay inside the
    mapping domain.
    """
    x = np.asarray(x, dtype=float)
    if not h > 0:
        raise InvalidInputError("step h must be positive")
    n = mapping.dim
    cols = []
    for d in range(n):
        e = np.zeros(n)
        e[d] = h
        for probe in (x + e, x - e):
            if not mapping.domain.contains(probe):
                raise DomainError("finite difference stencil leaves mapping domain")
        cols.append((mapping.evaluate(x + e) - mapping.evaluate(x - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)
