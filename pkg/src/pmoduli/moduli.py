"""Closed-form and quadrature-reduced module quantities.

Covers the spherical-ring module, curve/surface module duality, the exact
weighted infimum on finite measure spaces with its extremal metric, the
ring- and lower-criterion bounds with their extremal weights, parameter
transfer between the two criteria, and capacity lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ParameterError
from .quadrature import QuadratureSpec, adaptive_simpson, unit_ball_volume, \
    unit_sphere_area
from .weights import RadialWeight


@dataclass(frozen=True)
class RingSpec:
    """Concentric spherical ring 0 < r1 < |x - center| < r2 in R^dim."""

    dim: int
    center: tuple
    r1: float
    r2: float

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidInputError("ring dimension must be >= 2")
        if len(self.center) != self.dim:
            raise InvalidInputError("ring center dimension mismatch")
        if not (0.0 < self.r1 < self.r2 < math.inf):
            raise InvalidInputError("ring radii must satisfy 0 < r1 < r2 < inf")

    @property
    def center_array(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class DiscreteMeasureSpace:
    """Finite measure space with positive weights phi and masses mu."""

    phi: tuple
    mu: tuple
    alpha: float

    def __post_init__(self):
        if len(self.phi) != len(self.mu) or len(self.phi) == 0:
            raise InvalidInputError("phi and mu must be nonempty and equal length")
        if any(not (0.0 < p < math.inf) for p in self.phi):
            raise InvalidInputError("phi values must be positive and finite")
        if any(not (0.0 < m < math.inf) for m in self.mu):
            raise InvalidInputError("mu values must be positive and finite")
        if not self.alpha > 1.0:
            raise ParameterError("alpha must exceed 1")


def ring_module(n: int, p: float, a: float, b: float) -> float:
    """p-module of the joining-curve family of the ring a < |x| < b.

    Evaluates omega_{n-1} (|n-p|/(p-1))^(p-1) |a^kappa - b^kappa|^(1-p)
    with kappa = (p-n)/(p-1); the absolute-value arrangement covers both
    p < n and its positive continuation for p > n.  Scales as lambda^(n-p).
    """
    if not p > 1.0:
        raise ParameterError("ring module requires p > 1")
    if p == n:
        raise ParameterError("p must differ from n")
    if not 0.0 < a < b:
        raise InvalidInputError("ring radii must satisfy 0 < a < b")
    kappa = (p - n) / (p - 1.0)
    omega = unit_sphere_area(n)
    return (omega * (abs(n - p) / (p - 1.0)) ** (p - 1.0)
            * abs(a ** kappa - b ** kappa) ** (1.0 - p))


def ziemer_dual(n: int, p: float, mod_p: float) -> dict:
    """Dual surface-family module: alpha = p(n-1)/(p-1), M_alpha = M_p^(-1/(p-1))."""
    if not p > 1.0:
        raise ParameterError("duality requires p > 1")
    if not mod_p > 0.0:
        raise InvalidInputError("mod_p must be positive")
    alpha = p * (n - 1.0) / (p - 1.0)
    return {"alphaDual": alpha, "modAlpha": mod_p ** (-1.0 / (p - 1.0))}


def ziemer_dual_inverse(n: int, alpha: float, mod_alpha: float) -> dict:
    """Inverse direction: recover p and the curve-family module from the
    surface side; round-trips with ``ziemer_dual`` exactly."""
    if not alpha > n - 1.0:
        raise ParameterError("duality requires alpha > n - 1")
    if not mod_alpha > 0.0:
        raise InvalidInputError("mod_alpha must be positive")
    p = alpha / (alpha - n + 1.0)
    return {"p": p, "modP": mod_alpha ** (-(p - 1.0))}


def lemma_infimum(space: DiscreteMeasureSpace) -> dict:
    """Exact infimum of sum(phi_i rho_i^alpha mu_i) over rho >= 0 with
    sum(rho_i mu_i) = 1, together with the unique extremal rho.

    value = (sum phi_i^(1/(1-alpha)) mu_i)^(1-alpha);
    rho_i = phi_i^(1/(1-alpha)) / sum_j phi_j^(1/(1-alpha)) mu_j.
    """
    phi = np.asarray(space.phi, dtype=float)
    mu = np.asarray(space.mu, dtype=float)
    alpha = space.alpha
    powered = phi ** (1.0 / (1.0 - alpha))
    denom = float(np.dot(powered, mu))
    value = denom ** (1.0 - alpha)
    rho = powered / denom
    return {"value": value, "extremalRho": rho}


@dataclass(frozen=True)
class RingCriterionBound:
    """Result of the ring-criterion upper bound.

    ``integral`` is I = int_{r1}^{r2} dr / (r^((n-1)/(p-1)) q(r)^(1/(p-1)));
    ``bound`` is omega_{n-1} / I^(p-1); ``eta0`` the extremal radial weight
    with unit integral over (r1, r2).  A vanishing spherical mean makes I
    infinite and the bound zero, reported via ``flagged_infinite``.
    """

    integral: float
    bound: float
    eta0: object
    flagged_infinite: bool = False


def ring_criterion_bound(ring: RingSpec, p: float, weight: RadialWeight,
                         quad: QuadratureSpec | None = None) -> RingCriterionBound:
    """Sharp upper bound omega_{n-1}/I^(p-1) for the module of curves joining
    the image spheres, with the extremal admissible eta."""
    n = ring.dim
    if not 1.0 < p <= n:
        # Stated for 1 < p <= n only; larger p is rejected rather than guessed.
        raise ParameterError("ring criterion requires 1 < p <= n")
    center = ring.center_array
    exp_r = (n - 1.0) / (p - 1.0)
    exp_q = 1.0 / (p - 1.0)

    def q_mean(r: float) -> float:
        return weight.sphere_mean(center, r, n)

    # Probe for a vanishing mean: a zero on any probe radius flags the
    # degenerate case (q == 0 on positive measure makes I infinite).
    probes = np.linspace(ring.r1, ring.r2, 17)
    if any(q_mean(r) == 0.0 for r in probes):
        return RingCriterionBound(integral=math.inf, bound=0.0, eta0=None,
                                  flagged_infinite=True)

    def integrand(r: float) -> float:
        return 1.0 / (r ** exp_r * q_mean(r) ** exp_q)

    integral = adaptive_simpson(integrand, ring.r1, ring.r2, rel_tol=1e-10)
    bound = unit_sphere_area(n) / integral ** (p - 1.0)

    def eta0(r):
        return 1.0 / (integral * r ** exp_r * q_mean(r) ** exp_q)

    return RingCriterionBound(integral=integral, bound=bound, eta0=eta0)


@dataclass(frozen=True)
class LowerCriterionResult:
    """Result of the lower-criterion integral.

    ``value`` is int_{r1}^{r2} dr / ||Q||_s(r) with s = (n-1)/(p-n+1);
    ``rho0`` the extremal sphere density (Q/||Q||_s(r))^(1/(p-n+1)), which
    satisfies the unit surface-admissibility constraint on every sphere.
    """

    value: float
    s: float
    rho0: object
    sphere_norm: object
    flagged_infinite: bool = False


def lower_criterion_integral(ring: RingSpec, p: float, weight: RadialWeight,
                             quad: QuadratureSpec | None = None) -> LowerCriterionResult:
    """Sharp lower bound for the module of image sphere families."""
    n = ring.dim
    if not p > n - 1.0:
        raise ParameterError("lower criterion requires p > n - 1")
    s = (n - 1.0) / (p - n + 1.0)
    center = ring.center_array

    def norm_s(r: float) -> float:
        return weight.sphere_norm(center, r, n, s)

    probes = np.linspace(ring.r1, ring.r2, 17)
    if any(norm_s(r) == 0.0 for r in probes):
        return LowerCriterionResult(value=math.inf, s=s, rho0=None,
                                    sphere_norm=norm_s, flagged_infinite=True)

    value = adaptive_simpson(lambda r: 1.0 / norm_s(r), ring.r1, ring.r2,
                             rel_tol=1e-10)

    inv_exp = 1.0 / (p - n + 1.0)

    def rho0(x):
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x - center))
        return (weight.value(x, center=center) / norm_s(r)) ** inv_exp

    return LowerCriterionResult(value=value, s=s, rho0=rho0, sphere_norm=norm_s)


def transfer_parameters(n: int, p: float) -> dict:
    """Parameter transfer from the lower to the ring criterion:
    s = (n-1)/(p-n+1) (also the weight exponent) and alpha = p/(p-n+1)."""
    if not p > n - 1.0:
        raise ParameterError("transfer requires p > n - 1")
    s = (n - 1.0) / (p - n + 1.0)
    alpha_tilde = p / (p - n + 1.0)
    return {"s": s, "alphaTilde": alpha_tilde, "qTildeExponent": s}


def capacity_lower_bound_maz(n: int, p: float, meas_c: float) -> float:
    """Isocapacitary lower bound n Omega_n^(p/n) ((n-p)/(p-1))^(p-1) mC^((n-p)/n).

    For p = 1 the middle factor is taken as its limit 1.  Sharp for balls
    at p = 2, n = 3 (Newtonian capacity).
    """
    if not 1.0 <= p < n:
        raise ParameterError("bound requires 1 <= p < n")
    if not meas_c > 0.0:
        raise InvalidInputError("measure of the compact must be positive")
    omega_n = unit_ball_volume(n)
    if p == 1.0:
        factor = 1.0
    else:
        factor = ((n - p) / (p - 1.0)) ** (p - 1.0)
    return n * omega_n ** (p / n) * factor * meas_c ** ((n - p) / n)


def capacity_bound_krd_ratio(n: int, p: float, cap_p: float, diam_c: float,
                             meas_a: float) -> float:
    """Diagnostic ratio cap^(n-1) mA^(1-n+p) / d(C)^p.

    The underlying inequality bounds this below by an unspecified positive
    constant depending on (n, p), so the ratio is reported, never asserted
    against a numeric threshold.  The boundary p = n - 1 is accepted since
    the ratio stays well defined there.
    """
    if not n - 1.0 <= p <= n:
        raise ParameterError("ratio requires n - 1 <= p <= n")
    if cap_p <= 0 or diam_c <= 0 or meas_a <= 0:
        raise InvalidInputError("all inputs must be positive")
    return cap_p ** (n - 1.0) * meas_a ** (1.0 - n + p) / diam_c ** p
