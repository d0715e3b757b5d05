"""Numerical toolkit and verification harness for p-moduli of curve and
surface families, condenser capacities, and mapping dilatations."""

from .dilatations import (DilatationParams, MeanDilatationResult,
                          inner_dilatation, linear_dilatation,
                          mean_inner_dilatation, mean_outer_dilatation,
                          outer_dilatation)
from .linalg import SingularSpectrum, SquareMatrix, determinant, singular_values
from .mappings import (AxisStretchMap, Box, CompositeMap, LinearMap, Mapping,
                       RadialPowerMap, ScalingMap, evaluate,
                       finite_difference_jacobian, identity_map,
                       jacobian_matrix)
from .moduli import (DiscreteMeasureSpace, RingSpec, capacity_bound_krd_ratio,
                     capacity_lower_bound_maz, lemma_infimum,
                     lower_criterion_integral, ring_criterion_bound,
                     ring_module, transfer_parameters, ziemer_dual,
                     ziemer_dual_inverse)
from .quadrature import QuadratureSpec, adaptive_simpson, unit_ball_volume, \
    unit_sphere_area
from .weights import RadialWeight

__version__ = "0.1.0"
