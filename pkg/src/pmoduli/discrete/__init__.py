"""Independent discrete oracles: grid moduli of sampled families and grid
p-capacities of ring condensers."""

from .capacity import CapacitySolution, discrete_p_capacity
from .families import (CurveFamily, SurfaceFamily, clip_polyline,
                       fibonacci_directions, push_forward_family,
                       sample_joining_curves, sample_separating_surfaces)
from .grid import Grid, export_field_csv
from .modulus import ModulusSolution, discrete_p_module, extremal_ring_metric
