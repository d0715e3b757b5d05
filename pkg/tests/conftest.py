"""Shared fixtures and independent oracles for the test suite.

The heavy acceptance-resolution solves are session-scoped so the duality,
module, and capacity criteria price each configuration once.
"""

from __future__ import annotations


import numpy as np
import pytest

from pmoduli.moduli import RingSpec
from pmoduli.discrete import (discrete_p_capacity, discrete_p_module,
                              extremal_ring_metric, sample_joining_curves,
                              sample_separating_surfaces)
from pmoduli.harness.runner import grid_for_ring


def simplex_objective(phi, mu, alpha, rho):
    return float(np.dot(phi, rho ** alpha * mu))


def _zero_sum_moves(d):
    """All mass-transfer directions in {-1, 0, +1}^d with zero total."""
    from itertools import product
    moves = [np.array(v, dtype=float) for v in product((-1, 0, 1), repeat=d)
             if sum(v) == 0 and any(v)]
    return np.stack(moves)


def simplex_pattern_search(phi, mu, alpha, step_final=1e-3):
    """Brute-force grid search over the constraint simplex.

    Works in mass coordinates m_i = rho_i mu_i (so sum(m) = 1 is preserved
    exactly): at each step size, sweeps the full {-1, 0, +1} zero-sum
    lattice neighborhood until no grid move improves the objective, then
    halves the step down to ``step_final``.  Independent of the closed-form
    minimizer it is used to check.
    """
    phi = np.asarray(phi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    d = phi.size
    moves = _zero_sum_moves(d)
    rho = np.full(d, 1.0 / mu.sum())
    best = simplex_objective(phi, mu, alpha, rho)
    step = 0.128
    n_evals = 1
    while step >= step_final * 0.999:
        improved = True
        while improved:
            cands = rho[None, :] + step * moves / mu[None, :]
            valid = np.all(cands >= 0.0, axis=1)
            cands = cands[valid]
            vals = (cands ** alpha * (phi * mu)[None, :]).sum(axis=1)
            n_evals += len(vals)
            i = int(np.argmin(vals))
            if vals[i] < best - 1e-15:
                best = float(vals[i])
                rho = cands[i]
            else:
                improved = False
        step *= 0.5
    return best, rho, n_evals


def full_grid_search_2atoms(phi, mu, alpha, step=1e-3):
    """Literal full grid over the 2-atom simplex (feasible for d = 2)."""
    phi = np.asarray(phi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    t = np.arange(0.0, 1.0 + step / 2, step)
    rho1 = t / mu[0]
    rho2 = (1.0 - t) / mu[1]
    vals = phi[0] * rho1 ** alpha * mu[0] + phi[1] * rho2 ** alpha * mu[1]
    i = int(np.argmin(vals))
    return float(vals[i]), np.array([rho1[i], rho2[i]])


RING_2D = RingSpec(dim=2, center=(0.0, 0.0), r1=1.0, r2=2.0)
RING_3D = RingSpec(dim=3, center=(0.0, 0.0, 0.0), r1=1.0, r2=2.0)


@pytest.fixture(scope="session")
def annulus_2d_curves_256():
    grid = grid_for_ring(RING_2D, 256)
    family = sample_joining_curves(RING_2D, grid, 512)
    warm = extremal_ring_metric(grid, RING_2D, 2.0)
    return discrete_p_module(grid, family, 2.0, warm_rho=warm)


@pytest.fixture(scope="session")
def annulus_2d_circles_256():
    grid = grid_for_ring(RING_2D, 256)
    family = sample_separating_surfaces(RING_2D, grid, 128)
    return discrete_p_module(grid, family, 2.0)


@pytest.fixture(scope="session")
def shell_3d_curves_48():
    grid = grid_for_ring(RING_3D, 48)
    family = sample_joining_curves(RING_3D, grid, 4096)
    warm = extremal_ring_metric(grid, RING_3D, 2.0)
    return discrete_p_module(grid, family, 2.0, warm_rho=warm)


@pytest.fixture(scope="session")
def shell_3d_spheres_alpha4_48():
    grid = grid_for_ring(RING_3D, 48)
    family = sample_separating_surfaces(RING_3D, grid, 48)
    return discrete_p_module(grid, family, 4.0)


@pytest.fixture(scope="session")
def capacity_2d_256():
    grid = grid_for_ring(RING_2D, 256)
    return discrete_p_capacity(grid, RING_2D, 2.0)


@pytest.fixture(scope="session")
def capacity_3d_48():
    grid = grid_for_ring(RING_3D, 48)
    return discrete_p_capacity(grid, RING_3D, 2.0)
