"""Discrete p-module of sampled families as a convex program.

In the substituted variable tau = rho^k the admissibility constraints are
linear and the objective sum(c_j tau_j^(p/k)) is convex (p >= k), so the
global optimum is well defined.  The reported value is the objective of a
feasible point (an upper bound by construction); a certified lower bound
from the Lagrangian dual is reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .._kernels import get_backend
from ..errors import ConvergenceError, InvalidInputError, ParameterError
from .grid import Grid

_BUDGET_FACTOR = 50
_DUAL_ITERS = 600


@dataclass
class ModulusSolution:
    """Solution record for the discrete module program."""

    value: float
    rho: np.ndarray
    max_constraint_violation: float
    iterations: int
    dual_bound: float
    dual_gap: float
    diagnostics: dict = field(default_factory=dict)


def _assemble(family, weight_field):
    grid = family.grid
    rows = []
    for cells, w in family.incidence:
        if cells.size == 0:
            raise InvalidInputError("a family member has empty incidence")
        rows.append((cells, w))
    active = np.unique(np.concatenate([c for c, _ in rows]))
    remap = {int(c): i for i, c in enumerate(active)}
    indptr = [0]
    indices = []
    data = []
    for cells, w in rows:
        indices.extend(remap[int(c)] for c in cells)
        data.extend(w)
        indptr.append(len(indices))
    mat = sp.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(rows), active.size))
    vol = grid.cell_volume
    if weight_field is None:
        cost = np.full(active.size, vol)
    else:
        wf = np.asarray(weight_field, dtype=float).ravel()
        cost = wf[active] * vol
        if np.any(cost < 0):
            raise InvalidInputError("objective weights must be nonnegative")
        cost = np.maximum(cost, 1e-300 * vol)
    return mat, active, cost


def _dual_value(mat, cost, q, lam):
    z = mat.T @ lam
    if q == 1.0:
        # LP: the dual is sum(lam) on {W^T lam <= cost}; value -inf outside.
        if np.any(z > cost * (1.0 + 1e-12)):
            return -math.inf, None
        return float(lam.sum()), None
    tau = (z / (q * cost)) ** (1.0 / (q - 1.0))
    val = float(lam.sum() - np.dot(cost, (q - 1.0) * tau ** q))
    return val, tau


def _dual_ascent(mat, cost, q, iters=_DUAL_ITERS):
    """Projected gradient ascent on the smooth Lagrangian dual.

    Returns a multiplier point, its certified dual value, and the primal
    point recovered from it (used as warm start).
    """
    m = mat.shape[0]
    if q == 1.0:
        z = mat.T @ np.ones(m)
        scale = float(np.min(cost[z > 0] / z[z > 0])) if np.any(z > 0) else 0.0
        lam = np.full(m, scale)
        val, _ = _dual_value(mat, cost, q, lam)
        tau = np.zeros(mat.shape[1])
        return lam, val, tau
    lam = np.ones(m)
    # scale so the recovered primal roughly touches the constraints
    _, tau = _dual_value(mat, cost, q, lam)
    margins = mat @ tau
    worst = float(np.min(margins))
    if worst > 0:
        lam *= (1.0 / worst) ** (q - 1.0)
    best_val, tau = _dual_value(mat, cost, q, lam)
    step = 1.0
    for _ in range(iters):
        grad = 1.0 - mat @ tau
        for _ in range(30):
            trial = np.maximum(lam + step * grad, 0.0)
            val, tau_trial = _dual_value(mat, cost, q, trial)
            if val > best_val:
                lam = trial
                best_val = val
                tau = tau_trial
                step *= 1.3
                break
            step *= 0.5
        else:
            break
    return lam, best_val, tau


def discrete_p_module(grid: Grid, family, p: float, weight_field=None,
                      warm_rho=None, budget_factor: int = _BUDGET_FACTOR) -> ModulusSolution:
    """Discrete p-module of a sampled curve/surface family.

    ``weight_field`` optionally multiplies the per-cell objective density
    (flat array over the grid), which evaluates weighted moduli.
    ``warm_rho`` seeds the primal solver with an analytic extremal metric.
    """
    k = family.k
    if p < k:
        raise ParameterError("module order must satisfy p >= k")
    if len(family.incidence) == 0:
        return ModulusSolution(value=0.0, rho=np.zeros(grid.n_cells),
                               max_constraint_violation=0.0, iterations=0,
                               dual_bound=0.0, dual_gap=0.0,
                               diagnostics={"empty_family": True})
    if family.grid is not grid and family.grid != grid:
        raise InvalidInputError("family was sampled on a different grid")
    q = p / k
    mat, active, cost = _assemble(family, weight_field)
    m = mat.shape[0]

    lam, dual_bound, tau0 = _dual_ascent(mat, cost, q)
    if warm_rho is not None:
        wr = np.asarray(warm_rho, dtype=float).ravel()
        tau_w = wr[active] ** k
        if _feasible_value(mat, cost, q, tau_w)[1] < _feasible_value(mat, cost, q, tau0)[1]:
            tau0 = tau_w
    tau0, _ = _feasible_scale(mat, cost, q, tau0)

    budget = budget_factor * m
    backend = get_backend()
    best_tau, best_f, n_feas, n_obj = backend.modulus_primal(
        mat.indptr.astype(np.int64), mat.indices.astype(np.int64),
        mat.data.astype(float),
        np.asarray(mat.multiply(mat).sum(axis=1)).ravel(),
        cost, float(q), tau0.astype(float), int(budget), float(dual_bound))

    tau_rep, value = _feasible_scale(mat, cost, q, best_tau)
    margins = mat @ tau_rep
    violation = float(max(0.0, 1.0 - np.min(margins)))
    if violation > 1e-6:
        raise ConvergenceError("modulus solver left infeasible",
                               residual=violation, iterations=n_feas + n_obj)
    rho = np.zeros(grid.n_cells)
    rho[active] = tau_rep ** (1.0 / k)
    gap = (value - dual_bound) / value if value > 0 else 0.0
    return ModulusSolution(
        value=value, rho=rho, max_constraint_violation=violation,
        iterations=n_feas + n_obj, dual_bound=dual_bound, dual_gap=gap,
        diagnostics={
            "constraints": m, "active_cells": int(active.size),
            "feasibility_steps": int(n_feas), "objective_steps": int(n_obj),
            "budget": budget, "kernel": backend.NAME,
        })


def _feasible_value(mat, cost, q, tau):
    tau_f, val = _feasible_scale(mat, cost, q, tau)
    return tau_f, val


def _feasible_scale(mat, cost, q, tau):
    """Scale tau so the smallest constraint margin is exactly one."""
    margins = mat @ tau
    worst = float(np.min(margins))
    if worst <= 0.0:
        raise ConvergenceError("no feasible scaling: a constraint has zero mass",
                               residual=1.0 - worst)
    tau_f = tau / worst
    return tau_f, float(np.dot(cost, tau_f ** q))


def extremal_ring_metric(grid: Grid, ring, p: float) -> np.ndarray:
    """Analytic extremal metric pattern 1/(I r^((n-1)/(p-1))) for joining
    curves of a ring with unit weight, evaluated at cell centers.

    Used as a warm start for the primal solver.
    """
    n = grid.dim
    centers = grid.centers()
    r = np.linalg.norm(centers - ring.center_array, axis=-1)
    r = np.clip(r, ring.r1 * 1e-9, None)
    kappa = (n - 1.0) / (p - 1.0)
    if kappa == 1.0:
        integral = math.log(ring.r2 / ring.r1)
    else:
        integral = (ring.r2 ** (1.0 - kappa) - ring.r1 ** (1.0 - kappa)) / (1.0 - kappa)
    rho = 1.0 / (integral * r ** kappa)
    rho[(r < ring.r1) | (r > ring.r2)] = 0.0
    return rho
