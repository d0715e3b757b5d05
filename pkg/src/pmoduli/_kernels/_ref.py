"""Pure NumPy reference implementation of the hot kernels.

Same contracts as the compiled extension `_fast`; selected at import when
the extension is unavailable (or forced via PMODULI_KERNEL=python).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

NAME = "python"


def capacity_energy_grad(u, inv_len, free, dims, cell_vol, p, eps,
                         want_grad=True):
    """p-Dirichlet energy and gradient on a box grid.

    Per cell, |grad u| is composed of forward differences scaled by the
    per-face inverse gap lengths in ``inv_len`` (zero entries skip a face).
    ``free`` marks cells whose gradient entries are kept; Dirichlet cells
    get zero gradient.  Returns (energy, grad_flat_or_None).
    """
    nd = len(dims)
    u_nd = u.reshape(dims)
    free_nd = free.reshape(dims).astype(bool)
    diffs = []
    for d in range(nd):
        sl_own = tuple(slice(0, -1) if k == d else slice(None) for k in range(nd))
        sl_nb = tuple(slice(1, None) if k == d else slice(None) for k in range(nd))
        du = np.zeros(dims)
        du[sl_own] = (u_nd[sl_nb] - u_nd[sl_own]) * inv_len[d].reshape(dims)[sl_own]
        diffs.append(du)
    s = diffs[0] * diffs[0]
    for du in diffs[1:]:
        s = s + du * du
    if p < 2.0:
        s = s + eps * eps
    energy = cell_vol * float(np.sum(s ** (0.5 * p)))
    if not want_grad:
        return energy, None
    with np.errstate(divide="ignore", invalid="ignore"):
        w = s ** (0.5 * p - 1.0)
    w[~np.isfinite(w)] = 0.0
    w *= cell_vol * p
    grad = np.zeros(dims)
    for d in range(nd):
        sl_own = tuple(slice(0, -1) if k == d else slice(None) for k in range(nd))
        sl_nb = tuple(slice(1, None) if k == d else slice(None) for k in range(nd))
        t = w * diffs[d] * inv_len[d].reshape(dims)
        grad -= t
        grad[sl_nb] += t[sl_own]
    grad[~free_nd] = 0.0
    return energy, grad.ravel()


def modulus_primal(indptr, indices, data, row_norm_sq, cost, q, tau, budget,
                   f_star):
    """Projected-subgradient loop with Polyak steps.

    While some constraint margin sits below 1, projects onto the most
    violated halfspace; at feasible iterates takes a Polyak objective step
    toward the certified target ``f_star``.  Returns the best feasible
    point seen, its objective, and step counts.
    """
    m = len(indptr) - 1
    mat = sp.csr_matrix((data, indices, indptr), shape=(m, tau.size))
    margins = mat @ tau
    best_tau = None
    best_f = np.inf
    n_feas = 0
    n_obj = 0
    for _ in range(budget):
        i = int(np.argmin(margins))
        worst = margins[i]
        if worst < 1.0 - 1e-12:
            r = (1.0 - worst) / row_norm_sq[i]
            lo, hi = indptr[i], indptr[i + 1]
            tau[indices[lo:hi]] += r * data[lo:hi]
            n_feas += 1
        else:
            f = float(np.dot(cost, tau ** q))
            if f < best_f:
                best_f = f
                best_tau = tau.copy()
            gap = f - f_star
            if gap <= 1e-13 * max(abs(f), 1.0):
                break
            g = q * cost * tau ** (q - 1.0)
            gn2 = float(np.dot(g, g))
            if gn2 == 0.0:
                break
            tau = np.maximum(tau - (gap / gn2) * g, 0.0)
            n_obj += 1
        margins = mat @ tau
    if best_tau is None:
        best_tau = tau
        best_f = float(np.dot(cost, tau ** q))
    return best_tau, best_f, n_feas, n_obj
