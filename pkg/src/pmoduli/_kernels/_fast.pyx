# cython: language_level=3
"""Compiled hot kernels: p-energy evaluation and the modulus primal loop.

Mirrors the contracts of `_ref`; the modulus loop additionally maintains
constraint margins incrementally after single-row projection steps, which
is where the compiled backend earns its keep.
"""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport pow as c_pow

cnp.import_array()

NAME = "cython"


@cython.boundscheck(False)
@cython.wraparound(False)
def capacity_energy_grad(cnp.float64_t[::1] u, inv_len, cnp.uint8_t[::1] free,
                         dims, double cell_vol, double p, double eps,
                         bint want_grad=True):
    cdef Py_ssize_t nd = len(dims)
    if nd == 2:
        return _energy_grad_2d(u, inv_len[0], inv_len[1], free,
                               dims[0], dims[1], cell_vol, p, eps, want_grad)
    return _energy_grad_3d(u, inv_len[0], inv_len[1], inv_len[2], free,
                           dims[0], dims[1], dims[2], cell_vol, p, eps,
                           want_grad)


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
def _energy_grad_2d(cnp.float64_t[::1] u, cnp.float64_t[::1] inv0,
                    cnp.float64_t[::1] inv1, cnp.uint8_t[::1] free,
                    Py_ssize_t nx, Py_ssize_t ny, double cell_vol, double p,
                    double eps, bint want_grad):
    cdef Py_ssize_t m = nx * ny
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.zeros(m)
    cdef cnp.float64_t[::1] w = w_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad_arr = np.zeros(m)
    cdef cnp.float64_t[::1] grad = grad_arr
    cdef double energy = 0.0
    cdef double half_p = 0.5 * p
    cdef double s, d0, d1, ui, t
    cdef Py_ssize_t ix, iy, i
    cdef bint reg = p < 2.0
    for ix in range(nx):
        for iy in range(ny):
            i = ix * ny + iy
            ui = u[i]
            d0 = 0.0
            d1 = 0.0
            if ix + 1 < nx:
                d0 = (u[i + ny] - ui) * inv0[i]
            if iy + 1 < ny:
                d1 = (u[i + 1] - ui) * inv1[i]
            s = d0 * d0 + d1 * d1
            if reg:
                s += eps * eps
            if s > 0.0:
                energy += c_pow(s, half_p)
                if want_grad:
                    w[i] = cell_vol * p * c_pow(s, half_p - 1.0)
            elif want_grad and p == 2.0:
                w[i] = cell_vol * p
    energy *= cell_vol
    if not want_grad:
        return energy, None
    for ix in range(nx):
        for iy in range(ny):
            i = ix * ny + iy
            ui = u[i]
            if ix + 1 < nx:
                t = w[i] * (u[i + ny] - ui) * inv0[i] * inv0[i]
                grad[i] -= t
                grad[i + ny] += t
            if iy + 1 < ny:
                t = w[i] * (u[i + 1] - ui) * inv1[i] * inv1[i]
                grad[i] -= t
                grad[i + 1] += t
    for i in range(m):
        if not free[i]:
            grad[i] = 0.0
    return energy, grad_arr


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
def _energy_grad_3d(cnp.float64_t[::1] u, cnp.float64_t[::1] inv0,
                    cnp.float64_t[::1] inv1, cnp.float64_t[::1] inv2,
                    cnp.uint8_t[::1] free, Py_ssize_t nx, Py_ssize_t ny,
                    Py_ssize_t nz, double cell_vol, double p, double eps,
                    bint want_grad):
    cdef Py_ssize_t m = nx * ny * nz
    cdef Py_ssize_t syz = ny * nz
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.zeros(m)
    cdef cnp.float64_t[::1] w = w_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad_arr = np.zeros(m)
    cdef cnp.float64_t[::1] grad = grad_arr
    cdef double energy = 0.0
    cdef double half_p = 0.5 * p
    cdef double s, d0, d1, d2, ui, t
    cdef Py_ssize_t ix, iy, iz, i
    cdef bint reg = p < 2.0
    for ix in range(nx):
        for iy in range(ny):
            for iz in range(nz):
                i = (ix * ny + iy) * nz + iz
                ui = u[i]
                d0 = 0.0
                d1 = 0.0
                d2 = 0.0
                if ix + 1 < nx:
                    d0 = (u[i + syz] - ui) * inv0[i]
                if iy + 1 < ny:
                    d1 = (u[i + nz] - ui) * inv1[i]
                if iz + 1 < nz:
                    d2 = (u[i + 1] - ui) * inv2[i]
                s = d0 * d0 + d1 * d1 + d2 * d2
                if reg:
                    s += eps * eps
                if s > 0.0:
                    energy += c_pow(s, half_p)
                    if want_grad:
                        w[i] = cell_vol * p * c_pow(s, half_p - 1.0)
                elif want_grad and p == 2.0:
                    w[i] = cell_vol * p
    energy *= cell_vol
    if not want_grad:
        return energy, None
    for ix in range(nx):
        for iy in range(ny):
            for iz in range(nz):
                i = (ix * ny + iy) * nz + iz
                ui = u[i]
                if ix + 1 < nx:
                    t = w[i] * (u[i + syz] - ui) * inv0[i] * inv0[i]
                    grad[i] -= t
                    grad[i + syz] += t
                if iy + 1 < ny:
                    t = w[i] * (u[i + nz] - ui) * inv1[i] * inv1[i]
                    grad[i] -= t
                    grad[i + nz] += t
                if iz + 1 < nz:
                    t = w[i] * (u[i + 1] - ui) * inv2[i] * inv2[i]
                    grad[i] -= t
                    grad[i + 1] += t
    for i in range(m):
        if not free[i]:
            grad[i] = 0.0
    return energy, grad_arr


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
def modulus_primal(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                   cnp.float64_t[::1] data, cnp.float64_t[::1] row_norm_sq,
                   cnp.float64_t[::1] cost, double q,
                   cnp.ndarray[cnp.float64_t, ndim=1] tau_in, long budget,
                   double f_star):
    """Primal projected-subgradient loop with incremental margin updates.

    The CSC transpose of the constraint matrix is built once so a one-row
    projection only touches the margins of overlapping constraints.
    """
    cdef Py_ssize_t m = indptr.shape[0] - 1
    cdef Py_ssize_t nvar = tau_in.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tau_arr = tau_in.copy()
    cdef cnp.float64_t[::1] tau = tau_arr
    # Build CSC layout (column pointers into row-index/value arrays).
    import scipy.sparse as sp
    mat = sp.csr_matrix(
        (np.asarray(data), np.asarray(indices), np.asarray(indptr)),
        shape=(m, nvar))
    csc = mat.tocsc()
    cdef cnp.int64_t[::1] cptr = csc.indptr.astype(np.int64)
    cdef cnp.int64_t[::1] cidx = csc.indices.astype(np.int64)
    cdef cnp.float64_t[::1] cdat = csc.data
    cdef cnp.ndarray[cnp.float64_t, ndim=1] margins_arr = mat @ tau_arr
    cdef cnp.float64_t[::1] margins = margins_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_arr = tau_arr.copy()
    cdef cnp.float64_t[::1] best = best_arr
    cdef double best_f = np.inf
    cdef bint have_best = False
    cdef long n_feas = 0, n_obj = 0, it
    cdef Py_ssize_t i, j, k, kk, col
    cdef double worst, r, f, g, gn2, step, dtau, tj, acc
    for it in range(budget):
        # argmin over margins
        i = 0
        worst = margins[0]
        for j in range(1, m):
            if margins[j] < worst:
                worst = margins[j]
                i = j
        if worst < 1.0 - 1e-12:
            r = (1.0 - worst) / row_norm_sq[i]
            for k in range(indptr[i], indptr[i + 1]):
                col = indices[k]
                dtau = r * data[k]
                tau[col] += dtau
                for kk in range(cptr[col], cptr[col + 1]):
                    margins[cidx[kk]] += cdat[kk] * dtau
            n_feas += 1
        else:
            f = 0.0
            for j in range(nvar):
                f += cost[j] * c_pow(tau[j], q)
            if not have_best or f < best_f:
                best_f = f
                have_best = True
                for j in range(nvar):
                    best[j] = tau[j]
            if f - f_star <= 1e-13 * (1.0 if f < 1.0 else f):
                break
            gn2 = 0.0
            for j in range(nvar):
                gn2 += (q * cost[j] * c_pow(tau[j], q - 1.0)) ** 2
            if gn2 == 0.0:
                break
            step = (f - f_star) / gn2
            for j in range(nvar):
                tj = tau[j] - step * q * cost[j] * c_pow(tau[j], q - 1.0)
                tau[j] = tj if tj > 0.0 else 0.0
            n_obj += 1
            # full margin recompute after a global step
            for j in range(m):
                acc = 0.0
                for k in range(indptr[j], indptr[j + 1]):
                    acc += data[k] * tau[indices[k]]
                margins[j] = acc
    if not have_best:
        best_arr = tau_arr
        best_f = float(np.dot(np.asarray(cost), np.asarray(tau) ** q))
    return best_arr, best_f, n_feas, n_obj
