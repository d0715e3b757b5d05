"""Finite sampled curve and surface families on grids.

Curves are polylines with per-cell length incidence computed by exact
segment-cell clipping; surfaces are discretized concentric spheres (or
circles) carrying per-cell area weights.  Push-forward maps the stored
geometry pointwise and rebuilds incidence on the image-side grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..mappings import Mapping
from ..moduli import RingSpec
from .grid import Grid


@dataclass
class CurveFamily:
    """Sampled family of curves (k = 1) with length incidence per cell."""

    grid: Grid
    polylines: list
    incidence: list
    k: int = 1

    def __len__(self):
        return len(self.polylines)

    def member_totals(self) -> np.ndarray:
        return np.array([w.sum() for _, w in self.incidence])


@dataclass
class SurfaceFamily:
    """Sampled family of concentric (n-1)-spheres with area incidence."""

    grid: Grid
    k: int
    incidence: list
    radii: tuple = ()
    circles: list = field(default_factory=list)
    vertex_grids: list = field(default_factory=list)

    def __len__(self):
        return len(self.incidence)

    def member_totals(self) -> np.ndarray:
        return np.array([w.sum() for _, w in self.incidence])


def fibonacci_directions(count: int) -> np.ndarray:
    """Near-uniform unit directions on S^2 from the Fibonacci lattice."""
    k = np.arange(count)
    z = 1.0 - 2.0 * (k + 0.5) / count
    golden = math.pi * (3.0 - math.sqrt(5.0))
    theta = golden * k
    rho = np.sqrt(1.0 - z * z)
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=-1)


def _directions(n: int, count: int) -> np.ndarray:
    if count < 1:
        raise InvalidInputError("need at least one direction")
    if n == 2:
        theta = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return fibonacci_directions(count)


def _clip_segment(a, b, grid: Grid, bins: dict) -> None:
    """Accumulate the exact per-cell lengths of the segment a -> b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    seg_len = float(np.linalg.norm(d))
    if seg_len == 0.0:
        return
    ts = [0.0, 1.0]
    lo = grid.lo_array
    h = grid.h
    for axis in range(grid.dim):
        if d[axis] == 0.0:
            continue
        c0 = (a[axis] - lo[axis]) / h
        c1 = (b[axis] - lo[axis]) / h
        kmin = int(math.floor(min(c0, c1))) + 1
        kmax = int(math.ceil(max(c0, c1))) - 1
        for k in range(kmin, kmax + 1):
            t = (k - c0) / (c1 - c0)
            if 0.0 < t < 1.0:
                ts.append(t)
    ts = sorted(set(ts))
    for t0, t1 in zip(ts[:-1], ts[1:]):
        if t1 - t0 <= 0.0:
            continue
        mid = a + (0.5 * (t0 + t1)) * d
        cell = int(grid.cell_indices(mid[None, :])[0])
        bins[cell] = bins.get(cell, 0.0) + seg_len * (t1 - t0)


def clip_polyline(points, grid: Grid):
    """Exact per-cell length incidence of a polyline.

    Consecutive vertices in the same cell take the vectorized fast path;
    only boundary-crossing segments go through the exact clipper.  Total
    incidence equals the polyline length to roundoff by construction.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidInputError("polyline needs at least two vertices")
    a = pts[:-1]
    b = pts[1:]
    lengths = np.linalg.norm(b - a, axis=-1)
    cell_a = grid.cell_indices(a)
    cell_b = grid.cell_indices(b)
    same = cell_a == cell_b
    bins: dict = {}
    if np.any(same):
        cells_fast = cell_a[same]
        lens_fast = lengths[same]
        order = np.argsort(cells_fast, kind="stable")
        cells_fast = cells_fast[order]
        lens_fast = lens_fast[order]
        uniq, start = np.unique(cells_fast, return_index=True)
        sums = np.add.reduceat(lens_fast, start)
        for c, s in zip(uniq, sums):
            bins[int(c)] = bins.get(int(c), 0.0) + float(s)
    for i in np.nonzero(~same)[0]:
        _clip_segment(a[i], b[i], grid, bins)
    cells = np.fromiter(bins.keys(), dtype=np.int64, count=len(bins))
    weights = np.fromiter(bins.values(), dtype=float, count=len(bins))
    order = np.argsort(cells)
    return cells[order], weights[order]


def _radial_polyline(center, direction, r1, r2, step):
    n_seg = max(2, int(math.ceil((r2 - r1) / step)))
    radii = np.linspace(r1, r2, n_seg + 1)
    return center + radii[:, None] * direction


def sample_joining_curves(ring: RingSpec, grid: Grid, count: int) -> CurveFamily:
    """Radial segments from the inner to the outer sphere at equidistributed
    directions, discretized at sub-cell resolution."""
    if ring.dim != grid.dim:
        raise InvalidInputError("ring/grid dimension mismatch")
    if not grid.contains_ball(ring.center, ring.r2):
        raise InvalidInputError("ring does not fit inside the grid box")
    dirs = _directions(ring.dim, count)
    center = ring.center_array
    step = grid.h / 4.0
    polylines = []
    incidence = []
    for d in dirs:
        poly = _radial_polyline(center, d, ring.r1, ring.r2, step)
        polylines.append(poly)
        incidence.append(clip_polyline(poly, grid))
    return CurveFamily(grid=grid, polylines=polylines, incidence=incidence)


def _circle_polyline(center, r, h):
    m = max(256, int(math.ceil(8.0 * 2.0 * math.pi * r / h)))
    theta = 2.0 * math.pi * (np.arange(m + 1) + 0.5) / m
    pts = center + r * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    pts[-1] = pts[0]  # close the polygon exactly
    return pts


def _sphere_vertex_grid(center, r, h):
    n_pol = max(48, int(math.ceil(math.pi * r / h)))
    n_azi = 2 * n_pol
    theta = math.pi * np.arange(n_pol + 1) / n_pol
    phi = 2.0 * math.pi * (np.arange(n_azi) + 0.5) / n_azi
    sin_t = np.sin(theta)[:, None]
    cos_t = np.cos(theta)[:, None]
    x = sin_t * np.cos(phi)[None, :]
    y = sin_t * np.sin(phi)[None, :]
    z = cos_t * np.ones((1, n_azi))
    verts = np.stack([x, y, z], axis=-1)
    return np.asarray(center, dtype=float) + r * verts


def _bin_weights(grid: Grid, points, weights):
    cells = grid.cell_indices(points)
    order = np.argsort(cells, kind="stable")
    cells = cells[order]
    w = np.asarray(weights, dtype=float)[order]
    uniq, start = np.unique(cells, return_index=True)
    sums = np.add.reduceat(w, start)
    return uniq.astype(np.int64), sums


def _sphere_incidence_exact(grid: Grid, center, r, verts):
    """Exact spherical patch areas binned by patch center cell."""
    n_pol = verts.shape[0] - 1
    n_azi = verts.shape[1]
    theta = math.pi * np.arange(n_pol + 1) / n_pol
    band = np.cos(theta[:-1]) - np.cos(theta[1:])
    areas = np.repeat(band * (2.0 * math.pi / n_azi) * r * r, n_azi)
    mid_theta = 0.5 * (theta[:-1] + theta[1:])
    phi = 2.0 * math.pi * (np.arange(n_azi) + 1.0) / n_azi
    sin_t = np.sin(mid_theta)[:, None]
    centers = np.stack([
        sin_t * np.cos(phi)[None, :],
        sin_t * np.sin(phi)[None, :],
        np.cos(mid_theta)[:, None] * np.ones((1, n_azi)),
    ], axis=-1).reshape(-1, 3)
    centers = np.asarray(center, dtype=float) + r * centers
    return _bin_weights(grid, centers, areas)


def _quad_patch_areas(verts):
    """Triangulated areas and centroids of a mapped lat-long vertex grid."""
    v00 = verts[:-1, :, :]
    v10 = verts[1:, :, :]
    v01 = np.roll(verts, -1, axis=1)[:-1, :, :]
    v11 = np.roll(verts, -1, axis=1)[1:, :, :]
    a1 = 0.5 * np.linalg.norm(np.cross(v10 - v00, v01 - v00), axis=-1)
    a2 = 0.5 * np.linalg.norm(np.cross(v10 - v11, v01 - v11), axis=-1)
    areas = (a1 + a2).reshape(-1)
    centers = 0.25 * (v00 + v10 + v01 + v11)
    return centers.reshape(-1, 3), areas


def sample_separating_surfaces(ring: RingSpec, grid: Grid,
                               count: int) -> SurfaceFamily:
    """Concentric spheres/circles at radii equidistributed in (r1, r2)."""
    if ring.dim != grid.dim:
        raise InvalidInputError("ring/grid dimension mismatch")
    if not grid.contains_ball(ring.center, ring.r2):
        raise InvalidInputError("ring does not fit inside the grid box")
    if count < 1:
        raise InvalidInputError("need at least one surface")
    center = ring.center_array
    radii = ring.r1 + (np.arange(count) + 0.5) * (ring.r2 - ring.r1) / count
    incidence = []
    circles = []
    vertex_grids = []
    for r in radii:
        if ring.dim == 2:
            poly = _circle_polyline(center, r, grid.h)
            circles.append(poly)
            incidence.append(clip_polyline(poly, grid))
        else:
            verts = _sphere_vertex_grid(center, r, grid.h)
            vertex_grids.append(verts)
            incidence.append(_sphere_incidence_exact(grid, center, r, verts))
    return SurfaceFamily(grid=grid, k=ring.dim - 1, incidence=incidence,
                         radii=tuple(float(r) for r in radii),
                         circles=circles, vertex_grids=vertex_grids)


def push_forward_family(mapping: Mapping, family, grid: Grid):
    """Image family under ``mapping``: maps stored geometry pointwise and
    rebuilds incidence against the image-side grid."""
    if isinstance(family, CurveFamily):
        polylines = [mapping.evaluate_batch(poly) for poly in family.polylines]
        incidence = [clip_polyline(poly, grid) for poly in polylines]
        return CurveFamily(grid=grid, polylines=polylines, incidence=incidence)
    if not isinstance(family, SurfaceFamily):
        raise InvalidInputError("unsupported family type")
    if family.circles:
        circles = [mapping.evaluate_batch(poly) for poly in family.circles]
        incidence = [clip_polyline(poly, grid) for poly in circles]
        return SurfaceFamily(grid=grid, k=family.k, incidence=incidence,
                             radii=family.radii, circles=circles)
    vertex_grids = []
    incidence = []
    for verts in family.vertex_grids:
        shape = verts.shape
        mapped = mapping.evaluate_batch(verts.reshape(-1, 3)).reshape(shape)
        vertex_grids.append(mapped)
        centers, areas = _quad_patch_areas(mapped)
        incidence.append(_bin_weights(grid, centers, areas))
    return SurfaceFamily(grid=grid, k=family.k, incidence=incidence,
                         radii=family.radii, vertex_grids=vertex_grids)
