"""Uniform cubic grids over axis-aligned boxes in R^2 / R^3."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``cells_per_axis`` cubic cells of side ``h`` per axis.

    Constructed so that a designated anchor point falls on a cell center,
    which keeps radial sample curves off the cell boundaries.
    """

    dim: int
    lo: tuple
    cells_per_axis: int
    h: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvalidInputError("grid dimension must be 2 or 3")
        if self.cells_per_axis < 8:
            raise InvalidInputError("cells_per_axis must be >= 8")
        if not self.h > 0:
            raise InvalidInputError("cell size must be positive")
        if len(self.lo) != self.dim:
            raise InvalidInputError("grid origin dimension mismatch")

    @classmethod
    def around(cls, center, radius: float, cells_per_axis: int) -> "Grid":
        """Grid covering the ball of ``radius`` about ``center``, with the
        center aligned to a cell center."""
        center = np.asarray(center, dtype=float)
        n = cells_per_axis
        h = 2.0 * radius / (n - 1)
        i0 = n // 2
        lo = center - (i0 + 0.5) * h
        return cls(dim=center.size, lo=tuple(lo), cells_per_axis=n, h=h)

    @property
    def hi(self) -> tuple:
        return tuple(l + self.cells_per_axis * self.h for l in self.lo)

    @property
    def shape(self) -> tuple:
        return (self.cells_per_axis,) * self.dim

    @property
    def n_cells(self) -> int:
        return self.cells_per_axis ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def lo_array(self) -> np.ndarray:
        return np.asarray(self.lo, dtype=float)

    def contains_ball(self, center, radius: float, margin_cells: float = 1.0) -> bool:
        c = np.asarray(center, dtype=float)
        pad = radius + margin_cells * self.h
        return bool(np.all(c - pad >= self.lo_array)
                    and np.all(c + pad <= np.asarray(self.hi)))

    def cell_indices(self, points) -> np.ndarray:
        """Flat cell index of each point (points must lie inside the box)."""
        pts = np.asarray(points, dtype=float)
        ijk = np.floor((pts - self.lo_array) / self.h).astype(np.int64)
        n = self.cells_per_axis
        if np.any(ijk < 0) or np.any(ijk >= n):
            raise InvalidInputError("point outside grid box")
        flat = ijk[..., 0]
        for d in range(1, self.dim):
            flat = flat * n + ijk[..., d]
        return flat

    def centers(self) -> np.ndarray:
        """(n_cells, dim) array of cell centers, flat index order."""
        n = self.cells_per_axis
        axes = [self.lo[d] + self.h * (np.arange(n) + 0.5) for d in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def center_of(self, flat_index: int) -> np.ndarray:
        n = self.cells_per_axis
        idx = []
        rem = int(flat_index)
        for _ in range(self.dim):
            idx.append(rem % n)
            rem //= n
        idx = idx[::-1]
        return self.lo_array + self.h * (np.asarray(idx) + 0.5)

    def scaled(self, factor: float) -> "Grid":
        """Image grid under x -> factor * x (boxes correspond exactly)."""
        if not factor > 0:
            raise InvalidInputError("scale factor must be positive")
        return Grid(dim=self.dim, lo=tuple(factor * l for l in self.lo),
                    cells_per_axis=self.cells_per_axis, h=self.h * factor)


def export_field_csv(grid: Grid, values, stream) -> None:
    """Write a per-cell field as CSV rows ``idx,x,y[,z],value``."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size != grid.n_cells:
        raise InvalidInputError("field size does not match grid")
    header = "idx,x,y,value" if grid.dim == 2 else "idx,x,y,z,value"
    stream.write(header + "\n")
    centers = grid.centers()
    for i in range(values.size):
        coords = ",".join(repr(float(c)) for c in centers[i])
        stream.write(f"{i},{coords},{float(values[i])!r}\n")
