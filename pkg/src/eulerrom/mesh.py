"""Structured meshes and cell-centered conserved fields.

Field values are stored component-major: shape (ncomp, nx) in 1D and
(ncomp, nx, ny) in 2D.  Flattening with ``ravel()`` therefore produces the
snapshot-column layout used throughout (all density cells, then all
x1-momentum cells, ...).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

PERIODIC = "periodic"
ZERO_GRADIENT = "zero-gradient"

# WENO5 needs a 3-cell ghost layer, hence at least 11 interior cells
MIN_CELLS = 11
NGHOST = 3


@dataclass(frozen=True)
class Mesh:
    """Uniform structured mesh on a box, with one boundary kind per axis."""

    lo: tuple
    hi: tuple
    cells: tuple
    bc: tuple

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.cells) == len(self.bc)):
            raise ConfigurationError("mesh axis descriptions disagree in length")
        if self.d not in (1, 2):
            raise ConfigurationError("only 1D and 2D meshes are supported")
        for n in self.cells:
            if n < MIN_CELLS:
                raise ConfigurationError(f"need at least {MIN_CELLS} cells per axis, got {n}")
        for lo, hi in zip(self.lo, self.hi):
            if not hi > lo:
                raise ConfigurationError("domain bounds must satisfy hi > lo")
        for kind in self.bc:
            if kind not in (PERIODIC, ZERO_GRADIENT):
                raise ConfigurationError(f"unknown boundary kind {kind!r}")

    @property
    def d(self):
        return len(self.cells)

    @property
    def ncomp(self):
        return self.d + 2

    @property
    def n_cells(self):
        return int(np.prod(self.cells))

    @property
    def dx(self):
        return tuple((hi - lo) / n for lo, hi, n in zip(self.lo, self.hi, self.cells))

    @property
    def cell_volume(self):
        return float(np.prod(self.dx))

    def centers(self, axis):
        """Cell-center coordinates along one axis."""
        dx = self.dx[axis]
        return self.lo[axis] + dx * (np.arange(self.cells[axis]) + 0.5)

    def center_grids(self):
        """Cell-center coordinate arrays broadcast to the full grid shape."""
        axes = [self.centers(a) for a in range(self.d)]
        return np.meshgrid(*axes, indexing="ij")


def interval_mesh(lo, hi, n, bc=ZERO_GRADIENT):
    return Mesh((lo,), (hi,), (n,), (bc,))


def box_mesh(lo, hi, n, bc=PERIODIC):
    return Mesh((lo, lo), (hi, hi), (n, n), (bc, bc))


@dataclass
class Field:
    """Cell-centered conserved (or entropy) variables on a mesh."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        expected = (self.mesh.ncomp,) + tuple(self.mesh.cells)
        if self.values.shape != expected:
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match mesh {expected}"
            )

    @classmethod
    def from_vector(cls, mesh, vec):
        values = np.asarray(vec, dtype=float).reshape((mesh.ncomp,) + tuple(mesh.cells))
        return cls(mesh, values)

    def vector(self):
        """Component-major flat copy (the snapshot-column layout)."""
        return self.values.reshape(-1).copy()

    def copy(self):
        return Field(self.mesh, self.values.copy())

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))
