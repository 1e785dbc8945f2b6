"""Weighted inner products over fields: L2, non-dimensional L2*, and the
two entropy-based products built from the transform Jacobian at a fixed
background state.

Every product is represented by a single symmetric positive definite
(d+2) x (d+2) block shared by all cells (references are spatially
constant) times the cell volume:

    <u, v> = sum_cells  u_c' B v_c * vol.

The upper-triangular Cholesky factor L with L'L = B maps the weighted
product onto the plain Euclidean one, which is what the POD and the
least-squares residual stacking consume.
"""

from dataclasses import dataclass

import numpy as np

from . import euler
from .errors import ConfigurationError

L2 = "l2"
L2STAR = "l2star"
ENTROPY_A = "entropy_a"
ENTROPY_ATILDE = "entropy_atilde"

KINDS = (L2, L2STAR, ENTROPY_A, ENTROPY_ATILDE)

# which variable set a product is meant to weigh
VARIABLES_FOR_KIND = {
    L2: "conserved",
    L2STAR: "conserved",
    ENTROPY_A: "entropy",
    ENTROPY_ATILDE: "conserved",
}


@dataclass(frozen=True)
class InnerProductSpec:
    """Inner-product kind plus whatever reference data the kind needs.

    reference is None for l2, the per-component scales for l2star, the
    background entropy state V_inf for entropy_a, and the background
    conserved state U_inf for entropy_atilde.
    """

    kind: str
    gas: euler.GasModel
    reference: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown inner product {self.kind!r}")
        if self.kind != L2 and self.reference is None:
            raise ConfigurationError(f"{self.kind} requires a reference state")

    def reference_array(self):
        return None if self.reference is None else np.asarray(self.reference, dtype=float)


def reference_for_l2star(cfg):
    """Free-stream component scales (rho, rho*a per axis, rho*a^2).

    Deliberately built from the configuration, never from snapshot means,
    which can produce zero or negative scales.
    """
    return cfg.component_scales()


def reference_from_snapshots(matrix, kind, gas, ncomp):
    """Background state for the entropy products: the snapshot mean.

    entropy_a averages the pointwise entropy variables of every snapshot;
    entropy_atilde averages the conserved snapshots.  Both collapse space
    and time to a single reference point.
    """
    if kind not in (ENTROPY_A, ENTROPY_ATILDE):
        raise ConfigurationError(f"{kind} does not take a snapshot reference")
    if matrix.shape[0] % ncomp:
        raise ConfigurationError("snapshot row count is not a multiple of the state size")
    stacked = matrix.reshape(ncomp, -1)
    if kind == ENTROPY_ATILDE:
        return tuple(stacked.mean(axis=1))
    v = euler.conserved_to_entropy(stacked, gas)
    return tuple(v.mean(axis=1))


class WeightOperator:
    """SPD per-cell block times cell volume, with its Cholesky factor."""

    def __init__(self, spec, block, mesh):
        block = np.asarray(block, dtype=float)
        if not np.allclose(block, block.T, atol=1e-12 * max(1.0, np.abs(block).max())):
            raise ConfigurationError("weight block is not symmetric")
        try:
            lower = np.linalg.cholesky(block)
        except np.linalg.LinAlgError as err:
            raise ConfigurationError("weight block is not positive definite") from err
        self.spec = spec
        self.block = block
        self.chol = lower.T  # upper triangular, chol' chol = block
        self.ncomp = block.shape[0]
        self.volume = mesh.cell_volume
        self.n_cells = mesh.n_cells

    def _components(self, x):
        x = np.asarray(x, dtype=float)
        lead = x.shape[0]
        if lead != self.ncomp * self.n_cells:
            raise ConfigurationError("field length does not match the weight's mesh")
        return x.reshape((self.ncomp, self.n_cells) + x.shape[1:])

    def _flatten(self, comps, like):
        return comps.reshape((self.ncomp * self.n_cells,) + like.shape[1:])

    def apply(self, x):
        """W x, i.e. volume * B applied cellwise."""
        comps = self._components(x)
        out = self.volume * np.einsum("ij,jn...->in...", self.block, comps)
        return self._flatten(out, np.asarray(x))

    def inner(self, u, v):
        return float(np.sum(np.asarray(u) * self.apply(v)))

    def norm(self, u):
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def chol_apply(self, x):
        """L x scaled by sqrt(volume); <u,v>_W == (Lu, Lv) Euclidean."""
        comps = self._components(x)
        out = np.sqrt(self.volume) * np.einsum("ij,jn...->in...", self.chol, comps)
        return self._flatten(out, np.asarray(x))

    def chol_solve(self, x):
        comps = self._components(x)
        flat = comps.reshape(self.ncomp, -1)
        out = np.linalg.solve(self.chol, flat) / np.sqrt(self.volume)
        return self._flatten(out.reshape(comps.shape), np.asarray(x))


def build_weight(spec, mesh):
    """Construct the weight operator for an inner-product spec on a mesh."""
    ncomp = mesh.ncomp
    ref = spec.reference_array()
    if spec.kind == L2:
        block = np.eye(ncomp)
    elif spec.kind == L2STAR:
        if ref.shape != (ncomp,) or np.any(ref <= 0.0):
            raise ConfigurationError("l2star reference must be positive, one per component")
        block = np.diag(1.0 / ref**2)
    elif spec.kind == ENTROPY_A:
        u_inf = euler.entropy_to_conserved(ref, spec.gas)
        block = euler.entropy_jacobian(u_inf, spec.gas)
    else:
        block = euler.entropy_jacobian_inverse(ref, spec.gas)
    return WeightOperator(spec, block, mesh)


def inner(u, v, weight):
    return weight.inner(u, v)


def cholesky_apply(weight, x):
    return weight.chol_apply(x)


def cholesky_solve(weight, x):
    return weight.chol_solve(x)


def spec_for_config(kind, cfg, snapshots=None):
    """Assemble an InnerProductSpec from a problem config (and snapshots
    for the entropy kinds, whose reference is the training mean)."""
    gas = cfg.gas()
    if kind == L2:
        return InnerProductSpec(L2, gas)
    if kind == L2STAR:
        return InnerProductSpec(L2STAR, gas, reference_for_l2star(cfg))
    if snapshots is None:
        raise ConfigurationError(f"{kind} needs training snapshots for its reference state")
    matrix = snapshots.matrix if hasattr(snapshots, "matrix") else snapshots
    ncomp = cfg.mesh().ncomp
    return InnerProductSpec(kind, gas, reference_from_snapshots(matrix, kind, gas, ncomp))
