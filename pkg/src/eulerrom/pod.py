"""Vector-valued POD in a prescribed weighted inner product.

The basis solves

    min  sum_i || S_i - Phi <Phi, S_i>_W ||_W   s.t.  <Phi, Phi>_W = I

via the Cholesky change of variables: with L'L = W, the left singular
vectors of L S are computed and mapped back through L^{-1}.  Modes are
ordered by singular value and sign-fixed so each mode's largest-magnitude
entry is positive.
"""

from dataclasses import dataclass

import numpy as np

from . import euler, formats, inner_products
from .errors import ConfigurationError, RankError

CONSERVED = "conserved"
ENTROPY = "entropy"

# rows x columns beyond which the n_S x n_S Gram eigenproblem is cheaper
_SNAPSHOT_METHOD_RATIO = 20


@dataclass
class PodBasis:
    """W-orthonormal modes, their singular values, and their provenance."""

    modes: np.ndarray          # (ncomp * n_cells, K)
    sigma: np.ndarray          # (K,)
    spectrum: np.ndarray       # all computed singular values
    ip_spec: inner_products.InnerProductSpec
    variables: str             # 'conserved' | 'entropy'

    @property
    def k(self):
        return self.modes.shape[1]

    @property
    def rows(self):
        return self.modes.shape[0]


def numerical_rank(sigma, shape):
    tol = sigma[0] * max(shape) * np.finfo(float).eps if sigma.size else 0.0
    return int(np.sum(sigma > tol))


def _weighted_svd(transformed):
    rows, cols = transformed.shape
    if rows > _SNAPSHOT_METHOD_RATIO * cols:
        # method of snapshots: eigendecompose the small Gram matrix
        gram = transformed.T @ transformed
        lam, vecs = np.linalg.eigh(gram)
        order = np.argsort(lam)[::-1]
        lam = np.clip(lam[order], 0.0, None)
        sigma = np.sqrt(lam)
        vecs = vecs[:, order]
        nonzero = sigma > 0
        left = np.zeros((rows, cols))
        left[:, nonzero] = (transformed @ vecs[:, nonzero]) / sigma[nonzero]
        return left, sigma
    left, sigma, _ = np.linalg.svd(transformed, full_matrices=False)
    return left, sigma


def compute_pod(matrix, weight, k, variables):
    """POD basis of the snapshot columns in the weight's inner product."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ConfigurationError("snapshot matrix must be 2-D")
    if variables not in (CONSERVED, ENTROPY):
        raise ConfigurationError(f"unknown variable set {variables!r}")
    expected_vars = inner_products.VARIABLES_FOR_KIND[weight.spec.kind]
    if variables != expected_vars:
        raise ConfigurationError(
            f"{weight.spec.kind} POD acts on {expected_vars} variables, got {variables}"
        )
    if k < 1:
        raise RankError("basis dimension must be at least 1")
    transformed = weight.chol_apply(matrix)
    left, sigma = _weighted_svd(transformed)
    rank = numerical_rank(sigma, matrix.shape)
    if k > rank:
        raise RankError(f"requested K={k} exceeds snapshot rank {rank}")
    modes = weight.chol_solve(left[:, :k])
    # deterministic sign: the largest-magnitude entry of each mode is positive
    pivot = np.argmax(np.abs(modes), axis=0)
    signs = np.sign(modes[pivot, np.arange(k)])
    signs[signs == 0] = 1.0
    modes *= signs
    return PodBasis(modes, sigma[:k].copy(), sigma.copy(), weight.spec, variables)


def truncate(basis, k):
    """First k modes of an existing basis (SVD truncation is nested)."""
    if k < 1 or k > basis.k:
        raise RankError(f"cannot truncate a K={basis.k} basis to K={k}")
    return PodBasis(
        basis.modes[:, :k].copy(), basis.sigma[:k].copy(), basis.spectrum.copy(),
        basis.ip_spec, basis.variables,
    )


def project(x, basis, weight):
    """Generalized coordinates <Phi, x>_W (columns if x is a matrix)."""
    return basis.modes.T @ weight.apply(x)


def reconstruct(basis, coords):
    return basis.modes @ coords


def total_projection_error(matrix, modes, weight):
    """Sum of squared W-norm projection errors of the snapshot columns."""
    weighted = weight.apply(matrix)
    coords = modes.T @ weighted
    resid = matrix - modes @ coords
    return float(np.sum(resid * weight.apply(resid)))


def random_w_orthonormal(weight, rows, k, rng):
    """A random W-orthonormal basis (competitor for optimality checks)."""
    raw = rng.standard_normal((rows, k))
    q, _ = np.linalg.qr(weight.chol_apply(raw))
    return weight.chol_solve(q)


def snapshots_in_variables(matrix, variables, gas, ncomp):
    """Return the snapshot matrix converted to the requested variable set."""
    if variables == CONSERVED:
        return matrix
    stacked = matrix.reshape(ncomp, -1)
    return euler.conserved_to_entropy(stacked, gas).reshape(matrix.shape)


def projection_error_by_variable(conserved_matrix, basis, weight, ncomp):
    """Relative projection error of the training set, per conserved variable.

    Entropy-variable bases are projected in entropy space and the
    reconstructions mapped back to conserved variables pointwise before
    slicing, so the reported errors are always for conserved quantities.
    """
    gas = basis.ip_spec.gas
    data = snapshots_in_variables(conserved_matrix, basis.variables, gas, ncomp)
    recon = reconstruct(basis, project(data, basis, weight))
    if basis.variables == ENTROPY:
        recon = euler.entropy_to_conserved(recon.reshape(ncomp, -1), gas).reshape(recon.shape)
    n_cells = conserved_matrix.shape[0] // ncomp
    ref = conserved_matrix.reshape(ncomp, n_cells, -1)
    diff = recon.reshape(ncomp, n_cells, -1) - ref
    num = np.sum(diff**2, axis=(1, 2))
    den = np.sum(ref**2, axis=(1, 2))
    return np.sqrt(num / den)


def save_basis(path, basis):
    formats.write_basis(path, basis)


def load_basis(path, mesh=None):
    """Rebuild a PodBasis (and its weight spec) from an ERPB file."""
    raw = formats.read_basis(path)
    gas = euler.GasModel(raw["gamma"], rho_ref=raw["rho_ref"], p_ref=raw["p_ref"])
    reference = tuple(raw["reference"]) if raw["reference"].size else None
    spec = inner_products.InnerProductSpec(raw["kind"], gas, reference)
    if mesh is not None and raw["modes"].shape[0] != mesh.ncomp * mesh.n_cells:
        raise ConfigurationError("basis rows do not match the mesh")
    return PodBasis(raw["modes"], raw["sigma"], raw["sigma"].copy(), spec, raw["variables"])
