"""eulerrom: a finite-volume Euler solver plus a model-reduction laboratory
for comparing inner-product choices in POD-Galerkin and windowed
least-squares reduced-order models."""

from .euler import GasModel
from .mesh import Field, Mesh
from .problems import ProblemConfig, SnapshotSet, run_fom
from .solver import WenoConfig

__all__ = [
    "Field",
    "GasModel",
    "Mesh",
    "ProblemConfig",
    "SnapshotSet",
    "WenoConfig",
    "run_fom",
]

__version__ = "0.1.0"
