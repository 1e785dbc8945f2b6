"""Projection-based reduced-order models of the finite-volume Euler solver.

Seven formulations are provided: three Galerkin ROMs stepped with RK4 and
four windowed least-squares (WLS) ROMs that minimize the Crank-Nicolson
residual over non-overlapping time windows with a damped Gauss-Newton
solver.  Each formulation is tied to one basis variable set, one POD inner
product, and one projection/minimization inner product; the pairings are
enforced at construction time.
"""

import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import euler, inner_products, pod, solver
from .errors import PairingError
from .lstsq import LeastSquaresSettings, gauss_newton_solve
from .mesh import Field

GALERKIN = "galerkin"
WLS = "wls"

_FD_STEP = 1e-7


@dataclass(frozen=True)
class Formulation:
    name: str
    kind: str
    basis_variables: str
    basis_ip: str
    weight_ip: str


FORMULATIONS = {
    f.name: f
    for f in (
        Formulation("gal_cons_l2", GALERKIN, pod.CONSERVED, inner_products.L2, inner_products.L2),
        Formulation("gal_cons_l2star", GALERKIN, pod.CONSERVED, inner_products.L2STAR, inner_products.L2STAR),
        Formulation("gal_ent_l2", GALERKIN, pod.ENTROPY, inner_products.ENTROPY_A, inner_products.L2),
        Formulation("wls_cons_l2", WLS, pod.CONSERVED, inner_products.L2, inner_products.L2),
        Formulation("wls_cons_l2star", WLS, pod.CONSERVED, inner_products.L2STAR, inner_products.L2STAR),
        Formulation("wls_cons_ent", WLS, pod.CONSERVED, inner_products.L2STAR, inner_products.ENTROPY_ATILDE),
        Formulation("wls_ent_ent", WLS, pod.ENTROPY, inner_products.ENTROPY_A, inner_products.ENTROPY_ATILDE),
    )
}

GALERKIN_FORMULATIONS = tuple(n for n, f in FORMULATIONS.items() if f.kind == GALERKIN)
WLS_FORMULATIONS = tuple(n for n, f in FORMULATIONS.items() if f.kind == WLS)

# methods whose results are invariant under re-dimensionalization
DIMENSIONALLY_CONSISTENT = tuple(
    n for n in FORMULATIONS if n not in ("gal_cons_l2", "wls_cons_l2")
)


def pairing_table():
    lines = ["formulation        basis vars  basis ip        projection/minimization ip"]
    for f in FORMULATIONS.values():
        lines.append(f"{f.name:<18} {f.basis_variables:<11} {f.basis_ip:<15} {f.weight_ip}")
    return "\n".join(lines)


def default_window(problem):
    """Window length in steps: 10 dt for the shock tube, 2 dt for 2D."""
    return 10 if problem == "sod" else 2


@dataclass
class RomSpec:
    """A fully assembled ROM: formulation, basis, weight, and solver setup."""

    formulation: str
    basis: pod.PodBasis
    weight: inner_products.WeightOperator
    mesh: object
    gas: euler.GasModel
    weno: solver.WenoConfig
    dt: float
    window: int = 1
    settings: LeastSquaresSettings = dataclass_field(default_factory=LeastSquaresSettings)

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise PairingError(f"unknown formulation {self.formulation!r}\n{pairing_table()}")
        fmt = FORMULATIONS[self.formulation]
        problems = []
        if self.basis.variables != fmt.basis_variables:
            problems.append(
                f"basis holds {self.basis.variables} variables, needs {fmt.basis_variables}"
            )
        if self.basis.ip_spec.kind != fmt.basis_ip:
            problems.append(
                f"basis was built in {self.basis.ip_spec.kind}, needs {fmt.basis_ip}"
            )
        if self.weight.spec.kind != fmt.weight_ip:
            problems.append(
                f"weight is {self.weight.spec.kind}, needs {fmt.weight_ip}"
            )
        if self.basis.rows != self.mesh.ncomp * self.mesh.n_cells:
            problems.append("basis rows do not match the mesh")
        if fmt.kind == WLS and self.window < 1:
            problems.append("WLS window length must be >= 1")
        if problems:
            raise PairingError(
                f"invalid ROM pairing for {self.formulation}: "
                + "; ".join(problems)
                + "\n"
                + pairing_table()
            )

    @property
    def kind(self):
        return FORMULATIONS[self.formulation].kind

    @property
    def k(self):
        return self.basis.k

    @property
    def is_entropy_state(self):
        return self.basis.variables == pod.ENTROPY

    def state_values(self, coords):
        """Conserved-variable grid values reconstructed from coordinates."""
        vec = self.basis.modes @ coords
        vals = vec.reshape((self.mesh.ncomp,) + tuple(self.mesh.cells))
        if self.is_entropy_state:
            vals = euler.entropy_to_conserved_raw(vals, self.gas)
        return vals

    def conserved_matrix(self, coords_rows):
        """Reconstruct many states at once; coords_rows is (m, K)."""
        vecs = self.basis.modes @ np.asarray(coords_rows).T
        if self.is_entropy_state:
            stacked = vecs.reshape(self.mesh.ncomp, -1)
            vecs = euler.entropy_to_conserved_raw(stacked, self.gas).reshape(vecs.shape)
        return vecs

    def project_initial(self, ic_field):
        """Coordinates of the initial condition in the basis's own product."""
        vec = ic_field.vector()
        if self.is_entropy_state:
            vals = euler.conserved_to_entropy(ic_field.values, self.gas)
            vec = vals.reshape(-1)
        basis_weight = inner_products.build_weight(self.basis.ip_spec, self.mesh)
        return pod.project(vec, self.basis, basis_weight)


def build_rom_spec(formulation, basis, cfg, snapshots=None, window=None, settings=None):
    """Wire a basis and a problem configuration into a RomSpec."""
    if formulation not in FORMULATIONS:
        raise PairingError(f"unknown formulation {formulation!r}\n{pairing_table()}")
    fmt = FORMULATIONS[formulation]
    ip_spec = inner_products.spec_for_config(fmt.weight_ip, cfg, snapshots)
    mesh = cfg.mesh()
    weight = inner_products.build_weight(ip_spec, mesh)
    return RomSpec(
        formulation=formulation,
        basis=basis,
        weight=weight,
        mesh=mesh,
        gas=cfg.gas(),
        weno=cfg.weno(),
        dt=cfg.dt,
        window=window if window is not None else default_window(cfg.problem),
        settings=settings if settings is not None else LeastSquaresSettings(),
    )


@dataclass
class WindowReport:
    iterations: int
    grad_norm: float
    converged: bool
    costs: list


@dataclass
class RomTrajectory:
    """Generalized coordinates per time step plus run diagnostics."""

    spec: RomSpec
    coords: np.ndarray          # (n_saved, K), row 0 is t = 0
    times: np.ndarray
    stable: bool
    t_first_nan: float | None
    wall_seconds: float
    window_reports: list

    @property
    def n_saved(self):
        return self.coords.shape[0]

    def conserved_field(self, j):
        return Field.from_vector(self.spec.mesh, self.spec.state_values(self.coords[j]).reshape(-1))

    def conserved_at(self, indices):
        """(rows, len(indices)) conserved snapshots at the given steps."""
        return self.spec.conserved_matrix(self.coords[np.asarray(indices)])


# ------------------------------------------------------------- Galerkin ----

class GalerkinOperator:
    """The K-dimensional right-hand side c -> M(c)^{-1} Phi' W f(u(c))."""

    def __init__(self, spec):
        self.spec = spec
        self.rhs = solver.make_rhs(spec.mesh, spec.gas, spec.weno)
        self.phi = spec.basis.modes
        self.weighted_phi = spec.weight.apply(self.phi)
        self.grid_shape = (spec.mesh.ncomp,) + tuple(spec.mesh.cells)
        self.n_cells = spec.mesh.n_cells
        if spec.is_entropy_state:
            self.mass = None  # state dependent
            self.phi_cellwise = self.phi.reshape(
                spec.mesh.ncomp, self.n_cells, spec.k
            )
        else:
            self.mass = self.phi.T @ self.weighted_phi

    def coords_rate(self, coords):
        spec = self.spec
        if spec.is_entropy_state:
            v_vals = (self.phi @ coords).reshape(self.grid_shape)
            u_vals = euler.entropy_to_conserved_raw(v_vals, spec.gas)
            rate = self.rhs(u_vals)
            jac = euler.entropy_jacobian_raw(u_vals, spec.gas).reshape(
                self.n_cells, spec.mesh.ncomp, spec.mesh.ncomp
            )
            jac_phi = np.einsum("nij,jnk->ink", jac, self.phi_cellwise)
            jac_phi = jac_phi.reshape(spec.basis.rows, spec.k)
            mass = self.phi.T @ spec.weight.apply(jac_phi)
        else:
            u_vals = (self.phi @ coords).reshape(self.grid_shape)
            rate = self.rhs(u_vals)
            mass = self.mass
        load = self.weighted_phi.T @ rate.reshape(-1)
        if not np.all(np.isfinite(mass)) or not np.all(np.isfinite(load)):
            return np.full(spec.k, np.nan)
        try:
            return np.linalg.solve(mass, load)
        except np.linalg.LinAlgError:
            return np.full(spec.k, np.nan)


def galerkin_rhs(coords, spec):
    """One evaluation of the Galerkin coordinate rate (see GalerkinOperator)."""
    return GalerkinOperator(spec).coords_rate(np.asarray(coords, dtype=float))


def run_galerkin(spec, ic_field, n_steps):
    """RK4-integrate a Galerkin ROM; NaN aborts the run and flags it."""
    if spec.kind != GALERKIN:
        raise PairingError(f"{spec.formulation} is not a Galerkin formulation")
    op = GalerkinOperator(spec)
    coords = np.empty((n_steps + 1, spec.k))
    coords[0] = spec.project_initial(ic_field)
    start = time.perf_counter()
    stable = True
    t_first_nan = None
    n_saved = n_steps + 1
    for step in range(1, n_steps + 1):
        coords[step] = solver.rk4_step(coords[step - 1], spec.dt, op.coords_rate)
        if not np.all(np.isfinite(coords[step])):
            stable = False
            t_first_nan = step * spec.dt
            n_saved = step
            break
    wall = time.perf_counter() - start
    times = spec.dt * np.arange(n_saved)
    return RomTrajectory(spec, coords[:n_saved], times, stable, t_first_nan, wall, [])


# ------------------------------------------------------------------ WLS ----

class WlsWindow:
    """Stacked Crank-Nicolson residual over one window, and its Jacobian.

    The unknown vector concatenates the coordinates of the window's steps,
    step-major.  Each step couples only to its predecessor, so a forward
    difference on one coordinate requires a single extra flux evaluation;
    the Jacobian assembly exploits that block bidiagonal structure.
    """

    def __init__(self, spec, prev_coords, rhs):
        self.spec = spec
        self.rhs = rhs
        self.n_w = None  # set by solve-time x length
        self.grid_shape = (spec.mesh.ncomp,) + tuple(spec.mesh.cells)
        self.rows = spec.basis.rows
        self.sqrt_dt = np.sqrt(spec.dt)
        self.u_prev = spec.state_values(prev_coords).reshape(-1)
        self.f_prev = rhs(self.u_prev.reshape(self.grid_shape)).reshape(-1)
        self._cache_key = None
        self._cache = None

    def _split(self, x):
        return x.reshape(-1, self.spec.k)

    def _states(self, x):
        key = x.tobytes()
        if key == self._cache_key:
            return self._cache
        steps = self._split(x)
        states, rates = [], []
        for c in steps:
            u = self.spec.state_values(c).reshape(-1)
            states.append(u)
            with np.errstate(invalid="ignore"):
                rates.append(self.rhs(u.reshape(self.grid_shape)).reshape(-1))
        self._cache_key = key
        self._cache = (states, rates)
        return self._cache

    def residual(self, x):
        states, rates = self._states(np.asarray(x, dtype=float))
        dt = self.spec.dt
        blocks = []
        u_old, f_old = self.u_prev, self.f_prev
        for u, f in zip(states, rates):
            raw = (u - u_old) / dt - 0.5 * (f + f_old)
            blocks.append(self.spec.weight.chol_apply(raw) * self.sqrt_dt)
            u_old, f_old = u, f
        return np.concatenate(blocks)

    def jacobian(self, x, r=None):
        x = np.asarray(x, dtype=float)
        states, rates = self._states(x)
        spec = self.spec
        dt = spec.dt
        n_w = len(states)
        k = spec.k
        rows = self.rows
        raw = np.zeros((n_w * rows, n_w * k))
        phi = spec.basis.modes
        for j in range(n_w):
            cj = x[j * k : (j + 1) * k]
            for m in range(k):
                h = _FD_STEP * (1.0 + abs(cj[m]))
                if spec.is_entropy_state:
                    c_pert = cj.copy()
                    c_pert[m] += h
                    u_pert = spec.state_values(c_pert).reshape(-1)
                    du = (u_pert - states[j]) / h
                else:
                    du = phi[:, m]
                    u_pert = states[j] + h * du
                with np.errstate(invalid="ignore"):
                    f_pert = self.rhs(u_pert.reshape(self.grid_shape)).reshape(-1)
                df = (f_pert - rates[j]) / h
                col = j * k + m
                raw[j * rows : (j + 1) * rows, col] = du / dt - 0.5 * df
                if j + 1 < n_w:
                    raw[(j + 1) * rows : (j + 2) * rows, col] = -du / dt - 0.5 * df
        jac = np.empty_like(raw)
        for j in range(n_w):
            block = raw[j * rows : (j + 1) * rows]
            jac[j * rows : (j + 1) * rows] = spec.weight.chol_apply(block) * self.sqrt_dt
        return jac


def wls_window_residual(window_coords, prev_coords, spec):
    """Stacked weighted Crank-Nicolson residual for explicit window coords."""
    rhs = solver.make_rhs(spec.mesh, spec.gas, spec.weno)
    window = WlsWindow(spec, np.asarray(prev_coords, dtype=float), rhs)
    return window.residual(np.asarray(window_coords, dtype=float).reshape(-1))


def run_wls(spec, ic_field, n_steps):
    """Window-by-window residual minimization; divergence flags the run."""
    if spec.kind != WLS:
        raise PairingError(f"{spec.formulation} is not a WLS formulation")
    rhs = solver.make_rhs(spec.mesh, spec.gas, spec.weno)
    k = spec.k
    coords = np.empty((n_steps + 1, k))
    coords[0] = spec.project_initial(ic_field)
    start = time.perf_counter()
    stable = True
    t_first_nan = None
    reports = []
    step_done = 0
    prev = coords[0]
    while step_done < n_steps:
        n_w = min(spec.window, n_steps - step_done)
        window = WlsWindow(spec, prev, rhs)
        if not np.all(np.isfinite(window.u_prev)) or not np.all(np.isfinite(window.f_prev)):
            stable = False
            t_first_nan = step_done * spec.dt
            break
        x0 = np.tile(prev, n_w)
        x, gn = gauss_newton_solve(window.residual, x0, spec.settings, jacobian_fn=window.jacobian)
        reports.append(WindowReport(gn.iterations, gn.grad_norm, gn.converged, gn.cost_history))
        if not gn.stable or not np.all(np.isfinite(x)):
            stable = False
            t_first_nan = step_done * spec.dt
            break
        block = x.reshape(n_w, k)
        coords[step_done + 1 : step_done + 1 + n_w] = block
        prev = block[-1]
        step_done += n_w
    wall = time.perf_counter() - start
    n_saved = step_done + 1
    times = spec.dt * np.arange(n_saved)
    return RomTrajectory(spec, coords[:n_saved], times, stable, t_first_nan, wall, reports)


def run_rom(spec, ic_field, n_steps):
    if spec.kind == GALERKIN:
        return run_galerkin(spec, ic_field, n_steps)
    return run_wls(spec, ic_field, n_steps)
