"""Canonical problem setups in paired dimensional / non-dimensional form.

Every problem is defined by a reference thermodynamic state (rho_inf,
p_inf) with sound speed a_inf = sqrt(gamma p_inf / rho_inf).  The
non-dimensional configuration uses (1, 1/gamma) so a_inf = 1; the
dimensional configuration uses sea-level air (1.225, 101325).  Times are
specified on the non-dimensional clock and converted via t_phys =
t_nd / a_inf, and the time step is always 0.25 dx / a_inf, so the two
configurations take the same number of steps and map onto each other under
the component scaling (rho_inf, rho_inf a_inf, rho_inf a_inf^2).
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from . import euler, solver
from .errors import ConfigurationError, UnstableFomError
from .euler import GasModel
from .mesh import PERIODIC, Field, box_mesh, interval_mesh

SOD = "sod"
KELVIN_HELMHOLTZ = "kelvin_helmholtz"
HIT = "hit"

PROBLEMS = (SOD, KELVIN_HELMHOLTZ, HIT)

DIMENSIONAL_RHO_INF = 1.225
DIMENSIONAL_P_INF = 101325.0


@dataclass(frozen=True)
class ProblemConfig:
    problem: str
    dimensional: bool
    cells: int
    final_time_nd: float
    snapshot_stride: int
    weno_epsilon: float
    seed: int = 0
    gamma: float = 1.4
    cfl: float = 0.25
    # turbulence spectrum knobs; u0 = hit_u0_factor * a_inf
    hit_u0_factor: float = 25.0
    hit_kp: int = 25
    hit_s: int = 3

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigurationError(f"unknown problem {self.problem!r}")
        if self.snapshot_stride < 1:
            raise ConfigurationError("snapshot stride must be >= 1")
        if self.final_time_nd <= 0.0:
            raise ConfigurationError("final time must be positive")

    @property
    def rho_inf(self):
        return DIMENSIONAL_RHO_INF if self.dimensional else 1.0

    @property
    def p_inf(self):
        return DIMENSIONAL_P_INF if self.dimensional else 1.0 / self.gamma

    @property
    def a_inf(self):
        return float(np.sqrt(self.gamma * self.p_inf / self.rho_inf))

    @property
    def d(self):
        return 1 if self.problem == SOD else 2

    def mesh(self):
        if self.problem == SOD:
            return interval_mesh(-0.5, 0.5, self.cells)
        return box_mesh(-5.0, 5.0, self.cells, bc=PERIODIC)

    def gas(self):
        # entropy gauge at the reference state: rho_inf, rho_inf * a_inf^2
        return GasModel(self.gamma, rho_ref=self.rho_inf, p_ref=self.gamma * self.p_inf)

    def component_scales(self):
        """Reference magnitude of each conserved component."""
        rho, a = self.rho_inf, self.a_inf
        mom = [rho * a] * self.d
        return (rho, *mom, rho * a * a)

    def weno(self):
        scales = self.component_scales() if self.dimensional else None
        return solver.WenoConfig(self.weno_epsilon, scales)

    @property
    def dt(self):
        return self.cfl * self.mesh().dx[0] / self.a_inf

    @property
    def final_time(self):
        return self.final_time_nd / self.a_inf

    @property
    def n_steps(self):
        # = final_time_nd / (cfl * dx), identical for both configurations
        return int(round(self.final_time / self.dt))

    def dimensional_twin(self):
        return replace(self, dimensional=True)

    def non_dimensional_twin(self):
        return replace(self, dimensional=False)


def sod_desk(dimensional=False):
    return ProblemConfig(SOD, dimensional, cells=200, final_time_nd=0.25,
                         snapshot_stride=1, weno_epsilon=1e-6)


def sod_full(dimensional=False):
    return ProblemConfig(SOD, dimensional, cells=500, final_time_nd=0.25,
                         snapshot_stride=1, weno_epsilon=1e-6)


def kh_desk(dimensional=False):
    return ProblemConfig(KELVIN_HELMHOLTZ, dimensional, cells=64, final_time_nd=6.25,
                         snapshot_stride=5, weno_epsilon=1e-20)


def kh_full(dimensional=False):
    return ProblemConfig(KELVIN_HELMHOLTZ, dimensional, cells=256, final_time_nd=50.0,
                         snapshot_stride=5, weno_epsilon=1e-20)


def hit_desk(dimensional=False, seed=0):
    # the full-scale spectrum peaks near the desk grid's Nyquist shell and
    # its u0 implies a hypersonic rms Mach number, so the desk preset moves
    # the peak down and runs at a transonic velocity scale
    return ProblemConfig(HIT, dimensional, cells=64, final_time_nd=5.0,
                         snapshot_stride=5, weno_epsilon=1e-20, seed=seed,
                         hit_u0_factor=0.25, hit_kp=12)


def hit_full(dimensional=False, seed=0):
    return ProblemConfig(HIT, dimensional, cells=512, final_time_nd=20.0,
                         snapshot_stride=5, weno_epsilon=1e-20, seed=seed)


def primitive_to_conserved(rho, vel, p, gamma):
    """Stack (rho, rho u, rho E) from primitive arrays; vel is a list per axis."""
    comps = [np.asarray(rho, dtype=float)]
    kinetic = np.zeros_like(comps[0])
    for v in vel:
        comps.append(rho * v)
        kinetic = kinetic + 0.5 * rho * v * v
    comps.append(p / (gamma - 1.0) + kinetic)
    return np.stack(comps)


def sod_init(cfg):
    """Piecewise-constant shock-tube data with the interface at x = 0."""
    if cfg.problem != SOD:
        raise ConfigurationError("sod_init requires a sod configuration")
    mesh = cfg.mesh()
    x = mesh.centers(0)
    left = x < 0.0
    rho = np.where(left, cfg.rho_inf, cfg.rho_inf / 8.0)
    u = np.zeros_like(x)
    p = np.where(left, cfg.gamma * cfg.p_inf, cfg.gamma * cfg.p_inf / 10.0)
    return Field(mesh, primitive_to_conserved(rho, [u], p, cfg.gamma))


def kh_init(cfg):
    """Shear layer: a cosine-modulated band moves against the outer stream."""
    if cfg.problem != KELVIN_HELMHOLTZ:
        raise ConfigurationError("kh_init requires a kelvin_helmholtz configuration")
    mesh = cfg.mesh()
    x, y = mesh.center_grids()
    band = np.abs(y - np.cos(0.8 * np.pi * x)) < 2.0
    rho = np.where(band, cfg.rho_inf, 2.0 * cfg.rho_inf)
    u1 = np.where(band, -0.5 * cfg.a_inf, 0.5 * cfg.a_inf)
    u2 = np.zeros_like(u1)
    p = np.full_like(rho, 3.5 * cfg.p_inf)
    return Field(mesh, primitive_to_conserved(rho, [u1, u2], p, cfg.gamma))


def target_energy_spectrum(k, cfg):
    """Shell kinetic-energy target e(k); k is the integer shell index."""
    k = np.asarray(k, dtype=float)
    u0 = cfg.hit_u0_factor * cfg.a_inf
    kp = float(cfg.hit_kp)
    s = float(cfg.hit_s)
    with np.errstate(divide="ignore", invalid="ignore"):
        e = 50.0 / kp * u0**2 * (k / kp) ** (2 * s + 1) * np.exp(-(s + 0.5) * (k / kp) ** 2)
    return np.where(k > 0, e, 0.0)


def _mode_indices(n):
    return np.fft.fftfreq(n, d=1.0 / n).astype(int)


def _shell_index(n):
    k1 = _mode_indices(n)[:, None]
    k2 = _mode_indices(n)[None, :]
    return np.rint(np.sqrt(k1.astype(float) ** 2 + k2**2)).astype(int)


def kinetic_energy_spectrum(u1, u2):
    """Shell-summed spectrum of a periodic velocity field.

    Returns (shells, energy) with sum(energy) equal to the mean kinetic
    energy density 0.5 <|u|^2> by Parseval's identity.
    """
    n = u1.shape[0]
    c1 = np.fft.fft2(u1) / n**2
    c2 = np.fft.fft2(u2) / n**2
    density = 0.5 * (np.abs(c1) ** 2 + np.abs(c2) ** 2)
    shell = _shell_index(n)
    kmax = n // 2
    energy = np.bincount(shell.ravel(), weights=density.ravel(), minlength=kmax + 1)
    return np.arange(kmax + 1), energy[: kmax + 1]


def hit_velocity_field(cfg):
    """Solenoidal random velocity with the prescribed shell spectrum.

    A vorticity field with unit-magnitude modes and seeded uniform phases
    (Hermitian-symmetrized so the field is real) is converted to velocity
    through the streamfunction, then every resolved shell is rescaled so
    the realized spectrum matches the target exactly.
    """
    n = cfg.cells
    mesh = cfg.mesh()
    max_shell = n // 2 - 1
    if cfg.hit_kp >= n // 2:
        raise ConfigurationError(
            f"grid with {n} cells cannot resolve spectrum peak k_p={cfg.hit_kp}"
        )
    rng = np.random.default_rng(cfg.seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n, n))
    omega_hat = np.exp(1j * phases)
    # Hermitian symmetrization keeps the vorticity real-valued
    omega_hat = 0.5 * (omega_hat + np.conj(omega_hat[np.ix_(-np.arange(n) % n, -np.arange(n) % n)]))

    length = mesh.hi[0] - mesh.lo[0]
    kappa1 = 2.0 * np.pi / length * _mode_indices(n)[:, None]
    kappa2 = 2.0 * np.pi / length * _mode_indices(n)[None, :]
    kappa_sq = kappa1**2 + kappa2**2

    shell = _shell_index(n)
    keep = (shell >= 1) & (shell <= max_shell)
    keep &= (np.abs(_mode_indices(n))[:, None] < n // 2) & (np.abs(_mode_indices(n))[None, :] < n // 2)
    omega_hat = np.where(keep, omega_hat, 0.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        psi_hat = np.where(kappa_sq > 0.0, omega_hat / kappa_sq, 0.0)
    c1 = 1j * kappa2 * psi_hat
    c2 = -1j * kappa1 * psi_hat

    # rescale each shell so the realized energy matches the target
    density = 0.5 * (np.abs(c1) ** 2 + np.abs(c2) ** 2)
    realized = np.bincount(shell.ravel(), weights=density.ravel(), minlength=max_shell + 1)
    target = target_energy_spectrum(np.arange(len(realized)), cfg)
    scale_per_shell = np.ones_like(realized)
    populated = realized > 0.0
    scale_per_shell[populated] = np.sqrt(target[populated] / realized[populated])
    scale = np.where(keep, scale_per_shell[np.minimum(shell, len(realized) - 1)], 0.0)
    c1 *= scale
    c2 *= scale

    u1 = np.real(np.fft.ifft2(c1 * n**2))
    u2 = np.real(np.fft.ifft2(c2 * n**2))
    return u1, u2


def hit_init(cfg):
    """Uniform thermodynamics plus the random solenoidal velocity field."""
    if cfg.problem != HIT:
        raise ConfigurationError("hit_init requires a hit configuration")
    mesh = cfg.mesh()
    u1, u2 = hit_velocity_field(cfg)
    rho = np.full(mesh.cells, cfg.rho_inf)
    p = np.full(mesh.cells, cfg.p_inf)
    return Field(mesh, primitive_to_conserved(rho, [u1, u2], p, cfg.gamma))


_INITIALIZERS = {SOD: sod_init, KELVIN_HELMHOLTZ: kh_init, HIT: hit_init}


def initial_field(cfg):
    return _INITIALIZERS[cfg.problem](cfg)


@dataclass
class SnapshotSet:
    """Conserved-variable snapshots as columns, with their sample times."""

    matrix: np.ndarray
    times: np.ndarray
    config: ProblemConfig

    @property
    def n_snapshots(self):
        return self.matrix.shape[1]

    def field(self, j):
        return Field.from_vector(self.config.mesh(), self.matrix[:, j])


def run_fom(cfg, progress=False):
    """Integrate the full-order model and collect snapshots at the stride."""
    mesh = cfg.mesh()
    gas = cfg.gas()
    weno = cfg.weno()
    rhs = solver.make_rhs(mesh, gas, weno)
    dt = cfg.dt
    n_steps = cfg.n_steps

    values = initial_field(cfg).values
    columns = [values.reshape(-1).copy()]
    times = [0.0]
    start = time.perf_counter()
    for step in range(1, n_steps + 1):
        values = solver.rk4_step(values, dt, rhs)
        if not np.all(np.isfinite(values)):
            raise UnstableFomError(f"{cfg.problem} FOM produced NaN/Inf at step {step}")
        if step % cfg.snapshot_stride == 0:
            columns.append(values.reshape(-1).copy())
            times.append(step * dt)
        if progress and step % 100 == 0:
            rate = step / (time.perf_counter() - start)
            print(f"  step {step}/{n_steps} ({rate:.0f} steps/s)")
    matrix = np.column_stack(columns)
    return SnapshotSet(matrix, np.asarray(times), cfg)


def nondimensionalize_columns(matrix, cfg):
    """Scale dimensional snapshot columns into non-dimensional units."""
    scales = np.asarray(cfg.component_scales())
    n_cells = matrix.shape[0] // len(scales)
    per_row = np.repeat(scales, n_cells)
    return matrix / per_row[:, None]
