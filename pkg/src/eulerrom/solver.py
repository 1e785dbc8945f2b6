"""Finite-volume spatial discretization and time integrators.

The scheme is fifth-order WENO reconstruction of the conserved variables,
component by component, with a Rusanov (local Lax-Friedrichs) numerical
flux and a conservative face difference.  Non-finite values produced by an
inadmissible intermediate state are allowed to propagate so that callers
can detect instability; they are never silently repaired.
"""

from dataclasses import dataclass

import numpy as np

from . import euler
from .mesh import NGHOST, PERIODIC, Field

# Jiang-Shu linear weights for the right-face reconstruction
_D0, _D1, _D2 = 0.1, 0.6, 0.3


@dataclass(frozen=True)
class WenoConfig:
    """WENO smoothness regularizer, optionally scaled per component.

    ``component_scales`` holds the characteristic magnitude of each
    conserved component; the effective regularizer for component q is
    epsilon * scale_q**2.  Smoothness indicators scale with the square of
    the data, so this keeps the nonlinear weights invariant when a problem
    is rescaled into different physical units.
    """

    epsilon: float = 1e-6
    component_scales: tuple | None = None

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("WENO epsilon must be positive")

    def effective_epsilons(self, ncomp):
        if self.component_scales is None:
            return np.full(ncomp, self.epsilon)
        scales = np.asarray(self.component_scales, dtype=float)
        if scales.shape != (ncomp,):
            raise ValueError("component_scales length does not match state size")
        return self.epsilon * scales**2


def weno5_weights(stencil, epsilon):
    """Nonlinear weights (w0, w1, w2) for a 5-cell stencil."""
    v0, v1, v2, v3, v4 = (float(v) for v in stencil)
    b0 = 13.0 / 12.0 * (v0 - 2 * v1 + v2) ** 2 + 0.25 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (3 * v2 - 4 * v3 + v4) ** 2
    a0 = _D0 / (epsilon + b0) ** 2
    a1 = _D1 / (epsilon + b1) ** 2
    a2 = _D2 / (epsilon + b2) ** 2
    total = a0 + a1 + a2
    return a0 / total, a1 / total, a2 / total


def weno5_reconstruct(stencil, cfg):
    """Right-face value of the center cell from 5 upwind-ordered cell averages."""
    v0, v1, v2, v3, v4 = (float(v) for v in stencil)
    w0, w1, w2 = weno5_weights(stencil, cfg.epsilon)
    q0 = (2 * v0 - 7 * v1 + 11 * v2) / 6.0
    q1 = (-v1 + 5 * v2 + 2 * v3) / 6.0
    q2 = (2 * v2 + 5 * v3 - v4) / 6.0
    return w0 * q0 + w1 * q1 + w2 * q2


def _weno_face(v0, v1, v2, v3, v4, eps):
    """Vectorized right-face reconstruction; eps broadcasts over components."""
    b0 = 13.0 / 12.0 * (v0 - 2 * v1 + v2) ** 2 + 0.25 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (3 * v2 - 4 * v3 + v4) ** 2
    a0 = _D0 / (eps + b0) ** 2
    a1 = _D1 / (eps + b1) ** 2
    a2 = _D2 / (eps + b2) ** 2
    total = a0 + a1 + a2
    q0 = (2 * v0 - 7 * v1 + 11 * v2) / 6.0
    q1 = (-v1 + 5 * v2 + 2 * v3) / 6.0
    q2 = (2 * v2 + 5 * v3 - v4) / 6.0
    return (a0 * q0 + a1 * q1 + a2 * q2) / total


def _pressure_raw(u, gamma):
    rho = u[0]
    kinetic = np.sum(u[1:-1] * u[1:-1], axis=0) / rho
    return (gamma - 1.0) * (u[-1] - 0.5 * kinetic)


def _flux_raw(u, p, comp):
    vel = u[comp] / u[0]
    flux = u * vel
    flux[comp] += p
    flux[-1] += p * vel
    return flux


def _rusanov_raw(u_left, u_right, comp, gamma):
    p_left = _pressure_raw(u_left, gamma)
    p_right = _pressure_raw(u_right, gamma)
    f_left = _flux_raw(u_left, p_left, comp)
    f_right = _flux_raw(u_right, p_right, comp)
    lam_left = np.abs(u_left[comp] / u_left[0]) + np.sqrt(gamma * p_left / u_left[0])
    lam_right = np.abs(u_right[comp] / u_right[0]) + np.sqrt(gamma * p_right / u_right[0])
    lam = np.maximum(lam_left, lam_right)
    return 0.5 * (f_left + f_right) - 0.5 * lam * (u_right - u_left)


def numerical_flux(u_left, u_right, direction, gas):
    """Rusanov flux between two admissible pointwise states."""
    f_left = euler.analytic_flux(u_left, direction, gas)
    f_right = euler.analytic_flux(u_right, direction, gas)
    lam = max(
        float(euler.max_wave_speed(u_left, direction, gas)),
        float(euler.max_wave_speed(u_right, direction, gas)),
    )
    return 0.5 * (f_left + f_right) - 0.5 * lam * (
        np.asarray(u_right, dtype=float) - np.asarray(u_left, dtype=float)
    )


def _pad(vals, bc):
    """Add NGHOST ghost layers along the last axis."""
    if bc == PERIODIC:
        return np.concatenate([vals[..., -NGHOST:], vals, vals[..., :NGHOST]], axis=-1)
    left = np.repeat(vals[..., :1], NGHOST, axis=-1)
    right = np.repeat(vals[..., -1:], NGHOST, axis=-1)
    return np.concatenate([left, vals, right], axis=-1)


def _flux_divergence(values, mesh, axis, gas, cfg):
    """+d/dx_axis of the numerical flux, at cell centers."""
    n = mesh.cells[axis]
    work = np.moveaxis(values, 1 + axis, -1)
    padded = _pad(work, mesh.bc[axis])
    eps = cfg.effective_epsilons(mesh.ncomp)
    eps = eps.reshape((mesh.ncomp,) + (1,) * (values.ndim - 1))
    # faces f = 0..n between padded cells f+2 and f+3
    u_left = _weno_face(
        padded[..., 0 : n + 1],
        padded[..., 1 : n + 2],
        padded[..., 2 : n + 3],
        padded[..., 3 : n + 4],
        padded[..., 4 : n + 5],
        eps,
    )
    u_right = _weno_face(
        padded[..., 5 : n + 6],
        padded[..., 4 : n + 5],
        padded[..., 3 : n + 4],
        padded[..., 2 : n + 3],
        padded[..., 1 : n + 2],
        eps,
    )
    flux = _rusanov_raw(u_left, u_right, 1 + axis, gas.gamma)
    div = (flux[..., 1:] - flux[..., :-1]) / mesh.dx[axis]
    return np.moveaxis(div, -1, 1 + axis)


def semi_discrete_rhs(field, gas, cfg):
    """-div F of the WENO5/Rusanov discretization, as a field-shaped rate."""
    mesh = field.mesh
    rate = np.zeros_like(field.values)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for axis in range(mesh.d):
            rate -= _flux_divergence(field.values, mesh, axis, gas, cfg)
    return Field(mesh, rate)


def make_rhs(mesh, gas, cfg):
    """Array-in/array-out closure over :func:`semi_discrete_rhs`."""

    def rhs(values):
        return semi_discrete_rhs(Field(mesh, values), gas, cfg).values

    return rhs


def rk4_step(u, dt, rhs_fn):
    """One classical fourth-order Runge-Kutta step."""
    k1 = rhs_fn(u)
    k2 = rhs_fn(u + 0.5 * dt * k1)
    k3 = rhs_fn(u + 0.5 * dt * k2)
    k4 = rhs_fn(u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def crank_nicolson_residual(u_new, u_old, dt, gas, cfg, f_new=None, f_old=None):
    """(u_new - u_old)/dt - (f(u_new) + f(u_old))/2 as a field.

    Precomputed rates may be passed to avoid redundant flux evaluations;
    this is the per-step block of the windowed least-squares objective.
    """
    if f_new is None:
        f_new = semi_discrete_rhs(u_new, gas, cfg).values
    if f_old is None:
        f_old = semi_discrete_rhs(u_old, gas, cfg).values
    resid = (u_new.values - u_old.values) / dt - 0.5 * (f_new + f_old)
    return Field(u_new.mesh, resid)
