"""Pointwise compressible-gas relations for a calorically perfect gas.

States are numpy arrays whose leading axis holds the d+2 conserved
components (rho, rho*u1[, rho*u2], rho*E); any trailing axes are broadcast,
so the same routines serve a single point and a whole field.  The entropy
variables are the Hughes symmetrizing set; s is measured relative to the
gauge state (rho_ref, p_ref) carried by the gas model so that rescaling a
problem into different physical units shifts no additive entropy constant
(entropy is only defined up to such a constant).  With the default gauge
(1, 1) the variables reduce to the textbook definition.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleStateError

# relative floor under which density/pressure counts as non-physical
ADMISSIBILITY_FLOOR = 1e-13


@dataclass(frozen=True)
class GasModel:
    """Heat-capacity ratio plus the entropy gauge state."""

    gamma: float = 1.4
    rho_ref: float = 1.0
    p_ref: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not (self.rho_ref > 0.0 and self.p_ref > 0.0):
            raise ValueError("entropy gauge state must be positive")


def split_state(u):
    """Return (rho, momentum components, rhoE) views of a conserved state."""
    u = np.asarray(u)
    if u.shape[0] not in (3, 4):
        raise ValueError(f"expected 3 or 4 components, got {u.shape[0]}")
    return u[0], u[1:-1], u[-1]


def _require_finite(u):
    if not np.all(np.isfinite(u)):
        raise InadmissibleStateError("state contains non-finite entries")


def pressure(u, gas):
    """Thermodynamic pressure (gamma-1)(rhoE - kinetic energy).

    Density must be positive; the returned pressure may be <= 0 and it is
    the caller's job to decide whether that is admissible.
    """
    u = np.asarray(u, dtype=float)
    _require_finite(u)
    rho, mom, rho_e = split_state(u)
    if np.any(rho <= ADMISSIBILITY_FLOOR * gas.rho_ref):
        raise InadmissibleStateError("non-positive density")
    return (gas.gamma - 1.0) * (rho_e - 0.5 * np.sum(mom * mom, axis=0) / rho)


def _admissible_pressure(u, gas):
    p = pressure(u, gas)
    if np.any(p <= ADMISSIBILITY_FLOOR * gas.p_ref):
        raise InadmissibleStateError("non-positive pressure")
    return p


def sound_speed(u, gas):
    """a = sqrt(gamma p / rho) at an admissible state."""
    p = _admissible_pressure(u, gas)
    return np.sqrt(gas.gamma * p / np.asarray(u)[0])


def max_wave_speed(u, direction, gas):
    """Largest signal speed |u_dir| + a, used by the numerical flux."""
    u = np.asarray(u, dtype=float)
    rho, mom, _ = split_state(u)
    if direction not in range(mom.shape[0]):
        raise ValueError(f"axis {direction} out of range for this state")
    return np.abs(mom[direction] / rho) + sound_speed(u, gas)


def analytic_flux(u, direction, gas):
    """Inviscid flux vector along the given axis (0 or 1)."""
    u = np.asarray(u, dtype=float)
    rho, mom, rho_e = split_state(u)
    if direction not in range(mom.shape[0]):
        raise ValueError(f"axis {direction} out of range for this state")
    p = _admissible_pressure(u, gas)
    vel = mom[direction] / rho
    flux = u * vel
    flux[1 + direction] = flux[1 + direction] + p
    flux[-1] = flux[-1] + p * vel
    return flux


def conserved_to_entropy(u, gas):
    """Map conserved variables to the Hughes entropy variables."""
    u = np.asarray(u, dtype=float)
    rho, mom, rho_e = split_state(u)
    p = _admissible_pressure(u, gas)
    g = gas.gamma
    s = np.log(p / gas.p_ref) - g * np.log(rho / gas.rho_ref)
    v = np.empty_like(u)
    v[0] = -s / (g - 1.0) + (g + 1.0) / (g - 1.0) - rho_e / p
    v[1:-1] = mom / p
    v[-1] = -rho / p
    return v


def entropy_to_conserved(v, gas):
    """Invert :func:`conserved_to_entropy` (the last component must be < 0)."""
    v = np.asarray(v, dtype=float)
    _require_finite(v)
    if v.shape[0] not in (3, 4):
        raise ValueError(f"expected 3 or 4 components, got {v.shape[0]}")
    v_last = v[-1]
    if np.any(v_last >= 0.0):
        raise InadmissibleStateError("entropy state must have last component < 0")
    g = gas.gamma
    v_mom = v[1:-1]
    kinetic = np.sum(v_mom * v_mom, axis=0) / (2.0 * v_last)
    s = g - (g - 1.0) * (v[0] - kinetic)
    s = s + np.log(gas.p_ref) - g * np.log(gas.rho_ref)
    ln_p = -(s + g * np.log(-v_last)) / (g - 1.0)
    p = np.exp(ln_p)
    u = np.empty_like(v)
    u[0] = -v_last * p
    u[1:-1] = p * v_mom
    u[-1] = p / (g - 1.0) + 0.5 * np.sum(u[1:-1] * u[1:-1], axis=0) / u[0]
    return u


def entropy_jacobian(u, gas):
    """Jacobian A = dU/dV of the conserved state w.r.t. entropy variables.

    Symmetric positive definite at admissible states.  For a state array of
    shape (ncomp, ...) the result has shape (..., ncomp, ncomp).
    """
    u = np.asarray(u, dtype=float)
    rho, mom, rho_e = split_state(u)
    p = _admissible_pressure(u, gas)
    g = gas.gamma
    ncomp = u.shape[0]
    vel = mom / rho
    enthalpy = (rho_e + p) / rho
    a2 = g * p / rho
    out = np.empty(u.shape[1:] + (ncomp, ncomp))
    out[..., 0, 0] = rho
    out[..., 0, -1] = rho_e
    out[..., -1, 0] = rho_e
    out[..., -1, -1] = rho * enthalpy**2 - a2 * p / (g - 1.0)
    for i in range(mom.shape[0]):
        out[..., 0, 1 + i] = mom[i]
        out[..., 1 + i, 0] = mom[i]
        out[..., 1 + i, -1] = vel[i] * (rho_e + p)
        out[..., -1, 1 + i] = vel[i] * (rho_e + p)
        for j in range(mom.shape[0]):
            out[..., 1 + i, 1 + j] = mom[i] * vel[j] + (p if i == j else 0.0)
    return out


def entropy_jacobian_inverse(u, gas):
    """Atilde = dV/dU, computed as the dense inverse of dU/dV."""
    return np.linalg.inv(entropy_jacobian(u, gas))


# --- non-raising variants for ROM hot paths ------------------------------
# Inadmissible states yield NaN instead of an exception so that time
# steppers and least-squares solvers can detect instability and flag it.

def _nan_where_nonpositive(x):
    return np.where(x > 0.0, x, np.nan)


def entropy_to_conserved_raw(v, gas):
    v = np.asarray(v, dtype=float)
    g = gas.gamma
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        v_last = v[-1]
        v_mom = v[1:-1]
        kinetic = np.sum(v_mom * v_mom, axis=0) / (2.0 * v_last)
        s = g - (g - 1.0) * (v[0] - kinetic)
        s = s + np.log(gas.p_ref) - g * np.log(gas.rho_ref)
        p = np.exp(-(s + g * np.log(_nan_where_nonpositive(-v_last))) / (g - 1.0))
        u = np.empty_like(v)
        u[0] = -v_last * p
        u[1:-1] = p * v_mom
        u[-1] = p / (g - 1.0) + 0.5 * np.sum(u[1:-1] * u[1:-1], axis=0) / u[0]
    return u


def entropy_jacobian_raw(u, gas):
    u = np.asarray(u, dtype=float)
    g = gas.gamma
    rho, mom, rho_e = split_state(u)
    ncomp = u.shape[0]
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        rho = _nan_where_nonpositive(rho)
        p = _nan_where_nonpositive(
            (g - 1.0) * (rho_e - 0.5 * np.sum(mom * mom, axis=0) / rho)
        )
        vel = mom / rho
        enthalpy = (rho_e + p) / rho
        a2 = g * p / rho
        out = np.empty(u.shape[1:] + (ncomp, ncomp))
        out[..., 0, 0] = rho
        out[..., 0, -1] = rho_e
        out[..., -1, 0] = rho_e
        out[..., -1, -1] = rho * enthalpy**2 - a2 * p / (g - 1.0)
        for i in range(mom.shape[0]):
            out[..., 0, 1 + i] = mom[i]
            out[..., 1 + i, 0] = mom[i]
            out[..., 1 + i, -1] = vel[i] * (rho_e + p)
            out[..., -1, 1 + i] = vel[i] * (rho_e + p)
            for j in range(mom.shape[0]):
                out[..., 1 + i, 1 + j] = mom[i] * vel[j] + (p if i == j else 0.0)
    return out
