"""Shared test utilities: admissible-state sampling and FD Jacobians."""

import numpy as np

from eulerrom import euler


def random_admissible_states(rng, n, d, rho_range=(0.1, 10.0), p_range=(0.1, 2e5),
                             mach_max=3.0, gas=None):
    """Conserved states with rho, p in the given ranges and |u| <= mach_max * a."""
    if gas is None:
        gas = euler.GasModel()
    states = []
    for _ in range(n):
        rho = rng.uniform(*rho_range)
        p = rng.uniform(*p_range)
        a = np.sqrt(gas.gamma * p / rho)
        vel = rng.uniform(-mach_max, mach_max, size=d) * a
        rho_e = p / (gas.gamma - 1.0) + 0.5 * rho * np.sum(vel**2)
        states.append(np.concatenate([[rho], rho * vel, [rho_e]]))
    return states


def fd_jacobian(func, x, rel=1e-6):
    """Central-difference Jacobian with per-component relative steps.

    The step for each component is relative to that component's own
    magnitude so that tiny components (e.g. -rho/p at high pressure) are
    not perturbed across the admissibility boundary.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(func(x))
    jac = np.empty((fx.size, x.size))
    fallback = 0.01 * np.abs(x).max()
    for m in range(x.size):
        h = rel * (abs(x[m]) if x[m] != 0.0 else fallback)
        x_plus = x.copy()
        x_minus = x.copy()
        x_plus[m] += h
        x_minus[m] -= h
        jac[:, m] = (np.asarray(func(x_plus)) - np.asarray(func(x_minus))) / (2.0 * h)
    return jac
