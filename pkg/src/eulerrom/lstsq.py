"""Damped Gauss-Newton solver with a Levenberg-Marquardt fallback.

The first trial step of every iteration is the pure Gauss-Newton step
(lambda = 0).  A step is accepted only if it is finite and strictly
decreases the squared residual norm; otherwise the LM damping engages at
its initial value and grows by the adaptation factor until a step is
accepted or the damping saturates.  Accepted-step costs are therefore
monotonically decreasing by construction.
"""

from dataclasses import dataclass, field

import numpy as np

_FD_STEP = 1e-7
_LAMBDA_CEILING = 1e12


@dataclass(frozen=True)
class LeastSquaresSettings:
    max_iterations: int = 100
    gtol: float = 1e-8
    xtol: float = 1e-10
    ftol: float = 1e-14
    lm_damping: bool = True
    lm_lambda_init: float = 1e-4
    lm_adaptation: float = 10.0

    def __post_init__(self):
        if self.gtol <= 0.0 or self.xtol <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass
class GaussNewtonReport:
    converged: bool = False
    reason: str = "max_iterations"
    iterations: int = 0
    grad_norm: float = np.inf
    stable: bool = True
    n_residual_evals: int = 0
    cost_history: list = field(default_factory=list)


def fd_jacobian(residual_fn, x, r0, report=None):
    """Forward-difference Jacobian with step 1e-7 * (1 + |x_m|)."""
    jac = np.empty((r0.size, x.size))
    for m in range(x.size):
        h = _FD_STEP * (1.0 + abs(x[m]))
        x_pert = x.copy()
        x_pert[m] += h
        jac[:, m] = (residual_fn(x_pert) - r0) / h
        if report is not None:
            report.n_residual_evals += 1
    return jac


def gauss_newton_solve(residual_fn, x0, settings=None, jacobian_fn=None):
    """Minimize ||residual_fn(x)||^2 starting from x0.

    jacobian_fn(x, r) may be supplied to exploit residual structure;
    otherwise forward differences are used.  Returns (x, report); the
    report's ``converged`` flag certifies the gradient criterion
    ||J' r|| < gtol, whereas xtol / stall exits leave it False.
    """
    if settings is None:
        settings = LeastSquaresSettings()
    report = GaussNewtonReport()
    x = np.asarray(x0, dtype=float).copy()

    r = np.asarray(residual_fn(x), dtype=float)
    report.n_residual_evals += 1
    if not np.all(np.isfinite(r)):
        report.stable = False
        report.reason = "non_finite_initial_residual"
        return x, report
    cost = float(r @ r)
    report.cost_history.append(cost)

    def jacobian(x_at, r_at):
        if jacobian_fn is not None:
            return np.asarray(jacobian_fn(x_at, r_at), dtype=float)
        return fd_jacobian(residual_fn, x_at, r_at, report)

    lam = 0.0
    done = False
    for _ in range(settings.max_iterations):
        jac = jacobian(x, r)
        grad = jac.T @ r
        report.grad_norm = float(np.linalg.norm(grad))
        if report.grad_norm < settings.gtol:
            report.converged = True
            report.reason = "gtol"
            return x, report

        jtj = jac.T @ jac
        identity = np.eye(x.size)
        accepted = False
        last_trial_finite = True
        while not accepted:
            try:
                step = np.linalg.solve(jtj + lam * identity, -grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                trial = x + step
                r_trial = np.asarray(residual_fn(trial), dtype=float)
                report.n_residual_evals += 1
                last_trial_finite = bool(np.all(np.isfinite(r_trial)))
                if last_trial_finite:
                    cost_trial = float(r_trial @ r_trial)
                    if cost_trial < cost:
                        accepted = True
                        break
            if not settings.lm_damping:
                report.reason = "no_descent"
                done = True
                break
            lam = settings.lm_lambda_init if lam == 0.0 else lam * settings.lm_adaptation
            if lam > _LAMBDA_CEILING:
                report.reason = "stalled"
                report.stable = last_trial_finite
                done = True
                break
        if done:
            break

        step_norm = float(np.linalg.norm(step))
        improvement = cost - cost_trial
        x, r, cost = trial, r_trial, cost_trial
        report.iterations += 1
        report.cost_history.append(cost)
        lam /= settings.lm_adaptation
        if lam < 1e-12:
            lam = 0.0
        if step_norm < settings.xtol * (1.0 + float(np.linalg.norm(x))):
            report.reason = "xtol"
            break
        if improvement < settings.ftol * max(cost, 1e-300):
            report.reason = "ftol"
            break

    # final gradient for honest optimality reporting
    jac = jacobian(x, r)
    report.grad_norm = float(np.linalg.norm(jac.T @ r))
    if report.grad_norm < settings.gtol:
        report.converged = True
        report.reason = "gtol"
    return x, report
