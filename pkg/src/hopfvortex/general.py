"""Cayley-parametrized midpoint solver for lifted Hamiltonians without phase symmetry.

The update ``phi^{n+1} = Cay(a^n) phi^n`` is unitary, so lengths are kept
exactly and the unknowns ``a^n`` live in a flat space of per-vortex
3-vectors. A slack vector ``d^n``, computed from the two most recent states,
carries the part of the discrete equations that the phase symmetry would
otherwise make vanish.

For a phase-invariant Hamiltonian the update equation has two solution
branches for the component of ``a`` along ``x = pi(phi)``. The branch that
reproduces the implicit midpoint step on S^3 is ``a.x ~ -(h/4 G) g.x``, while
``a = 0`` sits next to the spurious one. The solver therefore starts from
the predictor ``a0 = -(h/4 G) Re(phi^dagger sigma G(phi))`` and uses Newton
iterations instead of plain fixed-point sweeps.

If the Hamiltonian genuinely depends on the phases, the component of the
equations along the fiber asks the squared step length to change by O(h)
every step, and real solutions typically cease to exist after a few steps.
The solver then raises ``ConvergenceError``.
"""

from typing import Callable, Optional

import numpy as np

from .dynamics import LiftedState, _check_sigma, _grad_lifted, _grad_sphere
from .errors import ConvergenceError, SingularityError
from .integrators import DEFAULT_SOLVER, SolverConfig, StepRecord, _check_strengths
from .su2 import cayley_apply, hopf_project, pauli_apply, pauli_sandwich

__all__ = [
    "compute_slack",
    "update_residual",
    "solve_update_vector",
    "step_general",
    "start_general",
]

GradFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]

_ROUTES = ("lifted", "sphere")
_FD_STEP = 1e-7


def _slack(gamma, phi_prev, phi, h, sigma, grad):
    mid = 0.5 * (phi_prev + phi)
    r = -1j * gamma[:, None] * (phi - phi_prev) + (0.5 * h) * grad(gamma, mid, sigma)
    # Re[phi^dagger (i sigma_a) r] = -Im[phi^dagger sigma_a r]
    return -np.imag(pauli_sandwich(phi, r))


def compute_slack(prev: LiftedState, curr: LiftedState, h, sigma=0.0, grad: Optional[GradFn] = None):
    """Slack vectors ``d^n``, one real 3-vector per vortex, shape ``(N, 3)``.

    ``d_a = Re[phi^dagger (i sigma_a) (-i G (phi^n - phi^{n-1}) + (h/2) dH/dphi^dagger(phi^{n-1/2}))]``
    with ``phi^{n-1/2}`` the average of the two states. ``grad`` maps
    ``(strengths, pairs, sigma)`` to ``dH/dphi^dagger`` and defaults to the
    vortex Hamiltonian.
    """
    grad = _grad_lifted if grad is None else grad
    return _slack(curr.strengths, prev.pairs, curr.pairs, float(h), _check_sigma(sigma), grad)


def _residual(a, gamma, phi, x, d, h, sigma, grad, route):
    n2 = np.sum(a * a, axis=1)[:, None]
    axx = np.cross(a, x)
    lhs = -2.0 * gamma[:, None] * (axx + n2 * x) + (1.0 + n2) * d
    mid = 0.5 * (phi + cayley_apply(a, phi))
    if route == "sphere":
        g = grad(gamma, hopf_project(mid), sigma)
        ax = np.sum(a * x, axis=1)[:, None]
        return lhs + (0.5 * h) * (np.cross(x, g) - ax * g - np.cross(axx, g))
    q = -np.imag(pauli_sandwich(phi, grad(gamma, mid, sigma)))
    return lhs + (0.5 * h) * (1.0 + n2) * q


def update_residual(curr: LiftedState, slack, a, h, sigma=0.0, grad: Optional[GradFn] = None, route="lifted"):
    """Residual of the update equation for a trial ``a``, scaled by ``1 + |a|^2``.

    ``route="sphere"`` evaluates the vector form with the S^2 gradient at
    ``pi(phi^{n+1/2})``; ``route="lifted"`` projects ``dH/dphi^dagger`` onto
    the directions ``i sigma_a phi^n``. The two agree for Hamiltonians pulled
    back from the sphere.
    """
    route, grad = _resolve(route, grad)
    a = np.asarray(a, dtype=float).reshape(-1, 3)
    d = np.asarray(slack, dtype=float).reshape(-1, 3)
    x = hopf_project(curr.pairs)
    return _residual(a, curr.strengths, curr.pairs, x, d, float(h), _check_sigma(sigma), grad, route)


def _resolve(route, grad):
    if route not in _ROUTES:
        raise ValueError(f"route must be one of {_ROUTES}, got {route!r}")
    if grad is None:
        grad = _grad_sphere if route == "sphere" else _grad_lifted
    return route, grad


def _jacobian(fun, a, f0):
    m = a.size
    jac = np.empty((m, m))
    flat = a.reshape(-1)
    for k in range(m):
        step = _FD_STEP * max(1.0, abs(flat[k]))
        trial = flat.copy()
        trial[k] += step
        jac[:, k] = (fun(trial.reshape(a.shape)) - f0).reshape(-1) / step
    return jac


def _predictor(gamma, phi, h, sigma, lifted_grad):
    g = np.real(pauli_sandwich(phi, lifted_grad(gamma, phi, sigma)))
    return -(0.25 * h / gamma)[:, None] * g


def _solve(gamma, phi, d, h, sigma, cfg, grad, route, lifted_grad):
    x = hopf_project(phi)

    def fun(a):
        return _residual(a, gamma, phi, x, d, h, sigma, grad, route)

    a = _predictor(gamma, phi, h, sigma, lifted_grad)
    jac = None
    update = np.inf
    for k in range(1, cfg.max_iterations + 1):
        try:
            f = fun(a)
        except SingularityError as exc:
            if k == 1:
                raise
            # an iterate left the neighbourhood of the identity
            raise ConvergenceError(
                f"update-vector solve diverged after {k - 1} iterations ({exc})",
                residual=update,
                iterations=k - 1,
            ) from exc
        # chord Newton: refresh the Jacobian every few iterations
        if jac is None or k % 4 == 1:
            jac = _jacobian(fun, a, f)
        try:
            delta = np.linalg.solve(jac, -f.reshape(-1))
        except np.linalg.LinAlgError:
            delta = -np.linalg.pinv(jac) @ f.reshape(-1)
        a = a + delta.reshape(a.shape)
        update = float(np.max(np.abs(delta))) if delta.size else 0.0
        if update < cfg.tolerance:
            return StepRecord(a, k, update)
        if not np.isfinite(update):
            break
    raise ConvergenceError(
        f"update-vector solve stalled after {k} iterations (last update {update:.3e})",
        residual=update,
        iterations=k,
    )


def solve_update_vector(
    curr: LiftedState,
    slack,
    h,
    sigma=0.0,
    cfg: SolverConfig = DEFAULT_SOLVER,
    grad: Optional[GradFn] = None,
    route: str = "lifted",
) -> StepRecord:
    """Solve the update equation for the per-vortex algebra vectors ``a^n``.

    Parameters
    ----------
    curr : LiftedState
        The state ``phi^n`` being updated.
    slack : array_like, shape (N, 3)
        Output of :func:`compute_slack`.
    h : float
        Time step.
    sigma : float
        Regularization of the vortex Hamiltonian.
    cfg : SolverConfig
        Stopping rule on the max-norm of the Newton update.
    grad : callable, optional
        Gradient accessor ``(strengths, array, sigma) -> array``. For
        ``route="lifted"`` it returns ``dH/dphi^dagger`` on pairs; for
        ``route="sphere"`` the ambient S^2 gradient on 3-vectors.
    route : {"lifted", "sphere"}

    Returns
    -------
    StepRecord
        ``state`` holds ``a`` with shape ``(N, 3)``.
    """
    route, grad = _resolve(route, grad)
    gamma = curr.strengths
    _check_strengths(gamma)
    d = np.asarray(slack, dtype=float).reshape(-1, 3)
    if d.shape[0] != gamma.shape[0]:
        raise ValueError("slack must have one 3-vector per vortex")
    sigma = _check_sigma(sigma)
    lifted_grad = grad if route == "lifted" else _pullback(grad)
    return _solve(gamma, curr.pairs, d, float(h), sigma, cfg, grad, route, lifted_grad)


def _pullback(sphere_grad):
    def lifted(gamma, phi, sigma):
        return pauli_apply(sphere_grad(gamma, hopf_project(phi), sigma), phi)

    return lifted


def _general(gamma, phi_prev, phi, h, sigma, cfg, grad=_grad_lifted):
    d = _slack(gamma, phi_prev, phi, h, sigma, grad)
    rec = _solve(gamma, phi, d, h, sigma, cfg, grad, "lifted", grad)
    return cayley_apply(rec.state, phi), rec.iterations


def _start(gamma, phi, h, sigma, cfg, grad=_grad_lifted):
    rec = _solve(gamma, phi, np.zeros((gamma.shape[0], 3)), h, sigma, cfg, grad, "lifted", grad)
    return cayley_apply(rec.state, phi), rec.iterations


def step_general(
    prev: LiftedState,
    curr: LiftedState,
    h,
    sigma=0.0,
    cfg: SolverConfig = DEFAULT_SOLVER,
    grad: Optional[GradFn] = None,
) -> LiftedState:
    """Advance ``(phi^{n-1}, phi^n)`` to ``phi^{n+1} = Cay(a^n) phi^n``.

    Computes the slack from the two states, solves for ``a^n`` and applies
    the Cayley transform. ``grad`` is a lifted gradient accessor as in
    :func:`compute_slack`.
    """
    grad = _grad_lifted if grad is None else grad
    _check_strengths(curr.strengths)
    phi, _ = _general(curr.strengths, prev.pairs, curr.pairs, float(h), _check_sigma(sigma), cfg, grad)
    return LiftedState(curr.strengths, phi)


def start_general(curr: LiftedState, h, sigma=0.0, cfg: SolverConfig = DEFAULT_SOLVER, grad: Optional[GradFn] = None):
    """Seed step for :func:`step_general`: the same update with zero slack.

    For phase-invariant Hamiltonians this coincides with the implicit
    midpoint step on S^3.
    """
    grad = _grad_lifted if grad is None else grad
    _check_strengths(curr.strengths)
    phi, _ = _start(curr.strengths, curr.pairs, float(h), _check_sigma(sigma), cfg, grad)
    return LiftedState(curr.strengths, phi)
