"""Time integrators for point vortices on S^2 and on the lifted space (S^3)^N.

One-step methods
    ``step_hopf``           implicit midpoint on (S^3)^N (the variational Hopf integrator)
    ``step_midpoint_s2``    implicit midpoint applied to the vortex equations in R^3
    ``step_rk4_projected``  classical RK4 followed by normalization
    ``step_rk2_projected``  Heun's method followed by normalization
    ``step_lie_poisson``    symmetric Lie-Poisson rotation update

Two-step method
    ``step_trapezoid_twostep``  trapezoid-rule variational scheme on (S^3)^N

Each public stepper takes and returns state objects. The ``_``-prefixed
array kernels return ``(new_array, iterations)`` and are what the simulation
driver calls.
"""

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import _kernels
from .dynamics import (
    LiftedState,
    SphereState,
    _check_sigma,
    _grad_lifted,
    _grad_sphere,
    _vector_field,
)
from .errors import ConvergenceError, StepFailure

__all__ = [
    "SolverConfig",
    "StepRecord",
    "solve_fixed_point",
    "step_hopf",
    "step_midpoint_s2",
    "step_rk4_projected",
    "step_rk2_projected",
    "step_lie_poisson",
    "step_trapezoid_twostep",
]


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule for the implicit solves.

    ``tolerance`` bounds the max-norm of the last iterate update.
    """

    tolerance: float = 1e-13
    max_iterations: int = 200

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be at least 1")


DEFAULT_SOLVER = SolverConfig()


@dataclass(frozen=True)
class StepRecord:
    state: Any
    iterations: int
    residual: float


def solve_fixed_point(fmap: Callable, guess, cfg: SolverConfig = DEFAULT_SOLVER) -> StepRecord:
    """Iterate ``x <- fmap(x)`` until the max-norm update drops below ``cfg.tolerance``.

    Parameters
    ----------
    fmap : callable
        Map on arrays (real or complex) of a fixed shape.
    guess : array_like
        Starting iterate.
    cfg : SolverConfig

    Returns
    -------
    StepRecord
        ``state`` is the last iterate, ``residual`` the size of the last update.

    Raises
    ------
    ConvergenceError
        After ``cfg.max_iterations`` updates without meeting the tolerance.
    """
    x = np.asarray(guess)
    residual = np.inf
    for k in range(1, cfg.max_iterations + 1):
        x_new = np.asarray(fmap(x))
        residual = float(np.max(np.abs(x_new - x))) if x_new.size else 0.0
        x = x_new
        if residual < cfg.tolerance:
            return StepRecord(x, k, residual)
        if not np.isfinite(residual):
            break
    raise ConvergenceError(
        f"fixed-point iteration stalled after {k} iterations (last update {residual:.3e})",
        residual=residual,
        iterations=k,
    )


def _check_strengths(gamma):
    if np.any(gamma == 0.0):
        raise ValueError("this integrator divides by the vortex strengths; all must be nonzero")


# -- array kernels -------------------------------------------------------------


def _hopf(gamma, phi, h, sigma, cfg):
    coef = (-0.5j * h / gamma)[:, None]

    def fmap(phi_new):
        return phi + coef * _grad_lifted(gamma, 0.5 * (phi + phi_new), sigma)

    rec = solve_fixed_point(fmap, phi, cfg)
    return rec.state, rec.iterations


def _midpoint_s2(gamma, x, h, sigma, cfg):
    def fmap(x_new):
        return x + h * _vector_field(gamma, 0.5 * (x + x_new), sigma)

    rec = solve_fixed_point(fmap, x, cfg)
    return rec.state, rec.iterations


def _normalize(x):
    return x / np.linalg.norm(x, axis=1)[:, None]


def _rk4(gamma, x, h, sigma, cfg=None):
    k1 = _vector_field(gamma, x, sigma)
    k2 = _vector_field(gamma, x + 0.5 * h * k1, sigma)
    k3 = _vector_field(gamma, x + 0.5 * h * k2, sigma)
    k4 = _vector_field(gamma, x + h * k3, sigma)
    return _normalize(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)), 0


def _rk2(gamma, x, h, sigma, cfg=None):
    k1 = _vector_field(gamma, x, sigma)
    k2 = _vector_field(gamma, x + h * k1, sigma)
    return _normalize(x + 0.5 * h * (k1 + k2)), 0


def rotate(xi, x):
    """Rotate each row of ``x`` by the rotation vector in the same row of ``xi``."""
    return _kernels.rotate(np.ascontiguousarray(xi, dtype=float), np.ascontiguousarray(x, dtype=float))


def _lie_poisson(gamma, x, h, sigma, cfg):
    coef = (0.5 * h / gamma)[:, None]
    g0 = _grad_sphere(gamma, x, sigma)

    def fmap(x_new):
        return rotate(coef * (g0 + _grad_sphere(gamma, x_new, sigma)), x)

    rec = solve_fixed_point(fmap, x, cfg)
    return rec.state, rec.iterations


def _trapezoid(gamma, phi_prev, phi, h, sigma, cfg=None):
    c = (h / gamma)[:, None]
    w = phi_prev - 1j * c * _grad_lifted(gamma, phi, sigma)
    # |w + i lam c phi|^2 = 1  <=>  A lam^2 + 2 B lam + C = 0
    cc = c[:, 0]
    A = cc * cc * np.sum(np.abs(phi) ** 2, axis=1)
    B = cc * np.real(np.sum(np.conj(w) * 1j * phi, axis=1))
    C = np.sum(np.abs(w) ** 2, axis=1) - 1.0
    disc = B * B - A * C
    if np.any(disc < 0.0):
        k = int(np.argmin(disc))
        raise StepFailure(f"no real Lagrange multiplier for vortex {k} (discriminant {disc[k]:.3e})")
    root = np.sqrt(disc)
    # smaller-magnitude root, written to avoid cancellation
    q = -(B + np.copysign(root, B))
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(q != 0.0, C / q, 0.0)
    return w + 1j * (lam * cc)[:, None] * phi, 0


# -- public steppers -----------------------------------------------------------


def step_hopf(state: LiftedState, h, sigma=0.0, cfg: SolverConfig = DEFAULT_SOLVER) -> LiftedState:
    """One step of the implicit midpoint method on (S^3)^N.

    Solves ``-i G_k (phi_k' - phi_k) + (h/2) dH/dphi_k^dagger(phi_mid) = 0``
    with ``phi_mid = (phi + phi')/2`` by fixed-point iteration. The result is
    not renormalized; unit length is preserved by the scheme itself.
    """
    _check_strengths(state.strengths)
    phi, _ = _hopf(state.strengths, state.pairs, float(h), _check_sigma(sigma), cfg)
    return LiftedState(state.strengths, phi)


def step_midpoint_s2(state: SphereState, h, sigma=0.0, cfg: SolverConfig = DEFAULT_SOLVER) -> SphereState:
    """One step of the implicit midpoint rule applied to the vortex equations in R^3."""
    x, _ = _midpoint_s2(state.strengths, state.positions, float(h), _check_sigma(sigma), cfg)
    return SphereState(state.strengths, x)


def step_rk4_projected(state: SphereState, h, sigma=0.0) -> SphereState:
    """Classical RK4 in R^3, then each position is normalized once."""
    x, _ = _rk4(state.strengths, state.positions, float(h), _check_sigma(sigma))
    return SphereState(state.strengths, x)


def step_rk2_projected(state: SphereState, h, sigma=0.0) -> SphereState:
    """Heun's method in R^3, then each position is normalized once."""
    x, _ = _rk2(state.strengths, state.positions, float(h), _check_sigma(sigma))
    return SphereState(state.strengths, x)


def step_lie_poisson(state: SphereState, h, sigma=0.0, cfg: SolverConfig = DEFAULT_SOLVER) -> SphereState:
    """Symmetric Lie-Poisson step ``x_k' = R(xi_k) x_k``.

    The rotation vector is ``xi_k = h/(2 G_k) (grad_k H(x) + grad_k H(x'))``,
    solved self-consistently for ``x'``.
    """
    _check_strengths(state.strengths)
    x, _ = _lie_poisson(state.strengths, state.positions, float(h), _check_sigma(sigma), cfg)
    return SphereState(state.strengths, x)


def step_trapezoid_twostep(prev: LiftedState, curr: LiftedState, h, sigma=0.0) -> LiftedState:
    """Two-step trapezoid-rule scheme on (S^3)^N.

    Returns ``phi^{n+1}`` from ``-i G_k (phi^{n+1} - phi^{n-1}) + h dH/dphi^dagger(phi^n)
    = h lam_k phi^n``, where the real multiplier ``lam_k`` is the smaller root
    of the unit-length condition. Raises ``StepFailure`` if no real root exists.
    """
    _check_strengths(curr.strengths)
    phi, _ = _trapezoid(curr.strengths, prev.pairs, curr.pairs, float(h), _check_sigma(sigma))
    return LiftedState(curr.strengths, phi)
