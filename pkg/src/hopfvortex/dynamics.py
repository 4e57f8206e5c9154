"""Point-vortex states, Hamiltonians and the vortex vector field on the sphere.

The functions come in two layers: the public ones take ``SphereState`` /
``LiftedState`` objects, while the underscore-prefixed kernels work on raw
arrays ``(gamma, x, sigma)`` and are what the integrators call in their inner
loops. Pair sums are always accumulated in the same (i < j) order.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SingularityError
from .su2 import hopf_lift, hopf_project, pauli_apply

__all__ = [
    "SphereState",
    "LiftedState",
    "SINGULAR_THRESHOLD",
    "energy_sphere",
    "grad_energy_sphere",
    "vector_field",
    "energy_lifted",
    "grad_energy_lifted",
    "vortex_moment",
    "lift_state",
    "project_state",
]

SINGULAR_THRESHOLD = 1e-14
_UNIT_TOL = 1e-10
_FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True, eq=False)
class SphereState:
    """Vortex strengths ``(N,)`` and unit positions ``(N, 3)`` on S^2."""

    strengths: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        g = np.array(self.strengths, dtype=float).reshape(-1)
        x = np.array(self.positions, dtype=float).reshape(-1, 3)
        if g.size == 0 or g.shape[0] != x.shape[0]:
            raise ValueError(
                f"need N >= 1 strengths and as many positions, got {g.shape[0]} and {x.shape[0]}"
            )
        dev = np.abs(np.linalg.norm(x, axis=1) - 1.0)
        if np.any(dev > _UNIT_TOL):
            k = int(np.argmax(dev))
            raise ValueError(f"position {k} is not on the unit sphere (|x| - 1 = {dev[k]:.3e})")
        g.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "strengths", g)
        object.__setattr__(self, "positions", x)

    @property
    def n(self):
        return self.strengths.shape[0]


@dataclass(frozen=True, eq=False)
class LiftedState:
    """Vortex strengths ``(N,)`` and unit complex pairs ``(N, 2)`` on S^3."""

    strengths: np.ndarray
    pairs: np.ndarray

    def __post_init__(self):
        g = np.array(self.strengths, dtype=float).reshape(-1)
        p = np.array(self.pairs, dtype=complex).reshape(-1, 2)
        if g.size == 0 or g.shape[0] != p.shape[0]:
            raise ValueError(
                f"need N >= 1 strengths and as many pairs, got {g.shape[0]} and {p.shape[0]}"
            )
        dev = np.abs(np.linalg.norm(p, axis=1) - 1.0)
        if np.any(dev > _UNIT_TOL):
            k = int(np.argmax(dev))
            raise ValueError(f"pair {k} is not on the unit three-sphere (|phi| - 1 = {dev[k]:.3e})")
        g.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "strengths", g)
        object.__setattr__(self, "pairs", p)

    @property
    def n(self):
        return self.strengths.shape[0]


def lift_state(state):
    """Lift a ``SphereState`` to S^3 with the standard local sections."""
    return LiftedState(state.strengths, hopf_lift(state.positions))


def project_state(state):
    """Project a ``LiftedState`` to S^2 with the Hopf map."""
    return SphereState(state.strengths, hopf_project(state.pairs))


def _check_sigma(sigma):
    sigma = float(sigma)
    if not sigma >= 0.0:
        raise ValueError(f"regularization must be non-negative, got {sigma}")
    return sigma


def _raise_singular(values, what):
    n = values.shape[0]
    masked = values + np.diag(np.full(n, np.inf))
    i, j = np.unravel_index(np.argmin(masked), masked.shape)
    i, j = sorted((int(i), int(j)))
    raise SingularityError(
        f"vortices {i} and {j} are singular: {what} = {masked[i, j]:.3e}", pair=(i, j)
    )


def _energy_from_args(gamma, arg):
    iu, ju = np.triu_indices(gamma.shape[0], k=1)
    a = arg[iu, ju]
    if np.any(a <= SINGULAR_THRESHOLD):
        _raise_singular(arg, "2 sigma^2 + l^2")
    return -np.sum(gamma[iu] * gamma[ju] * np.log(a)) / _FOUR_PI


def _energy_sphere(gamma, x, sigma):
    e, bad = _kernels.energy_sphere(gamma, x, sigma, SINGULAR_THRESHOLD)
    if bad[0] >= 0:
        d = x[bad[0]] - x[bad[1]]
        _pair_error(bad, "2 sigma^2 + l^2", 2.0 * sigma * sigma + d @ d)
    return e


def _pair_error(bad, what, value):
    i, j = int(bad[0]), int(bad[1])
    raise SingularityError(f"vortices {i} and {j} are singular: {what} = {value:.3e}", pair=(i, j))


def _grad_sphere(gamma, x, sigma):
    out, bad = _kernels.grad_sphere(gamma, x, sigma, SINGULAR_THRESHOLD)
    if bad[0] >= 0:
        d = x[bad[0]] - x[bad[1]]
        _pair_error(bad, "2 sigma^2 + l^2", 2.0 * sigma * sigma + d @ d)
    return out


def _vector_field(gamma, x, sigma):
    out, bad = _kernels.vector_field(gamma, x, sigma, SINGULAR_THRESHOLD)
    if bad[0] >= 0:
        _pair_error(bad, "1 + sigma^2 - x_k . x_j", 1.0 + sigma * sigma - x[bad[0]] @ x[bad[1]])
    return out


def _lifted_args(phi, sigma):
    gram = np.conj(phi) @ phi.T
    norms = gram.diagonal().real
    s2 = gram.real ** 2 + gram.imag ** 2
    tot = norms[:, None] + norms[None, :]
    chord2 = np.clip(tot * tot - 4.0 * s2, 0.0, None)
    return gram, norms, 2.0 * sigma * sigma + chord2


def _energy_lifted(gamma, phi, sigma):
    if gamma.shape[0] < 2:
        return 0.0
    _, _, arg = _lifted_args(phi, sigma)
    return _energy_from_args(gamma, arg)


def _grad_lifted(gamma, phi, sigma):
    # d/dphi_i^dagger of (|phi_i|^2 + |phi_j|^2)^2 - 4 |<phi_i, phi_j>|^2
    #   = 2 (|phi_i|^2 + |phi_j|^2) phi_i - 4 phi_j <phi_j, phi_i>
    out, bad = _kernels.grad_lifted(gamma, phi, sigma, SINGULAR_THRESHOLD)
    if bad[0] >= 0:
        _, _, arg = _lifted_args(phi[list(bad)], sigma)
        _pair_error(bad, "2 sigma^2 + 4 (1 - |<phi_i, phi_j>|^2)", arg[0, 1])
    return out


def _grad_lifted_pullback(gamma, phi, sigma):
    """Same gradient via the chain rule ``(grad_x H . sigma) phi``."""
    return pauli_apply(_grad_sphere(gamma, hopf_project(phi), sigma), phi)


def energy_sphere(state, sigma=0.0):
    """Vortex Hamiltonian ``-(1/4pi) sum_{i<j} G_i G_j log(2 sigma^2 + l_ij^2)``.

    Raises ``SingularityError`` naming the pair when a log argument vanishes.
    """
    return float(_energy_sphere(state.strengths, state.positions, _check_sigma(sigma)))


def grad_energy_sphere(state, sigma=0.0):
    """Ambient Euclidean gradient of ``energy_sphere`` w.r.t. each position, shape ``(N, 3)``."""
    return _grad_sphere(state.strengths, state.positions, _check_sigma(sigma))


def vector_field(state, sigma=0.0):
    """Velocities ``x_k'`` of the regularized point-vortex equations, shape ``(N, 3)``.

    Each row is tangent to the sphere at the corresponding vortex. Raises
    ``SingularityError`` when ``1 + sigma^2 - x_k . x_j`` drops below
    ``SINGULAR_THRESHOLD``.
    """
    return _vector_field(state.strengths, state.positions, _check_sigma(sigma))


def energy_lifted(state, sigma=0.0):
    """Lifted Hamiltonian on (S^3)^N, evaluated from Hermitian inner products.

    On unit pairs this is ``-(1/4pi) sum G_i G_j log[2 sigma^2 + 4(1 - |<phi_i, phi_j>|^2)]``.
    Off the unit sphere the constant 4 is replaced by ``(|phi_i|^2 + |phi_j|^2)^2`` so
    that the function equals ``energy_sphere`` composed with the Hopf map on
    all of C^2.
    """
    return float(_energy_lifted(state.strengths, state.pairs, _check_sigma(sigma)))


def grad_energy_lifted(state, sigma=0.0):
    """Wirtinger derivative ``dH/dphi_i^dagger`` of ``energy_lifted``, shape ``(N, 2)``.

    The directional derivative along ``dphi`` is ``2 Re sum_i dphi_i^dagger G_i``.
    """
    return _grad_lifted(state.strengths, state.pairs, _check_sigma(sigma))


def vortex_moment(state):
    """Vortex moment ``sum_i G_i x_i``."""
    return state.strengths @ state.positions
