"""Point vortices in the plane and a two-step variational integrator family.

Positions are complex numbers. The two-step scheme

    (z^{n+2} - z^n) / (2h) = alpha f(z^{n+alpha}) + (1 - alpha) f(z^{n+1+alpha}),
    z^{n+alpha} = (1 - alpha) z^n + alpha z^{n+1},

is explicit for ``alpha`` in {0, 1}, where it reduces to the leapfrog
``z^{n+2} = z^n + 2h f(z^{n+1})`` with its parasitic mode. For
``alpha = 1/2`` it is the implicit midpoint rule composed with itself.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import SINGULAR_THRESHOLD
from .errors import SingularityError
from .integrators import DEFAULT_SOLVER, SolverConfig, solve_fixed_point

__all__ = [
    "PlanarState",
    "planar_energy",
    "planar_rhs",
    "planar_impulse",
    "planar_angular_impulse",
    "step_alpha",
    "step_midpoint_plane",
]


@dataclass(frozen=True, eq=False)
class PlanarState:
    """Vortex strengths ``(N,)`` and complex positions ``(N,)``."""

    strengths: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        g = np.array(self.strengths, dtype=float).reshape(-1)
        z = np.array(self.positions, dtype=complex).reshape(-1)
        if g.size == 0 or g.shape != z.shape:
            raise ValueError(
                f"need N >= 1 strengths and as many positions, got {g.shape[0]} and {z.shape[0]}"
            )
        if not np.all(np.isfinite(z)):
            raise ValueError("positions must be finite")
        g.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "strengths", g)
        object.__setattr__(self, "positions", z)

    @property
    def n(self):
        return self.strengths.shape[0]


def _fail(z, bad):
    i, j = int(bad[0]), int(bad[1])
    raise SingularityError(
        f"vortices {i} and {j} coincide: |z_i - z_j|^2 = {abs(z[i] - z[j]) ** 2:.3e}", pair=(i, j)
    )


def _energy(gamma, z):
    e, bad = _kernels.planar_energy(gamma, z, SINGULAR_THRESHOLD)
    if bad[0] >= 0:
        _fail(z, bad)
    return e


def _rhs(gamma, z):
    out, bad = _kernels.planar_rhs(gamma, z, SINGULAR_THRESHOLD)
    if bad[0] >= 0:
        _fail(z, bad)
    return out


def planar_energy(state: PlanarState) -> float:
    """``-(1/4pi) sum_{a<b} G_a G_b log |z_a - z_b|^2``."""
    return float(_energy(state.strengths, state.positions))


def planar_rhs(state: PlanarState) -> np.ndarray:
    """Vortex velocities ``z_a' = -(2i / G_a) dH/dz_a^*``.

    Equivalently ``z_a' = (i / 2pi) sum_b G_b / conj(z_a - z_b)``. A vortex
    with zero strength is advected passively.
    """
    return _rhs(state.strengths, state.positions)


def planar_impulse(state: PlanarState) -> complex:
    """Linear impulse ``sum G_a z_a``."""
    return complex(state.strengths @ state.positions)


def planar_angular_impulse(state: PlanarState) -> float:
    """Angular impulse ``sum G_a |z_a|^2``."""
    return float(state.strengths @ np.abs(state.positions) ** 2)


def _midpoint_plane(gamma, z, h, cfg):
    def fmap(z_new):
        return z + h * _rhs(gamma, 0.5 * (z + z_new))

    rec = solve_fixed_point(fmap, z, cfg)
    return rec.state, rec.iterations


def _alpha(gamma, z_prev, z, alpha, h, cfg):
    a = alpha
    if a == 0.0 or a == 1.0:
        return z_prev + 2.0 * h * _rhs(gamma, z), 0
    base = z_prev + (2.0 * h * a) * _rhs(gamma, (1.0 - a) * z_prev + a * z)
    c = 2.0 * h * (1.0 - a)

    def fmap(z_new):
        return base + c * _rhs(gamma, (1.0 - a) * z + a * z_new)

    rec = solve_fixed_point(fmap, z, cfg)
    return rec.state, rec.iterations


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def step_alpha(prev: PlanarState, curr: PlanarState, alpha, h, cfg: SolverConfig = DEFAULT_SOLVER) -> PlanarState:
    """Return ``z^{n+2}`` from ``(z^n, z^{n+1})`` for the given ``alpha``."""
    z, _ = _alpha(curr.strengths, prev.positions, curr.positions, _check_alpha(alpha), float(h), cfg)
    return PlanarState(curr.strengths, z)


def step_midpoint_plane(state: PlanarState, h, cfg: SolverConfig = DEFAULT_SOLVER) -> PlanarState:
    """Implicit midpoint step ``(z' - z)/h = f((z + z')/2)``."""
    z, _ = _midpoint_plane(state.strengths, state.positions, float(h), cfg)
    return PlanarState(state.strengths, z)
