"""Benchmark initial conditions and the rotating-ring exact solution."""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .dynamics import SphereState
from .planar import PlanarState

__all__ = [
    "ScenarioSpec",
    "SCENARIOS",
    "make_pd_ring",
    "pd_angular_velocity",
    "pd_exact_position",
    "pd_exact_positions",
    "make_karman_street",
    "make_collapse3",
    "make_vortex_sheet",
    "make_planar_four",
    "build_scenario",
    "COLLAPSE_TIME",
]

# tau = 4 pi (sqrt 23 - sqrt 17) for the three-vortex triangle below
COLLAPSE_TIME = 4.0 * math.pi * (math.sqrt(23.0) - math.sqrt(17.0))


def _ring(n, colatitude, offset=0.0):
    phi = offset + 2.0 * np.pi * np.arange(n) / n
    s = math.sin(colatitude)
    return np.stack([s * np.cos(phi), s * np.sin(phi), np.full(n, math.cos(colatitude))], axis=1)


def make_pd_ring(N: int = 6, gamma: float = 1.0 / 6.0, theta0: float = 0.40) -> SphereState:
    """``N`` equal vortices evenly spaced on the circle of colatitude ``theta0``.

    The first vortex sits at azimuth 0.
    """
    N = int(N)
    if N < 2:
        raise ValueError("a ring needs at least two vortices")
    if not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 must lie strictly between 0 and pi")
    return SphereState(np.full(N, float(gamma)), _ring(N, theta0))


def pd_angular_velocity(N: int = 6, gamma: float = 1.0 / 6.0, theta0: float = 0.40) -> float:
    """Rotation rate ``(N - 1) (gamma / 4 pi) z0 / (1 - z0^2)`` of the ring, ``z0 = cos theta0``."""
    z0 = math.cos(theta0)
    return (N - 1) * gamma / (4.0 * math.pi) * z0 / (1.0 - z0 * z0)


def pd_exact_positions(t, N: int = 6, gamma: float = 1.0 / 6.0, theta0: float = 0.40) -> np.ndarray:
    """All ring positions at time ``t``: the initial ring rotated about z by ``Omega t``."""
    omega = pd_angular_velocity(N, gamma, theta0)
    return _ring(int(N), theta0, offset=omega * float(t))


def pd_exact_position(k: int, t, N: int = 6, gamma: float = 1.0 / 6.0, theta0: float = 0.40) -> np.ndarray:
    """Position of ring vortex ``k`` at time ``t``."""
    if not 0 <= k < N:
        raise IndexError(f"vortex index {k} out of range for N={N}")
    return pd_exact_positions(t, N, gamma, theta0)[k]


def make_karman_street(N: int = 5, gamma: float = 1.0, colatitude: float = math.pi / 3.0,
                       pole_strength: float = 0.5) -> SphereState:
    """Two staggered rings of opposite circulation plus a pair of polar vortices.

    The northern ring at ``colatitude`` carries ``+gamma`` and the southern
    ring at ``pi - colatitude`` carries ``-gamma``, as in a von Karman street;
    it is shifted by half the azimuthal spacing. The north pole carries
    ``+pole_strength`` and the south pole ``-pole_strength``. With the
    defaults both rings rotate rigidly with period 10.848.
    """
    north = _ring(N, colatitude)
    south = _ring(N, math.pi - colatitude, offset=math.pi / N)
    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    x = np.concatenate([north, south, poles])
    g = np.concatenate([np.full(N, float(gamma)), np.full(N, -float(gamma)), [pole_strength, -pole_strength]])
    return SphereState(g, x)


def make_collapse3() -> SphereState:
    """Three vortices ``(1, 1, -1/2)`` on a triangle with chords ``sqrt3/2, sqrt2/2, 1``.

    Vortex 1 is at the north pole, vortex 2 in the x-z plane and vortex 3 on
    the side with positive y.
    """
    l12sq, l23sq, l31sq = 3.0 / 4.0, 1.0 / 2.0, 1.0
    # a chord l from the north pole fixes the height z = 1 - l^2/2
    z2 = 1.0 - l12sq / 2.0
    z3 = 1.0 - l31sq / 2.0
    x2 = np.array([math.sqrt(1.0 - z2 * z2), 0.0, z2])
    # x2 . x3 = 1 - l23^2/2
    c23 = 1.0 - l23sq / 2.0
    x3x = (c23 - z2 * z3) / x2[0]
    x3y = math.sqrt(1.0 - z3 * z3 - x3x * x3x)
    x = np.array([[0.0, 0.0, 1.0], x2, [x3x, x3y, z3]])
    return SphereState([1.0, 1.0, -0.5], x)


def make_vortex_sheet(N: int = 40, gamma: float = 0.125, z0: float = 0.9) -> SphereState:
    """``N`` vortices of strength ``gamma`` evenly spaced at height ``z0``."""
    return SphereState(np.full(int(N), float(gamma)), _ring(int(N), math.acos(z0)))


def make_planar_four() -> PlanarState:
    """Four planar vortices with strengths ``(.1, .3, -.2, -.4)``."""
    return PlanarState([0.1, 0.3, -0.2, -0.4], [0.0, 0.5j, 1.0, 0.7 + 0.6j])


@dataclass(frozen=True)
class ScenarioSpec:
    """A named initial condition.

    ``parameters`` holds the defaults; :meth:`build` accepts overrides for any
    of them.
    """

    name: str
    factory: Callable
    parameters: Dict[str, float] = field(default_factory=dict)
    planar: bool = False
    description: str = ""

    def build(self, **overrides):
        unknown = set(overrides) - set(self.parameters)
        if unknown:
            raise KeyError(
                f"scenario {self.name!r} has no parameter(s) {sorted(unknown)}; "
                f"known: {sorted(self.parameters)}"
            )
        params = {**self.parameters, **overrides}
        return self.factory(**params)


SCENARIOS: Dict[str, ScenarioSpec] = {
    s.name: s
    for s in [
        ScenarioSpec(
            "pd-ring", make_pd_ring, {"N": 6, "gamma": 1.0 / 6.0, "theta0": 0.40},
            description="stable ring of equal vortices rotating rigidly about z",
        ),
        ScenarioSpec(
            "karman-street", make_karman_street,
            {"N": 5, "gamma": 1.0, "colatitude": math.pi / 3.0, "pole_strength": 0.5},
            description="two staggered rings of opposite circulation with polar vortices",
        ),
        ScenarioSpec(
            "collapse3", make_collapse3, {},
            description="three vortices that collapse self-similarly",
        ),
        ScenarioSpec(
            "vortex-sheet", make_vortex_sheet, {"N": 40, "gamma": 0.125, "z0": 0.9},
            description="ring of many weak vortices approximating a sheet",
        ),
        ScenarioSpec(
            "planar-four", make_planar_four, {}, planar=True,
            description="four vortices in the plane",
        ),
    ]
}


def build_scenario(name: str, **overrides):
    """Construct the state for a registered scenario."""
    try:
        spec = SCENARIOS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return spec.build(**overrides)
