import math

import numpy as np
import pytest

from hopfvortex.errors import SingularityError
from hopfvortex.planar import (
    PlanarState,
    _energy,
    planar_angular_impulse,
    planar_energy,
    planar_impulse,
    planar_rhs,
    step_alpha,
    step_midpoint_plane,
)
from hopfvortex.scenarios import make_planar_four


def test_energy_examples():
    assert planar_energy(PlanarState([1.0, 1.0], [0, 1])) == 0.0
    assert planar_energy(PlanarState([2.0], [0.3 + 0.1j])) == 0.0
    e = planar_energy(PlanarState([1.0, 2.0], [0, 2j]))
    assert e == pytest.approx(-2 * math.log(4) / (4 * math.pi), abs=1e-15)


def test_rhs_is_scaled_wirtinger_gradient(rng):
    s = make_planar_four()
    g, z = s.strengths, s.positions
    f = planar_rhs(s)
    eps = 1e-6
    for a in range(s.n):
        dx = np.zeros(s.n, complex)
        dx[a] = eps
        dHdx = (_energy(g, z + dx) - _energy(g, z - dx)) / (2 * eps)
        dHdy = (_energy(g, z + 1j * dx) - _energy(g, z - 1j * dx)) / (2 * eps)
        dH_dzbar = 0.5 * (dHdx + 1j * dHdy)
        assert f[a] == pytest.approx(-2j * dH_dzbar / g[a], abs=1e-8)


def test_corotating_pair():
    s = PlanarState([1.0, 1.0], [-0.5, 0.5])
    f = planar_rhs(s)
    omega = 1.0 / math.pi
    np.testing.assert_allclose(f, 1j * omega * s.positions, atol=1e-15)


def test_invariants_examples():
    s = PlanarState([1.0, -2.0], [1.0, 1j])
    assert planar_impulse(s) == 1 - 2j
    assert planar_angular_impulse(s) == pytest.approx(-1.0)


def test_midpoint_is_self_adjoint():
    s = make_planar_four()
    back = step_midpoint_plane(step_midpoint_plane(s, 0.1), -0.1)
    np.testing.assert_allclose(back.positions, s.positions, atol=1e-12)


def test_midpoint_conserves_impulse_exactly():
    s = make_planar_four()
    p0 = planar_impulse(s)
    for _ in range(100):
        s = step_midpoint_plane(s, 0.1)
    assert abs(planar_impulse(s) - p0) < 1e-13


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_endpoint_alpha_is_leapfrog(alpha):
    prev = make_planar_four()
    curr = step_midpoint_plane(prev, 0.1)
    nxt = step_alpha(prev, curr, alpha, 0.1)
    np.testing.assert_allclose(nxt.positions, prev.positions + 0.2 * planar_rhs(curr), atol=1e-15)


def test_half_alpha_composes_midpoint_steps():
    z0 = make_planar_four()
    mids = [z0]
    for _ in range(20):
        mids.append(step_midpoint_plane(mids[-1], 0.1))
    prev, curr = mids[0], mids[1]
    for k in range(2, 21):
        prev, curr = curr, step_alpha(prev, curr, 0.5, 0.1)
        np.testing.assert_allclose(curr.positions, mids[k].positions, atol=1e-11)


def test_alpha_scheme_is_symmetric():
    # swapping the roles of past and future with h -> -h and alpha -> 1 - alpha
    prev = make_planar_four()
    curr = step_midpoint_plane(prev, 0.1)
    nxt = step_alpha(prev, curr, 0.9, 0.1)
    back = step_alpha(nxt, curr, 0.1, -0.1)
    np.testing.assert_allclose(back.positions, prev.positions, atol=1e-12)


def test_alpha_must_be_in_unit_interval():
    s = make_planar_four()
    with pytest.raises(ValueError):
        step_alpha(s, s, 1.5, 0.1)


def test_coincident_planar_vortices():
    s = PlanarState([1.0, 1.0, 1.0], [0, 1, 1])
    with pytest.raises(SingularityError) as info:
        planar_rhs(s)
    assert info.value.pair == (1, 2)
    with pytest.raises(SingularityError):
        planar_energy(s)
