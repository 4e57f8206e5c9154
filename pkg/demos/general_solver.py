"""The Cayley/slack solver on two Hamiltonians.

For the vortex Hamiltonian it reproduces the lifted midpoint method. For a
phase-invariant Hamiltonian that is not pulled back from the sphere it is
still second order, which the small convergence table shows.

    python3 demos/general_solver.py
"""

import numpy as np

from hopfvortex.dynamics import _grad_lifted, lift_state
from hopfvortex.general import start_general, step_general
from hopfvortex.integrators import step_hopf
from hopfvortex.scenarios import make_pd_ring
from hopfvortex.su2 import hopf_project

ring = lift_state(make_pd_ring())
prev, curr, ref = ring, start_general(ring, 0.1), step_hopf(ring, 0.1)
for _ in range(199):
    prev, curr = curr, step_general(prev, curr, 0.1)
    ref = step_hopf(ref, 0.1)
# positions are compared on the sphere; the fiber phase is not observable
gap = np.abs(hopf_project(curr.pairs) - hopf_project(ref.pairs)).max()
print(f"vortex Hamiltonian, 200 steps: max |x_general - x_hopf| = {gap:.1e}")


def grad(gamma, phi, sigma, eps=0.05):
    g = _grad_lifted(gamma, phi, sigma).copy()
    z, u = phi[0]
    g[0, 0] += 2 * eps * abs(z) ** 2 * z
    g[0, 1] -= 2 * eps * abs(u) ** 2 * u
    return g


def run(h, t=1.0):
    s = lift_state(make_pd_ring(3, 1 / 3, 1.0))
    p, c = s, start_general(s, h, grad=grad)
    for _ in range(int(round(t / h)) - 1):
        p, c = c, step_general(p, c, h, grad=grad)
    return hopf_project(c.pairs)


ref = run(0.0125 / 16)
print("\nvortex Hamiltonian + 0.05 (|z_1|^4 - |u_1|^4), t = 1:")
prev_err = None
for h in (0.1, 0.05, 0.025, 0.0125):
    err = np.abs(run(h) - ref).max()
    rate = "" if prev_err is None else f"   ratio {prev_err / err:.2f}"
    print(f"    h = {h:<7g} error {err:.3e}{rate}")
    prev_err = err
