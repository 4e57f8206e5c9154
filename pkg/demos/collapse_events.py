"""Repeated near-collapse of three regularized vortices.

Between near-collisions the geometric methods return to their initial
energy while RK4 keeps the energy it picked up during each event.

    python3 demos/collapse_events.py [t_max]
"""

import sys

import numpy as np

from hopfvortex.dynamics import _energy_sphere
from hopfvortex.harness import SimConfig, trajectory

t_max = float(sys.argv[1]) if len(sys.argv) > 1 else 200.0
for name in ("hopf", "rk4"):
    cfg = SimConfig(scenario="collapse3", integrator=name, h=0.1, sigma=0.1, t_max=t_max)
    gamma = cfg.build_state().strengths
    t, chord, energy = [], [], []
    for _, tn, x, _ in trajectory(cfg):
        d = np.linalg.norm(x[:, None] - x[None], axis=2)
        t.append(tn)
        chord.append(d[np.triu_indices(3, 1)].min())
        energy.append(_energy_sphere(gamma, x, 0.1))
    chord, energy = np.array(chord), np.array(energy)
    ev = [k for k in range(1, len(t) - 1) if chord[k] < min(chord[k - 1], chord[k + 1]) and chord[k] < 0.2]
    print(f"{name}: near-collisions at t = " + ", ".join(f"{t[k]:.1f}" for k in ev))
    bounds = [0] + ev + [len(t) - 1]
    for a, b in zip(bounds[:-1], bounds[1:]):
        k = (a + b) // 2
        print(f"    t = {t[k]:7.1f}   E - E0 = {energy[k] - energy[0]: .3e}")
