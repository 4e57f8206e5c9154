"""Energy and moment drift on a rigidly rotating ring, lifted midpoint vs. projected RK4.

    python3 demos/ring_conservation.py [t_max]
"""

import sys

from hopfvortex.harness import SimConfig, run_simulation
from hopfvortex.scenarios import pd_angular_velocity

t_max = float(sys.argv[1]) if len(sys.argv) > 1 else 200.0
print(f"ring angular velocity {pd_angular_velocity():.8f}, integrating to t = {t_max:g} with h = 0.1\n")
print(f"{'integrator':<12} {'max |dE|':>10} {'max |dM|':>10} {'seconds':>8}")
for name in ("hopf", "midpoint-s2", "lie-poisson", "rk4"):
    s = run_simulation(SimConfig(integrator=name, h=0.1, t_max=t_max), write=False).summary
    print(f"{name:<12} {s['max_abs_energy_error']:10.2e} {s['max_moment_error']:10.2e} {s['wall_time']:8.2f}")
