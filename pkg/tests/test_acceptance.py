"""Acceptance criteria 1-6.

Each criterion prints one ``PASS`` or ``FAIL`` line, both inline and in the
pytest terminal summary. Run ``python3 tests/test_acceptance.py`` to get
only the six lines.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, random_unit_pairs, random_unit_vectors  # noqa: E402
from hopfvortex.dynamics import (  # noqa: E402
    SphereState,
    _energy_lifted,
    _energy_sphere,
    energy_lifted,
    energy_sphere,
    grad_energy_lifted,
    grad_energy_sphere,
    lift_state,
)
from hopfvortex.general import start_general, step_general  # noqa: E402
from hopfvortex.harness import SimConfig, convergence_study, run_simulation, trajectory  # noqa: E402
from hopfvortex.integrators import SolverConfig, step_hopf, step_midpoint_s2  # noqa: E402
from hopfvortex.planar import step_alpha, step_midpoint_plane  # noqa: E402
from hopfvortex.scenarios import make_planar_four, make_pd_ring  # noqa: E402
from hopfvortex.su2 import IDENTITY, SIGMA, hermitian_inner, hopf_project  # noqa: E402

ORDER_GRID = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]
_cache = {}


def report(number, ok, title, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, line


def _run(**kw):
    key = tuple(sorted(kw.items()))
    if key not in _cache:
        _cache[key] = run_simulation(SimConfig(output_every=1, **kw), write=False)
    return _cache[key]


def _trend(t, y):
    return float(np.polyfit(t, y, 1)[0])


# -- 1 -------------------------------------------------------------------------


def criterion_1():
    runs = {name: _run(scenario="pd-ring", integrator=name, h=0.1, t_max=1000.0)
            for name in ("hopf", "midpoint-s2", "rk4", "lie-poisson")}
    hopf = runs["hopf"]
    e_h = hopf.summary["max_abs_energy_error"]
    m_h = hopf.summary["max_moment_error"]
    ok = e_h < 1e-10 and m_h < 1e-11
    parts = [f"hopf dE={e_h:.2e} dM={m_h:.2e} ({hopf.summary['wall_time']:.1f}s)"]
    for name in ("midpoint-s2", "rk4", "lie-poisson"):
        s = runs[name].summary
        ratio = max(s["max_abs_energy_error"] / e_h, s["max_moment_error"] / m_h)
        ok &= ratio >= 1e3
        parts.append(f"{name} dE={s['max_abs_energy_error']:.2e} dM={s['max_moment_error']:.2e} x{ratio:.3g}")
    return report(1, ok, "pd-ring conservation, need hopf tiny and others >=1e3x", "; ".join(parts))


# -- 2 -------------------------------------------------------------------------


def _local_slopes(table):
    lh, le = np.log(table.h), np.log(table.errors)
    return np.diff(le) / np.diff(lh)


def criterion_2():
    expected = {"hopf": 2, "midpoint-s2": 2, "lie-poisson": 2, "rk2": 2, "rk4": 4}
    ok = True
    parts = []
    for name, p in expected.items():
        table = convergence_study(SimConfig(scenario="pd-ring", integrator=name, t_max=100.0), ORDER_GRID)
        good = abs(table.slope - p) <= 0.1 and not table.excluded
        ok &= good
        local = ",".join(f"{s:.2f}" for s in _local_slopes(table))
        parts.append(f"{name} {table.slope:.3f} (want {p}; pairwise {local})")
    return report(2, ok, "order slopes on pd-ring T=100, h in [1e-3, 1e-1]", "; ".join(parts))


# -- 3 -------------------------------------------------------------------------


def criterion_3():
    runs = {name: _run(scenario="karman-street", integrator=name, h=0.5, sigma=0.25, t_max=1000.0)
            for name in ("hopf", "midpoint-s2", "rk4", "lie-poisson")}
    ok = True
    parts = []
    for name in ("hopf", "midpoint-s2"):
        m = runs[name].summary["max_moment_error"]
        ok &= m < 1e-10
        parts.append(f"{name} dM={m:.2e}")
    ser = runs["hopf"].series
    e_max = float(np.max(np.abs(ser.energy_error)))
    e_slope = _trend(ser.t, ser.energy_error)
    ok &= e_max < 5e-2 and abs(e_slope) < 1e-6
    # diagnostic only: the same fit over ten times the window
    long = _run(scenario="karman-street", integrator="hopf", h=0.5, sigma=0.25, t_max=10000.0).series
    parts.append(f"hopf max|dE|={e_max:.2e} trend={e_slope:.2e}/t (over t<=10000: {_trend(long.t, long.energy_error):.2e}/t)")
    for name in ("rk4", "lie-poisson"):
        ser = runs[name].series
        slope = _trend(ser.t, ser.moment_error)
        ok &= slope > 0
        parts.append(f"{name} dM trend={slope:.2e}/t")
    return report(3, ok, "Karman street h=0.5 sigma=0.25 T=1000", "; ".join(parts))


# -- 4 -------------------------------------------------------------------------


def _min_chord(x):
    d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
    return float(np.min(d[np.triu_indices(x.shape[0], 1)]))


def _collapse_series(integrator, h, sigma, t_max):
    cfg = SimConfig(scenario="collapse3", integrator=integrator, h=h, sigma=sigma, t_max=t_max)
    gamma = cfg.build_state().strengths
    t, chord, energy, moment = [], [], [], []
    for _, tn, x, _ in trajectory(cfg):
        t.append(tn)
        chord.append(_min_chord(x))
        energy.append(_energy_sphere(gamma, x, sigma))
        moment.append(gamma @ x)
    return np.array(t), np.array(chord), np.array(energy), np.array(moment)


def _events(chord, threshold=0.2):
    """Indices of near-collisions: local minima of the closest distance below ``threshold``."""
    inner = (chord[1:-1] < chord[:-2]) & (chord[1:-1] <= chord[2:]) & (chord[1:-1] < threshold)
    return np.nonzero(inner)[0] + 1


def _quiet_samples(n, events):
    # halfway between consecutive events, plus the stretches before the first and after the last
    bounds = np.concatenate([[0], events, [n - 1]])
    return np.unique(((bounds[:-1] + bounds[1:]) // 2).astype(int))


def criterion_4():
    t, chord, _, _ = _collapse_series("rk4", 1e-3, 0.0, 9.0)
    t_min = float(t[np.argmin(chord)])
    ok = abs(t_min - 8.45) <= 0.1 and chord.min() < 0.05
    parts = [f"rk4 sigma=0 closest approach {chord.min():.3g} at t={t_min:.3f}"]

    for name in ("hopf", "midpoint-s2", "rk4"):
        t, chord, e, m = _collapse_series(name, 0.1, 0.1, 500.0)
        ev = _events(chord)
        idx = _quiet_samples(len(t), ev)
        de = e[idx] - e[0]
        dm = np.linalg.norm(m[idx] - m[0], axis=1)
        if name == "rk4":
            steps = np.diff(de)
            mono = len(steps) >= 2 and (np.all(steps > 0) or np.all(steps < 0))
            ok &= bool(mono)
            shown = ",".join(f"{v:.2e}" for v in de)
            parts.append(f"rk4 {len(ev)} events, between-event dE [{shown}] monotone={mono}")
        else:
            good = len(ev) >= 2 and np.max(np.abs(de)) < 1e-3 and np.max(dm) < 1e-3
            ok &= bool(good)
            parts.append(f"{name} {len(ev)} events, between-event max|dE|={np.max(np.abs(de)):.1e} max dM={np.max(dm):.1e}")
    return report(4, ok, "three-vortex collapse", "; ".join(parts))


# -- 5 -------------------------------------------------------------------------


def criterion_5():
    out = {}
    for alpha in (1.0, 0.9):
        ser = _run(scenario="planar-four", integrator="planar-alpha", alpha=alpha, h=0.1, t_max=1000.0).series
        out[alpha] = (_trend(ser.t, np.abs(ser.energy_error)), float(np.max(np.abs(ser.energy_error))),
                      abs(float(ser.energy[0])))
    s1, _, _ = out[1.0]
    s9, m9, e0 = out[0.9]
    ratio = s1 / abs(s9) if s9 != 0 else math.inf
    ok = ratio > 10 and m9 < 1e-2 * e0
    detail = (f"trend of |dE|: alpha=1 {s1:.2e}/t, alpha=0.9 {s9:.2e}/t (ratio {ratio:.1f}); "
              f"alpha=0.9 max|dE|={m9:.2e} vs |E0|={e0:.2e}")
    return report(5, ok, "planar alpha=1 drifts, alpha=0.9 bounded", detail)


# -- 6 -------------------------------------------------------------------------


def _property_checks():
    rng = np.random.default_rng(7)
    res = {}

    # Pauli algebra, exact in floating point
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1
    mult = all(np.array_equal(SIGMA[a] @ SIGMA[b], (a == b) * IDENTITY + 1j * np.einsum("c,cij->ij", eps[a, b], SIGMA))
               for a in range(3) for b in range(3))
    d = np.eye(2)
    comp = np.array_equal(np.einsum("kab,kcd->abcd", SIGMA, SIGMA),
                          2 * np.einsum("ad,bc->abcd", d, d) - np.einsum("ab,cd->abcd", d, d))
    res["pauli"] = (mult and comp, "exact")

    phi = random_unit_pairs(rng, 500)
    psi = random_unit_pairs(rng, 500)
    theta = rng.uniform(0, 2 * np.pi, 500)
    g_err = np.abs(hopf_project(np.exp(1j * theta)[:, None] * phi) - hopf_project(phi)).max()
    res["gauge"] = (g_err < 1e-12, f"{g_err:.1e}")
    ip = np.abs(np.sum(hopf_project(phi) * hopf_project(psi), 1) - (2 * np.abs(hermitian_inner(phi, psi)) ** 2 - 1)).max()
    res["inner product"] = (ip < 1e-12, f"{ip:.1e}")

    x = random_unit_vectors(rng, 6)
    gamma = rng.uniform(0.3, 1.0, 6)
    s = SphereState(gamma, x)
    pb = abs(energy_lifted(lift_state(s), 0.1) - energy_sphere(s, 0.1))
    res["pullback"] = (pb < 1e-12, f"{pb:.1e}")

    # gradients against central differences, relative error
    h = 1e-6
    g = grad_energy_sphere(s, 0.1)
    fd = np.zeros_like(g)
    for i in range(6):
        for a in range(3):
            e = np.zeros_like(x)
            e[i, a] = h
            fd[i, a] = (_energy_sphere(gamma, x + e, 0.1) - _energy_sphere(gamma, x - e, 0.1)) / (2 * h)
    r1 = np.linalg.norm(g - fd) / np.linalg.norm(g)
    ls = lift_state(s)
    gl = grad_energy_lifted(ls, 0.1)
    fdl = []
    exact = []
    for _ in range(12):
        dphi = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
        fdl.append((_energy_lifted(gamma, ls.pairs + h * dphi, 0.1) - _energy_lifted(gamma, ls.pairs - h * dphi, 0.1)) / (2 * h))
        exact.append(2 * np.real(np.sum(np.conj(dphi) * gl)))
    r2 = np.linalg.norm(np.array(exact) - fdl) / np.linalg.norm(exact)
    res["gradients"] = (r1 <= 1e-6 and r2 <= 1e-6, f"{max(r1, r2):.1e}")

    ring = lift_state(make_pd_ring())
    y = ring
    for _ in range(1000):
        y = step_hopf(y, 0.1)
    ln = np.abs(np.linalg.norm(y.pairs, axis=1) - 1).max()
    res["length"] = (ln < 1e-12, f"{ln:.1e}")

    sa1 = np.abs(step_hopf(step_hopf(ls, 0.1, 0.1), -0.1, 0.1).pairs - ls.pairs).max()
    sa2 = np.abs(step_midpoint_s2(step_midpoint_s2(s, 0.1, 0.1), -0.1, 0.1).positions - s.positions).max()
    res["self-adjoint"] = (max(sa1, sa2) < 1e-12, f"{max(sa1, sa2):.1e}")

    cfg = SolverConfig()
    ref = step_hopf(ring, 0.1)
    prev, curr = ring, start_general(ring, 0.1)
    worst = np.abs(hopf_project(curr.pairs) - hopf_project(ref.pairs)).max()
    for _ in range(99):
        prev, curr = curr, step_general(prev, curr, 0.1)
        ref = step_hopf(ref, 0.1)
        worst = max(worst, np.abs(hopf_project(curr.pairs) - hopf_project(ref.pairs)).max())
    res["general = hopf"] = (worst <= 10 * cfg.tolerance, f"{worst:.1e}")

    z = [make_planar_four()]
    for _ in range(20):
        z.append(step_midpoint_plane(z[-1], 0.1))
    p, c = z[0], z[1]
    comp_err = 0.0
    for k in range(2, 21):
        p, c = c, step_alpha(p, c, 0.5, 0.1)
        comp_err = max(comp_err, np.abs(c.positions - z[k].positions).max())
    res["alpha=1/2 composition"] = (comp_err < 1e-11, f"{comp_err:.1e}")

    sheet = run_simulation(SimConfig(scenario="vortex-sheet", integrator="hopf", h=0.1, sigma=0.1, t_max=50.0), write=False)
    dm = sheet.summary["max_moment_error"]
    de = sheet.summary["max_abs_energy_error"]
    res["sheet smoke"] = (dm < 1e-10 and np.isfinite(de) and de < 1e-2 * abs(sheet.series.energy[0]),
                          f"dE={de:.1e} dM={dm:.1e}")
    return res


def criterion_6():
    res = _property_checks()
    ok = all(v[0] for v in res.values())
    detail = "; ".join(f"{k} {'ok' if v[0] else 'BAD'} {v[1]}" for k, v in res.items())
    return report(6, ok, "property suites and vortex-sheet smoke run", detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 7)])
def test_acceptance(criterion):
    ok, line = criterion()
    assert ok, line


if __name__ == "__main__":
    results = [c()[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
