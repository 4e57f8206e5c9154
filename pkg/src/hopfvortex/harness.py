"""Simulation driver, configuration files, diagnostics output and order studies.

A run is described by a :class:`SimConfig`. :func:`trajectory` advances it
step by step; :func:`run_simulation` records diagnostics every
``output_every`` steps (plus the first and last step) and optionally writes
a CSV file with a JSON summary beside it. :func:`convergence_study` measures
the error of the first vortex for several step sizes and fits the order.
"""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import general, integrators, planar
from .dynamics import _check_sigma, _energy_sphere
from .errors import ConfigError, ConvergenceError, DomainError, SingularityError, StepFailure
from .integrators import SolverConfig
from .scenarios import SCENARIOS, pd_exact_positions
from .su2 import hopf_lift, hopf_project

__all__ = [
    "INTEGRATORS",
    "IntegratorInfo",
    "SimConfig",
    "DiagnosticsSeries",
    "RunResult",
    "ConvergenceTable",
    "parse_config_text",
    "load_config",
    "config_from_mapping",
    "trajectory",
    "run_simulation",
    "convergence_study",
    "stereographic",
]


@dataclass(frozen=True)
class IntegratorInfo:
    name: str
    space: str  # "sphere", "lifted" or "planar"
    two_step: bool
    description: str


INTEGRATORS: Dict[str, IntegratorInfo] = {
    i.name: i
    for i in [
        IntegratorInfo("hopf", "lifted", False, "implicit midpoint on S^3 (variational Hopf integrator)"),
        IntegratorInfo("midpoint-s2", "sphere", False, "implicit midpoint on the vortex equations in R^3"),
        IntegratorInfo("rk4", "sphere", False, "classical RK4 with normalization after each step"),
        IntegratorInfo("rk2", "sphere", False, "Heun's method with normalization after each step"),
        IntegratorInfo("lie-poisson", "sphere", False, "symmetric Lie-Poisson rotation update"),
        IntegratorInfo("hopf-trapezoid", "lifted", True, "two-step trapezoid scheme on S^3 (parasitic mode)"),
        IntegratorInfo("hopf-general", "lifted", True, "Cayley/slack solver for general lifted Hamiltonians"),
        IntegratorInfo("planar-alpha", "planar", True, "planar two-step alpha family"),
        IntegratorInfo("planar-midpoint", "planar", False, "planar implicit midpoint"),
    ]
}

_FLOAT_KEYS = ("h", "sigma", "t_max", "tolerance", "alpha")
_INT_KEYS = ("output_every", "max_iterations", "seed")
_STR_KEYS = ("scenario", "integrator", "output")


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce a run.

    ``scenario_params`` overrides the scenario defaults. ``alpha`` is only
    read by ``planar-alpha``. ``seed`` is carried along for randomized
    callers and does not affect the deterministic scenarios.
    """

    scenario: str = "pd-ring"
    integrator: str = "hopf"
    h: float = 0.1
    sigma: float = 0.0
    t_max: float = 10.0
    output_every: int = 10
    tolerance: float = 1e-13
    max_iterations: int = 200
    output: Optional[str] = None
    seed: int = 0
    alpha: float = 0.5
    scenario_params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        if self.integrator not in INTEGRATORS:
            raise ConfigError(f"unknown integrator {self.integrator!r}; choose from {sorted(INTEGRATORS)}")
        planar_scn = SCENARIOS[self.scenario].planar
        planar_int = INTEGRATORS[self.integrator].space == "planar"
        if planar_scn != planar_int:
            kind = "planar" if planar_int else "spherical"
            raise ConfigError(
                f"integrator {self.integrator!r} is {kind} but scenario {self.scenario!r} is not"
            )
        if not (math.isfinite(self.h) and self.h > 0):
            raise ConfigError(f"h must be positive, got {self.h}")
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigError(f"t_max must be positive, got {self.t_max}")
        if not self.sigma >= 0:
            raise ConfigError(f"sigma must be non-negative, got {self.sigma}")
        if self.output_every < 1:
            raise ConfigError("output_every must be a positive integer")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        try:
            SolverConfig(self.tolerance, self.max_iterations)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        unknown = set(self.scenario_params) - set(SCENARIOS[self.scenario].parameters)
        if unknown:
            raise ConfigError(f"scenario {self.scenario!r} has no parameter(s) {sorted(unknown)}")

    @property
    def n_steps(self) -> int:
        # tolerate t_max / h landing a hair above an integer
        return max(1, math.ceil(self.t_max / self.h - 1e-9))

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(self.tolerance, self.max_iterations)

    def build_state(self):
        return SCENARIOS[self.scenario].build(**self.scenario_params)


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Returns raw strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def _number(key, value, kind):
    try:
        if kind is int:
            f = float(value)
            if not f.is_integer():
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {value!r} as {kind.__name__}") from None


def config_from_mapping(values: Dict[str, object]) -> SimConfig:
    """Build a :class:`SimConfig` from string (or already typed) values."""
    kwargs = {}
    params = {}
    for key, value in values.items():
        if key.startswith("scenario."):
            params[key[len("scenario."):]] = _number(key, value, float)
        elif key in _FLOAT_KEYS:
            kwargs[key] = _number(key, value, float)
        elif key in _INT_KEYS:
            kwargs[key] = _number(key, value, int)
        elif key in _STR_KEYS:
            kwargs[key] = None if value is None else str(value)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    spec = SCENARIOS.get(kwargs.get("scenario", SimConfig.scenario))
    if spec is not None:
        # integer-valued scenario parameters such as N
        for k, v in params.items():
            if type(spec.parameters.get(k)) is int:
                params[k] = _number(f"scenario.{k}", v, int)
    return SimConfig(scenario_params=params, **kwargs)


def load_config(path, overrides: Optional[Dict[str, object]] = None) -> SimConfig:
    """Read a config file; entries in ``overrides`` win over the file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    values: Dict[str, object] = dict(parse_config_text(text))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping(values)


# -- stepping -----------------------------------------------------------------


def _steppers(cfg: SimConfig, gamma):
    """Return ``(seed, step)``; ``seed`` is None for one-step methods."""
    name = cfg.integrator
    h, sigma, solver = cfg.h, _check_sigma(cfg.sigma), cfg.solver
    if INTEGRATORS[name].space == "lifted" or name == "lie-poisson":
        integrators._check_strengths(gamma)

    one_step = {
        "hopf": lambda y: integrators._hopf(gamma, y, h, sigma, solver),
        "midpoint-s2": lambda y: integrators._midpoint_s2(gamma, y, h, sigma, solver),
        "rk4": lambda y: integrators._rk4(gamma, y, h, sigma),
        "rk2": lambda y: integrators._rk2(gamma, y, h, sigma),
        "lie-poisson": lambda y: integrators._lie_poisson(gamma, y, h, sigma, solver),
        "planar-midpoint": lambda y: planar._midpoint_plane(gamma, y, h, solver),
    }
    two_step = {
        "hopf-trapezoid": (
            lambda y: integrators._hopf(gamma, y, h, sigma, solver),
            lambda p, y: integrators._trapezoid(gamma, p, y, h, sigma),
        ),
        "hopf-general": (
            lambda y: general._start(gamma, y, h, sigma, solver),
            lambda p, y: general._general(gamma, p, y, h, sigma, solver),
        ),
        "planar-alpha": (
            lambda y: planar._midpoint_plane(gamma, y, h, solver),
            lambda p, y: planar._alpha(gamma, p, y, cfg.alpha, h, solver),
        ),
    }
    if name in one_step:
        return None, one_step[name]
    return two_step[name]


def trajectory(cfg: SimConfig) -> Iterator[Tuple[int, float, np.ndarray, int]]:
    """Yield ``(n, t_n, positions, iterations)`` for ``n = 0 .. cfg.n_steps``.

    ``positions`` are unit 3-vectors ``(N, 3)`` for spherical runs (projected
    from S^3 for lifted integrators) and complex ``(N,)`` for planar runs.
    ``iterations`` counts solver iterations spent on step ``n``.

    Raises
    ------
    StepFailure
        If step ``n`` fails; ``.step`` holds ``n`` and the cause is chained.
    """
    state = cfg.build_state()
    gamma = state.strengths
    space = INTEGRATORS[cfg.integrator].space
    if space == "lifted":
        y = np.ascontiguousarray(hopf_lift(state.positions))
        view = hopf_project
    else:
        y = state.positions.copy()
        view = np.copy
    seed, step = _steppers(cfg, gamma)
    yield 0, 0.0, view(y), 0

    prev = None
    for n in range(1, cfg.n_steps + 1):
        try:
            if seed is None:
                y, its = step(y)
            elif prev is None:
                prev, (y, its) = y, seed(y)
            else:
                new, its = step(prev, y)
                prev, y = y, new
            if not np.all(np.isfinite(y)):
                raise FloatingPointError("non-finite state")
        except (ConvergenceError, SingularityError, StepFailure, FloatingPointError, DomainError) as exc:
            raise StepFailure(f"{cfg.integrator} failed at step {n} (t = {n * cfg.h:g}): {exc}", step=n) from exc
        yield n, n * cfg.h, view(y), its


# -- diagnostics ---------------------------------------------------------------


@dataclass
class DiagnosticsSeries:
    """Recorded diagnostics; one row per record.

    ``positions`` is ``(K, N, 3)`` for spherical runs and complex ``(K, N)``
    for planar runs. For planar runs the moment columns hold the linear
    impulse ``sum G z`` (real, imaginary) and the angular impulse
    ``sum G |z|^2``.
    """

    planar: bool
    t: np.ndarray
    energy: np.ndarray
    energy_error: np.ndarray
    moment: np.ndarray
    moment_error: np.ndarray
    positions: np.ndarray
    steps: np.ndarray

    def columns(self) -> List[str]:
        cols = ["t", "E", "dE", "Mx", "My", "Mz", "dM"]
        n = self.positions.shape[1]
        for i in range(1, n + 1):
            cols += [f"re_{i}", f"im_{i}"] if self.planar else [f"x_{i}", f"y_{i}", f"z_{i}"]
        return cols

    def table(self) -> np.ndarray:
        if self.planar:
            pos = np.stack([self.positions.real, self.positions.imag], axis=2).reshape(len(self.t), -1)
        else:
            pos = self.positions.reshape(len(self.t), -1)
        return np.column_stack(
            [self.t, self.energy, self.energy_error, self.moment, self.moment_error, pos]
        )

    def to_csv(self, path) -> None:
        np.savetxt(path, self.table(), fmt="%.17g", delimiter=",", header=",".join(self.columns()), comments="")


@dataclass
class RunResult:
    config: SimConfig
    series: DiagnosticsSeries
    summary: Dict[str, object]


def _diagnostics(gamma, pos, sigma, is_planar):
    if is_planar:
        e = planar._energy(gamma, pos)
        p = gamma @ pos
        return e, np.array([p.real, p.imag, gamma @ (pos.real ** 2 + pos.imag ** 2)])
    return _energy_sphere(gamma, pos, sigma), gamma @ pos


def _summary_path(output):
    p = Path(output)
    return p.with_suffix(".json") if p.suffix.lower() != ".json" else p.with_name(p.name + ".summary.json")


def run_simulation(cfg: SimConfig, write: bool = True) -> RunResult:
    """Integrate ``cfg`` to ``t_max`` and record diagnostics.

    Diagnostics are evaluated on S^2 (or in the plane) at step 0, every
    ``output_every`` steps and at the final step. When ``cfg.output`` is set
    and ``write`` is true, the series is written as CSV and the summary as
    JSON next to it (same stem, ``.json`` suffix). The JSON omits the wall
    time so that identical configurations give identical files.

    Returns
    -------
    RunResult
        ``summary`` holds ``max_abs_energy_error``, ``max_moment_error``,
        ``wall_time``, ``total_iterations`` and run metadata.
    """
    state = cfg.build_state()
    gamma = state.strengths
    is_planar = SCENARIOS[cfg.scenario].planar
    sigma = cfg.sigma
    last = cfg.n_steps

    ts, es, ms, xs, ns = [], [], [], [], []
    total_its = 0
    start = time.perf_counter()
    for n, t, pos, its in trajectory(cfg):
        total_its += its
        if n % cfg.output_every == 0 or n == last:
            e, m = _diagnostics(gamma, pos, sigma, is_planar)
            ts.append(t)
            es.append(e)
            ms.append(m)
            xs.append(pos)
            ns.append(n)
    wall = time.perf_counter() - start

    energy = np.array(es)
    moment = np.array(ms)
    series = DiagnosticsSeries(
        planar=is_planar,
        t=np.array(ts),
        energy=energy,
        energy_error=energy - energy[0],
        moment=moment,
        moment_error=np.linalg.norm(moment - moment[0], axis=1),
        positions=np.array(xs),
        steps=np.array(ns),
    )
    summary = {
        "status": "ok",
        "scenario": cfg.scenario,
        "integrator": cfg.integrator,
        "h": cfg.h,
        "sigma": cfg.sigma,
        "t_max": cfg.t_max,
        "steps": last,
        "records": len(ts),
        "max_abs_energy_error": float(np.max(np.abs(series.energy_error))),
        "max_moment_error": float(np.max(series.moment_error)),
        "final_energy_error": float(series.energy_error[-1]),
        "final_moment_error": float(series.moment_error[-1]),
        "wall_time": wall,
        "total_iterations": int(total_its),
    }
    if write and cfg.output:
        out = Path(cfg.output)
        try:
            if out.parent != Path(""):
                out.parent.mkdir(parents=True, exist_ok=True)
            series.to_csv(out)
            # wall time stays out of the file so reruns are byte-identical
            meta = {k: v for k, v in summary.items() if k != "wall_time"}
            meta["config"] = asdict(cfg)
            _summary_path(out).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write output {out}: {exc.strerror or exc}") from exc
        summary["output"] = str(out)
        summary["summary_path"] = str(_summary_path(out))
    return RunResult(cfg, series, summary)


# -- order study ---------------------------------------------------------------


@dataclass
class ConvergenceTable:
    """Per-step-size errors and the least-squares slope of log error vs log h."""

    h: np.ndarray
    errors: np.ndarray
    slope: float
    reference: str
    excluded: List[Tuple[float, str]] = field(default_factory=list)

    def rows(self):
        return list(zip(self.h.tolist(), self.errors.tolist()))


def _first_vortex_path(cfg: SimConfig) -> np.ndarray:
    return np.array([pos[0] for _, _, pos, _ in trajectory(cfg)])


def _exact_error(cfg: SimConfig) -> float:
    if cfg.scenario != "pd-ring":
        raise ConfigError("an exact reference is only available for pd-ring")
    params = {**SCENARIOS["pd-ring"].parameters, **cfg.scenario_params}
    err = 0.0
    for _, t, pos, _ in trajectory(cfg):
        err = max(err, float(np.linalg.norm(pos[0] - pd_exact_positions(t, **params)[0])))
    return err


def _one(args):
    cfg, reference, ref_path, ref_h = args
    try:
        if reference == "exact":
            return cfg.h, _exact_error(cfg), None
        stride = cfg.h / ref_h
        k = int(round(stride))
        if abs(stride - k) > 1e-9 * stride:
            raise ConfigError(f"h = {cfg.h} is not a multiple of the reference step {ref_h}")
        path = _first_vortex_path(cfg)
        ref = ref_path[::k][: len(path)]
        return cfg.h, float(np.max(np.abs(path - ref) if path.dtype.kind == "c" else np.linalg.norm(path - ref, axis=1))), None
    except (StepFailure, ConfigError) as exc:
        return cfg.h, math.nan, str(exc)


def convergence_study(
    cfg: SimConfig,
    h_list: Sequence[float],
    reference: str = "exact",
    refine: int = 100,
    workers: int = 1,
) -> ConvergenceTable:
    """Measure ``max_n |x_1(t_n) - x_1^ref(t_n)|`` for each step size.

    Parameters
    ----------
    cfg : SimConfig
        Base configuration; ``h`` and ``output`` are ignored.
    h_list : sequence of float
        Step sizes to test.
    reference : {"exact", "fine"}
        ``"exact"`` uses the rigidly rotating ring (pd-ring only);
        ``"fine"`` runs the same integrator with step ``min(h_list)/refine``.
    workers : int
        Number of processes. One step size per process.

    Returns
    -------
    ConvergenceTable
        Runs that fail are listed in ``excluded`` and left out of the fit.
    """
    if reference not in ("exact", "fine"):
        raise ConfigError("reference must be 'exact' or 'fine'")
    if reference == "exact" and cfg.scenario != "pd-ring":
        raise ConfigError("an exact reference is only available for pd-ring")
    hs = sorted({float(h) for h in h_list}, reverse=True)
    if len(hs) < 2:
        raise ConfigError("need at least two distinct step sizes")
    ref_path, ref_h = None, None
    if reference == "fine":
        ref_h = hs[-1] / refine
        ref_path = _first_vortex_path(replace(cfg, h=ref_h, output=None))
    jobs = [(replace(cfg, h=h, output=None), reference, ref_path, ref_h) for h in hs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(j) for j in jobs]

    good = [(h, e) for h, e, msg in results if msg is None and e > 0 and math.isfinite(e)]
    excluded = [(h, msg or "zero or non-finite error") for h, e, msg in results if not (msg is None and e > 0 and math.isfinite(e))]
    h_arr = np.array([g[0] for g in good])
    e_arr = np.array([g[1] for g in good])
    slope = float(np.polyfit(np.log(h_arr), np.log(e_arr), 1)[0]) if len(good) >= 2 else math.nan
    return ConvergenceTable(h_arr, e_arr, slope, reference, excluded)


def stereographic(x) -> np.ndarray:
    """Project unit vectors from the north pole: ``(x1, x2) / (1 - x3)``.

    Raises ``DomainError`` for points within 1e-12 of the north pole.
    """
    x = np.asarray(x, dtype=float)
    denom = 1.0 - x[..., 2]
    if np.any(denom < 1e-12):
        raise DomainError("stereographic projection is undefined at the north pole")
    return x[..., :2] / denom[..., None]
