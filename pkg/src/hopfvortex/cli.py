"""Command-line entry point.

    hopfvortex run --config run.cfg [--h 0.05] [--set scenario.theta0=0.3]
    hopfvortex order --config run.cfg --h-list 0.1,0.05,0.02
    hopfvortex list-scenarios
    hopfvortex list-integrators

On failure a single JSON object with ``error`` and ``message`` keys is
written to stderr and the exit code is nonzero (2 for bad input, 1 for a
failed simulation or I/O problem).
"""

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .errors import ConfigError, StepFailure
from .harness import INTEGRATORS, convergence_study, load_config, run_simulation
from .scenarios import SCENARIOS

_OVERRIDES = (
    ("scenario", str),
    ("integrator", str),
    ("h", str),
    ("sigma", str),
    ("t_max", str),
    ("output_every", str),
    ("tolerance", str),
    ("max_iterations", str),
    ("output", str),
    ("seed", str),
    ("alpha", str),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hopfvortex", description="Point-vortex simulations on the sphere and in the plane.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_overrides(sp):
        sp.add_argument("--config", required=True, help="flat key = value configuration file")
        for name, kind in _OVERRIDES:
            sp.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind, default=None)
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="any configuration key, e.g. scenario.theta0=0.3 (repeatable)")

    run = sub.add_parser("run", help="integrate one configuration and write diagnostics")
    add_overrides(run)

    order = sub.add_parser("order", help="convergence study over several step sizes")
    add_overrides(order)
    order.add_argument("--h-list", required=True, help="comma-separated step sizes")
    order.add_argument("--reference", choices=("exact", "fine"), default="exact")
    order.add_argument("--refine", type=int, default=100, help="reference step = min(h)/refine for --reference fine")
    order.add_argument("--workers", type=int, default=1)

    sub.add_parser("list-scenarios", help="print the available scenarios")
    sub.add_parser("list-integrators", help="print the available integrators")
    return p


def _overrides(args) -> dict:
    values = {name: getattr(args, name) for name, _ in _OVERRIDES if getattr(args, name) is not None}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        values[key] = value
    return values


def _h_list(text: str) -> List[float]:
    try:
        hs = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"--h-list: cannot parse {text!r}") from None
    if len(hs) < 2 or any(not h > 0 for h in hs):
        raise ConfigError("--h-list needs at least two positive step sizes")
    return hs


def _emit_error(kind: str, message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.command == "list-scenarios":
            for name, spec in SCENARIOS.items():
                params = ", ".join(f"{k}={v:g}" for k, v in spec.parameters.items())
                kind = "planar" if spec.planar else "sphere"
                print(f"{name}\t{kind}\t{spec.description}" + (f"\t[{params}]" if params else ""))
            return 0
        if args.command == "list-integrators":
            for name, info in INTEGRATORS.items():
                steps = "two-step" if info.two_step else "one-step"
                print(f"{name}\t{info.space}\t{steps}\t{info.description}")
            return 0

        cfg = load_config(args.config, _overrides(args))
        if args.command == "run":
            result = run_simulation(cfg)
            print(json.dumps(result.summary, sort_keys=True))
            return 0

        table = convergence_study(cfg, _h_list(args.h_list), reference=args.reference,
                                  refine=args.refine, workers=args.workers)
        report = {
            "integrator": cfg.integrator,
            "scenario": cfg.scenario,
            "reference": table.reference,
            "slope": table.slope,
            "rows": [{"h": h, "error": e} for h, e in table.rows()],
            "excluded": [{"h": h, "reason": r} for h, r in table.excluded],
        }
        if cfg.output:
            np.savetxt(cfg.output, np.column_stack([table.h, table.errors]), fmt="%.17g",
                       delimiter=",", header="h,error", comments="")
            report["output"] = cfg.output
        print(json.dumps(report, sort_keys=True))
        return 0
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return 2
    except KeyError as exc:
        _emit_error("config", str(exc.args[0]) if exc.args else str(exc))
        return 2
    except StepFailure as exc:
        _emit_error("step", str(exc), step=exc.step)
        return 1
    except OSError as exc:
        _emit_error("io", str(exc))
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
