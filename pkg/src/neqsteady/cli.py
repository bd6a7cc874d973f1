"""Command-line entry point: ``neqsteady steady|fig2|reduce|oracle-check``.

Exit codes: 0 ok, 1 oracle check ran but failed its tolerance, 2 model or
solver error, 3 configuration/usage error, 4 oracle non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .adiabatic import EndBaths, closed_form_steady, eliminate_bus, reduced_spec
from .config import OracleSettings, RunConfig, Sweep, load_config
from .dissipators import build_dissipators
from .errors import ConfigError, ModelError, NotConverged, SpecError
from .figures import COLUMNS, FIG2, PANELS, default_jobs, fig2_table, ordered_map
from .model import SystemSpec, normal_modes
from .oracle import occupation, relax_to_steady, tail_estimate
from .phasespace import steady_state

log = logging.getLogger("neqsteady")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_MODEL, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors share the config exit code
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def fmt(x: float | int | str) -> str:
    if isinstance(x, str):
        return x
    return "%.12g" % x


def write_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def spec_dict(spec: SystemSpec) -> dict:
    return {
        "modes": {label: w for label, w in zip(spec.labels, spec.mode_frequencies)},
        "couplings": [{"modes": [spec.labels[c.m], spec.labels[c.n]], "g": c.g} for c in spec.couplings],
        "baths": [
            {"mode": spec.labels[b.mode], "temperature": b.temperature, "rate": b.rate} for b in spec.baths
        ],
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _override_sweep(cfg: RunConfig, args) -> RunConfig:
    if args.start is None and args.stop is None and args.points is None:
        return cfg
    if cfg.sweep is None:
        raise ConfigError("--from/--to/--points need a [sweep] section in the config")
    sweep = Sweep(
        cfg.sweep.parameter,
        cfg.sweep.start if args.start is None else args.start,
        cfg.sweep.stop if args.stop is None else args.stop,
        cfg.sweep.points if args.points is None else args.points,
    )
    return replace(cfg, sweep=sweep)


def cmd_steady(args) -> int:
    cfg = _override_sweep(load_config(args.config), args)
    rwa = cfg.rwa or args.rwa
    fmt_name = args.format or cfg.output.format
    out = args.out or cfg.output.path
    points = cfg.points()
    reports = ordered_map(lambda p: steady_state(p[1], rwa=rwa), points, args.jobs)
    labels = cfg.spec.labels

    if fmt_name == "csv":
        header = ([cfg.sweep.parameter] if cfg.sweep else []) + [
            f"{name}_{label}" for label in labels for name in ("N", "Teff")
        ] + ["solve_residual"]
        rows = []
        for (value, _), rep in zip(points, reports):
            row = [value] if cfg.sweep else []
            for k in range(len(labels)):
                row += [rep.local_occupations[k], rep.effective_temperatures[k]]
            rows.append(row + [rep.solve_residual])
        _emit(write_csv(header, rows), out)
        return EXIT_OK

    doc = {"inputs": spec_dict(cfg.spec), "rwa": rwa}
    if cfg.sweep is None:
        doc["report"] = reports[0].as_dict()
    else:
        doc["sweep"] = {
            "parameter": cfg.sweep.parameter,
            "from": cfg.sweep.start,
            "to": cfg.sweep.stop,
            "points": cfg.sweep.points,
        }
        doc["results"] = [{"value": v, "report": r.as_dict()} for (v, _), r in zip(points, reports)]
    _emit(write_json(doc), out)
    return EXIT_OK


def cmd_fig2(args) -> int:
    params = FIG2
    if args.start is not None:
        params = replace(params, delta_from=args.start)
    if args.stop is not None:
        params = replace(params, delta_to=args.stop)
    if args.points is not None:
        params = replace(params, points=args.points)
    if params.points < 2 or not params.delta_from < params.delta_to:
        raise ConfigError("fig2 needs --points >= 2 and --from < --to")
    rows = fig2_table(args.panel, params, jobs=args.jobs)
    if (args.format or "csv") == "json":
        _emit(write_json({"panel": args.panel, "rows": [dict(zip(COLUMNS, r)) for r in rows]}), args.out)
    else:
        _emit(write_csv(COLUMNS, rows), args.out)
    if args.plot:
        from .plotting import render_fig2

        render_fig2(rows, args.panel, args.plot)
    return EXIT_OK


def cmd_reduce(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.spec
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reduced = eliminate_bus(spec)
    left, right = spec.index("L"), spec.index("R")
    bath_l, bath_r = spec.bath_on(left), spec.bath_on(right)
    if bath_l is None or bath_r is None:
        raise ConfigError("reduce needs baths on modes L and R")
    baths = EndBaths(bath_l.temperature, bath_l.rate, bath_r.temperature, bath_r.rate)
    closed = closed_form_steady(reduced, baths)
    two = steady_state(reduced_spec(reduced, baths))
    full = steady_state(spec)
    closed_occ = [closed.occupation_left, closed.occupation_right]
    two_occ = list(two.local_occupations)
    full_occ = [full.local_occupations[left], full.local_occupations[right]]
    doc = {
        "inputs": spec_dict(spec),
        "reduced": reduced.as_dict(),
        "closed_form": closed.as_dict(),
        "two_mode_numeric": {"N_L": two_occ[0], "N_R": two_occ[1]},
        "full_chain": {"N_L": full_occ[0], "N_R": full_occ[1]},
        "difference": {
            "closed_minus_two_mode": [c - t for c, t in zip(closed_occ, two_occ)],
            "closed_minus_full": [c - f for c, f in zip(closed_occ, full_occ)],
        },
        "warnings": [str(w.message) for w in caught],
    }
    _emit(write_json(doc), args.out or cfg.output.path)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.spec
    rwa = cfg.rwa or args.rwa
    settings = cfg.oracle or OracleSettings()
    oracle_cfg = settings.to_config(spec.n_modes)
    basis = normal_modes(spec)
    diss = build_dissipators(basis, spec, rwa=rwa)
    gaussian = steady_state(spec, rwa=rwa)
    state = relax_to_steady(spec, diss, oracle_cfg, basis=basis)
    rows = []
    for k, label in enumerate(spec.labels):
        got = occupation(state, k)
        tail = tail_estimate(state, k)
        tol = max(settings.tolerance, 3.0 * tail)
        err = abs(got - gaussian.local_occupations[k])
        rows.append(
            {
                "mode": label,
                "oracle": got,
                "gaussian": gaussian.local_occupations[k],
                "abs_error": err,
                "tail_estimate": tail,
                "tolerance": tol,
                "pass": err <= tol,
            }
        )
    passed = all(r["pass"] for r in rows)
    doc = {
        "inputs": spec_dict(spec),
        "rwa": rwa,
        "oracle": {
            "cutoffs": list(oracle_cfg.cutoffs),
            "dt": oracle_cfg.step_for(basis, diss),
            "t_final": oracle_cfg.t_final,
            "convergence_tol": oracle_cfg.convergence_tol,
            "time": state.time,
            "steps": state.steps,
            "residual": state.residual,
            "min_eigenvalue": state.min_eigenvalue,
        },
        "modes": rows,
        "passed": passed,
    }
    _emit(write_json(doc), args.out or cfg.output.path)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="neqsteady", description="Steady states of bath-driven oscillator networks.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="run configuration file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--jobs", type=int, default=None, help="worker threads (default: $NEQSTEADY_JOBS or 1)")

    def sweep_flags(p):
        p.add_argument("--points", type=int)
        p.add_argument("--from", dest="start", type=float)
        p.add_argument("--to", dest="stop", type=float)

    p = sub.add_parser("steady", help="steady-state report, optionally swept over one parameter")
    common(p)
    p.add_argument("--rwa", action="store_true", help="drop inter-mode dissipator terms")
    sweep_flags(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("fig2", help="effective temperatures against detuning for the standard chain")
    common(p, config_required=False)
    p.add_argument("--panel", choices=PANELS, default="a")
    p.add_argument("--plot", help="also render the curves to this image file")
    sweep_flags(p)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("reduce", help="bus elimination and closed-form two-mode occupations")
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("oracle-check", help="compare the Fock-space integrator with the Gaussian solver")
    common(p)
    p.add_argument("--rwa", action="store_true")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.jobs is None:
            args.jobs = default_jobs()
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        return args.func(args)
    except NotConverged as exc:
        print(f"neqsteady: oracle did not converge: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except ModelError as exc:
        print(f"neqsteady: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except SpecError as exc:
        print(f"neqsteady: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"neqsteady: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
