"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 I/O error.
Errors are reported on stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import serialize
from .config import ConfigError, ScenarioConfig, load
from .dynamics import Controls, StiffnessError, TrajectoryState, integrate, ramp_drive
from .model import ModelMode, ParameterError
from .presets import POWER_READINGS, PRESETS, get_preset
from .roots import RootFindingError, find_all_roots, solve_exact_complex
from .stability import StabilityError, classify_roots
from .sweep import run_hysteresis, run_sweep, series_jumps

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


class UsageError(ConfigError):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        serialize.write(out, text)


def _scenario(args) -> ScenarioConfig:
    if not args.config:
        raise UsageError("--config", "a configuration file is required")
    cfg = load(args.config)
    if args.mode:
        cfg = replace(cfg, mode=ModelMode(args.mode))
    if args.points is not None and cfg.sweep is not None:
        cfg = replace(cfg, sweep=replace(cfg.sweep, points=args.points))
    return cfg


def _solve_roots(sys_, drive, mode):
    return classify_roots(sys_, drive, find_all_roots(sys_, drive, mode))


def cmd_solve(args) -> int:
    cfg = _scenario(args)
    if cfg.sweep is not None:
        raise ConfigError("sweep", "solve takes a single operating point; remove the sweep section")
    s, d = cfg.system_params(), cfg.drive_params()
    rs = _solve_roots(s, d, cfg.mode)
    rows = serialize.rootset_rows(rs)
    meta = {"command": "solve", "mode": cfg.mode.value, "count": len(rs)}
    _emit(serialize.render(rows, args.format, meta=meta), args.out)
    if args.out:
        pattern = "/".join(x.value[0].upper() for x in rs.pattern)
        print(f"{len(rs)} root(s), pattern {pattern} -> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _scenario(args)
    result = run_sweep(cfg.sweep_spec())
    meta = {
        "command": "sweep",
        "axis": cfg.sweep.axis.value,
        "mode": cfg.mode.value,
        "windows": [list(w) for w in result.windows],
        "double_windows": [list(w) for w in result.double_windows],
    }
    _emit(serialize.render(serialize.sweep_rows(result), args.format, meta=meta), args.out)
    return EXIT_OK


def _trace_outputs(result, stem: Path, fmt_name: str) -> list[tuple[Path, object]]:
    up, down = run_hysteresis(result.spec, result)
    out = []
    for trace in (up, down):
        meta = {
            "direction": trace.direction.value,
            "axis": result.spec.axis.value,
            "jumps": [j.axis_value for j in trace.jumps],
        }
        path = stem.with_name(f"{stem.name}_{trace.direction.value}.{fmt_name}")
        serialize.write(path, serialize.render(serialize.trace_rows(trace), fmt_name, meta=meta))
        out.append((path, trace))
    return out


def _stem(out: str) -> Path:
    p = Path(out)
    return p.with_suffix("") if p.suffix in (".csv", ".json") else p


def cmd_hysteresis(args) -> int:
    cfg = _scenario(args)
    if not args.out:
        raise UsageError("--out", "hysteresis writes two files; give an output path stem")
    result = run_sweep(cfg.sweep_spec())
    for path, trace in _trace_outputs(result, _stem(args.out), args.format):
        print(f"{trace.direction.value}: {len(trace.jumps)} jump(s) -> {path}")
    return EXIT_OK


def _initial_state(cfg: ScenarioConfig, s, d, seed: int | None) -> TrajectoryState:
    sim = cfg.simulate
    if sim.initial == "origin":
        y = np.zeros(8)
    else:
        k = int(sim.initial.split(":")[1])
        rs = solve_exact_complex(s, d) if cfg.mode is ModelMode.EXACT_COMPLEX else find_all_roots(s, d, cfg.mode)
        if k >= len(rs):
            raise ConfigError("simulate.initial", f"root index {k} out of range ({len(rs)} roots)")
        y = TrajectoryState.from_solution(s, d, rs[k]).as_array()
    if sim.perturbation > 0:
        rng = np.random.default_rng(0 if seed is None else seed)
        y = y * (1.0 + sim.perturbation * rng.standard_normal(8))
    return TrajectoryState.from_array(y)


def cmd_simulate(args) -> int:
    cfg = _scenario(args)
    sim = cfg.simulate
    if sim is None:
        raise ConfigError("simulate", "this command needs a simulate section")
    s, d = cfg.system_params(), cfg.drive_params()
    ramp = (sim.ramp_start, sim.ramp_stop, sim.ramp_duration)
    if any(q is not None for q in ramp):
        if any(q is None for q in ramp):
            raise ConfigError("simulate", "a ramp needs ramp_start, ramp_stop and ramp_duration")
        p0, p1 = sim.ramp_start.si("power", "simulate.ramp_start"), sim.ramp_stop.si("power", "simulate.ramp_stop")
        d0 = d.replace(p_pu=p0)
        init = _initial_state(cfg, s, d0, args.seed)
        trace = ramp_drive(s, d0, p0, p1, sim.ramp_duration.si("time", "simulate.ramp_duration"), init,
                           n_samples=sim.samples)
        rows = serialize.trajectory_rows(trace.times, trace.powers, trace.states)
        meta = {"command": "simulate", "ramp": True, "steps": trace.steps}
    else:
        if sim.t_max is None:
            raise ConfigError("simulate.t_max", "missing (or give a ramp)")
        t_max = sim.t_max.si("time", "simulate.t_max")
        init = _initial_state(cfg, s, d, args.seed)
        times = np.linspace(0.0, t_max, sim.samples)
        rep = integrate(s, d, init, t_max, Controls(stop_on_settle=False), sample_times=times)
        rows = serialize.trajectory_rows(rep.sample_times, np.full(len(rep.sample_times), d.p_pu), rep.samples)
        meta = {"command": "simulate", "ramp": False, "steps": rep.steps, "settled": rep.settled}
    _emit(serialize.render(rows, args.format, serialize.TRAJECTORY_COLUMNS, meta), args.out)
    return EXIT_OK


def _slug(label: str) -> str:
    return label.replace("=+", "_plus_").replace("=-", "_minus_").replace("=", "_")


def cmd_figures(args) -> int:
    preset = get_preset(args.preset)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    mode = ModelMode(args.mode) if args.mode else ModelMode.PAPER_EQ5
    for curve in preset.curves:
        cfg = preset.scenario(curve, args.power_unit, args.points, mode)
        result = run_sweep(cfg.sweep_spec())
        stem = outdir / f"{preset.name}_{_slug(curve.label.replace('uW', args.power_unit))}"
        if preset.kind == "sweep":
            path = stem.with_name(f"{stem.name}.{args.format}")
            meta = {"preset": preset.name, "version": preset.version, "curve": curve.label,
                    "windows": [list(w) for w in result.windows]}
            serialize.write(path, serialize.render(serialize.sweep_rows(result), args.format, meta=meta))
            print(f"{curve.label}: {len(result.windows)} bistable window(s) -> {path}")
        else:
            for path, trace in _trace_outputs(result, stem, args.format):
                jumps = series_jumps(trace.values, trace.observable(preset.observable))
                print(f"{curve.label} {trace.direction.value}: {len(jumps)} jump(s) in {preset.observable} -> {path}")
    return EXIT_OK


def cmd_list_presets(args) -> int:
    for name, p in PRESETS.items():
        curves = ", ".join(c.label for c in p.curves)
        print(f"{name}\tv{p.version}\t{p.kind}\t{p.observable} vs {p.axis.value}\t{curves}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON file")
    common.add_argument("--out", help="output file, stem or directory")
    common.add_argument("--format", choices=serialize.FORMATS, default="csv")
    common.add_argument("--mode", choices=[m.value for m in ModelMode])
    common.add_argument("--points", type=int, help="override the number of sweep points")
    common.add_argument("--seed", type=int, help="seed for randomized initial perturbations")

    parser = argparse.ArgumentParser(prog="bistab", description="Steady states and hysteresis of two coupled optomechanical cavities.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (
        ("solve", cmd_solve, "all steady states at one operating point"),
        ("sweep", cmd_sweep, "steady states along a swept parameter"),
        ("hysteresis", cmd_hysteresis, "up and down passes along a swept parameter"),
        ("simulate", cmd_simulate, "time integration or power ramp"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
    p = sub.add_parser("figures", parents=[common], help="regenerate the data of a figure preset")
    p.add_argument("preset")
    p.add_argument("--power-unit", choices=POWER_READINGS, default="uW",
                   help="unit in which the listed powers are read (default uW)")
    p.set_defaults(func=cmd_figures)
    p = sub.add_parser("list-presets", help="list figure presets")
    p.set_defaults(func=cmd_list_presets)
    return parser


def _fail(kind: str, code: int, message: str, field: str | None = None) -> int:
    err = {"error": kind, "message": message}
    if field is not None:
        err["field"] = field
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", None) is not None and args.points < 2:
        return _fail("config", EXIT_CONFIG, "--points must be >= 2", "--points")
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", EXIT_CONFIG, exc.message, exc.path)
    except KeyError as exc:  # unknown preset
        return _fail("config", EXIT_CONFIG, str(exc.args[0]), "preset")
    except (RootFindingError, StabilityError, StiffnessError, FloatingPointError, ParameterError) as exc:
        return _fail("solver", EXIT_SOLVER, f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail("io", EXIT_IO, str(exc), getattr(exc, "filename", None))
    except ValueError as exc:  # e.g. a bad BISTAB_THREADS value
        return _fail("config", EXIT_CONFIG, str(exc))


if __name__ == "__main__":
    sys.exit(main())
