"""Scenario configuration with explicit units.

Every number in a configuration file carries a unit suffix, written as a
string such as ``"520 MHz"`` or ``"0.03 uW"``.  Spectroscopic values are
entered in Hz and multiplied by 2*pi on conversion; bare numbers are
rejected.  A configuration keeps the quantities exactly as entered, so
writing it back out and reloading gives bit-identical parameters.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, fields

import numpy as np

from .model import DriveParams, ModelMode, ParameterError, SystemParams, hz
from .sweep import Axis, SweepSpec

FREQUENCY_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12}
POWER_UNITS = {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "nW": 1e-9, "pW": 1e-12}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]+)\s*$")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str

    @classmethod
    def parse(cls, raw, path: str, kind: str) -> "Quantity":
        if isinstance(raw, bool) or not isinstance(raw, str):
            raise ConfigError(path, f"expected a string with a unit, got {raw!r}")
        m = _QUANTITY.match(raw)
        if not m:
            raise ConfigError(path, f"cannot parse quantity {raw!r}")
        q = cls(float(m.group(1)), m.group(2))
        q.si(kind, path)
        return q

    def si(self, kind: str, path: str = "") -> float:
        """Value in internal units: rad/s for frequencies, W, s."""
        table = {"frequency": FREQUENCY_UNITS, "power": POWER_UNITS, "time": TIME_UNITS}[kind]
        if self.unit not in table:
            raise ConfigError(path, f"unit {self.unit!r} is not a {kind} unit ({', '.join(table)})")
        if not math.isfinite(self.value):
            raise ConfigError(path, "value must be finite")
        v = self.value * table[self.unit]
        return hz(v) if kind == "frequency" else v

    def __str__(self) -> str:
        return f"{self.value!r} {self.unit}"


SYSTEM_FIELDS = [f.name for f in fields(SystemParams)]
DRIVE_KINDS = {"p_pu": "power", "p_co": "power", "delta1": "frequency", "delta2": "frequency"}
AXIS_KINDS = {
    Axis.DELTA1: "frequency",
    Axis.DELTA2: "frequency",
    Axis.PPU: "power",
    Axis.PCO: "power",
    Axis.J: "frequency",
    Axis.G11: "frequency",
    Axis.G12: "frequency",
    Axis.G21: "frequency",
    Axis.G22: "frequency",
}


@dataclass(frozen=True)
class SweepConfig:
    axis: Axis
    start: Quantity
    stop: Quantity
    points: int

    def values(self) -> np.ndarray:
        kind = AXIS_KINDS[self.axis]
        return np.linspace(self.start.si(kind), self.stop.si(kind), self.points)


@dataclass(frozen=True)
class SimulateConfig:
    t_max: Quantity | None = None
    initial: str = "root:0"  # "root:<index>" or "origin"
    perturbation: float = 0.0
    ramp_start: Quantity | None = None
    ramp_stop: Quantity | None = None
    ramp_duration: Quantity | None = None
    samples: int = 2001


@dataclass(frozen=True)
class ScenarioConfig:
    system: dict[str, Quantity]
    drive: dict[str, Quantity]
    mode: ModelMode = ModelMode.PAPER_EQ5
    sweep: SweepConfig | None = None
    simulate: SimulateConfig | None = None
    output: dict[str, str] = field(default_factory=dict)

    def system_params(self) -> SystemParams:
        try:
            return SystemParams(**{k: q.si("frequency", f"system.{k}") for k, q in self.system.items()})
        except ParameterError as exc:
            raise ConfigError("system", str(exc)) from exc

    def drive_params(self) -> DriveParams:
        try:
            return DriveParams(**{k: q.si(DRIVE_KINDS[k], f"drive.{k}") for k, q in self.drive.items()})
        except ParameterError as exc:
            raise ConfigError("drive", str(exc)) from exc

    def sweep_spec(self) -> SweepSpec:
        if self.sweep is None:
            raise ConfigError("sweep", "this command needs a sweep section")
        try:
            return SweepSpec(self.sweep.axis, tuple(self.sweep.values()), self.system_params(), self.drive_params(), self.mode)
        except (ValueError, ParameterError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("sweep", str(exc)) from exc

    def to_dict(self) -> dict:
        out = {
            "system": {k: str(q) for k, q in self.system.items()},
            "drive": {k: str(q) for k, q in self.drive.items()},
            "mode": self.mode.value,
        }
        if self.sweep is not None:
            out["sweep"] = {
                "axis": self.sweep.axis.value,
                "start": str(self.sweep.start),
                "stop": str(self.sweep.stop),
                "points": self.sweep.points,
            }
        if self.simulate is not None:
            sim = self.simulate
            d = {"initial": sim.initial, "perturbation": sim.perturbation, "samples": sim.samples}
            for name in ("t_max", "ramp_start", "ramp_stop", "ramp_duration"):
                q = getattr(sim, name)
                if q is not None:
                    d[name] = str(q)
            out["simulate"] = d
        if self.output:
            out["output"] = dict(self.output)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _require(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}.{key}" if path else key, "missing")
    return d[key]


def _int(raw, path: str, lo: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < lo:
        raise ConfigError(path, f"expected an integer >= {lo}, got {raw!r}")
    return raw


def from_dict(d: dict) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("", "configuration must be a JSON object")
    known = {"system", "drive", "mode", "sweep", "simulate", "output"}
    for key in d:
        if key not in known:
            raise ConfigError(key, "unknown section")
    sys_raw = _require(d, "system", "")
    drive_raw = _require(d, "drive", "")
    if not isinstance(sys_raw, dict) or not isinstance(drive_raw, dict):
        raise ConfigError("system" if not isinstance(sys_raw, dict) else "drive", "must be an object")
    system = {}
    for name in SYSTEM_FIELDS:
        system[name] = Quantity.parse(_require(sys_raw, name, "system"), f"system.{name}", "frequency")
    for name in sys_raw:
        if name not in SYSTEM_FIELDS:
            raise ConfigError(f"system.{name}", "unknown field")
    drive = {}
    for name, kind in DRIVE_KINDS.items():
        drive[name] = Quantity.parse(_require(drive_raw, name, "drive"), f"drive.{name}", kind)
    for name in drive_raw:
        if name not in DRIVE_KINDS:
            raise ConfigError(f"drive.{name}", "unknown field")
    try:
        mode = ModelMode(d.get("mode", "eq5"))
    except ValueError:
        raise ConfigError("mode", f"expected 'eq5' or 'exact', got {d.get('mode')!r}") from None
    sweep = None
    if "sweep" in d:
        s = d["sweep"]
        if not isinstance(s, dict):
            raise ConfigError("sweep", "must be an object")
        try:
            axis = Axis(_require(s, "axis", "sweep"))
        except ValueError:
            raise ConfigError("sweep.axis", f"unknown axis {s['axis']!r}") from None
        kind = AXIS_KINDS[axis]
        sweep = SweepConfig(
            axis,
            Quantity.parse(_require(s, "start", "sweep"), "sweep.start", kind),
            Quantity.parse(_require(s, "stop", "sweep"), "sweep.stop", kind),
            _int(s.get("points", 801), "sweep.points", 2),
        )
    simulate = None
    if "simulate" in d:
        s = d["simulate"]
        if not isinstance(s, dict):
            raise ConfigError("simulate", "must be an object")
        kw = {}
        for name, kind in (("t_max", "time"), ("ramp_start", "power"), ("ramp_stop", "power"), ("ramp_duration", "time")):
            if name in s:
                kw[name] = Quantity.parse(s[name], f"simulate.{name}", kind)
        if "initial" in s:
            init = s["initial"]
            if not (isinstance(init, str) and (init == "origin" or re.fullmatch(r"root:\d+", init))):
                raise ConfigError("simulate.initial", f"expected 'origin' or 'root:<index>', got {init!r}")
            kw["initial"] = init
        if "perturbation" in s:
            p = s["perturbation"]
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not math.isfinite(p) or p < 0:
                raise ConfigError("simulate.perturbation", "expected a relative perturbation >= 0")
            kw["perturbation"] = float(p)
        if "samples" in s:
            kw["samples"] = _int(s["samples"], "simulate.samples", 2)
        simulate = SimulateConfig(**kw)
    output = d.get("output", {})
    if not isinstance(output, dict) or not all(isinstance(v, str) for v in output.values()):
        raise ConfigError("output", "must be an object of strings")
    cfg = ScenarioConfig(system, drive, mode, sweep, simulate, dict(output))
    cfg.system_params()
    cfg.drive_params()
    return cfg


def loads(text: str) -> ScenarioConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from exc
    return from_dict(d)


def load(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
