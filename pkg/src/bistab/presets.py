"""Frozen figure scenarios.

Each preset holds the shared device parameters, the values listed for one
figure, its swept axis and one curve per listed value of the varied
quantity.  Powers are stored exactly as listed (in uW); ``power_unit``
selects how those numbers are read when a scenario is built, so the same
preset can be evaluated under an alternative power calibration without
editing any number.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

from .config import POWER_UNITS, Quantity, ScenarioConfig, SimulateConfig, SweepConfig
from .model import ModelMode
from .sweep import Axis

PRESET_VERSION = 1
DEFAULT_POINTS = 801
POWER_READINGS = ("uW", "nW")


def _q(value: float, unit: str) -> Quantity:
    return Quantity(float(value), unit)


# (value, unit, source) for every number that does not vary by figure
DEVICE = {
    "omega_pu": (205.3, "THz", "device parameter list"),
    "omega_co": (194.1, "THz", "device parameter list"),
    "omega_m1": (2.0, "GHz", "device parameter list"),
    "omega_m2": (2.0, "GHz", "device parameter list"),
    "kappa1": (520.0, "MHz", "device parameter list"),
    "kappa2": (1.73, "GHz", "device parameter list"),
    "kappa_e1": (0.26, "MHz", "device parameter list"),
    "kappa_e2": (8.0, "MHz", "device parameter list"),
    "gamma_m1": (100.0, "kHz", "assumed; not listed"),
    "gamma_m2": (100.0, "kHz", "assumed; not listed"),
}

G_LISTED = {"g11": 850.0, "g12": 860.0, "g21": 400.0, "g22": 405.0}


@dataclass(frozen=True)
class Curve:
    label: str
    changes: tuple[tuple[str, Quantity], ...]


@dataclass(frozen=True)
class FigurePreset:
    name: str
    observable: str
    kind: str  # "sweep" or "hysteresis"
    axis: Axis
    start: Quantity
    stop: Quantity
    fixed: tuple[tuple[str, Quantity], ...]  # listed values shared by all curves
    curves: tuple[Curve, ...]
    version: int = PRESET_VERSION
    points: int = DEFAULT_POINTS

    def curve(self, label: str) -> Curve:
        for c in self.curves:
            if c.label == label:
                return c
        raise KeyError(f"{self.name} has no curve {label!r}")

    def scenario(
        self,
        curve: Curve | str,
        power_unit: str = "uW",
        points: int | None = None,
        mode: ModelMode = ModelMode.PAPER_EQ5,
    ) -> ScenarioConfig:
        """Complete configuration for one curve."""
        if isinstance(curve, str):
            curve = self.curve(curve)
        if power_unit not in POWER_UNITS:
            raise ValueError(f"unknown power unit {power_unit!r}")
        values = {k: _q(v, u) for k, (v, u, _) in DEVICE.items()}
        values.update({k: _q(v, "kHz") for k, v in G_LISTED.items()})
        values.update(dict(self.fixed))
        values.update(dict(curve.changes))
        values = {k: _reread(q, power_unit) for k, q in values.items()}
        system = {k: q for k, q in values.items() if k not in _DRIVE}
        drive = {k: values[k] for k in _DRIVE}
        sweep = SweepConfig(
            self.axis,
            _reread(self.start, power_unit),
            _reread(self.stop, power_unit),
            self.points if points is None else points,
        )
        return ScenarioConfig(system, drive, mode, sweep, None, {})

    def ramp_scenario(self, curve: Curve | str, duration: Quantity, power_unit: str = "uW",
                      samples: int = 2001, mode: ModelMode = ModelMode.PAPER_EQ5) -> ScenarioConfig:
        """Up-ramp of the swept power over the preset range."""
        if self.axis is not Axis.PPU:
            raise ValueError(f"{self.name} does not sweep the pump power")
        cfg = self.scenario(curve, power_unit, mode=mode)
        sim = SimulateConfig(
            t_max=None,
            initial="root:0",
            ramp_start=cfg.sweep.start,
            ramp_stop=cfg.sweep.stop,
            ramp_duration=duration,
            samples=samples,
        )
        return ScenarioConfig(cfg.system, cfg.drive, mode, None, sim, {})


_DRIVE = ("p_pu", "p_co", "delta1", "delta2")


def _reread(q: Quantity, power_unit: str) -> Quantity:
    return Quantity(q.value, power_unit) if q.unit == "uW" else q


def _pairs(**kw) -> tuple[tuple[str, Quantity], ...]:
    return tuple((k, _q(*v)) for k, v in kw.items())


_PPU = dict(axis=Axis.PPU, start=_q(0.0, "uW"), stop=_q(0.4, "uW"))
_DET = dict(delta1=(2.0, "GHz"), delta2=(2.0, "GHz"))
_JL = dict(J=(0.09, "GHz"))


def _pco_curves(*values):
    return tuple(Curve(f"Pco={v:.3f}uW", _pairs(p_co=(v, "uW"))) for v in values)


def _j_curves(*values):
    return tuple(Curve(f"J={v:.3f}GHz", _pairs(J=(v, "GHz"))) for v in values)


def _g11_curves(*values):
    return tuple(Curve(f"g11={v:.0f}kHz", _pairs(g11=(v, "kHz"))) for v in values)


def _fig2(name, observable):
    return FigurePreset(
        name, observable, "sweep", Axis.DELTA1, _q(0.0, "GHz"), _q(60.0, "GHz"),
        _pairs(**_JL, delta2=(2.0, "GHz"), p_co=(0.03, "uW"), p_pu=(0.01, "uW"), delta1=(0.0, "GHz")),
        tuple(Curve(f"Ppu={v:.2f}uW", _pairs(p_pu=(v, "uW"))) for v in (0.01, 0.10, 0.20)),
    )


def _sidebands(name, observable):
    return FigurePreset(
        name, observable, "hysteresis", **_PPU,
        fixed=_pairs(**_JL, p_co=(0.010, "uW"), p_pu=(0.0, "uW"), delta1=(2.0, "GHz"), delta2=(2.0, "GHz")),
        curves=(
            Curve("Delta2=+wm2", _pairs(delta2=(2.0, "GHz"))),
            Curve("Delta2=-wm2", _pairs(delta2=(-2.0, "GHz"))),
        ),
    )


def _hyst(name, observable, fixed, curves):
    return FigurePreset(name, observable, "hysteresis", **_PPU, fixed=_pairs(p_pu=(0.0, "uW"), **_DET, **fixed), curves=curves)


PRESETS: dict[str, FigurePreset] = {
    p.name: p
    for p in (
        _fig2("fig2a", "n_p1"),
        _fig2("fig2b", "n_p2"),
        _hyst("fig3", "n_p1", dict(**_JL, p_co=(0.005, "uW")), _pco_curves(0.005, 0.010, 0.015)),
        _hyst("fig4", "n_p2", dict(**_JL, p_co=(0.010, "uW")), _pco_curves(0.010, 0.015, 0.020)),
        _hyst("fig5a", "n_p1", dict(J=(0.001, "GHz"), p_co=(0.01, "uW")), _j_curves(0.001, 0.190)),
        _hyst("fig5b", "n_p2", dict(J=(0.001, "GHz"), p_co=(0.01, "uW")), _j_curves(0.001, 0.190)),
        _hyst("fig6", "n_p2", dict(J=(0.001, "GHz"), p_co=(0.02, "uW")), _j_curves(0.001, 0.090)),
        _sidebands("fig7", "n_p1"),
        _sidebands("fig8", "n_p2"),
        _hyst("fig9", "n_p2", dict(**_JL, p_co=(0.010, "uW")), _g11_curves(850, 900, 950)),
        _hyst("fig10", "x1s", dict(**_JL, p_co=(0.010, "uW")), _pco_curves(0.010, 0.015, 0.020)),
        _hyst("fig11", "x1s", dict(J=(0.001, "GHz"), p_co=(0.02, "uW")), _j_curves(0.001, 0.090)),
        _hyst("fig12a", "x1s", dict(**_JL, p_co=(0.020, "uW")), _g11_curves(850, 900, 950)),
        _hyst("fig12b", "x2s", dict(**_JL, p_co=(0.020, "uW")), _g11_curves(850, 900, 950)),
    )
}


def get_preset(name: str) -> FigurePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None


def provenance_table() -> list[dict[str, str]]:
    """The checked-in table mapping every preset number to its source."""
    text = resources.files("bistab").joinpath("data/provenance.csv").read_text(encoding="utf-8")
    return list(csv.DictReader(io.StringIO(text)))
