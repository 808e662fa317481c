"""Physical parameters and steady-state equations of the two-cavity,
two-resonator optomechanical system.

All internal quantities are angular rates in rad/s.  Configuration code
that reads values in Hz must go through :func:`hz` (multiplies by 2*pi).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, fields
from typing import ClassVar, NamedTuple

import numpy as np
from scipy import constants

TWO_PI = 2.0 * math.pi
HBAR = constants.hbar


class ParameterError(ValueError):
    """Raised for parameters outside their physical domain."""


class ParameterWarning(UserWarning):
    pass


def hz(value: float) -> float:
    """Convert a spectroscopic value in Hz to an angular rate in rad/s."""
    return TWO_PI * value


class ModelMode(enum.Enum):
    """Which steady-state equations define a fixed point.

    PAPER_EQ5 adds the tunnel contribution as J**2 * n of the other cavity
    (no interference with the drive).  EXACT_COMPLEX keeps the complex cavity
    amplitudes, so the tunnel term interferes with the drive.
    """

    PAPER_EQ5 = "eq5"
    EXACT_COMPLEX = "exact"


@dataclass(frozen=True)
class SystemParams:
    """Fixed rates of the device, in rad/s."""

    omega_pu: float
    omega_co: float
    omega_m1: float
    omega_m2: float
    kappa1: float
    kappa2: float
    kappa_e1: float
    kappa_e2: float
    gamma_m1: float
    gamma_m2: float
    g11: float
    g12: float
    g21: float
    g22: float
    J: float

    hbar: ClassVar[float] = HBAR

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v)):
                raise ParameterError(f"{f.name} must be a finite number, got {v!r}")
            if v < 0:
                raise ParameterError(f"{f.name} must be >= 0, got {v!r}")
        if self.omega_m1 <= 0 or self.omega_m2 <= 0:
            raise ParameterError("mechanical frequencies must be > 0")
        for ke, k, name in ((self.kappa_e1, self.kappa1, "1"), (self.kappa_e2, self.kappa2, "2")):
            if ke > k:
                warnings.warn(
                    f"kappa_e{name} = {ke:g} exceeds kappa{name} = {k:g}",
                    ParameterWarning,
                    stacklevel=3,
                )

    def replace(self, **changes) -> "SystemParams":
        return type(self)(**{**self.as_dict(), **changes})

    def as_dict(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}

    def scaled(self, factor: float) -> "SystemParams":
        """Every rate multiplied by ``factor`` (laser frequencies untouched)."""
        keep = {"omega_pu", "omega_co"}
        return type(self)(**{k: (v if k in keep else v * factor) for k, v in self.as_dict().items()})


@dataclass(frozen=True)
class DriveParams:
    """Laser powers (W) and detunings (rad/s, sign-carrying)."""

    p_pu: float
    p_co: float
    delta1: float
    delta2: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v)):
                raise ParameterError(f"{f.name} must be a finite number, got {v!r}")
        if self.p_pu < 0 or self.p_co < 0:
            raise ParameterError("laser powers must be >= 0")

    def replace(self, **changes) -> "DriveParams":
        return type(self)(**{**self.as_dict(), **changes})

    def as_dict(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


class PhotonPair(NamedTuple):
    n_p1: float
    n_p2: float


class MechanicalPositions(NamedTuple):
    x1s: float
    x2s: float


def drive_amplitude_sq(power: float, kappa: float, omega: float) -> float:
    """Squared laser amplitude |E|**2 = 2*kappa*P / (hbar*omega), in 1/s."""
    for name, v in (("power", power), ("kappa", kappa), ("omega", omega)):
        if not math.isfinite(v):
            raise ParameterError(f"{name} must be finite, got {v!r}")
    if power < 0 or kappa < 0:
        raise ParameterError("power and kappa must be >= 0")
    if omega <= 0:
        raise ParameterError("omega must be > 0")
    return 2.0 * kappa * power / (HBAR * omega)


def drive_rates(sys: SystemParams, drive: DriveParams) -> tuple[float, float]:
    """Drive terms sqrt(kappa_e,l) * |E_l| entering the field equations (1/s)."""
    e1 = drive_amplitude_sq(drive.p_pu, sys.kappa1, sys.omega_pu)
    e2 = drive_amplitude_sq(drive.p_co, sys.kappa2, sys.omega_co)
    return math.sqrt(sys.kappa_e1 * e1), math.sqrt(sys.kappa_e2 * e2)


def drive_strengths(sys: SystemParams, drive: DriveParams) -> tuple[float, float]:
    """kappa_e,l * |E_l|**2, the numerators of the photon-number equations."""
    r1, r2 = drive_rates(sys, drive)
    return r1 * r1, r2 * r2


def shift_coefficients(sys: SystemParams) -> tuple[float, float, float]:
    """Detuning shift per photon, (a11, a12, a22) in rad/s.

    Composing the mechanical positions with the detuning shifts gives
    ``Delta1_eff = Delta1 - a11*n1 - a12*n2`` and
    ``Delta2_eff = Delta2 - a12*n1 - a22*n2``.
    """
    w1, w2 = sys.omega_m1, sys.omega_m2
    a11 = 2.0 * sys.g11**2 / w1 + 2.0 * sys.g12**2 / w2
    a12 = 2.0 * sys.g11 * sys.g21 / w1 + 2.0 * sys.g12 * sys.g22 / w2
    a22 = 2.0 * sys.g21**2 / w1 + 2.0 * sys.g22**2 / w2
    return a11, a12, a22


def mechanical_positions(sys: SystemParams, n: PhotonPair) -> MechanicalPositions:
    n1, n2 = n
    x1 = 2.0 / sys.omega_m1 * (sys.g11 * n1 + sys.g21 * n2)
    x2 = 2.0 / sys.omega_m2 * (sys.g12 * n1 + sys.g22 * n2)
    return MechanicalPositions(x1, x2)


def effective_detunings(sys: SystemParams, drive: DriveParams, n: PhotonPair) -> tuple[float, float]:
    x1, x2 = mechanical_positions(sys, n)
    return (
        drive.delta1 - sys.g11 * x1 - sys.g12 * x2,
        drive.delta2 - sys.g21 * x1 - sys.g22 * x2,
    )


def _safe_ratio(num: float, den: float) -> float:
    return num / den if den > 0 else num


def residual_eq5(
    sys: SystemParams, drive: DriveParams, n: PhotonPair, scaled: bool = True
) -> tuple[float, float]:
    """Residuals of the coupled photon-number equations.

    ``F1 = n1*((kappa1/2)**2 + D1**2) - kappa_e1*E_pu**2 - J**2*n2`` and the
    mirror expression for the second cavity, where D is the effective
    detuning.  With ``scaled`` each residual is divided by the sum of the
    magnitudes of its three terms, which makes it dimensionless and bounded
    by 1 in magnitude.
    """
    n1, n2 = n
    s1, s2 = drive_strengths(sys, drive)
    d1, d2 = effective_detunings(sys, drive, n)
    j2 = sys.J**2
    t1 = n1 * ((0.5 * sys.kappa1) ** 2 + d1 * d1)
    t2 = n2 * ((0.5 * sys.kappa2) ** 2 + d2 * d2)
    f1 = t1 - s1 - j2 * n2
    f2 = t2 - s2 - j2 * n1
    if not scaled:
        return f1, f2
    return (
        _safe_ratio(f1, abs(t1) + s1 + j2 * abs(n2)),
        _safe_ratio(f2, abs(t2) + s2 + j2 * abs(n1)),
    )


def field_residual(
    sys: SystemParams, drive: DriveParams, a1: complex, a2: complex
) -> tuple[complex, complex, float, float]:
    """Unscaled steady-state field equations with X from the photon numbers.

    Returns the two complex time derivatives plus the normalization scale of
    each (sum of term magnitudes).
    """
    r1, r2 = drive_rates(sys, drive)
    n = PhotonPair(abs(a1) ** 2, abs(a2) ** 2)
    d1, d2 = effective_detunings(sys, drive, n)
    c1 = complex(0.5 * sys.kappa1, d1)
    c2 = complex(0.5 * sys.kappa2, d2)
    da1 = -c1 * a1 + 1j * sys.J * a2 + r1
    da2 = -c2 * a2 + 1j * sys.J * a1 + r2
    scale1 = abs(c1) * abs(a1) + sys.J * abs(a2) + r1
    scale2 = abs(c2) * abs(a2) + sys.J * abs(a1) + r2
    return da1, da2, scale1, scale2


def residual_exact(
    sys: SystemParams, drive: DriveParams, a1: complex, a2: complex, scaled: bool = True
) -> np.ndarray:
    """Four real residuals of the exact complex fixed-point equations.

    Order is (Re, Im) of the first field equation, then of the second.  The
    mechanical coordinates are eliminated through the photon numbers, so a
    zero residual means the full state is a fixed point of the noise-free
    dynamics.
    """
    if not (np.isfinite(a1) and np.isfinite(a2)):
        raise ParameterError("cavity amplitudes must be finite")
    da1, da2, sc1, sc2 = field_residual(sys, drive, a1, a2)
    if scaled:
        da1 = _safe_ratio(da1, sc1)
        da2 = _safe_ratio(da2, sc2)
    return np.array([da1.real, da1.imag, da2.real, da2.imag])


def linear_amplitudes(
    sys: SystemParams, drive: DriveParams, detunings: tuple[float, float]
) -> tuple[complex, complex]:
    """Solve the linear field equations with the effective detunings frozen."""
    r1, r2 = drive_rates(sys, drive)
    m = np.array(
        [
            [complex(0.5 * sys.kappa1, detunings[0]), -1j * sys.J],
            [-1j * sys.J, complex(0.5 * sys.kappa2, detunings[1])],
        ]
    )
    a = np.linalg.solve(m, np.array([r1, r2], dtype=complex))
    return complex(a[0]), complex(a[1])


def photon_bound(sys: SystemParams, drive: DriveParams) -> tuple[float, float]:
    """Upper bounds on (n1, n2) valid for every root of the photon equations.

    Uses D**2 >= 0 in both denominators and solves the resulting linear
    inequalities.
    """
    s1, s2 = drive_strengths(sys, drive)
    h1 = (0.5 * sys.kappa1) ** 2
    h2 = (0.5 * sys.kappa2) ** 2
    j4 = sys.J**4
    det = h1 * h2 - j4
    if det <= 0:
        raise ParameterError("tunnel rate too large: J**2 >= kappa1*kappa2/4 leaves photon numbers unbounded")
    return (s1 * h2 + sys.J**2 * s2) / det, (s2 * h1 + sys.J**2 * s1) / det


def lorentzian_photons(sys: SystemParams, drive: DriveParams) -> PhotonPair:
    """Decoupled (J = 0, g = 0) photon numbers at the bare detunings."""
    s1, s2 = drive_strengths(sys, drive)
    return PhotonPair(
        s1 / ((0.5 * sys.kappa1) ** 2 + drive.delta1**2),
        s2 / ((0.5 * sys.kappa2) ** 2 + drive.delta2**2),
    )
