"""Noise-free mean-field dynamics of the two-cavity system.

Integration runs in scaled units: time in 1/omega_m1, cavity amplitudes in
sqrt(n_ref), positions in X_ref and velocities in omega_m1*X_ref, where
n_ref is the photon bound at the largest power involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .model import (
    HBAR,
    DriveParams,
    ParameterError,
    PhotonPair,
    SystemParams,
    mechanical_positions,
    photon_bound,
)
from .roots import RootSet, SteadyStateSolution, relative_distance
from .stability import state_vector


class StiffnessError(RuntimeError):
    """Step size underflow; the integration was stopped, not continued."""


@dataclass(frozen=True)
class TrajectoryState:
    u1: float
    v1: float
    u2: float
    v2: float
    x1: float
    x2: float
    w1: float
    w2: float

    def __post_init__(self):
        if not all(math.isfinite(getattr(self, f)) for f in ("u1", "v1", "u2", "v2", "x1", "x2", "w1", "w2")):
            raise ParameterError("trajectory state must be finite")

    def as_array(self) -> np.ndarray:
        """State in the linearization basis (u1, v1, u2, v2, X1, V1, X2, V2)."""
        return np.array([self.u1, self.v1, self.u2, self.v2, self.x1, self.w1, self.x2, self.w2])

    @classmethod
    def from_array(cls, y) -> "TrajectoryState":
        u1, v1, u2, v2, x1, w1, x2, w2 = (float(v) for v in y)
        return cls(u1, v1, u2, v2, x1, x2, w1, w2)

    @classmethod
    def from_solution(cls, sys: SystemParams, drive: DriveParams, sol: SteadyStateSolution) -> "TrajectoryState":
        return cls.from_array(state_vector(sys, drive, sol))

    @property
    def photons(self) -> PhotonPair:
        return PhotonPair(self.u1**2 + self.v1**2, self.u2**2 + self.v2**2)

    @property
    def amplitudes(self) -> tuple[complex, complex]:
        return complex(self.u1, self.v1), complex(self.u2, self.v2)


@dataclass(frozen=True)
class Controls:
    rtol: float = 1e-8
    atol: float = 1e-12  # scaled units
    settle_tol: float = 1e-8  # max |dy/dtau| in scaled units
    settle_periods: float = 10.0
    stop_on_settle: bool = True
    max_steps: int = 50_000_000
    h0: float = 1e-2
    backend: str | None = None


@dataclass
class IntegrationReport:
    final_state: TrajectoryState
    settled: bool
    settle_time: float | None  # s, start of the final quiet stretch
    nearest_fixed_point: tuple[int, float] | None
    t_final: float  # s
    steps: int
    status: int
    sample_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    samples: np.ndarray = field(default_factory=lambda: np.zeros((0, 8)))


class Scaling:
    """Unit conversion between physical and scaled states and parameters."""

    def __init__(self, sys: SystemParams, drive: DriveParams, p_max: float | None = None):
        self.sys = sys
        self.w = sys.omega_m1
        top = drive if p_max is None else drive.replace(p_pu=max(p_max, drive.p_pu))
        nref = max(photon_bound(sys, top))
        self.nref = nref if nref > 0 else 1.0
        self.amp = math.sqrt(self.nref)
        xr = max(mechanical_positions(sys, PhotonPair(self.nref, self.nref)))
        self.xref = xr if xr > 0 else 1.0
        self.vec = np.array([self.amp] * 4 + [self.xref, self.w * self.xref, self.xref, self.w * self.xref])

    def to_scaled(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, dtype=float) / self.vec

    def from_scaled(self, ys: np.ndarray) -> np.ndarray:
        return np.asarray(ys, dtype=float) * self.vec

    def params(self, drive: DriveParams, p0: float | None = None, p1: float | None = None,
               t_ramp: float = 0.0, t_start: float = 0.0) -> np.ndarray:
        """Kernel parameter vector; ramp times are in seconds."""
        s, w, a, xr = self.sys, self.w, self.amp, self.xref
        c1 = math.sqrt(s.kappa_e1 * 2.0 * s.kappa1 / (HBAR * s.omega_pu)) / (w * a)
        r2 = math.sqrt(s.kappa_e2 * 2.0 * s.kappa2 * drive.p_co / (HBAR * s.omega_co)) / (w * a)
        force = a * a / (w * w * xr)
        p0 = drive.p_pu if p0 is None else p0
        p1 = p0 if p1 is None else p1
        return np.array(
            [
                0.5 * s.kappa1 / w,
                0.5 * s.kappa2 / w,
                s.J / w,
                drive.delta1 / w,
                drive.delta2 / w,
                s.g11 * xr / w,
                s.g12 * xr / w,
                s.g21 * xr / w,
                s.g22 * xr / w,
                s.gamma_m1 / w,
                s.gamma_m2 / w,
                (s.omega_m1 / w) ** 2,
                (s.omega_m2 / w) ** 2,
                2.0 * s.omega_m1 * s.g11 * force,
                2.0 * s.omega_m1 * s.g21 * force,
                2.0 * s.omega_m2 * s.g12 * force,
                2.0 * s.omega_m2 * s.g22 * force,
                c1,
                r2,
                p0,
                p1,
                t_ramp * w,
                t_start * w,
            ]
        )


def rhs(sys: SystemParams, drive: DriveParams, state: TrajectoryState | np.ndarray, backend: str | None = None) -> np.ndarray:
    """Physical time derivatives (1/s) in the linearization basis."""
    y = state.as_array() if isinstance(state, TrajectoryState) else np.asarray(state, dtype=float)
    sc = Scaling(sys, drive)
    k = kernels.get(backend)
    ds = np.asarray(k.rhs_scaled(sc.to_scaled(y), sc.params(drive), 0.0))
    return ds * sc.vec * sc.w


def nearest_fixed_point(state: TrajectoryState, roots: RootSet | None) -> tuple[int, float] | None:
    if roots is None or len(roots) == 0:
        return None
    n = state.photons
    d = [relative_distance(n, s.n) for s in roots]
    i = int(np.argmin(d))
    return i, float(d[i])


def _run(sys, drive, sc: Scaling, params, y0, t0, t1, controls: Controls, sample_times):
    k = kernels.get(controls.backend)
    window = 2.0 * math.pi * max(sc.w / sys.omega_m1, sc.w / sys.omega_m2) * controls.settle_periods
    st = np.asarray(sample_times, dtype=float) * sc.w
    y, t, status, steps, quiet, samples, ns = k.dopri5(
        sc.to_scaled(y0), t0 * sc.w, t1 * sc.w, params, controls.rtol, controls.atol, controls.h0,
        controls.settle_tol, window, controls.stop_on_settle, st, controls.max_steps,
    )
    if status == kernels._kernels_py.STATUS_STIFF:
        raise StiffnessError(f"step size underflow at t = {t / sc.w:.6g} s after {steps} steps")
    if status == kernels._kernels_py.STATUS_NONFINITE:
        raise FloatingPointError(f"non-finite state at t = {t / sc.w:.6g} s")
    return sc.from_scaled(y), t / sc.w, status, steps, quiet, sc.from_scaled(samples[:ns]), ns


def integrate(
    sys: SystemParams,
    drive: DriveParams,
    initial: TrajectoryState,
    t_max: float,
    controls: Controls = Controls(),
    roots: RootSet | None = None,
    sample_times=(),
) -> IntegrationReport:
    """Integrate from ``initial`` until settled or until ``t_max`` (s)."""
    if not t_max > 0:
        raise ParameterError("t_max must be > 0")
    sc = Scaling(sys, drive)
    st = np.asarray(sample_times, dtype=float)
    y, t, status, steps, quiet, samples, ns = _run(
        sys, drive, sc, sc.params(drive), initial.as_array(), 0.0, t_max, controls, st
    )
    final = TrajectoryState.from_array(y)
    settled = status == kernels._kernels_py.STATUS_SETTLED or (quiet >= 0 and not controls.stop_on_settle)
    return IntegrationReport(
        final_state=final,
        settled=bool(settled),
        settle_time=quiet / sc.w if quiet >= 0 else None,
        nearest_fixed_point=nearest_fixed_point(final, roots),
        t_final=t,
        steps=int(steps),
        status=int(status),
        sample_times=st[:ns],
        samples=samples,
    )


@dataclass
class RampTrace:
    powers: np.ndarray  # W, instantaneous pump power at each sample
    times: np.ndarray  # s
    states: np.ndarray  # (k, 8) physical states
    steps: int

    @property
    def photons(self) -> np.ndarray:
        s = self.states
        return np.stack([s[:, 0] ** 2 + s[:, 1] ** 2, s[:, 2] ** 2 + s[:, 3] ** 2], axis=1)

    def positions(self) -> np.ndarray:
        return self.states[:, [4, 6]]

    @property
    def final_state(self) -> TrajectoryState:
        return TrajectoryState.from_array(self.states[-1])


def ramp_drive(
    sys: SystemParams,
    drive: DriveParams,
    p_start: float,
    p_end: float,
    duration: float,
    initial: TrajectoryState,
    controls: Controls = Controls(stop_on_settle=False),
    n_samples: int = 2001,
) -> RampTrace:
    """Linear pump-power ramp from ``p_start`` to ``p_end`` over ``duration`` s.

    The ramp must be slow compared with every relaxation time along the
    followed branch for the samples to trace the adiabatic steady states.
    """
    if not duration > 0:
        raise ParameterError("ramp duration must be > 0")
    if min(p_start, p_end) < 0:
        raise ParameterError("ramp powers must be >= 0")
    if n_samples < 2:
        raise ParameterError("need at least two samples")
    controls = replace(controls, stop_on_settle=False)
    sc = Scaling(sys, drive, p_max=max(p_start, p_end))
    params = sc.params(drive, p_start, p_end, duration, 0.0)
    times = np.linspace(0.0, duration, n_samples)
    y, t, status, steps, quiet, samples, ns = _run(sys, drive, sc, params, initial.as_array(), 0.0, duration, controls, times)
    if ns < n_samples:
        raise StiffnessError(f"ramp stopped early at t = {t:.6g} s (status {status})")
    powers = p_start + (p_end - p_start) * times / duration
    return RampTrace(powers, times, samples, int(steps))


def ramp_jumps(powers: np.ndarray, series: np.ndarray, smooth: int = 1, threshold: float = 0.05) -> list[float]:
    """Pump powers where a ramped trace switches branch.

    The trace is compared in log(1 + n).  Consecutive samples whose change
    exceeds ``threshold`` times the total range of the trace (floored at
    one unit of log(1 + n), so a flat trace has none) are grouped into one
    event, located at the first sample of the group.  ``smooth``
    averages the series over that many samples first, which suppresses
    self-oscillation on an unstable branch.
    """
    y = np.log1p(np.abs(np.asarray(series, dtype=float)))
    if smooth > 1:
        kernel = np.ones(smooth) / smooth
        y = np.convolve(y, kernel, mode="valid")
        powers = np.asarray(powers)[smooth - 1 :]
    d = np.abs(np.diff(y))
    span = max(float(np.ptp(y)), 1.0)
    big = d > threshold * span
    out = []
    i = 0
    while i < len(big):
        if big[i]:
            out.append(float(powers[i]))
            while i < len(big) and big[i]:
                i += 1
        i += 1
    return out


@dataclass(frozen=True)
class PerturbationOutcome:
    escaped: bool
    growth: float  # largest distance over the last tenth of the run / initial distance
    t_end: float  # s
    rate: float  # max Re(lambda) / omega_m1 that sized the run


def perturbation_test(
    sys: SystemParams,
    drive: DriveParams,
    sol: SteadyStateSolution,
    rel: float = 1e-6,
    rng: np.random.Generator | None = None,
    e_folds: float = 12.0,
    tau_cap: float = 2e4,
    controls: Controls = Controls(stop_on_settle=False),
) -> PerturbationOutcome:
    """Kick a fixed point by ``rel`` and watch whether the kick grows.

    The run lasts ``e_folds`` e-folding times of the leading eigenvalue
    (capped at ``tau_cap`` in units of 1/omega_m1), long enough for a
    stable point to damp the kick and for an unstable one to amplify it
    by about exp(e_folds).  Distances are max-norms in scaled units.
    """
    from .stability import classify_solution

    if sol.eigenvalues is None:
        sol = classify_solution(sys, drive, sol)
    rate = float(np.max(sol.eigenvalues.real)) / sys.omega_m1
    tau = tau_cap if rate == 0.0 else min(e_folds / abs(rate), tau_cap)
    rng = np.random.default_rng() if rng is None else rng
    sc = Scaling(sys, drive)
    ys = sc.to_scaled(state_vector(sys, drive, sol))
    kick = rng.standard_normal(8)
    kick /= np.max(np.abs(kick))
    d0 = rel * max(np.max(np.abs(ys)), 1e-300)
    y0 = sc.from_scaled(ys + d0 * kick)
    t_end = tau / sc.w
    times = np.linspace(0.9 * t_end, t_end, 21)
    rep = integrate(sys, drive, TrajectoryState.from_array(y0), t_end, replace(controls, stop_on_settle=False),
                    sample_times=times)
    dist = np.max(np.abs(sc.to_scaled(rep.samples) - ys), axis=1)
    growth = float(np.max(dist) / d0)
    return PerturbationOutcome(growth > 1.0, growth, t_end, rate)
