"""Linear stability of steady states of the noise-free mean-field dynamics.

State ordering throughout is (Re a1, Im a1, Re a2, Im a2, X1, V1, X2, V2)
with V = dX/dt.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .model import DriveParams, ParameterError, SystemParams, drive_rates, mechanical_positions
from .roots import RootSet, Stability, SteadyStateSolution, reconstruct_amplitudes

# stability margin as a fraction of omega_m1
MARGIN = 1e-9


class StabilityError(ArithmeticError):
    pass


class InstabilityKind(enum.Enum):
    """How a fixed point fails to be stable.

    SADDLE has a real eigenvalue with positive real part (the static,
    fold-type instability of a middle branch); OSCILLATORY has only complex
    pairs in the right half plane (a dynamic, Hopf-type instability).
    """

    NONE = "none"
    SADDLE = "saddle"
    OSCILLATORY = "oscillatory"


def state_vector(sys: SystemParams, drive: DriveParams, sol: SteadyStateSolution) -> np.ndarray:
    """Full 8-component state of a steady state, at rest mechanically."""
    a1, a2 = reconstruct_amplitudes(sys, drive, sol)
    x1, x2 = mechanical_positions(sys, sol.n)
    return np.array([a1.real, a1.imag, a2.real, a2.imag, x1, 0.0, x2, 0.0])


def rhs_vector(sys: SystemParams, drive: DriveParams, y: np.ndarray) -> np.ndarray:
    """Time derivatives of the noise-free equations of motion (rad/s units)."""
    u1, v1, u2, v2, x1, w1, x2, w2 = y
    r1, r2 = drive_rates(sys, drive)
    d1 = drive.delta1 - sys.g11 * x1 - sys.g12 * x2
    d2 = drive.delta2 - sys.g21 * x1 - sys.g22 * x2
    n1 = u1 * u1 + v1 * v1
    n2 = u2 * u2 + v2 * v2
    k1, k2, J = 0.5 * sys.kappa1, 0.5 * sys.kappa2, sys.J
    return np.array(
        [
            -k1 * u1 + d1 * v1 - J * v2 + r1,
            -k1 * v1 - d1 * u1 + J * u2,
            -k2 * u2 + d2 * v2 - J * v1 + r2,
            -k2 * v2 - d2 * u2 + J * u1,
            w1,
            -sys.gamma_m1 * w1 - sys.omega_m1**2 * x1 + 2 * sys.omega_m1 * (sys.g11 * n1 + sys.g21 * n2),
            w2,
            -sys.gamma_m2 * w2 - sys.omega_m2**2 * x2 + 2 * sys.omega_m2 * (sys.g12 * n1 + sys.g22 * n2),
        ]
    )


def jacobian_at(sys: SystemParams, drive: DriveParams, y: np.ndarray) -> np.ndarray:
    """Analytic Jacobian of :func:`rhs_vector` at an arbitrary state."""
    u1, v1, u2, v2, x1, _, x2, _ = y
    d1 = drive.delta1 - sys.g11 * x1 - sys.g12 * x2
    d2 = drive.delta2 - sys.g21 * x1 - sys.g22 * x2
    k1, k2, J = 0.5 * sys.kappa1, 0.5 * sys.kappa2, sys.J
    w1, w2 = sys.omega_m1, sys.omega_m2
    g11, g12, g21, g22 = sys.g11, sys.g12, sys.g21, sys.g22
    jac = np.array(
        [
            [-k1, d1, 0, -J, -g11 * v1, 0, -g12 * v1, 0],
            [-d1, -k1, J, 0, g11 * u1, 0, g12 * u1, 0],
            [0, -J, -k2, d2, -g21 * v2, 0, -g22 * v2, 0],
            [J, 0, -d2, -k2, g21 * u2, 0, g22 * u2, 0],
            [0, 0, 0, 0, 0, 1, 0, 0],
            [4 * w1 * g11 * u1, 4 * w1 * g11 * v1, 4 * w1 * g21 * u2, 4 * w1 * g21 * v2, -w1 * w1, -sys.gamma_m1, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 1],
            [4 * w2 * g12 * u1, 4 * w2 * g12 * v1, 4 * w2 * g22 * u2, 4 * w2 * g22 * v2, 0, 0, -w2 * w2, -sys.gamma_m2],
        ],
        dtype=float,
    )
    if not np.all(np.isfinite(jac)):
        raise ParameterError("non-finite Jacobian entries")
    return jac


def assemble_jacobian(sys: SystemParams, drive: DriveParams, sol: SteadyStateSolution) -> np.ndarray:
    """8x8 linearization at a steady state (see :func:`reconstruct_amplitudes`)."""
    return jacobian_at(sys, drive, state_vector(sys, drive, sol))


def finite_difference_jacobian(sys: SystemParams, drive: DriveParams, y: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central differences of :func:`rhs_vector`, step rel_step*max(|y_j|, 1)."""
    jac = np.empty((8, 8))
    for j in range(8):
        h = rel_step * max(abs(y[j]), 1.0)
        yp, ym = y.copy(), y.copy()
        yp[j] += h
        ym[j] -= h
        jac[:, j] = (rhs_vector(sys, drive, yp) - rhs_vector(sys, drive, ym)) / (yp[j] - ym[j])
    return jac


def jacobian_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Largest entry-wise relative error.

    Entries are compared relative to themselves, floored at 1e-3 of the
    largest entry in their row so structurally tiny entries are judged on
    the scale at which the row is computed.
    """
    floor = 1e-3 * np.max(np.abs(analytic), axis=1, keepdims=True)
    den = np.maximum(np.abs(analytic), floor)
    den[den == 0] = 1.0
    return float(np.max(np.abs(analytic - numeric) / den))


def _balance(jac: np.ndarray) -> tuple[np.ndarray, float]:
    """Similarity-scaled copy with rates in units of the largest frequency."""
    rate = math.sqrt(max(abs(jac[5, 4]), abs(jac[7, 6]), 1.0))
    d = np.ones(8)
    # velocity rows/columns carry an extra factor of the mechanical frequency
    d[5] = d[7] = 1.0 / rate
    scaled = (jac * d[:, None] / d[None, :]) / rate
    return scaled, rate


def classify(jac: np.ndarray, margin: float | None = None) -> tuple[Stability, np.ndarray]:
    """Verdict from eigenvalue real parts, plus the eigenvalues (rad/s).

    ``margin`` is absolute in rad/s; it defaults to MARGIN times the larger
    mechanical frequency read off the Jacobian.
    """
    scaled, rate = _balance(jac)
    try:
        ev = np.linalg.eigvals(scaled) * rate
    except np.linalg.LinAlgError as exc:
        raise StabilityError(f"eigensolve failed for matrix\n{np.array2string(jac)}") from exc
    if not np.all(np.isfinite(ev)):
        raise StabilityError(f"non-finite eigenvalues for matrix\n{np.array2string(jac)}")
    eps = MARGIN * rate if margin is None else margin
    re = ev.real
    if np.all(re < -eps):
        verdict = Stability.STABLE
    elif np.any(re > eps):
        verdict = Stability.UNSTABLE
    else:
        verdict = Stability.MARGINAL
    order = np.lexsort((ev.imag, ev.real))
    return verdict, ev[order]


def classify_solution(sys: SystemParams, drive: DriveParams, sol: SteadyStateSolution) -> SteadyStateSolution:
    verdict, ev = classify(assemble_jacobian(sys, drive, sol), margin=MARGIN * sys.omega_m1)
    return sol.with_stability(verdict, ev)


def classify_roots(sys: SystemParams, drive: DriveParams, roots: RootSet) -> RootSet:
    """Copy of ``roots`` with every solution classified."""
    return RootSet([classify_solution(sys, drive, s) for s in roots], roots.method_tag)


def instability_kind(eigenvalues: np.ndarray, margin: float) -> InstabilityKind:
    """Split unstable eigenvalues into real (saddle) and complex (oscillatory)."""
    ev = np.asarray(eigenvalues)
    bad = ev[ev.real > margin]
    if bad.size == 0:
        return InstabilityKind.NONE
    # a real eigenvalue of a real matrix comes out with an imaginary part at rounding level
    tol = 1e-9 * max(float(np.max(np.abs(ev))), 1.0)
    if np.any(np.abs(bad.imag) <= tol):
        return InstabilityKind.SADDLE
    return InstabilityKind.OSCILLATORY


def solution_kind(sys: SystemParams, sol: SteadyStateSolution) -> InstabilityKind:
    if sol.eigenvalues is None:
        raise StabilityError("solution has not been classified")
    return instability_kind(sol.eigenvalues, MARGIN * sys.omega_m1)
