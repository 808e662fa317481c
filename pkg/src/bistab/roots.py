"""All nonnegative steady states of the coupled photon-number equations.

The first equation is quadratic in n2 once n1 is fixed, so the curve F1 = 0
is traced through its two closed-form branches n2(n1).  Sign changes of F2
along each branch bracket the roots; brackets are refined with Brent's
method and polished with a damped two-variable Newton iteration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .model import (
    DriveParams,
    MechanicalPositions,
    ModelMode,
    PhotonPair,
    SystemParams,
    drive_rates,
    drive_strengths,
    effective_detunings,
    linear_amplitudes,
    mechanical_positions,
    photon_bound,
    residual_eq5,
    residual_exact,
    shift_coefficients,
)

RESIDUAL_TOL = 1e-9
DEDUP_RADIUS = 1e-6
FOLD_RADIUS = 10 * DEDUP_RADIUS
GRID_SIZE = 4096
NMAX_FACTOR = 10.0
# bisection-only candidates above this are spurious brackets, not roots
_LOOSE_TOL = 1e-6


class RootFindingError(RuntimeError):
    pass


class Stability(enum.Enum):
    UNKNOWN = "unknown"
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass
class SteadyStateSolution:
    n: PhotonPair
    x: MechanicalPositions
    residual_norm: float
    stability: Stability = Stability.UNKNOWN
    eigenvalues: np.ndarray | None = None
    # complex cavity amplitudes; set for exact-mode fixed points only
    amplitudes: tuple[complex, complex] | None = None
    fold_proximal: bool = False
    bisection_only: bool = False

    def with_stability(self, verdict: Stability, eigenvalues: np.ndarray) -> "SteadyStateSolution":
        return replace(self, stability=verdict, eigenvalues=eigenvalues)


@dataclass
class RootSet:
    solutions: list[SteadyStateSolution] = field(default_factory=list)
    method_tag: str = ""

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    @property
    def photons(self) -> np.ndarray:
        """(k, 2) array of photon numbers."""
        return np.array([s.n for s in self.solutions], dtype=float).reshape(-1, 2)

    @property
    def pattern(self) -> tuple[Stability, ...]:
        return tuple(s.stability for s in self.solutions)

    @property
    def fold_proximal(self) -> bool:
        return any(s.fold_proximal for s in self.solutions)


class _Scaled:
    """Photon equations with rates in units of omega_m1 and photons in n_ref.

    ``swap`` exchanges the roles of the two cavities so the parametrizing
    variable is always the first one.
    """

    def __init__(self, sys: SystemParams, drive: DriveParams, swap: bool = False):
        s1, s2 = drive_strengths(sys, drive)
        a11, a12, a22 = shift_coefficients(sys)
        h1 = (0.5 * sys.kappa1) ** 2
        h2 = (0.5 * sys.kappa2) ** 2
        d1, d2 = drive.delta1, drive.delta2
        b1, b2 = photon_bound(sys, drive)
        if swap:
            s1, s2, a11, a22, h1, h2, d1, d2, b1, b2 = s2, s1, a22, a11, h2, h1, d2, d1, b2, b1
        w = sys.omega_m1
        peak = max(s1 / h1 if h1 > 0 else 0.0, s2 / h2 if h2 > 0 else 0.0)
        self.nref = peak if peak > 0 else 1.0
        self.swap = swap
        self.s1, self.s2 = s1 / (self.nref * w * w), s2 / (self.nref * w * w)
        self.a11, self.a12, self.a22 = (a * self.nref / w for a in (a11, a12, a22))
        self.h1, self.h2 = h1 / (w * w), h2 / (w * w)
        self.d1, self.d2 = d1 / w, d2 / w
        self.j2 = sys.J**2 / (w * w)
        self.bounds = (b1 / self.nref, b2 / self.nref)
        self.vmax = NMAX_FACTOR * max(self.bounds)

    def residuals(self, v1, v2):
        c1 = self.d1 - self.a11 * v1 - self.a12 * v2
        c2 = self.d2 - self.a12 * v1 - self.a22 * v2
        f1 = v1 * (self.h1 + c1 * c1) - self.s1 - self.j2 * v2
        f2 = v2 * (self.h2 + c2 * c2) - self.s2 - self.j2 * v1
        return f1, f2

    def jacobian(self, v1, v2):
        c1 = self.d1 - self.a11 * v1 - self.a12 * v2
        c2 = self.d2 - self.a12 * v1 - self.a22 * v2
        return np.array(
            [
                [self.h1 + c1 * c1 - 2 * v1 * c1 * self.a11, -2 * v1 * c1 * self.a12 - self.j2],
                [-2 * v2 * c2 * self.a12 - self.j2, self.h2 + c2 * c2 - 2 * v2 * c2 * self.a22],
            ]
        )

    def quadratic(self, v1):
        """Coefficients of F1 = 0 as A*v2**2 + B*v2 + C = 0."""
        c = self.d1 - self.a11 * v1
        qa = v1 * self.a12 * self.a12
        qb = -(2.0 * v1 * self.a12 * c + self.j2)
        qc = v1 * (self.h1 + c * c) - self.s1
        return qa, qb, qc

    def discriminant(self, v1):
        qa, qb, qc = self.quadratic(v1)
        return qb * qb - 4.0 * qa * qc

    def branch(self, v1, k: int):
        """Closed-form solution v2(v1) of F1 = 0; k = 0 upper, k = 1 lower.

        A negative discriminant is clipped to zero.  With no photon-photon
        cross shift the equation is linear and both branches coincide.
        """
        qa, qb, qc = self.quadratic(v1)
        if self.a12 == 0:
            return qc / self.j2
        sq = np.sqrt(np.maximum(qb * qb - 4.0 * qa * qc, 0.0))
        q = -0.5 * (qb + np.copysign(sq, qb))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = q / qa
            r2 = np.where(q != 0, qc / q, r1)
        return np.fmax(r1, r2) if k == 0 else np.fmin(r1, r2)

    def branch_residual(self, v1, k: int):
        return self.residuals(v1, self.branch(v1, k))[1]

    def unscale(self, v1, v2) -> PhotonPair:
        if self.swap:
            v1, v2 = v2, v1
        return PhotonPair(float(v1) * self.nref, float(v2) * self.nref)

    def vmin(self) -> float:
        """Lower bound on the parametrizing photon number at any root."""
        dmax = max(abs(self.d1), abs(self.d1 - (self.a11 + self.a12) * self.vmax))
        v = self.s1 / (self.h1 + dmax * dmax) if self.s1 > 0 else 0.0
        return max(0.5 * v, 1e-15 * self.vmax)

    def grid(self, size: int) -> np.ndarray:
        """Half geometric, half linear grid over the admissible range."""
        lo = self.vmin()
        half = size // 2
        return np.unique(np.concatenate([np.geomspace(lo, self.vmax, half), np.linspace(lo, self.vmax, size - half)]))


def _runs(valid: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive index ranges of the maximal True runs."""
    padded = np.concatenate([[False], valid, [False]]).astype(np.int8)
    d = np.diff(padded)
    return list(zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1) - 1))


def _turning_point(sc: _Scaled, lo: float, hi: float) -> float:
    """Turning point of the F1 = 0 curve inside (lo, hi), on its real side."""
    t = optimize.brentq(sc.discriminant, lo, hi, xtol=1e-300, rtol=1e-15)
    for cand in (t, np.nextafter(t, lo), np.nextafter(t, hi)):
        if sc.discriminant(cand) >= 0:
            return cand
    return t


def _chains(sc: _Scaled, grid: np.ndarray):
    """Yield (nodes, k) polylines along which branch k is continuous.

    Each maximal run of grid points with a nonnegative discriminant gives an
    upper and a lower chain.  Interior turning points are located and
    appended to both chains, so a root between the last grid point and the
    turning point is still bracketed.
    """
    if sc.a12 == 0:
        yield grid, 0
        return
    valid = sc.discriminant(grid) >= 0
    for i0, i1 in _runs(valid):
        nodes = list(grid[i0 : i1 + 1])
        if i0 > 0:
            nodes.insert(0, _turning_point(sc, grid[i0 - 1], grid[i0]))
        if i1 < len(grid) - 1:
            nodes.append(_turning_point(sc, grid[i1], grid[i1 + 1]))
        nodes = np.asarray(nodes)
        yield nodes, 0
        yield nodes, 1


def _hidden_pairs(nodes: np.ndarray, g: np.ndarray, gfun) -> list[tuple[float, float]]:
    """Brackets for root pairs hiding inside a single cell.

    At every local minimum of |g| that does not change sign, minimize the
    signed function over the two adjacent cells; a crossing of zero there
    splits into two brackets.
    """
    out = []
    n = len(g)
    if n < 2:
        return out
    ag = np.abs(g)
    left = np.concatenate([[np.inf], ag[:-1]])
    right = np.concatenate([ag[1:], [np.inf]])
    for i in np.flatnonzero((ag <= left) & (ag <= right)):
        i0, i1 = max(i - 1, 0), min(i + 1, n - 1)
        s = np.sign(g[i])
        if s == 0 or np.sign(g[i0]) != s or np.sign(g[i1]) != s:
            continue
        lo, hi = nodes[i0], nodes[i1]
        res = optimize.minimize_scalar(
            lambda v: s * gfun(v), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13 * (hi - lo)}
        )
        if s * res.fun < 0:
            out += [(lo, res.x), (res.x, hi)]
    return out


def _newton_polish(sc: _Scaled, v1: float, v2: float, maxiter: int = 40):
    """Damped Newton on (F1, F2); returns the polished point or None."""
    x = np.array([v1, v2], dtype=float)
    f = np.array(sc.residuals(*x))
    fn = np.max(np.abs(f))
    for _ in range(maxiter):
        if fn == 0:
            break
        try:
            step = np.linalg.solve(sc.jacobian(*x), -f)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        lam = 1.0
        while lam > 1e-4:
            xn = x + lam * step
            fnew = np.array(sc.residuals(*xn))
            fnn = np.max(np.abs(fnew))
            if fnn < fn:
                break
            lam *= 0.5
        else:
            break
        tiny = np.max(np.abs(xn - x)) <= 4 * np.finfo(float).eps * np.max(np.abs(x))
        x, f, fn = xn, fnew, fnn
        if tiny:
            break
    return x


def relative_distance(p, q, floor: float = 0.0) -> float:
    """Max-norm relative distance between two photon pairs."""
    d = 0.0
    for a, b in zip(p, q):
        den = max(abs(a), abs(b), floor)
        if den > 0:
            d = max(d, abs(a - b) / den)
    return d


def _make_solution(sys, drive, n: PhotonPair, bisection_only=False) -> SteadyStateSolution:
    res = max(abs(r) for r in residual_eq5(sys, drive, n))
    return SteadyStateSolution(n=n, x=mechanical_positions(sys, n), residual_norm=res, bisection_only=bisection_only)


def dedup(solutions: list[SteadyStateSolution], floor: float = 0.0) -> list[SteadyStateSolution]:
    """Sort by n1, merge near-duplicates and flag close pairs as fold-proximal."""
    ordered = sorted(solutions, key=lambda s: (s.n[0], s.n[1], s.residual_norm))
    kept: list[SteadyStateSolution] = []
    for s in ordered:
        for i, k in enumerate(kept):
            if relative_distance(s.n, k.n, floor) < DEDUP_RADIUS:
                if s.residual_norm < k.residual_norm:
                    kept[i] = s
                break
        else:
            kept.append(s)
    kept.sort(key=lambda s: (s.n[0], s.n[1]))
    for i, a in enumerate(kept):
        for b in kept[i + 1 :]:
            if relative_distance(a.n, b.n, floor) < FOLD_RADIUS:
                a.fold_proximal = b.fold_proximal = True
    return kept


def _finalize(sys, drive, sc: _Scaled, cands, tag: str) -> RootSet:
    floor = 1e-12 * sc.vmax * sc.nref
    sols = []
    for v1, v2, bis in cands:
        n = sc.unscale(v1, v2)
        if not all(math.isfinite(v) for v in n) or min(n) < -floor:
            continue
        n = PhotonPair(max(n[0], 0.0), max(n[1], 0.0))
        s = _make_solution(sys, drive, n, bisection_only=bis)
        if 0 < min(n) < floor:
            # an undriven, uncoupled cavity is dark: rounding noise in its photon
            # number would otherwise dominate its own scaled residual
            z = PhotonPair(*(0.0 if v < floor else v for v in n))
            sz = _make_solution(sys, drive, z, bisection_only=bis)
            if sz.residual_norm < s.residual_norm:
                s = sz
        if s.residual_norm < RESIDUAL_TOL or (bis and s.residual_norm < _LOOSE_TOL):
            sols.append(s)
    return RootSet(dedup(sols, floor), tag)


def _cubic_roots(h, d, a, s) -> list[float]:
    """Nonnegative roots of v*(h + (d - a*v)**2) = s, Newton-polished."""
    if s == 0:
        return [0.0]
    out = []
    for r in np.roots([a * a, -2.0 * a * d, h + d * d, -s]):
        if abs(r.imag) > 1e-6 * max(abs(r.real), 1e-300):
            continue
        v = r.real
        for _ in range(20):
            c = d - a * v
            df = h + c * c - 2 * v * c * a
            if df == 0:
                break
            dv = (v * (h + c * c) - s) / df
            v -= dv
            if abs(dv) <= 1e-16 * abs(v):
                break
        if v >= 0:
            out.append(v)
    return out


def _polished(sc: _Scaled, v1: float, v2: float) -> tuple[float, float, bool]:
    p = _newton_polish(sc, v1, v2)
    if p is not None and np.all(np.isfinite(p)):
        fp = max(abs(r) for r in sc.residuals(*p))
        fb = max(abs(r) for r in sc.residuals(v1, v2))
        if fp <= fb and relative_distance(p, (v1, v2), 1e-12 * sc.vmax) < 1e-3:
            return p[0], p[1], False
    return v1, v2, True


def _scan_roots(sc: _Scaled, grid_size: int) -> list[tuple[float, float, bool]]:
    if sc.a12 == 0 and sc.j2 == 0:
        return [
            (v1, v2, False)
            for v1 in _cubic_roots(sc.h1, sc.d1, sc.a11, sc.s1)
            for v2 in _cubic_roots(sc.h2, sc.d2, sc.a22, sc.s2)
        ]
    cands = []
    for nodes, k in _chains(sc, sc.grid(grid_size)):
        def gfun(v, k=k):
            return sc.branch_residual(v, k)

        g = gfun(nodes)
        s = np.sign(g)
        roots = [nodes[i] for i in np.flatnonzero(s == 0)]
        brackets = [(nodes[i], nodes[i + 1]) for i in np.flatnonzero(s[:-1] * s[1:] < 0)]
        brackets += _hidden_pairs(nodes, g, gfun)
        for lo, hi in brackets:
            glo, ghi = gfun(lo), gfun(hi)
            if glo == 0 or ghi == 0:
                roots.append(lo if glo == 0 else hi)
            elif glo * ghi < 0:
                roots.append(optimize.brentq(gfun, lo, hi, xtol=1e-300, rtol=1e-15))
        for v1 in roots:
            cands.append(_polished(sc, v1, float(sc.branch(np.float64(v1), k))))
    return cands


def _parametrization(sys: SystemParams, drive: DriveParams) -> bool | None:
    """Swap flag for the scan, or None for the dark case.

    The parametrizing photon number must be strictly positive at every root.
    """
    s1, s2 = drive_strengths(sys, drive)
    if s1 == 0 and s2 == 0:
        return None
    return not (s1 > 0 or (sys.J > 0 and s2 > 0))


def _dark(sys, drive, tag) -> RootSet:
    photon_bound(sys, drive)  # domain check on J
    return RootSet([_make_solution(sys, drive, PhotonPair(0.0, 0.0))], tag)


def find_all_roots(
    sys: SystemParams,
    drive: DriveParams,
    mode: ModelMode = ModelMode.PAPER_EQ5,
    grid_size: int = GRID_SIZE,
) -> RootSet:
    """Every nonnegative steady state at one operating point, sorted by n1."""
    if mode is ModelMode.EXACT_COMPLEX:
        return solve_exact_complex(sys, drive)
    swap = _parametrization(sys, drive)
    if swap is None:
        return _dark(sys, drive, "eq5-branch-scan")
    sc = _Scaled(sys, drive, swap)
    rs = _finalize(sys, drive, sc, _scan_roots(sc, grid_size), "eq5-branch-scan")
    if not rs.solutions:
        raise RootFindingError(f"no steady state found for {drive}")
    return rs


# ------------------------------------------------------------------ oracle


def _bisect(fun, lo: float, hi: float, flo: float) -> float:
    """Plain bisection down to adjacent floating-point numbers."""
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        fm = fun(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid


def _oracle_grid(vmax: float, size: int) -> np.ndarray:
    geo = int(0.6 * size)
    return np.unique(np.concatenate([np.geomspace(1e-18 * vmax, vmax, geo), np.linspace(0.0, vmax, size - geo + 1)[1:]]))


def _scan_1d(fun, grid: np.ndarray) -> list[float]:
    vals = fun(grid)
    out = [grid[i] for i in np.flatnonzero(vals == 0)]
    for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
        out.append(_bisect(fun, grid[i], grid[i + 1], vals[i]))
    return out


def brute_force_roots(sys: SystemParams, drive: DriveParams, grid_size: int = 20000) -> RootSet:
    """Exhaustive grid scan with pure bisection; an oracle for find_all_roots.

    No Newton step and no local refinement is taken.  Cells where a branch
    starts or ends are split at the turning point, found by bisecting the
    discriminant.
    """
    swap = _parametrization(sys, drive)
    if swap is None:
        return _dark(sys, drive, "brute-force")
    sc = _Scaled(sys, drive, swap)
    found: list[tuple[float, float, bool]] = []

    if sc.a12 == 0 and sc.j2 == 0:
        def f1(v):
            c = sc.d1 - sc.a11 * v
            return v * (sc.h1 + c * c) - sc.s1

        def f2(v):
            c = sc.d2 - sc.a22 * v
            return v * (sc.h2 + c * c) - sc.s2

        r1 = _scan_1d(f1, _oracle_grid(sc.vmax, grid_size))
        vmax2 = NMAX_FACTOR * sc.bounds[1]
        r2 = [0.0] if sc.s2 == 0 else _scan_1d(f2, _oracle_grid(vmax2, grid_size))
        found = [(a, b, True) for a in r1 for b in r2]
        return _finalize(sys, drive, sc, found, "brute-force")

    grid = _oracle_grid(sc.vmax, grid_size)
    disc = sc.discriminant(grid) if sc.a12 != 0 else np.ones_like(grid)
    ok = disc >= 0
    for k in (0, 1) if sc.a12 != 0 else (0,):
        def g(v, k=k):
            return sc.branch_residual(v, k)

        vals = np.where(ok, g(grid), np.nan)
        for i in np.flatnonzero(ok & (vals == 0)):
            found.append((grid[i], float(sc.branch(grid[i], k)), True))
        both = ok[:-1] & ok[1:]
        for i in np.flatnonzero(both & (vals[:-1] * vals[1:] < 0)):
            v = _bisect(g, grid[i], grid[i + 1], vals[i])
            found.append((v, float(sc.branch(v, k)), True))
        for i in np.flatnonzero(ok[:-1] != ok[1:]):
            lo, hi = grid[i], grid[i + 1]
            t = _bisect(sc.discriminant, lo, hi, disc[i])
            end = lo if ok[i] else hi
            while sc.discriminant(t) < 0 and t != end:
                t = np.nextafter(t, end)
            gv, gt = g(end), g(t)
            if gt == 0:
                found.append((t, float(sc.branch(t, k)), True))
            elif gv * gt < 0:
                a, b, ga = (end, t, gv) if end < t else (t, end, gt)
                v = _bisect(g, a, b, ga)
                found.append((v, float(sc.branch(v, k)), True))
    return _finalize(sys, drive, sc, found, "brute-force")


# ---------------------------------------------------------------- exact mode


class _ExactScaled:
    """Exact fixed points reduced to two photon numbers.

    With the effective detunings fixed by (n1, n2) the field equations are
    linear and give a(n); fixed points satisfy |a_l(n)|**2 = n_l.
    """

    def __init__(self, sys: SystemParams, drive: DriveParams):
        w = sys.omega_m1
        r1, r2 = drive_rates(sys, drive)
        h1, h2 = (0.5 * sys.kappa1) ** 2, (0.5 * sys.kappa2) ** 2
        peak = max(r1 * r1 / h1 if h1 > 0 else 0.0, r2 * r2 / h2 if h2 > 0 else 0.0)
        self.nref = peak if peak > 0 else 1.0
        self.r1 = r1 / (w * math.sqrt(self.nref))
        self.r2 = r2 / (w * math.sqrt(self.nref))
        a11, a12, a22 = shift_coefficients(sys)
        self.a11, self.a12, self.a22 = (a * self.nref / w for a in (a11, a12, a22))
        self.k1, self.k2 = 0.5 * sys.kappa1 / w, 0.5 * sys.kappa2 / w
        self.d1, self.d2 = drive.delta1 / w, drive.delta2 / w
        self.j = sys.J / w

    def _parts(self, v1, v2):
        c1 = complex(self.k1, self.d1 - self.a11 * v1 - self.a12 * v2)
        c2 = complex(self.k2, self.d2 - self.a12 * v1 - self.a22 * v2)
        det = c1 * c2 + self.j * self.j
        return det, self.r1 * c2 + 1j * self.j * self.r2, self.r2 * c1 + 1j * self.j * self.r1

    def amplitudes(self, v1, v2):
        det, num1, num2 = self._parts(v1, v2)
        return num1 / det, num2 / det

    def residuals(self, v):
        det, num1, num2 = self._parts(*v)
        det2 = abs(det) ** 2
        m1, m2 = abs(num1) ** 2, abs(num2) ** 2
        return np.array(
            [
                (v[0] * det2 - m1) / (abs(v[0]) * det2 + m1 + 1e-300),
                (v[1] * det2 - m2) / (abs(v[1]) * det2 + m2 + 1e-300),
            ]
        )


def solve_exact_complex(sys: SystemParams, drive: DriveParams, extra_seeds=()) -> RootSet:
    """Fixed points of the full complex field equations.

    Multistart MINPACK hybrid solves on the photon-number reduction, seeded
    from the photon-equation roots, a log lattice, any ``extra_seeds``
    (photon pairs) and partner seeds around every point found.  Each fixed
    point is verified with :func:`residual_exact`.
    """
    s1, s2 = drive_strengths(sys, drive)
    if s1 == 0 and s2 == 0:
        rs = _dark(sys, drive, "exact-multistart")
        rs.solutions[0].amplitudes = (0j, 0j)
        return rs
    ex = _ExactScaled(sys, drive)
    b1, b2 = photon_bound(sys, drive)
    floor = 1e-12 * max(b1, b2)
    top1, top2 = max(b1 / ex.nref, 1e-12), max(b2 / ex.nref, 1e-12)
    seeds = [np.array(s.n) / ex.nref for s in find_all_roots(sys, drive, ModelMode.PAPER_EQ5)]
    seeds += [np.asarray(p, dtype=float) / ex.nref for p in extra_seeds]
    lattice1, lattice2 = np.geomspace(1e-6 * top1, top1, 8), np.geomspace(1e-6 * top2, top2, 8)
    seeds += [np.array([p, q]) for p in lattice1 for q in lattice2]

    found: list[SteadyStateSolution] = []
    scale = math.sqrt(ex.nref)

    def attempt(seed):
        sol = optimize.root(ex.residuals, seed, method="hybr", options={"xtol": 1e-14})
        v = sol.x
        if not np.all(np.isfinite(v)) or np.min(v) < 0:
            return None
        a1, a2 = (a * scale for a in ex.amplitudes(*v))
        res = float(np.max(np.abs(residual_exact(sys, drive, a1, a2))))
        if res >= RESIDUAL_TOL:
            return None
        n = PhotonPair(abs(a1) ** 2, abs(a2) ** 2)
        if any(relative_distance(n, f.n, floor) < DEDUP_RADIUS for f in found):
            return None
        s = SteadyStateSolution(n=n, x=mechanical_positions(sys, n), residual_norm=res, amplitudes=(a1, a2))
        found.append(s)
        return s

    queue = list(seeds)
    while queue:
        s = attempt(queue.pop(0))
        if s is None:
            continue
        v = np.array(s.n) / ex.nref
        for f in (1e-3, 1e-2, 5e-2, 0.2):
            for sgn in (1.0, -1.0):
                queue.append(v * (1 + sgn * f))
                queue.append(v * np.array([1 + sgn * f, 1 - sgn * f]))
    return RootSet(dedup(found, floor), "exact-multistart")


def reconstruct_amplitudes(sys: SystemParams, drive: DriveParams, sol: SteadyStateSolution) -> tuple[complex, complex]:
    """Cavity amplitudes for a steady state.

    Exact-mode solutions carry their amplitudes.  For photon-equation roots
    the phases come from the linear field equations with the effective
    detunings frozen at the root, and the moduli are sqrt(n).
    """
    if sol.amplitudes is not None:
        return sol.amplitudes
    lin = linear_amplitudes(sys, drive, effective_detunings(sys, drive, sol.n))
    out = []
    for a, n in zip(lin, sol.n):
        phase = a / abs(a) if abs(a) > 0 else 1.0
        out.append(math.sqrt(n) * phase)
    return out[0], out[1]
