"""Solution sets along a swept parameter: branches, folds, windows and
hysteresis traces."""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import DriveParams, ModelMode, SystemParams
from .roots import RootFindingError, RootSet, SteadyStateSolution, find_all_roots
from .stability import InstabilityKind, Stability, classify_roots, solution_kind


class Axis(enum.Enum):
    DELTA1 = "Delta1"
    DELTA2 = "Delta2"
    PPU = "Ppu"
    PCO = "Pco"
    J = "J"
    G11 = "G11"
    G12 = "G12"
    G21 = "G21"
    G22 = "G22"


_DRIVE_FIELDS = {Axis.DELTA1: "delta1", Axis.DELTA2: "delta2", Axis.PPU: "p_pu", Axis.PCO: "p_co"}
_SYSTEM_FIELDS = {Axis.J: "J", Axis.G11: "g11", Axis.G12: "g12", Axis.G21: "g21", Axis.G22: "g22"}


class SweepError(RootFindingError):
    """A per-point failure, carrying the axis value where it happened."""

    def __init__(self, axis_value: float, cause: Exception):
        super().__init__(f"at axis value {axis_value!r}: {cause}")
        self.axis_value = axis_value


class Admissibility(enum.Enum):
    """Which fixed points a hysteresis trace may occupy.

    STABLE requires every eigenvalue in the open left half plane.  STATIC
    only excludes saddles (a real positive eigenvalue), i.e. the branches
    that a slow ramp cannot follow even in principle.
    """

    STABLE = "stable"
    STATIC = "static"


def apply_axis(axis: Axis, sys: SystemParams, drive: DriveParams, value: float):
    """(sys, drive) with the swept quantity set to ``value``."""
    if axis in _DRIVE_FIELDS:
        return sys, drive.replace(**{_DRIVE_FIELDS[axis]: float(value)})
    return sys.replace(**{_SYSTEM_FIELDS[axis]: float(value)}), drive


def axis_value(axis: Axis, sys: SystemParams, drive: DriveParams) -> float:
    if axis in _DRIVE_FIELDS:
        return getattr(drive, _DRIVE_FIELDS[axis])
    return getattr(sys, _SYSTEM_FIELDS[axis])


@dataclass(frozen=True)
class SweepSpec:
    axis: Axis
    values: tuple[float, ...]
    sys: SystemParams
    drive: DriveParams
    mode: ModelMode = ModelMode.PAPER_EQ5

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("a sweep needs at least two axis values")
        if not np.all(np.isfinite(vals)):
            raise ValueError("axis values must be finite")
        d = np.diff(vals)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("axis values must be strictly monotone")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))
        object.__setattr__(self, "axis", Axis(self.axis))
        # fail early on values outside the parameter domain
        apply_axis(self.axis, self.sys, self.drive, vals[0])
        apply_axis(self.axis, self.sys, self.drive, vals[-1])

    def point(self, value: float) -> tuple[SystemParams, DriveParams]:
        return apply_axis(self.axis, self.sys, self.drive, value)

    def with_values(self, values) -> "SweepSpec":
        return SweepSpec(self.axis, tuple(values), self.sys, self.drive, self.mode)


@dataclass(frozen=True)
class Fold:
    """A pair of branches created or annihilated between two grid values."""

    interval: tuple[float, float]
    labels: tuple[int, ...]
    kind: str  # "create" or "annihilate"
    degenerate: bool = False


@dataclass
class SweepResult:
    spec: SweepSpec
    roots: list[RootSet]
    branch_labels: list[list[int]]
    folds: list[Fold]
    windows: list[tuple[float, float]]
    double_windows: list[tuple[float, float]]

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.spec.values)

    @property
    def counts(self) -> np.ndarray:
        return np.array([len(r) for r in self.roots])


def thread_count() -> int:
    """Worker cap from BISTAB_THREADS (default 1)."""
    raw = os.environ.get("BISTAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"BISTAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"BISTAB_THREADS must be a positive integer, got {raw!r}")
    return n


def solve_point(spec: SweepSpec, value: float) -> RootSet:
    """Roots at one axis value, classified."""
    sys, drive = spec.point(value)
    try:
        return classify_roots(sys, drive, find_all_roots(sys, drive, spec.mode))
    except Exception as exc:  # attach the axis value, keep the chain
        raise SweepError(value, exc) from exc


def _solve_all(spec: SweepSpec) -> list[RootSet]:
    workers = thread_count()
    if workers == 1:
        return [solve_point(spec, v) for v in spec.values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: solve_point(spec, v), spec.values))


def _log_photons(rs: RootSet) -> np.ndarray:
    return np.log1p(rs.photons)


def _cost(a: RootSet, b: RootSet) -> np.ndarray:
    pa, pb = _log_photons(a), _log_photons(b)
    return np.max(np.abs(pa[:, None, :] - pb[None, :, :]), axis=2)


def _best_pair(cost: np.ndarray, intra: np.ndarray, axis: int):
    """Two roots to leave unmatched along ``axis`` so the rest match best.

    A newborn (or dying) pair sits close together, so the distance within
    the pair is added to the matching cost.
    """
    m = cost.shape[axis]
    best = None
    for i, j in itertools.combinations(range(m), 2):
        keep = [k for k in range(m) if k not in (i, j)]
        sub = cost[keep, :] if axis == 0 else cost[:, keep]
        r, c = linear_sum_assignment(sub)
        score = sub[r, c].sum() + intra[i, j]
        if best is None or score < best[0]:
            best = (score, (i, j), keep, r, c)
    return best[1:]


def link_branches(roots: list[RootSet]):
    """Consistent integer labels across points, plus fold events.

    Returns (labels, events) where each event is (index, labels, kind,
    degenerate) for a change between points index and index + 1.
    """
    labels = [list(range(len(roots[0])))]
    nxt = len(roots[0])
    events = []
    for i in range(len(roots) - 1):
        a, b = roots[i], roots[i + 1]
        prev = labels[-1]
        cur = [-1] * len(b)
        cost = _cost(a, b)
        la, lb = len(a), len(b)
        if la == lb:
            r, c = linear_sum_assignment(cost)
            for ri, ci in zip(r, c):
                cur[ci] = prev[ri]
        elif lb == la + 2:
            pair, keep, r, c = _best_pair(cost, _cost(b, b), axis=1)
            for ri, ci in zip(r, c):
                cur[keep[ci]] = prev[ri]
            for j in pair:
                cur[j] = nxt
                nxt += 1
            events.append((i, tuple(cur[j] for j in pair), "create", False))
        elif la == lb + 2:
            pair, keep, r, c = _best_pair(cost, _cost(a, a), axis=0)
            for ri, ci in zip(r, c):
                cur[ci] = prev[keep[ri]]
            events.append((i, tuple(prev[j] for j in pair), "annihilate", False))
        else:
            r, c = linear_sum_assignment(cost)
            for ri, ci in zip(r, c):
                cur[ci] = prev[ri]
            for j in range(lb):
                if cur[j] < 0:
                    cur[j] = nxt
                    nxt += 1
            born = tuple(cur[j] for j in range(lb) if j not in set(c))
            dead = tuple(prev[k] for k in range(la) if k not in set(r))
            if born:
                events.append((i, born, "create", True))
            if dead:
                events.append((i, dead, "annihilate", True))
        labels.append(cur)
    return labels, events


def _intervals(values: np.ndarray, mask: np.ndarray) -> list[tuple[float, float]]:
    out = []
    padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
    d = np.diff(padded)
    for i0, i1 in zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1) - 1):
        lo, hi = sorted((values[i0], values[i1]))
        out.append((float(lo), float(hi)))
    return sorted(out)


def _split_degenerate(spec: SweepSpec, lo: float, hi: float, c_lo: int, c_hi: int, depth: int = 30):
    """Refine an interval whose count changes by more than two into single folds."""
    if abs(c_hi - c_lo) <= 2 or depth == 0:
        return [(lo, hi, c_lo, c_hi)]
    mid = 0.5 * (lo + hi)
    c_mid = len(find_all_roots(*spec.point(mid), spec.mode))
    return _split_degenerate(spec, lo, mid, c_lo, c_mid, depth - 1) + _split_degenerate(
        spec, mid, hi, c_mid, c_hi, depth - 1
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Solve and classify at every axis value and link the branches."""
    roots = _solve_all(spec)
    labels, events = link_branches(roots)
    vals = np.asarray(spec.values)
    folds = []
    for i, labs, kind, degenerate in events:
        if degenerate:
            pieces = _split_degenerate(spec, vals[i], vals[i + 1], len(roots[i]), len(roots[i + 1]))
            for lo, hi, c_lo, c_hi in pieces:
                if c_lo != c_hi:
                    folds.append(Fold((float(lo), float(hi)), labs, kind, True))
        else:
            folds.append(Fold((float(vals[i]), float(vals[i + 1])), labs, kind))
    counts = np.array([len(r) for r in roots])
    return SweepResult(
        spec=spec,
        roots=roots,
        branch_labels=labels,
        folds=folds,
        windows=_intervals(vals, counts >= 3),
        double_windows=_intervals(vals, counts >= 5),
    )


def critical_values(spec: SweepSpec, result: SweepResult | None = None, rtol: float = 1e-6) -> list[float]:
    """Axis values of every fold, bisected on the root count to ``rtol``."""
    if result is None:
        result = run_sweep(spec)
    out = []
    for fold in result.folds:
        lo, hi = fold.interval
        c_lo = len(find_all_roots(*spec.point(lo), spec.mode))
        c_hi = len(find_all_roots(*spec.point(hi), spec.mode))
        if c_lo == c_hi:
            continue
        while abs(hi - lo) > rtol * max(abs(lo), abs(hi)) and abs(hi - lo) > 0:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if len(find_all_roots(*spec.point(mid), spec.mode)) == c_lo:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return sorted(out)


# the fold values of a power sweep are the paper-level "critical powers"
critical_powers = critical_values


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"


@dataclass(frozen=True)
class Jump:
    axis_value: float
    from_label: int
    to_label: int


@dataclass
class HysteresisTrace:
    direction: Direction
    values: np.ndarray
    occupied: list[SteadyStateSolution]
    labels: list[int]
    jumps: list[Jump] = field(default_factory=list)

    def observable(self, name: str) -> np.ndarray:
        """Occupied n_p1, n_p2, x1s or x2s along the trace."""
        getters = {
            "n_p1": lambda s: s.n[0],
            "n_p2": lambda s: s.n[1],
            "x1s": lambda s: s.x[0],
            "x2s": lambda s: s.x[1],
        }
        if name not in getters:
            raise KeyError(f"unknown observable {name!r}")
        return np.array([getters[name](s) for s in self.occupied])


def _admissible(sys: SystemParams, sol: SteadyStateSolution, rule: Admissibility) -> bool:
    if rule is Admissibility.STABLE:
        return sol.stability is Stability.STABLE
    return solution_kind(sys, sol) is not InstabilityKind.SADDLE


def _log_distance(p: SteadyStateSolution, q: SteadyStateSolution) -> float:
    return float(np.max(np.abs(np.log1p(np.array(p.n)) - np.log1p(np.array(q.n)))))


def _trace(result: SweepResult, order, direction, start, rule) -> HysteresisTrace:
    spec = result.spec
    occupied, labels, jumps = [], [], []
    current = None
    for i in order:
        value = spec.values[i]
        sys, _ = spec.point(value)
        rs, labs = result.roots[i], result.branch_labels[i]
        ok = [k for k, s in enumerate(rs) if _admissible(sys, s, rule)]
        if not ok:
            raise SweepError(value, RootFindingError("no admissible steady state"))
        if current is None:
            k = start(rs, ok)
        elif current in labs and labs.index(current) in ok:
            k = labs.index(current)
        else:
            k = min(ok, key=lambda j: _log_distance(rs[j], occupied[-1]))
            jumps.append(Jump(float(value), current, labs[k]))
        current = labs[k]
        occupied.append(rs[k])
        labels.append(current)
    vals = np.asarray(spec.values)[list(order)]
    return HysteresisTrace(direction, vals, occupied, labels, jumps)


def run_hysteresis(
    spec: SweepSpec,
    result: SweepResult | None = None,
    admissibility: Admissibility = Admissibility.STATIC,
) -> tuple[HysteresisTrace, HysteresisTrace]:
    """Adiabatic up and down passes along the axis.

    The up pass starts on the admissible root with the fewest photons and
    follows its branch; when the branch ends (or stops being admissible) it
    jumps to the nearest admissible root in log(1 + n).  The down pass
    starts where the up pass ended.
    """
    if result is None:
        result = run_sweep(spec)
    n = len(spec.values)
    ascending = spec.values[-1] > spec.values[0]
    up_order = list(range(n)) if ascending else list(range(n - 1, -1, -1))
    up = _trace(result, up_order, Direction.UP, lambda rs, ok: ok[0], admissibility)
    last = up.labels[-1]

    def start_down(rs, ok, i0=up_order[-1]):
        labs = result.branch_labels[i0]
        return labs.index(last) if labs.index(last) in ok else ok[-1]

    down = _trace(result, up_order[::-1], Direction.DOWN, start_down, admissibility)
    return up, down


def series_jumps(values: np.ndarray, series: np.ndarray, ratio: float = 4.0) -> list[float]:
    """Axis values where a sampled trace is discontinuous.

    A step counts as a jump when it exceeds ``ratio`` times both
    neighbouring steps and 1e-3 of the range of the series; a smooth
    curve, even the square-root approach to a fold, changes its step size
    more gently than that.  The value reported is the grid point after the
    step.
    """
    y = np.asarray(series, dtype=float)
    d = np.abs(np.diff(y))
    if d.size == 0 or np.ptp(y) == 0:
        return []
    nb = np.maximum(np.concatenate([[0.0], d[:-1]]), np.concatenate([d[1:], [0.0]]))
    hits = (d > ratio * nb) & (d > 1e-3 * np.ptp(y))
    return [float(values[i + 1]) for i in np.flatnonzero(hits)]
