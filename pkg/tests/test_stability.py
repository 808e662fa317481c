import numpy as np
import pytest

from bistab.model import ModelMode
from bistab.roots import Stability, find_all_roots, solve_exact_complex
from bistab.stability import (
    InstabilityKind,
    StabilityError,
    assemble_jacobian,
    classify,
    classify_roots,
    classify_solution,
    finite_difference_jacobian,
    instability_kind,
    jacobian_error,
    rhs_vector,
    solution_kind,
    state_vector,
)

from conftest import NW, device, drive, random_point


def _sorted(ev):
    ev = np.asarray(ev)
    return ev[np.lexsort((ev.imag, ev.real))]


def test_decoupled_eigenvalues_closed_form():
    sys = device(J=0.0, g11=0.0, g12=0.0, g21=0.0, g22=0.0, gamma_m2=300e3, omega_m2=2.5e9)
    dr = drive(0.2 * NW, 0.02 * NW, 3e9, -1e9)
    sol = classify_solution(sys, dr, find_all_roots(sys, dr)[0])
    mech = lambda g, w: [complex(-g / 2, s * np.sqrt(w * w - g * g / 4)) for s in (1, -1)]
    expected = [complex(-sys.kappa1 / 2, s * dr.delta1) for s in (1, -1)]
    expected += [complex(-sys.kappa2 / 2, s * dr.delta2) for s in (1, -1)]
    expected += mech(sys.gamma_m1, sys.omega_m1) + mech(sys.gamma_m2, sys.omega_m2)
    got, want = _sorted(sol.eigenvalues), _sorted(expected)
    assert np.max(np.abs(got - want)) < 1e-9 * np.max(np.abs(want))
    assert sol.stability is Stability.STABLE


def test_trace_equals_total_damping(rng):
    for k in range(20):
        sys, dr = random_point(rng, k)
        for s in classify_roots(sys, dr, find_all_roots(sys, dr)):
            total = -(sys.kappa1 + sys.kappa2 + sys.gamma_m1 + sys.gamma_m2)
            assert np.trace(assemble_jacobian(sys, dr, s)) == pytest.approx(total, rel=1e-12)
            assert np.sum(s.eigenvalues).real == pytest.approx(total, rel=1e-6)


def test_eigenvalues_come_in_conjugate_pairs(rng):
    for k in range(20):
        sys, dr = random_point(rng, k)
        for s in classify_roots(sys, dr, find_all_roots(sys, dr)):
            ev = _sorted(s.eigenvalues)
            assert np.max(np.abs(ev - _sorted(np.conj(ev)))) <= 1e-6 * np.max(np.abs(ev))


def test_analytic_jacobian_matches_finite_differences(rng):
    for k in range(20):
        sys, dr = random_point(rng, k)
        for s in solve_exact_complex(sys, dr):
            y = state_vector(sys, dr, s)
            assert jacobian_error(assemble_jacobian(sys, dr, s), finite_difference_jacobian(sys, dr, y)) < 1e-6


def test_exact_fixed_point_zeroes_the_equations_of_motion(sys0):
    dr = drive(0.1 * NW, 0.01 * NW)
    for s in solve_exact_complex(sys0, dr):
        y = state_vector(sys0, dr, s)
        f = rhs_vector(sys0, dr, y)
        scale = np.max(np.abs(rhs_vector(sys0, dr, y * 1.001)))
        assert np.max(np.abs(f)) < 1e-8 * scale


def test_middle_root_is_a_saddle(sys0):
    dr = drive(0.1 * NW, 0.01 * NW)
    rs = classify_roots(sys0, dr, find_all_roots(sys0, dr))
    assert len(rs) == 3
    assert rs[1].stability is Stability.UNSTABLE
    assert solution_kind(sys0, rs[1]) is InstabilityKind.SADDLE
    assert rs[0].stability is Stability.STABLE


def test_rate_scaling_scales_eigenvalues(rng):
    c = 3.7
    for k in range(10):
        sys, dr = random_point(rng, k)
        dr2 = dr.replace(delta1=c * dr.delta1, delta2=c * dr.delta2)
        a = classify_roots(sys, dr, find_all_roots(sys, dr))
        b = classify_roots(sys.scaled(c), dr2, find_all_roots(sys.scaled(c), dr2))
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert x.stability is y.stability
            assert np.max(np.abs(c * x.eigenvalues - y.eigenvalues)) < 1e-6 * np.max(np.abs(y.eigenvalues))


def test_saddle_verdict_does_not_depend_on_mechanical_damping(rng):
    # det(J) carries no damping term, so a real eigenvalue crossing zero is damping-independent
    for k in range(20):
        sys, dr = random_point(rng, k)
        for g in (1e4, 1e6, 1e7):
            s2 = sys.replace(gamma_m1=g * 6.283185307179586, gamma_m2=g * 6.283185307179586)
            a = classify_roots(sys, dr, find_all_roots(sys, dr))
            b = classify_roots(s2, dr, find_all_roots(s2, dr))
            for x, y in zip(a, b):
                dx = np.linalg.det(assemble_jacobian(sys, dr, x))
                dy = np.linalg.det(assemble_jacobian(s2, dr, y))
                assert dx == pytest.approx(dy, rel=1e-6)
                assert (solution_kind(sys, x) is InstabilityKind.SADDLE) == (solution_kind(s2, y) is InstabilityKind.SADDLE)


def test_classify_margin_and_errors():
    jac = np.diag([-1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -1e-12])
    assert classify(jac, margin=1e-9)[0] is Stability.MARGINAL
    assert classify(jac, margin=1e-13)[0] is Stability.STABLE
    jac[0, 0] = 1.0
    assert classify(jac, margin=1e-9)[0] is Stability.UNSTABLE
    with pytest.raises(StabilityError):
        classify(np.full((8, 8), np.nan))


def test_instability_kind():
    assert instability_kind(np.array([-1 + 2j, -1 - 2j]), 0.0) is InstabilityKind.NONE
    assert instability_kind(np.array([0.5 + 0j, -1.0 + 0j]), 0.0) is InstabilityKind.SADDLE
    assert instability_kind(np.array([0.5 + 2j, 0.5 - 2j]), 0.0) is InstabilityKind.OSCILLATORY


def test_exact_mode_classification(sys0):
    dr = drive(0.1 * NW, 0.01 * NW)
    rs = classify_roots(sys0, dr, find_all_roots(sys0, dr, ModelMode.EXACT_COMPLEX))
    assert all(s.stability is not Stability.UNKNOWN for s in rs)
