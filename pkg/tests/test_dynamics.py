import math

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import NW, device, drive
from bistab import kernels
from bistab.dynamics import (
    Controls,
    Scaling,
    StiffnessError,
    TrajectoryState,
    integrate,
    perturbation_test,
    ramp_drive,
    ramp_jumps,
    rhs,
)
from bistab.model import ParameterError, drive_rates, hz, residual_exact
from bistab.roots import Stability, solve_exact_complex
from bistab.stability import assemble_jacobian, classify_roots, finite_difference_jacobian, jacobian_error

FAST = dict(gamma_m1=1e7, gamma_m2=1e7)


@pytest.fixture(scope="module")
def bistable():
    """Exact-mode triple with stable outer roots around an unstable middle one."""
    s = device(**FAST)
    d = drive(0.03 * NW, 0.01 * NW)
    rs = classify_roots(s, d, solve_exact_complex(s, d))
    assert [x.stability for x in rs] == [Stability.STABLE, Stability.UNSTABLE, Stability.STABLE]
    return s, d, rs


def _random_state(rng, s, d):
    sc = Scaling(s, d)
    return sc.from_scaled(rng.uniform(-1, 1, 8))


def test_backends_agree(rng):
    s, d = device(**FAST), drive(0.05 * NW, 0.01 * NW)
    sc = Scaling(s, d)
    p = sc.params(d)
    y0 = rng.uniform(-1, 1, 8)
    ref = np.asarray(kernels.get("python").rhs_scaled(y0, p, 0.0))
    for name in kernels.available():
        k = kernels.get(name)
        assert np.allclose(np.asarray(k.rhs_scaled(y0, p, 0.0)), ref, rtol=1e-14, atol=1e-14)
        y, t, status, steps, *_ = k.dopri5(y0, 0.0, 50.0, p, 1e-8, 1e-12, 1e-2, 0.0, 1.0, False, np.zeros(0), 10**7)
        y_py, *_ = kernels.get("python").dopri5(y0, 0.0, 50.0, p, 1e-8, 1e-12, 1e-2, 0.0, 1.0, False, np.zeros(0), 10**7)
        assert np.max(np.abs(np.asarray(y) - np.asarray(y_py))) < 1e-12


def test_rhs_vanishes_at_exact_fixed_points(bistable):
    s, d, rs = bistable
    sc = Scaling(s, d)
    for sol in rs:
        y = TrajectoryState.from_solution(s, d, sol)
        scaled = rhs(s, d, y) / (sc.vec * sc.w)
        assert np.max(np.abs(scaled)) < 1e-8


def test_rhs_zero_drive_origin_is_exactly_zero(sys0):
    d = drive(0.0, 0.0)
    assert np.all(rhs(sys0, d, TrajectoryState.from_array(np.zeros(8))) == 0.0)


def test_rhs_matches_jacobian_by_finite_differences(bistable):
    s, d, rs = bistable
    for sol in rs:
        y = TrajectoryState.from_solution(s, d, sol).as_array()
        jac = assemble_jacobian(s, d, sol)
        h = 1e-6 * np.maximum(np.abs(y), 1e-3 * np.max(np.abs(y)))
        fd = np.empty((8, 8))
        for k in range(8):
            e = np.zeros(8)
            e[k] = h[k]
            fd[:, k] = (rhs(s, d, y + e) - rhs(s, d, y - e)) / (2 * h[k])
        assert jacobian_error(jac, fd) < 1e-6
        assert jacobian_error(jac, finite_difference_jacobian(s, d, y)) < 1e-6


def test_linear_limit_matches_matrix_exponential(rng):
    # with every g = 0 the fields obey a driven linear system and the
    # mirrors are free damped oscillators
    s = device(g11=0.0, g12=0.0, g21=0.0, g22=0.0, **FAST)
    d = drive(0.05 * NW, 0.01 * NW, 1.3e9, -0.7e9)
    r1, r2 = drive_rates(s, d)
    m = np.array(
        [[-(s.kappa1 / 2 + 1j * d.delta1), 1j * s.J], [1j * s.J, -(s.kappa2 / 2 + 1j * d.delta2)]]
    )
    b = np.array([r1, r2], dtype=complex)
    fixed = -np.linalg.solve(m, b)
    y0 = _random_state(rng, s, d)
    a0 = np.array([y0[0] + 1j * y0[1], y0[2] + 1j * y0[3]])
    t = 4.0 / s.kappa1
    a_t = fixed + expm(m * t) @ (a0 - fixed)
    mech = [np.array([[0.0, 1.0], [-w**2, -g]]) for w, g in ((s.omega_m1, s.gamma_m1), (s.omega_m2, s.gamma_m2))]
    x1 = expm(mech[0] * t) @ y0[[4, 5]]
    x2 = expm(mech[1] * t) @ y0[[6, 7]]
    expect = np.array([a_t[0].real, a_t[0].imag, a_t[1].real, a_t[1].imag, *x1, *x2])

    rep = integrate(s, d, TrajectoryState.from_array(y0), t, Controls(stop_on_settle=False, rtol=1e-11, atol=1e-14))
    got = rep.final_state.as_array()
    scale = Scaling(s, d).vec
    assert rep.t_final == pytest.approx(t, rel=1e-12)
    assert np.max(np.abs((got - expect) / scale)) < 1e-8


def test_zero_drive_settles_to_origin(rng):
    s = device(**FAST)
    d0 = drive(0.0, 0.0)
    ref = drive(0.05 * NW, 0.01 * NW)
    y0 = _random_state(rng, s, ref)
    rep = integrate(s, d0, TrajectoryState.from_array(y0), 2e-4)
    assert rep.settled
    assert max(rep.final_state.photons) < 1e-6 * max(TrajectoryState.from_array(y0).photons)


def test_settled_state_is_a_fixed_point(bistable):
    s, d, rs = bistable
    y = TrajectoryState.from_solution(s, d, rs[0]).as_array() * 1.01
    rep = integrate(s, d, TrajectoryState.from_array(y), 2e-4, roots=rs)
    assert rep.settled
    assert rep.settle_time is not None and rep.settle_time <= rep.t_final
    sc = Scaling(s, d)
    assert np.max(np.abs(rhs(s, d, rep.final_state) / (sc.vec * sc.w))) < 1e-7
    assert np.max(np.abs(residual_exact(s, d, *rep.final_state.amplitudes, scaled=True))) < 1e-7
    assert rep.nearest_fixed_point[0] == 0


def test_stable_point_returns_after_small_kick(bistable, rng):
    s, d, rs = bistable
    for k in (0, 2):
        y = TrajectoryState.from_solution(s, d, rs[k]).as_array()
        y = y * (1 + 1e-6 * rng.standard_normal(8))
        rep = integrate(s, d, TrajectoryState.from_array(y), 2e-4, roots=rs)
        assert rep.settled
        idx, dist = rep.nearest_fixed_point
        assert idx == k and dist < 1e-6


def test_unstable_middle_root_runs_to_an_outer_root(bistable, rng):
    s, d, rs = bistable
    ends = set()
    for _ in range(4):
        y = TrajectoryState.from_solution(s, d, rs[1]).as_array()
        y = y * (1 + 1e-6 * rng.standard_normal(8))
        rep = integrate(s, d, TrajectoryState.from_array(y), 1e-3, roots=rs)
        assert rep.settled
        idx, dist = rep.nearest_fixed_point
        assert idx in (0, 2) and dist < 1e-6
        ends.add(idx)
    assert ends  # which outer root is reached depends on the kick direction


def test_halving_tolerance_changes_settled_state_little(bistable):
    s, d, rs = bistable
    y = TrajectoryState.from_solution(s, d, rs[2]).as_array() * 0.98
    a = integrate(s, d, TrajectoryState.from_array(y), 2e-4)
    b = integrate(s, d, TrajectoryState.from_array(y), 2e-4, Controls(rtol=5e-9, atol=5e-13))
    assert a.settled and b.settled
    for na, nb in zip(a.final_state.photons, b.final_state.photons):
        assert abs(na - nb) / na < 1e-6


def test_step_underflow_raises_stiffness_error(bistable):
    s, d, rs = bistable
    y = TrajectoryState.from_solution(s, d, rs[0])
    with pytest.raises(StiffnessError):
        integrate(s, d, y, 1e-6, Controls(stop_on_settle=False, rtol=1e-18, atol=1e-30))


def test_integrate_rejects_bad_horizon(bistable):
    s, d, rs = bistable
    with pytest.raises(ParameterError):
        integrate(s, d, TrajectoryState.from_solution(s, d, rs[0]), 0.0)


def test_state_must_be_finite():
    with pytest.raises(ParameterError):
        TrajectoryState(0.0, math.nan, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def test_state_photons_from_quadratures():
    st = TrajectoryState(3.0, 4.0, 1.0, -2.0, 0.0, 0.0, 0.0, 0.0)
    assert st.photons == (25.0, 5.0)
    assert TrajectoryState.from_array(st.as_array()) == st


def test_constant_schedule_has_no_jumps(bistable):
    s, d, rs = bistable
    init = TrajectoryState.from_solution(s, d, rs[0])
    tr = ramp_drive(s, d, d.p_pu, d.p_pu, 2e-5, init, n_samples=201)
    assert ramp_jumps(tr.powers, tr.photons[:, 0]) == []
    assert np.allclose(tr.photons[:, 0], rs[0].n[0], rtol=1e-6)


def test_ramp_validation(bistable):
    s, d, rs = bistable
    init = TrajectoryState.from_solution(s, d, rs[0])
    with pytest.raises(ParameterError):
        ramp_drive(s, d, 0.0, 1e-10, 0.0, init)
    with pytest.raises(ParameterError):
        ramp_drive(s, d, -1.0, 1e-10, 1e-6, init)


def test_ramp_jumps_on_synthetic_step():
    p = np.linspace(0.0, 1.0, 101)
    y = np.where(p < 0.505, 10.0, 1e4)
    assert ramp_jumps(p, y) == [pytest.approx(0.5)]
    assert ramp_jumps(p, np.full(101, 3.0)) == []


def test_perturbation_test_agrees_with_verdicts(bistable):
    s, d, rs = bistable
    rng = np.random.default_rng(7)
    for sol in rs:
        out = perturbation_test(s, d, sol, rng=rng)
        assert out.escaped == (sol.stability is Stability.UNSTABLE)
        assert (out.rate > 0) == out.escaped


def test_scaling_round_trip(rng):
    s, d = device(), drive(0.05 * NW, 0.01 * NW)
    sc = Scaling(s, d)
    y = rng.standard_normal(8)
    assert np.allclose(sc.from_scaled(sc.to_scaled(y)), y, rtol=1e-15)
    assert sc.w == hz(2e9)
