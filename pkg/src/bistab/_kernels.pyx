# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince kernel for the scaled mean-field dynamics.

Mirrors ``_kernels_py`` line for line; see that module for the parameter
layout and return convention.
"""

import numpy as np

from libc.math cimport fabs, sqrt, isfinite, pow

NPARAM = 23

cdef enum:
    S_DONE = 0
    S_SETTLED = 1
    S_MAX_STEPS = 2
    S_STIFF = 3
    S_NONFINITE = 4

STATUS_DONE = S_DONE
STATUS_SETTLED = S_SETTLED
STATUS_MAX_STEPS = S_MAX_STEPS
STATUS_STIFF = S_STIFF
STATUS_NONFINITE = S_NONFINITE

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40


cdef inline double _power(const double* p, double t) noexcept nogil:
    cdef double tr = p[21], s
    if tr <= 0.0:
        return p[19]
    s = (t - p[22]) / tr
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return p[19] + (p[20] - p[19]) * s


cdef void _rhs(const double* y, const double* p, double t, double* out) noexcept nogil:
    cdef double pw = _power(p, t)
    cdef double r1 = p[17] * sqrt(pw if pw > 0.0 else 0.0)
    cdef double d1 = p[3] - p[5] * y[4] - p[6] * y[6]
    cdef double d2 = p[4] - p[7] * y[4] - p[8] * y[6]
    cdef double n1 = y[0] * y[0] + y[1] * y[1]
    cdef double n2 = y[2] * y[2] + y[3] * y[3]
    out[0] = -p[0] * y[0] + d1 * y[1] - p[2] * y[3] + r1
    out[1] = -p[0] * y[1] - d1 * y[0] + p[2] * y[2]
    out[2] = -p[1] * y[2] + d2 * y[3] - p[2] * y[1] + p[18]
    out[3] = -p[1] * y[3] - d2 * y[2] + p[2] * y[0]
    out[4] = y[5]
    out[5] = -p[9] * y[5] - p[11] * y[4] + p[13] * n1 + p[14] * n2
    out[6] = y[7]
    out[7] = -p[10] * y[7] - p[12] * y[6] + p[15] * n1 + p[16] * n2


def power_at(double[::1] p, double t):
    return _power(&p[0], t)


def rhs_scaled(y, double[::1] p, double t):
    """Scaled time derivatives, state order (u1, v1, u2, v2, X1, V1, X2, V2)."""
    cdef double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef double out[8]
    _rhs(&yy[0], &p[0], t, out)
    return [out[i] for i in range(8)]


def dopri5(y0, double t0, double t_end, double[::1] p, double rtol, double atol, double h0,
           double settle_tol, double settle_window, bint stop_on_settle, sample_times, long max_steps):
    cdef double[::1] st = np.ascontiguousarray(sample_times, dtype=np.float64)
    cdef Py_ssize_t ns = st.shape[0]
    samples_arr = np.zeros((ns, 8))
    cdef double[:, ::1] samples = samples_arr
    cdef double y[8]
    cdef double yt[8]
    cdef double yn[8]
    cdef double k1[8]
    cdef double k2[8]
    cdef double k3[8]
    cdef double k4[8]
    cdef double k5[8]
    cdef double k6[8]
    cdef double k7[8]
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)
    cdef int i
    cdef Py_ssize_t si = 0
    cdef double t = t0, h = h0, hs, tn, target, err, e, sc, fac, fn, quiet = -1.0
    cdef double hmin = 1e-14 * max(fabs(t0), fabs(t_end), 1.0)
    cdef long steps = 0
    cdef int status = S_DONE
    cdef bint hit
    cdef const double* pp = &p[0]

    for i in range(8):
        y[i] = y0v[i]
    while si < ns and st[si] <= t:
        for i in range(8):
            samples[si, i] = y[i]
        si += 1
    with nogil:
        _rhs(y, pp, t, k1)
        while t < t_end:
            if steps >= max_steps:
                status = S_MAX_STEPS
                break
            target = t_end if si >= ns else min(t_end, st[si])
            hit = t + h >= target
            hs = target - t if hit else h
            for i in range(8):
                yt[i] = y[i] + hs * A21 * k1[i]
            _rhs(yt, pp, t + C2 * hs, k2)
            for i in range(8):
                yt[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i])
            _rhs(yt, pp, t + C3 * hs, k3)
            for i in range(8):
                yt[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            _rhs(yt, pp, t + C4 * hs, k4)
            for i in range(8):
                yt[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            _rhs(yt, pp, t + C5 * hs, k5)
            for i in range(8):
                yt[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            _rhs(yt, pp, t + hs, k6)
            for i in range(8):
                yn[i] = y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            tn = target if hit else t + hs
            _rhs(yn, pp, tn, k7)
            err = 0.0
            for i in range(8):
                e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                sc = atol + rtol * max(fabs(y[i]), fabs(yn[i]))
                err += (e / sc) * (e / sc)
            err = sqrt(err / 8)
            if not isfinite(err):
                if hs < hmin:
                    status = S_NONFINITE
                    break
                h = 0.1 * hs
                continue
            if err <= 1.0:
                t = tn
                for i in range(8):
                    y[i] = yn[i]
                    k1[i] = k7[i]
                steps += 1
                if hit and si < ns and t >= st[si]:
                    while si < ns and st[si] <= t:
                        for i in range(8):
                            samples[si, i] = y[i]
                        si += 1
                fn = 0.0
                for i in range(8):
                    fn = max(fn, fabs(k7[i]))
                if fn < settle_tol:
                    if quiet < 0.0:
                        quiet = t
                    elif stop_on_settle and t - quiet >= settle_window:
                        status = S_SETTLED
                        break
                else:
                    quiet = -1.0
                fac = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * pow(err, -0.2)))
                h = max(h, hs * fac) if hit else hs * fac
            else:
                h = hs * max(0.2, 0.9 * pow(err, -0.2))
            if h < hmin:
                status = S_STIFF
                break
    return np.array([y[i] for i in range(8)]), t, status, steps, quiet, samples_arr, si
