"""Pure-Python twin of the compiled integration kernel.

Same signatures and results as ``_kernels.pyx`` (up to floating-point
association order); used when the extension is not built.

Parameter vector layout (all in scaled units, time in 1/omega_m1)::

    0 k1   1 k2   2 J   3 D1   4 D2
    5 G11  6 G12  7 G21  8 G22          detuning shift per unit X
    9 gam1 10 gam2 11 W1sq 12 W2sq      damping, squared frequency
    13 F11 14 F21 15 F12 16 F22         radiation-pressure force per photon
    17 C1  18 R2                        drive: r1 = C1*sqrt(P), r2 = R2
    19 P0  20 P1  21 TR  22 T0          linear ramp of P over [T0, T0 + TR]
"""

import math

import numpy as np

NPARAM = 23

STATUS_DONE = 0
STATUS_SETTLED = 1
STATUS_MAX_STEPS = 2
STATUS_STIFF = 3
STATUS_NONFINITE = 4

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40


def power_at(p, t):
    tr = p[21]
    if tr <= 0.0:
        return p[19]
    s = (t - p[22]) / tr
    s = 0.0 if s < 0.0 else (1.0 if s > 1.0 else s)
    return p[19] + (p[20] - p[19]) * s


def rhs_scaled(y, p, t):
    """Scaled time derivatives, state order (u1, v1, u2, v2, X1, V1, X2, V2)."""
    u1, v1, u2, v2, x1, w1, x2, w2 = y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]
    pw = power_at(p, t)
    r1 = p[17] * math.sqrt(pw if pw > 0.0 else 0.0)
    d1 = p[3] - p[5] * x1 - p[6] * x2
    d2 = p[4] - p[7] * x1 - p[8] * x2
    n1 = u1 * u1 + v1 * v1
    n2 = u2 * u2 + v2 * v2
    k1, k2, j = p[0], p[1], p[2]
    return [
        -k1 * u1 + d1 * v1 - j * v2 + r1,
        -k1 * v1 - d1 * u1 + j * u2,
        -k2 * u2 + d2 * v2 - j * v1 + p[18],
        -k2 * v2 - d2 * u2 + j * u1,
        w1,
        -p[9] * w1 - p[11] * x1 + p[13] * n1 + p[14] * n2,
        w2,
        -p[10] * w2 - p[12] * x2 + p[15] * n1 + p[16] * n2,
    ]


def dopri5(y0, t0, t_end, p, rtol, atol, h0, settle_tol, settle_window, stop_on_settle, sample_times, max_steps):
    """Adaptive Dormand-Prince integration with settle detection.

    Returns ``(y, t, status, steps, quiet_since, samples, n_samples)`` where
    ``quiet_since`` is the start of the final quiet stretch (-1 if none)
    and ``samples`` holds the state at each requested sample time.
    """
    y = [float(v) for v in y0]
    n = 8
    t = float(t0)
    h = float(h0)
    ns = len(sample_times)
    samples = np.zeros((ns, n))
    si = 0
    while si < ns and sample_times[si] <= t:
        samples[si, :] = y
        si += 1
    k1 = rhs_scaled(y, p, t)
    steps = 0
    quiet = -1.0
    status = STATUS_DONE
    hmin = 1e-14 * max(abs(t0), abs(t_end), 1.0)
    while t < t_end:
        if steps >= max_steps:
            status = STATUS_MAX_STEPS
            break
        target = t_end if si >= ns else min(t_end, sample_times[si])
        hit = t + h >= target
        hs = target - t if hit else h
        yt = [y[i] + hs * _A21 * k1[i] for i in range(n)]
        k2 = rhs_scaled(yt, p, t + _C2 * hs)
        yt = [y[i] + hs * (_A31 * k1[i] + _A32 * k2[i]) for i in range(n)]
        k3 = rhs_scaled(yt, p, t + _C3 * hs)
        yt = [y[i] + hs * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(n)]
        k4 = rhs_scaled(yt, p, t + _C4 * hs)
        yt = [y[i] + hs * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i]) for i in range(n)]
        k5 = rhs_scaled(yt, p, t + _C5 * hs)
        yt = [y[i] + hs * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]) for i in range(n)]
        k6 = rhs_scaled(yt, p, t + hs)
        yn = [y[i] + hs * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]) for i in range(n)]
        tn = target if hit else t + hs
        k7 = rhs_scaled(yn, p, tn)
        err = 0.0
        for i in range(n):
            e = hs * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            err += (e / sc) ** 2
        err = math.sqrt(err / n)
        if not math.isfinite(err):
            if hs < hmin:
                status = STATUS_NONFINITE
                break
            h = 0.1 * hs
            continue
        if err <= 1.0:
            t = tn
            y = yn
            k1 = k7
            steps += 1
            if hit and si < ns and t >= sample_times[si]:
                while si < ns and sample_times[si] <= t:
                    samples[si, :] = y
                    si += 1
            fn = max(abs(v) for v in k7)
            if fn < settle_tol:
                if quiet < 0.0:
                    quiet = t
                elif stop_on_settle and t - quiet >= settle_window:
                    status = STATUS_SETTLED
                    break
            else:
                quiet = -1.0
            fac = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err**-0.2))
            # a step shortened to land on a sample time does not shrink the next one
            h = max(h, hs * fac) if hit else hs * fac
        else:
            h = hs * max(0.2, 0.9 * err**-0.2)
        if h < hmin:
            status = STATUS_STIFF
            break
    return np.array(y), t, status, steps, quiet, samples, si
