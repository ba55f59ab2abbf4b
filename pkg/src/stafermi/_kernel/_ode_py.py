"""Pure-Python integration kernel (fallback backend).

Dormand-Prince 5(4) with dense output, specialized to the 7-component
scaling state y = (b_x, b_y, b_z, v_x, v_y, v_z, C_Q).  Regime 0 is the
uncoupled noninteracting gas; regime 1 is the coupled unitary gas, which
becomes the viscous gas when kv or crate are nonzero (with both exactly
zero the extra terms are exact IEEE no-ops, so "unitary" and "inviscid
viscous" coincide bitwise).

The compiled backend in _ode_cy.pyx mirrors this file statement for
statement: same operation order, same libm calls, no contracted
multiply-adds there (built with -ffp-contract=off), so both backends
produce bit-identical trajectories.  Any change here must be replicated
there, preserving associativity.

Failures are reported as status codes, not exceptions, to keep the two
backends' control flow identical; the engine turns them into errors.
"""

from __future__ import annotations

import math

OK = 0
COLLAPSE = 1
UNDERFLOW = 2

_EPS = 2.220446049250313e-16
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_B_GUARD = 1e-12
_TWO_THIRDS = 2.0 / 3.0
_MAX_ATTEMPTS = 10000000

# Dormand-Prince 5(4) tableau
_C2 = 0.2
_C3 = 0.3
_C4 = 0.8
_C5 = 8.0 / 9.0
_A21 = 0.2
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0
_B1 = 35.0 / 384.0
_B3 = 500.0 / 1113.0
_B4 = 125.0 / 192.0
_B5 = -2187.0 / 6784.0
_B6 = 11.0 / 84.0
# error coefficients: 5th-order minus embedded 4th-order weights
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0
# dense-output polynomial (Shampine's interpolant for this pair)
_P11 = 1.0
_P12 = -8048581381.0 / 2820520608.0
_P13 = 8663915743.0 / 2820520608.0
_P14 = -12715105075.0 / 11282082432.0
_P31 = 0.0
_P32 = 131558114200.0 / 32700410799.0
_P33 = -68118460800.0 / 10900136933.0
_P34 = 87487479700.0 / 32700410799.0
_P41 = 0.0
_P42 = -1754552775.0 / 470086768.0
_P43 = 14199869525.0 / 1410260304.0
_P44 = -10690763975.0 / 1880347072.0
_P51 = 0.0
_P52 = 127303824393.0 / 49829197408.0
_P53 = -318862633887.0 / 49829197408.0
_P54 = 701980252875.0 / 199316789632.0
_P61 = 0.0
_P62 = -282668133.0 / 205662961.0
_P63 = 2019193451.0 / 616988883.0
_P64 = -1453857185.0 / 822651844.0
_P71 = 0.0
_P72 = 40617522.0 / 29380423.0
_P73 = -110615467.0 / 29380423.0
_P74 = 69997945.0 / 29380423.0


def integrate(regime, y0, t0, t1, prog_kind, const, tg0, tg1, vals, ders,
              w0sq, kv, crate, rtol, atol, max_step, collapse_eps,
              out_times, out_y):
    """Integrate from t0 to t1, filling out_y at the sorted out_times.

    Returns (status, t_reached, y_final_tuple, naccept, nreject, nfev).
    """
    c0 = float(const[0])
    c1 = float(const[1])
    c2 = float(const[2])
    tg0 = float(tg0)
    w0x = float(w0sq[0])
    w0y = float(w0sq[1])
    w0z = float(w0sq[2])
    kvx = float(kv[0])
    kvy = float(kv[1])
    kvz = float(kv[2])
    crate = float(crate)
    nt = vals.shape[1]
    if prog_kind == 1:
        v0 = vals[0].tolist()
        v1 = vals[1].tolist()
        v2 = vals[2].tolist()
        e0 = ders[0].tolist()
        e1 = ders[1].tolist()
        e2 = ders[2].tolist()
        hstep = (float(tg1) - tg0) / (nt - 1)
    else:
        v0 = v1 = v2 = e0 = e1 = e2 = None
        hstep = 1.0
    nseg = nt - 2

    def drive(t):
        if prog_kind == 0:
            return c0, c1, c2
        u = (t - tg0) / hstep
        i = int(u)
        if i < 0:
            i = 0
        elif i > nseg:
            i = nseg
        th = u - i
        if th < 0.0:
            th = 0.0
        elif th > 1.0:
            th = 1.0
        th2 = th * th
        th3 = th2 * th
        h00 = 2.0 * th3 - 3.0 * th2 + 1.0
        h10 = th3 - 2.0 * th2 + th
        h01 = -2.0 * th3 + 3.0 * th2
        h11 = th3 - th2
        ip = i + 1
        d0 = h00 * v0[i] + h10 * (e0[i] * hstep) + h01 * v0[ip] + h11 * (e0[ip] * hstep)
        d1 = h00 * v1[i] + h10 * (e1[i] * hstep) + h01 * v1[ip] + h11 * (e1[ip] * hstep)
        d2 = h00 * v2[i] + h10 * (e2[i] * hstep) + h01 * v2[ip] + h11 * (e2[ip] * hstep)
        return d0, d1, d2

    def rhs(t, y, f):
        d0, d1, d2 = drive(t)
        bx = y[0]
        by = y[1]
        bz = y[2]
        if bx < _B_GUARD:
            bx = _B_GUARD
        if by < _B_GUARD:
            by = _B_GUARD
        if bz < _B_GUARD:
            bz = _B_GUARD
        vx = y[3]
        vy = y[4]
        vz = y[5]
        f[0] = vx
        f[1] = vy
        f[2] = vz
        if regime == 0:
            f[3] = w0x / ((bx * bx) * bx) - d0 * bx
            f[4] = w0y / ((by * by) * by) - d1 * by
            f[5] = w0z / ((bz * bz) * bz) - d2 * bz
            f[6] = 0.0
        else:
            g = (bx * by) * bz
            g23 = math.pow(g, _TWO_THIRDS)
            rx = vx / bx
            ry = vy / by
            rz = vz / bz
            tr = ((rx + ry) + rz) * _TWO_THIRDS
            sx = 2.0 * rx - tr
            sy = 2.0 * ry - tr
            sz = 2.0 * rz - tr
            onecq = 1.0 + y[6]
            f[3] = (w0x * onecq / g23 - kvx * sx) / bx - d0 * bx
            f[4] = (w0y * onecq / g23 - kvy * sy) / by - d1 * by
            f[5] = (w0z * onecq / g23 - kvz * sz) / bz - d2 * bz
            f[6] = crate * g23 * ((sx * sx + sy * sy) + sz * sz)

    t0 = float(t0)
    t1 = float(t1)
    y = [float(y0[d]) for d in range(7)]
    m = out_times.shape[0]
    tt = out_times.tolist()
    out_pos = 0
    while out_pos < m and tt[out_pos] <= t0:
        for d in range(7):
            out_y[out_pos, d] = y[d]
        out_pos += 1
    if t1 <= t0:
        return OK, t0, tuple(y), 0, 0, 0

    k1 = [0.0] * 7
    k2 = [0.0] * 7
    k3 = [0.0] * 7
    k4 = [0.0] * 7
    k5 = [0.0] * 7
    k6 = [0.0] * 7
    k7 = [0.0] * 7
    yt = [0.0] * 7
    ynew = [0.0] * 7

    rhs(t0, y, k1)
    nfev = 1

    # initial step size (Hairer's heuristic, same norm as the controller)
    span = t1 - t0
    acc0 = 0.0
    acc1 = 0.0
    for d in range(7):
        sc = atol + rtol * abs(y[d])
        q0 = y[d] / sc
        q1 = k1[d] / sc
        acc0 += q0 * q0
        acc1 += q1 * q1
    d0n = math.sqrt(acc0 / 7.0)
    d1n = math.sqrt(acc1 / 7.0)
    if d0n < 1e-5 or d1n < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * (d0n / d1n)
    if h0 > span:
        h0 = span
    for d in range(7):
        yt[d] = y[d] + h0 * k1[d]
    rhs(t0 + h0, yt, k2)
    nfev += 1
    acc2 = 0.0
    for d in range(7):
        sc = atol + rtol * abs(y[d])
        q2 = (k2[d] - k1[d]) / sc
        acc2 += q2 * q2
    d2n = math.sqrt(acc2 / 7.0) / h0
    if d1n <= 1e-15 and d2n <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        dm = d1n if d1n > d2n else d2n
        h1 = math.pow(0.01 / dm, 0.2)
    h_abs = 100.0 * h0
    if h1 < h_abs:
        h_abs = h1
    if max_step < h_abs:
        h_abs = max_step
    if span < h_abs:
        h_abs = span

    t = t0
    status = OK
    naccept = 0
    nreject = 0
    rejected = False
    attempts = 0

    while t < t1:
        at = -t if t < 0.0 else t
        ulp = math.nextafter(at, math.inf) - at
        min_step = 10.0 * ulp
        if h_abs < min_step:
            status = UNDERFLOW
            break
        attempts += 1
        if attempts > _MAX_ATTEMPTS:
            status = UNDERFLOW
            break
        h = h_abs
        if h > max_step:
            h = max_step
        final = False
        rem = t1 - t
        if h >= rem:
            h = rem
            final = True

        for d in range(7):
            yt[d] = y[d] + h * (_A21 * k1[d])
        rhs(t + _C2 * h, yt, k2)
        for d in range(7):
            yt[d] = y[d] + h * (_A31 * k1[d] + _A32 * k2[d])
        rhs(t + _C3 * h, yt, k3)
        for d in range(7):
            yt[d] = y[d] + h * (_A41 * k1[d] + _A42 * k2[d] + _A43 * k3[d])
        rhs(t + _C4 * h, yt, k4)
        for d in range(7):
            yt[d] = y[d] + h * (_A51 * k1[d] + _A52 * k2[d] + _A53 * k3[d]
                                + _A54 * k4[d])
        rhs(t + _C5 * h, yt, k5)
        for d in range(7):
            yt[d] = y[d] + h * (_A61 * k1[d] + _A62 * k2[d] + _A63 * k3[d]
                                + _A64 * k4[d] + _A65 * k5[d])
        rhs(t + h, yt, k6)
        for d in range(7):
            ynew[d] = y[d] + h * (_B1 * k1[d] + _B3 * k3[d] + _B4 * k4[d]
                                  + _B5 * k5[d] + _B6 * k6[d])
        t_new = t1 if final else t + h
        rhs(t_new, ynew, k7)
        nfev += 6

        acc = 0.0
        for d in range(7):
            e = h * (_E1 * k1[d] + _E3 * k3[d] + _E4 * k4[d] + _E5 * k5[d]
                     + _E6 * k6[d] + _E7 * k7[d])
            ay0 = -y[d] if y[d] < 0.0 else y[d]
            ay1 = -ynew[d] if ynew[d] < 0.0 else ynew[d]
            am = ay0 if ay0 > ay1 else ay1
            sc = atol + rtol * am
            q = e / sc
            acc += q * q
        err = math.sqrt(acc / 7.0)

        if err < 1.0:
            # dense output for every grid time inside (t, t_new]
            while out_pos < m and tt[out_pos] <= t_new:
                tg = tt[out_pos]
                if tg == t_new:
                    for d in range(7):
                        out_y[out_pos, d] = ynew[d]
                else:
                    th = (tg - t) / h
                    for d in range(7):
                        q1 = (k1[d] * _P11 + k3[d] * _P31 + k4[d] * _P41
                              + k5[d] * _P51 + k6[d] * _P61 + k7[d] * _P71)
                        q2 = (k1[d] * _P12 + k3[d] * _P32 + k4[d] * _P42
                              + k5[d] * _P52 + k6[d] * _P62 + k7[d] * _P72)
                        q3 = (k1[d] * _P13 + k3[d] * _P33 + k4[d] * _P43
                              + k5[d] * _P53 + k6[d] * _P63 + k7[d] * _P73)
                        q4 = (k1[d] * _P14 + k3[d] * _P34 + k4[d] * _P44
                              + k5[d] * _P54 + k6[d] * _P64 + k7[d] * _P74)
                        out_y[out_pos, d] = y[d] + h * th * (
                            q1 + th * (q2 + th * (q3 + th * q4)))
                out_pos += 1

            t = t_new
            for d in range(7):
                y[d] = ynew[d]
                k1[d] = k7[d]
            naccept += 1

            if y[0] <= collapse_eps or y[1] <= collapse_eps or y[2] <= collapse_eps:
                status = COLLAPSE
                break

            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * math.pow(err, -0.2)
                if factor > _MAX_FACTOR:
                    factor = _MAX_FACTOR
            if rejected and factor > 1.0:
                factor = 1.0
            h_abs = h * factor
            rejected = False
        else:
            factor = _SAFETY * math.pow(err, -0.2)
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h_abs = h * factor
            nreject += 1
            rejected = True

    return status, t, (y[0], y[1], y[2], y[3], y[4], y[5], y[6]), \
        naccept, nreject, nfev
