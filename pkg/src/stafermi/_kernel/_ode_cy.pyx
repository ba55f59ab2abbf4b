# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernel (preferred backend).

Statement-for-statement mirror of _ode_py.py: same Dormand-Prince 5(4)
tableau, same operation order and associativity, libm pow/sqrt/nextafter
in place of the math module, and no contracted multiply-adds (the build
passes -ffp-contract=off).  Both backends therefore produce bit-identical
trajectories; keep every expression in sync with the Python file.
"""

from libc.math cimport INFINITY, fabs, pow, sqrt, nextafter

OK = 0
COLLAPSE = 1
UNDERFLOW = 2

cdef double _SAFETY = 0.9
cdef double _MIN_FACTOR = 0.2
cdef double _MAX_FACTOR = 10.0
cdef double _B_GUARD = 1e-12
cdef double _TWO_THIRDS = 2.0 / 3.0
cdef long _MAX_ATTEMPTS = 10000000

# Dormand-Prince 5(4) tableau
cdef double _C2 = 0.2
cdef double _C3 = 0.3
cdef double _C4 = 0.8
cdef double _C5 = 8.0 / 9.0
cdef double _A21 = 0.2
cdef double _A31 = 3.0 / 40.0
cdef double _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0
cdef double _A42 = -56.0 / 15.0
cdef double _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0
cdef double _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0
cdef double _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0
cdef double _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0
cdef double _B3 = 500.0 / 1113.0
cdef double _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0
cdef double _B6 = 11.0 / 84.0
# error coefficients: 5th-order minus embedded 4th-order weights
cdef double _E1 = 71.0 / 57600.0
cdef double _E3 = -71.0 / 16695.0
cdef double _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0
cdef double _E6 = 22.0 / 525.0
cdef double _E7 = -1.0 / 40.0
# dense-output polynomial (Shampine's interpolant for this pair)
cdef double _P11 = 1.0
cdef double _P12 = -8048581381.0 / 2820520608.0
cdef double _P13 = 8663915743.0 / 2820520608.0
cdef double _P14 = -12715105075.0 / 11282082432.0
cdef double _P31 = 0.0
cdef double _P32 = 131558114200.0 / 32700410799.0
cdef double _P33 = -68118460800.0 / 10900136933.0
cdef double _P34 = 87487479700.0 / 32700410799.0
cdef double _P41 = 0.0
cdef double _P42 = -1754552775.0 / 470086768.0
cdef double _P43 = 14199869525.0 / 1410260304.0
cdef double _P44 = -10690763975.0 / 1880347072.0
cdef double _P51 = 0.0
cdef double _P52 = 127303824393.0 / 49829197408.0
cdef double _P53 = -318862633887.0 / 49829197408.0
cdef double _P54 = 701980252875.0 / 199316789632.0
cdef double _P61 = 0.0
cdef double _P62 = -282668133.0 / 205662961.0
cdef double _P63 = 2019193451.0 / 616988883.0
cdef double _P64 = -1453857185.0 / 822651844.0
cdef double _P71 = 0.0
cdef double _P72 = 40617522.0 / 29380423.0
cdef double _P73 = -110615467.0 / 29380423.0
cdef double _P74 = 69997945.0 / 29380423.0


cdef inline void _drive(long prog_kind, double c0, double c1, double c2,
                        double tg0, double hstep, long nseg,
                        const double[:, ::1] vals, const double[:, ::1] ders,
                        double t, double* out) noexcept nogil:
    cdef double u, th, th2, th3, h00, h10, h01, h11
    cdef long i, ip
    if prog_kind == 0:
        out[0] = c0
        out[1] = c1
        out[2] = c2
        return
    u = (t - tg0) / hstep
    i = <long> u
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
    out[0] = h00 * vals[0, i] + h10 * (ders[0, i] * hstep) \
        + h01 * vals[0, ip] + h11 * (ders[0, ip] * hstep)
    out[1] = h00 * vals[1, i] + h10 * (ders[1, i] * hstep) \
        + h01 * vals[1, ip] + h11 * (ders[1, ip] * hstep)
    out[2] = h00 * vals[2, i] + h10 * (ders[2, i] * hstep) \
        + h01 * vals[2, ip] + h11 * (ders[2, ip] * hstep)


cdef inline void _rhs(long regime, long prog_kind, double c0, double c1,
                      double c2, double tg0, double hstep, long nseg,
                      const double[:, ::1] vals, const double[:, ::1] ders,
                      double w0x, double w0y, double w0z,
                      double kvx, double kvy, double kvz, double crate,
                      double t, const double* y, double* f) noexcept nogil:
    cdef double d[3]
    cdef double bx, by, bz, vx, vy, vz
    cdef double g, g23, rx, ry, rz, tr, sx, sy, sz, onecq
    _drive(prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders, t, d)
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
        f[3] = w0x / ((bx * bx) * bx) - d[0] * bx
        f[4] = w0y / ((by * by) * by) - d[1] * by
        f[5] = w0z / ((bz * bz) * bz) - d[2] * bz
        f[6] = 0.0
    else:
        g = (bx * by) * bz
        g23 = pow(g, _TWO_THIRDS)
        rx = vx / bx
        ry = vy / by
        rz = vz / bz
        tr = ((rx + ry) + rz) * _TWO_THIRDS
        sx = 2.0 * rx - tr
        sy = 2.0 * ry - tr
        sz = 2.0 * rz - tr
        onecq = 1.0 + y[6]
        f[3] = (w0x * onecq / g23 - kvx * sx) / bx - d[0] * bx
        f[4] = (w0y * onecq / g23 - kvy * sy) / by - d[1] * by
        f[5] = (w0z * onecq / g23 - kvz * sz) / bz - d[2] * bz
        f[6] = crate * g23 * ((sx * sx + sy * sy) + sz * sz)


def integrate(long regime, const double[::1] y0, double t0, double t1,
              long prog_kind, const double[::1] const_vals, double tg0,
              double tg1, const double[:, ::1] vals,
              const double[:, ::1] ders, const double[::1] w0sq,
              const double[::1] kv, double crate, double rtol, double atol,
              double max_step, double collapse_eps,
              const double[::1] out_times, double[:, ::1] out_y):
    """Integrate from t0 to t1, filling out_y at the sorted out_times.

    Returns (status, t_reached, y_final_tuple, naccept, nreject, nfev).
    """
    cdef double c0 = const_vals[0]
    cdef double c1 = const_vals[1]
    cdef double c2 = const_vals[2]
    cdef double w0x = w0sq[0]
    cdef double w0y = w0sq[1]
    cdef double w0z = w0sq[2]
    cdef double kvx = kv[0]
    cdef double kvy = kv[1]
    cdef double kvz = kv[2]
    cdef long nt = vals.shape[1]
    cdef double hstep
    if prog_kind == 1:
        hstep = (tg1 - tg0) / (nt - 1)
    else:
        hstep = 1.0
    cdef long nseg = nt - 2

    cdef double y[7]
    cdef double k1[7]
    cdef double k2[7]
    cdef double k3[7]
    cdef double k4[7]
    cdef double k5[7]
    cdef double k6[7]
    cdef double k7[7]
    cdef double yt[7]
    cdef double ynew[7]
    cdef long d
    for d in range(7):
        y[d] = y0[d]

    cdef long m = out_times.shape[0]
    cdef long out_pos = 0
    while out_pos < m and out_times[out_pos] <= t0:
        for d in range(7):
            out_y[out_pos, d] = y[d]
        out_pos += 1
    if t1 <= t0:
        return OK, t0, (y[0], y[1], y[2], y[3], y[4], y[5], y[6]), 0, 0, 0

    _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
         w0x, w0y, w0z, kvx, kvy, kvz, crate, t0, y, k1)
    cdef long nfev = 1

    # initial step size (Hairer's heuristic, same norm as the controller)
    cdef double span = t1 - t0
    cdef double acc0 = 0.0
    cdef double acc1 = 0.0
    cdef double sc, q0, q1
    for d in range(7):
        sc = atol + rtol * fabs(y[d])
        q0 = y[d] / sc
        q1 = k1[d] / sc
        acc0 += q0 * q0
        acc1 += q1 * q1
    cdef double d0n = sqrt(acc0 / 7.0)
    cdef double d1n = sqrt(acc1 / 7.0)
    cdef double h0
    if d0n < 1e-5 or d1n < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * (d0n / d1n)
    if h0 > span:
        h0 = span
    for d in range(7):
        yt[d] = y[d] + h0 * k1[d]
    _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
         w0x, w0y, w0z, kvx, kvy, kvz, crate, t0 + h0, yt, k2)
    nfev += 1
    cdef double acc2 = 0.0
    cdef double q2
    for d in range(7):
        sc = atol + rtol * fabs(y[d])
        q2 = (k2[d] - k1[d]) / sc
        acc2 += q2 * q2
    cdef double d2n = sqrt(acc2 / 7.0) / h0
    cdef double h1, dm
    if d1n <= 1e-15 and d2n <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        dm = d1n if d1n > d2n else d2n
        h1 = pow(0.01 / dm, 0.2)
    cdef double h_abs = 100.0 * h0
    if h1 < h_abs:
        h_abs = h1
    if max_step < h_abs:
        h_abs = max_step
    if span < h_abs:
        h_abs = span

    cdef double t = t0
    cdef long status = OK
    cdef long naccept = 0
    cdef long nreject = 0
    cdef bint rejected = False
    cdef long attempts = 0
    cdef bint final
    cdef double at, ulp, min_step, h, rem, t_new
    cdef double acc, e, ay0, ay1, am, q, err, factor
    cdef double tg, th, dq1, dq2, dq3, dq4

    while t < t1:
        at = -t if t < 0.0 else t
        ulp = nextafter(at, INFINITY) - at
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
        _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
             w0x, w0y, w0z, kvx, kvy, kvz, crate, t + _C2 * h, yt, k2)
        for d in range(7):
            yt[d] = y[d] + h * (_A31 * k1[d] + _A32 * k2[d])
        _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
             w0x, w0y, w0z, kvx, kvy, kvz, crate, t + _C3 * h, yt, k3)
        for d in range(7):
            yt[d] = y[d] + h * (_A41 * k1[d] + _A42 * k2[d] + _A43 * k3[d])
        _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
             w0x, w0y, w0z, kvx, kvy, kvz, crate, t + _C4 * h, yt, k4)
        for d in range(7):
            yt[d] = y[d] + h * (_A51 * k1[d] + _A52 * k2[d] + _A53 * k3[d]
                                + _A54 * k4[d])
        _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
             w0x, w0y, w0z, kvx, kvy, kvz, crate, t + _C5 * h, yt, k5)
        for d in range(7):
            yt[d] = y[d] + h * (_A61 * k1[d] + _A62 * k2[d] + _A63 * k3[d]
                                + _A64 * k4[d] + _A65 * k5[d])
        _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
             w0x, w0y, w0z, kvx, kvy, kvz, crate, t + h, yt, k6)
        for d in range(7):
            ynew[d] = y[d] + h * (_B1 * k1[d] + _B3 * k3[d] + _B4 * k4[d]
                                  + _B5 * k5[d] + _B6 * k6[d])
        t_new = t1 if final else t + h
        _rhs(regime, prog_kind, c0, c1, c2, tg0, hstep, nseg, vals, ders,
             w0x, w0y, w0z, kvx, kvy, kvz, crate, t_new, ynew, k7)
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
        err = sqrt(acc / 7.0)

        if err < 1.0:
            # dense output for every grid time inside (t, t_new]
            while out_pos < m and out_times[out_pos] <= t_new:
                tg = out_times[out_pos]
                if tg == t_new:
                    for d in range(7):
                        out_y[out_pos, d] = ynew[d]
                else:
                    th = (tg - t) / h
                    for d in range(7):
                        dq1 = (k1[d] * _P11 + k3[d] * _P31 + k4[d] * _P41
                               + k5[d] * _P51 + k6[d] * _P61 + k7[d] * _P71)
                        dq2 = (k1[d] * _P12 + k3[d] * _P32 + k4[d] * _P42
                               + k5[d] * _P52 + k6[d] * _P62 + k7[d] * _P72)
                        dq3 = (k1[d] * _P13 + k3[d] * _P33 + k4[d] * _P43
                               + k5[d] * _P53 + k6[d] * _P63 + k7[d] * _P73)
                        dq4 = (k1[d] * _P14 + k3[d] * _P34 + k4[d] * _P44
                               + k5[d] * _P54 + k6[d] * _P64 + k7[d] * _P74)
                        out_y[out_pos, d] = y[d] + h * th * (
                            dq1 + th * (dq2 + th * (dq3 + th * dq4)))
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
                factor = _SAFETY * pow(err, -0.2)
                if factor > _MAX_FACTOR:
                    factor = _MAX_FACTOR
            if rejected and factor > 1.0:
                factor = 1.0
            h_abs = h * factor
            rejected = False
        else:
            factor = _SAFETY * pow(err, -0.2)
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h_abs = h * factor
            nreject += 1
            rejected = True

    return status, t, (y[0], y[1], y[2], y[3], y[4], y[5], y[6]), \
        naccept, nreject, nfev
