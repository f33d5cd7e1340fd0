# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot iteration loops.

Operation-for-operation mirror of snalab._kernels_ref; the equivalence
tests compare the two implementations bitwise, so keep the floating-point
evaluation order in sync (the build also disables FP contraction).
"""

from libc.math cimport atan, cos, fabs, floor, fmod, log, sin, sqrt, tan

cdef double PI = 3.141592653589793

DEF KIND_PWL = 0
DEF KIND_ARCTAN = 1
DEF KIND_SINE = 2

DEF CK_ROT = 0
DEF CK_DIAGROT = 1
DEF CK_CONST = 2
DEF CK_SCHRO = 3


cdef inline double _mod1(double t) nogil:
    cdef double r = fmod(t, 1.0)
    if r < 0.0:
        r += 1.0
    return r


cdef inline double _pwl_chart(double[::1] bp, double[::1] lv, double[::1] sl,
                              double r) nogil:
    cdef Py_ssize_t i = 0, n = bp.shape[0]
    while i + 1 < n and r >= bp[i + 1]:
        i += 1
    return lv[i] + sl[i] * (r - bp[i])


cdef inline double _pwl_deriv(double[::1] bp, double[::1] sl, double r) nogil:
    cdef Py_ssize_t i = 0, n = bp.shape[0]
    while i + 1 < n and r >= bp[i + 1]:
        i += 1
    return sl[i]


cdef inline double _chart(int kind, double p, double[::1] bp, double[::1] lv,
                          double[::1] sl, double r) nogil:
    cdef double v
    if kind == KIND_PWL:
        return _pwl_chart(bp, lv, sl, r)
    if kind == KIND_ARCTAN:
        if r == 0.5:
            return 0.5
        v = atan(tan(PI * r) / (p * p)) / PI
        return v if r < 0.5 else v + 1.0
    return r + p * sin(2.0 * PI * r)


cdef inline double _deriv(int kind, double p, double[::1] bp, double[::1] sl,
                          double r) nogil:
    cdef double K2, t, t2
    if kind == KIND_PWL:
        return _pwl_deriv(bp, sl, r)
    if kind == KIND_ARCTAN:
        K2 = p * p
        t = tan(PI * r)
        if fabs(t) > 1e150:
            return K2
        t2 = t * t
        return (1.0 + t2) * K2 / (K2 * K2 + t2)
    return 1.0 + 2.0 * PI * p * cos(2.0 * PI * r)


cdef inline double _inv_chart(int kind, double p, double[::1] bp, double[::1] lv,
                              double[::1] sl, double z) nogil:
    cdef Py_ssize_t i = 0, n, it
    cdef double v0, zl, v, e, lo, hi, r, fr, d, rn
    if kind == KIND_PWL:
        v0 = lv[0]
        zl = v0 + _mod1(z - v0)
        n = bp.shape[0]
        while i + 1 < n and zl >= lv[i + 1]:
            i += 1
        return bp[i] + (zl - lv[i]) / sl[i]
    if kind == KIND_ARCTAN:
        if z == 0.5:
            return 0.5
        v = atan(p * p * tan(PI * z)) / PI
        return v if z < 0.5 else v + 1.0
    e = fabs(p)
    lo = z - e
    hi = z + e
    r = z
    for it in range(60):
        fr = r + p * sin(2.0 * PI * r) - z
        if fr > 0.0:
            hi = r
        else:
            lo = r
        d = 1.0 + 2.0 * PI * p * cos(2.0 * PI * r)
        rn = r - fr / d
        r = rn if lo < rn < hi else 0.5 * (lo + hi)
        if hi - lo < 1e-16:
            break
    return r


def orbit_reduce(int gk, double gp, long gdeg, double[::1] gbp, double[::1] glv,
                 double[::1] gsl, int fk, double fp, long fdeg, double[::1] fbp,
                 double[::1] flv, double[::1] fsl,
                 double omega, double x0, double y0, long n):
    cdef double x = x0, y = y0, s = 0.0, gv, fv
    cdef long k
    with nogil:
        for k in range(n):
            s += log(_deriv(fk, fp, fbp, fsl, y))
            gv = _chart(gk, gp, gbp, glv, gsl, x)
            fv = _chart(fk, fp, fbp, flv, fsl, y)
            y = _mod1(gv + fv)
            x = _mod1(x + omega)
    return x, y, s


def orbit_fill(int gk, double gp, long gdeg, double[::1] gbp, double[::1] glv,
               double[::1] gsl, int fk, double fp, long fdeg, double[::1] fbp,
               double[::1] flv, double[::1] fsl,
               double omega, double x0, double y0, long n,
               double[::1] xs, double[::1] ys, double[::1] logs):
    cdef double x = x0, y = y0, gv, fv
    cdef long k
    with nogil:
        for k in range(n + 1):
            xs[k] = x
            ys[k] = y
            logs[k] = log(_deriv(fk, fp, fbp, fsl, y))
            if k == n:
                break
            gv = _chart(gk, gp, gbp, glv, gsl, x)
            fv = _chart(fk, fp, fbp, flv, fsl, y)
            y = _mod1(gv + fv)
            x = _mod1(x + omega)
    return x, y


def orbit_hist(int gk, double gp, long gdeg, double[::1] gbp, double[::1] glv,
               double[::1] gsl, int fk, double fp, long fdeg, double[::1] fbp,
               double[::1] flv, double[::1] fsl,
               double omega, double x0, double y0, long n, long[:, ::1] counts):
    cdef double x = x0, y = y0, s = 0.0, gv, fv
    cdef long k, ix, iy
    cdef long nx = counts.shape[0], ny = counts.shape[1]
    with nogil:
        for k in range(n):
            ix = <long>(x * nx)
            iy = <long>(y * ny)
            if ix >= nx:
                ix = nx - 1
            if iy >= ny:
                iy = ny - 1
            counts[ix, iy] += 1
            s += log(_deriv(fk, fp, fbp, fsl, y))
            gv = _chart(gk, gp, gbp, glv, gsl, x)
            fv = _chart(fk, fp, fbp, flv, fsl, y)
            y = _mod1(gv + fv)
            x = _mod1(x + omega)
    return x, y, s


def orbit_back_reduce(int gk, double gp, long gdeg, double[::1] gbp, double[::1] glv,
                      double[::1] gsl, int fk, double fp, long fdeg, double[::1] fbp,
                      double[::1] flv, double[::1] fsl,
                      double omega, double x0, double y0, long n):
    cdef double x = x0, y = y0, s = 0.0, gv, z
    cdef long k
    with nogil:
        for k in range(n):
            x = _mod1(x - omega)
            gv = _chart(gk, gp, gbp, glv, gsl, x)
            z = _mod1(y - gv)
            y = _mod1(_inv_chart(fk, fp, fbp, flv, fsl, z))
            s -= log(_deriv(fk, fp, fbp, fsl, y))
    return x, y, s


def orbit_back_hist(int gk, double gp, long gdeg, double[::1] gbp, double[::1] glv,
                    double[::1] gsl, int fk, double fp, long fdeg, double[::1] fbp,
                    double[::1] flv, double[::1] fsl,
                    double omega, double x0, double y0, long n, long[:, ::1] counts):
    cdef double x = x0, y = y0, gv, z
    cdef long k, ix, iy
    cdef long nx = counts.shape[0], ny = counts.shape[1]
    with nogil:
        for k in range(n):
            ix = <long>(x * nx)
            iy = <long>(y * ny)
            if ix >= nx:
                ix = nx - 1
            if iy >= ny:
                iy = ny - 1
            counts[ix, iy] += 1
            x = _mod1(x - omega)
            gv = _chart(gk, gp, gbp, glv, gsl, x)
            z = _mod1(y - gv)
            y = _mod1(_inv_chart(fk, fp, fbp, flv, fsl, z))
    return x, y


def probe_lift(int gk, double gp, long gdeg, double[::1] gbp, double[::1] glv,
               double[::1] gsl, int fk, double fp, long fdeg, double[::1] fbp,
               double[::1] flv, double[::1] fsl,
               double omega, double x, long m_back, long nsteps, double y0):
    cdef double y = y0, d = 0.0, t, r, ry, gd, fd, gv, fv, nfl, ny
    cdef long k
    with nogil:
        for k in range(nsteps):
            t = x + (k - m_back) * omega
            nfl = floor(t)
            r = t - nfl
            if r >= 1.0:
                nfl += 1.0
                r = 0.0
            gd = _deriv(gk, gp, gbp, gsl, r)
            ny = floor(y)
            ry = y - ny
            if ry >= 1.0:
                ny += 1.0
                ry = 0.0
            fd = _deriv(fk, fp, fbp, fsl, ry)
            d = gd + fd * d
            gv = nfl * gdeg + _chart(gk, gp, gbp, glv, gsl, r)
            fv = ny * fdeg + _chart(fk, fp, fbp, flv, fsl, ry)
            y = gv + fv
    return y, d


cdef inline void _mat_at(int ck, double K, double E, double ca, double cb,
                         double cc, double cd, int pk, double pp,
                         double[::1] pbp, double[::1] plv, double[::1] psl,
                         double x, double* out) nogil:
    cdef double q, phi, th, c, s
    if ck == CK_CONST:
        out[0] = ca; out[1] = cb; out[2] = cc; out[3] = cd
        return
    if ck == CK_SCHRO:
        q = _chart(pk, pp, pbp, plv, psl, x)
        out[0] = 0.0; out[1] = 1.0; out[2] = -1.0; out[3] = q - E
        return
    phi = _mod1(_chart(pk, pp, pbp, plv, psl, x))
    th = 2.0 * PI * phi
    c = cos(th)
    s = sin(th)
    if ck == CK_ROT:
        out[0] = c; out[1] = -s; out[2] = s; out[3] = c
        return
    out[0] = c * K; out[1] = -s / K; out[2] = s * K; out[3] = c / K


cdef inline double _norm2(double a, double b, double c, double d) nogil:
    cdef double fro2 = a * a + b * b + c * c + d * d
    cdef double det = a * d - b * c
    cdef double disc = fro2 * fro2 - 4.0 * det * det
    if disc < 0.0:
        disc = 0.0
    return sqrt((fro2 + sqrt(disc)) / 2.0)


def cocycle_norm_logsum(int ck, double K, double E, double ca, double cb,
                        double cc, double cd, int pk, double pp, long pdeg,
                        double[::1] pbp, double[::1] plv, double[::1] psl,
                        double omega, double x0, long n, trace):
    cdef double pa = 1.0, pb = 0.0, pc = 0.0, pd = 1.0
    cdef double x = x0, s = 0.0, nn, qa, qb, qc, qd
    cdef double m[4]
    cdef long k
    cdef double[::1] tr
    cdef bint want_trace = trace is not None
    if want_trace:
        tr = trace
        for k in range(n):
            _mat_at(ck, K, E, ca, cb, cc, cd, pk, pp, pbp, plv, psl, x, m)
            qa = m[0] * pa + m[1] * pc
            qb = m[0] * pb + m[1] * pd
            qc = m[2] * pa + m[3] * pc
            qd = m[2] * pb + m[3] * pd
            nn = _norm2(qa, qb, qc, qd)
            s += log(nn)
            pa = qa / nn; pb = qb / nn; pc = qc / nn; pd = qd / nn
            x = _mod1(x + omega)
            tr[k] = s
    else:
        with nogil:
            for k in range(n):
                _mat_at(ck, K, E, ca, cb, cc, cd, pk, pp, pbp, plv, psl, x, m)
                qa = m[0] * pa + m[1] * pc
                qb = m[0] * pb + m[1] * pd
                qc = m[2] * pa + m[3] * pc
                qd = m[2] * pb + m[3] * pd
                nn = _norm2(qa, qb, qc, qd)
                s += log(nn)
                pa = qa / nn; pb = qb / nn; pc = qc / nn; pd = qd / nn
                x = _mod1(x + omega)
    return s, pa, pb, pc, pd


def cocycle_pair_logs(int ck, double K, double E, double ca, double cb,
                      double cc, double cd, int pk, double pp, long pdeg,
                      double[::1] pbp, double[::1] plv, double[::1] psl,
                      double omega, double x0, long n,
                      double vx, double vy, double wx, double wy):
    cdef double x = x0, sv = 0.0, sw = 0.0
    cdef double nvx, nvy, nwx, nwy, nv, nw
    cdef double m[4]
    cdef long k
    with nogil:
        for k in range(n):
            _mat_at(ck, K, E, ca, cb, cc, cd, pk, pp, pbp, plv, psl, x, m)
            nvx = m[0] * vx + m[1] * vy
            nvy = m[2] * vx + m[3] * vy
            nwx = m[0] * wx + m[1] * wy
            nwy = m[2] * wx + m[3] * wy
            nv = sqrt(nvx * nvx + nvy * nvy)
            nw = sqrt(nwx * nwx + nwy * nwy)
            sv += log(nv)
            sw += log(nw)
            vx = nvx / nv; vy = nvy / nv
            wx = nwx / nw; wy = nwy / nw
            x = _mod1(x + omega)
    return sv, sw, vx, vy, wx, wy
