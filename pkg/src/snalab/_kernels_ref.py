"""Pure-Python reference kernels.

Mirrors snalab._kernels operation for operation; the compiled extension is
selected at import time by snalab.kernels when available.  Keep the
floating-point operation order in the two implementations identical: the
equivalence tests compare them bitwise.

Map descriptors are the 6-tuples produced by CircleMap.kernel_desc():
(kind, param, degree, breakpoints, lift_values, slopes).
"""

import math

KIND_PWL = 0
KIND_ARCTAN = 1
KIND_SINE = 2

CK_ROT = 0
CK_DIAGROT = 1
CK_CONST = 2
CK_SCHRO = 3


def _pwl_chart(bp, lv, sl, r):
    i = 0
    n = len(bp)
    while i + 1 < n and r >= bp[i + 1]:
        i += 1
    return lv[i] + sl[i] * (r - bp[i])


def _pwl_deriv(bp, sl, r):
    i = 0
    n = len(bp)
    while i + 1 < n and r >= bp[i + 1]:
        i += 1
    return sl[i]


def _chart(kind, p, bp, lv, sl, r):
    if kind == KIND_PWL:
        return _pwl_chart(bp, lv, sl, r)
    if kind == KIND_ARCTAN:
        if r == 0.5:
            return 0.5
        v = math.atan(math.tan(math.pi * r) / (p * p)) / math.pi
        return v if r < 0.5 else v + 1.0
    # sine
    return r + p * math.sin(2.0 * math.pi * r)


def _lift(kind, p, deg, bp, lv, sl, t):
    n = math.floor(t)
    r = t - n
    if r >= 1.0:
        n += 1
        r = 0.0
    return n * deg + _chart(kind, p, bp, lv, sl, r)


def _deriv(kind, p, bp, sl, r):
    if kind == KIND_PWL:
        return _pwl_deriv(bp, sl, r)
    if kind == KIND_ARCTAN:
        K2 = p * p
        t = math.tan(math.pi * r)
        if abs(t) > 1e150:
            return K2
        t2 = t * t
        return (1.0 + t2) * K2 / (K2 * K2 + t2)
    return 1.0 + 2.0 * math.pi * p * math.cos(2.0 * math.pi * r)


def _inv_chart(kind, p, bp, lv, sl, z):
    """Inverse of the degree-1 chart map at z in [0,1)."""
    if kind == KIND_PWL:
        v0 = lv[0]
        zl = v0 + (z - v0) % 1.0
        i = 0
        n = len(bp)
        while i + 1 < n and zl >= lv[i + 1]:
            i += 1
        return bp[i] + (zl - lv[i]) / sl[i]
    if kind == KIND_ARCTAN:
        if z == 0.5:
            return 0.5
        v = math.atan(p * p * math.tan(math.pi * z)) / math.pi
        return v if z < 0.5 else v + 1.0
    # sine: Newton with safe bisection bracket
    e = abs(p)
    lo, hi = z - e, z + e
    r = z
    for _ in range(60):
        fr = r + p * math.sin(2.0 * math.pi * r) - z
        if fr > 0.0:
            hi = r
        else:
            lo = r
        d = 1.0 + 2.0 * math.pi * p * math.cos(2.0 * math.pi * r)
        rn = r - fr / d
        r = rn if lo < rn < hi else 0.5 * (lo + hi)
        if hi - lo < 1e-16:
            break
    return r


def orbit_reduce(gk, gp, gdeg, gbp, glv, gsl, fk, fp, fdeg, fbp, flv, fsl,
                 omega, x0, y0, n):
    """n forward steps; returns (x_n, y_n, sum of log f'(y_k), k=0..n-1)."""
    x, y, s = x0, y0, 0.0
    for _ in range(n):
        s += math.log(_deriv(fk, fp, fbp, fsl, y))
        gv = _chart(gk, gp, gbp, glv, gsl, x)
        fv = _chart(fk, fp, fbp, flv, fsl, y)
        y = (gv + fv) % 1.0
        x = (x + omega) % 1.0
    return x, y, s


def orbit_fill(gk, gp, gdeg, gbp, glv, gsl, fk, fp, fdeg, fbp, flv, fsl,
               omega, x0, y0, n, xs, ys, logs):
    """Fill xs, ys, logs (length n+1) with the orbit and per-point log f'."""
    x, y = x0, y0
    for k in range(n + 1):
        xs[k] = x
        ys[k] = y
        logs[k] = math.log(_deriv(fk, fp, fbp, fsl, y))
        if k == n:
            break
        gv = _chart(gk, gp, gbp, glv, gsl, x)
        fv = _chart(fk, fp, fbp, flv, fsl, y)
        y = (gv + fv) % 1.0
        x = (x + omega) % 1.0
    return x, y


def orbit_hist(gk, gp, gdeg, gbp, glv, gsl, fk, fp, fdeg, fbp, flv, fsl,
               omega, x0, y0, n, counts):
    """n forward steps, binning the n points k=0..n-1 on the counts grid."""
    nx = counts.shape[0]
    ny = counts.shape[1]
    x, y, s = x0, y0, 0.0
    for _ in range(n):
        ix = int(x * nx)
        iy = int(y * ny)
        if ix >= nx:
            ix = nx - 1
        if iy >= ny:
            iy = ny - 1
        counts[ix, iy] += 1
        s += math.log(_deriv(fk, fp, fbp, fsl, y))
        gv = _chart(gk, gp, gbp, glv, gsl, x)
        fv = _chart(fk, fp, fbp, flv, fsl, y)
        y = (gv + fv) % 1.0
        x = (x + omega) % 1.0
    return x, y, s


def orbit_back_reduce(gk, gp, gdeg, gbp, glv, gsl, fk, fp, fdeg, fbp, flv, fsl,
                      omega, x0, y0, n):
    """n backward steps; returns (x_-n, y_-n, sum of log (f^-1)' along the way)."""
    x, y, s = x0, y0, 0.0
    for _ in range(n):
        x = (x - omega) % 1.0
        gv = _chart(gk, gp, gbp, glv, gsl, x)
        z = (y - gv) % 1.0
        y = _inv_chart(fk, fp, fbp, flv, fsl, z) % 1.0
        s -= math.log(_deriv(fk, fp, fbp, fsl, y))
    return x, y, s


def orbit_back_hist(gk, gp, gdeg, gbp, glv, gsl, fk, fp, fdeg, fbp, flv, fsl,
                    omega, x0, y0, n, counts):
    nx = counts.shape[0]
    ny = counts.shape[1]
    x, y = x0, y0
    for _ in range(n):
        ix = int(x * nx)
        iy = int(y * ny)
        if ix >= nx:
            ix = nx - 1
        if iy >= ny:
            iy = ny - 1
        counts[ix, iy] += 1
        x = (x - omega) % 1.0
        gv = _chart(gk, gp, gbp, glv, gsl, x)
        z = (y - gv) % 1.0
        y = _inv_chart(fk, fp, fbp, flv, fsl, z) % 1.0
    return x, y


def probe_lift(gk, gp, gdeg, gbp, glv, gsl, fk, fp, fdeg, fbp, flv, fsl,
               omega, x, m_back, nsteps, y0):
    """Lift of the probe curve: iterate ylift <- G(x+(k-m)w) + F(ylift).

    x is a real (unwrapped) base coordinate; returns (ylift, dlift) where
    dlift is the x-derivative accumulated by d <- g'(x_k) + f'(y_k) d.
    """
    y = y0
    d = 0.0
    for k in range(nsteps):
        t = x + (k - m_back) * omega
        nfl = math.floor(t)
        r = t - nfl
        if r >= 1.0:
            nfl += 1
            r = 0.0
        gd = _deriv(gk, gp, gbp, gsl, r)
        ny = math.floor(y)
        ry = y - ny
        if ry >= 1.0:
            ny += 1
            ry = 0.0
        fd = _deriv(fk, fp, fbp, fsl, ry)
        d = gd + fd * d
        gv = nfl * gdeg + _chart(gk, gp, gbp, glv, gsl, r)
        fv = ny * fdeg + _chart(fk, fp, fbp, flv, fsl, ry)
        y = gv + fv
    return y, d


def _mat_at(ck, K, E, ca, cb, cc, cd, pk, pp, pbp, plv, psl, x):
    if ck == CK_CONST:
        return ca, cb, cc, cd
    if ck == CK_SCHRO:
        q = _chart(pk, pp, pbp, plv, psl, x)
        return 0.0, 1.0, -1.0, q - E
    phi = _chart(pk, pp, pbp, plv, psl, x) % 1.0
    th = 2.0 * math.pi * phi
    c = math.cos(th)
    s = math.sin(th)
    if ck == CK_ROT:
        return c, -s, s, c
    # CK_DIAGROT: R_theta . diag(K, 1/K)
    return c * K, -s / K, s * K, c / K


def _norm2(a, b, c, d):
    fro2 = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = fro2 * fro2 - 4.0 * det * det
    if disc < 0.0:
        disc = 0.0
    return math.sqrt((fro2 + math.sqrt(disc)) / 2.0)


def cocycle_norm_logsum(ck, K, E, ca, cb, cc, cd, pk, pp, pdeg, pbp, plv, psl,
                        omega, x0, n, trace):
    """Renormalized product: returns sum of log ||M^k|| increments.

    If trace is not None it must have length n and receives the running
    log-norm sum after each step.
    """
    pa, pb, pc, pd = 1.0, 0.0, 0.0, 1.0
    x = x0
    s = 0.0
    for k in range(n):
        ma, mb, mc, md = _mat_at(ck, K, E, ca, cb, cc, cd, pk, pp, pbp, plv, psl, x)
        qa = ma * pa + mb * pc
        qb = ma * pb + mb * pd
        qc = mc * pa + md * pc
        qd = mc * pb + md * pd
        nn = _norm2(qa, qb, qc, qd)
        s += math.log(nn)
        pa, pb, pc, pd = qa / nn, qb / nn, qc / nn, qd / nn
        x = (x + omega) % 1.0
        if trace is not None:
            trace[k] = s
    return s, pa, pb, pc, pd


def cocycle_pair_logs(ck, K, E, ca, cb, cc, cd, pk, pp, pdeg, pbp, plv, psl,
                      omega, x0, n, vx, vy, wx, wy):
    """Propagate two renormalized vectors; returns (Sv, Sw, vx, vy, wx, wy)."""
    x = x0
    sv = sw = 0.0
    for _ in range(n):
        ma, mb, mc, md = _mat_at(ck, K, E, ca, cb, cc, cd, pk, pp, pbp, plv, psl, x)
        nvx = ma * vx + mb * vy
        nvy = mc * vx + md * vy
        nwx = ma * wx + mb * wy
        nwy = mc * wx + md * wy
        nv = math.sqrt(nvx * nvx + nvy * nvy)
        nw = math.sqrt(nwx * nwx + nwy * nwy)
        sv += math.log(nv)
        sw += math.log(nw)
        vx, vy = nvx / nv, nvy / nv
        wx, wy = nwx / nw, nwy / nw
        x = (x + omega) % 1.0
    return sv, sw, vx, vy, wx, wy
