"""The skew product T(x,y) = (x+w, g(x)+f(y)): iteration, derivatives, exponents.

Long orbits run through the kernels (compiled or pure, see snalab.kernels);
derivative products are accumulated as sums of logs throughout, since raw
products underflow for contraction rates like eps^(n/2) at n ~ 1e6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .circle import (
    ArcInterval,
    CircleMap,
    arc_between,
    make_affine_g,
    make_example1_f,
    make_identity_f,
    make_kkho_fiber,
    make_projective_arctan_f,
    wrap,
)

__all__ = [
    "TorusPoint",
    "SkewProductMap",
    "OrbitRecord",
    "iterate",
    "fiber_derivative_log_product",
    "lyapunov_estimate",
    "lyapunov_report",
    "curve_derivative",
    "arc_image",
    "ConstantCurve",
    "SampledCurve",
    "OMEGA_PRESETS",
    "omega_preset",
    "system_preset",
]

OMEGA_PRESETS = {
    "golden": (math.sqrt(5.0) - 1.0) / 2.0,
    "silver": math.sqrt(2.0) - 1.0,
    "invroot2": 1.0 / math.sqrt(2.0),
}


def omega_preset(name_or_value) -> float:
    if isinstance(name_or_value, str):
        if name_or_value in OMEGA_PRESETS:
            return OMEGA_PRESETS[name_or_value]
        return wrap(float(name_or_value))
    return wrap(float(name_or_value))


class TorusPoint(NamedTuple):
    x: float
    y: float


class SkewProductMap:
    """T(x,y) = (x+omega, g(x)+f(y)) with an invertible fiber map f."""

    def __init__(self, omega: float, g: CircleMap, f: CircleMap):
        if f.degree != 1:
            raise ValueError("fiber map must have degree 1")
        if f.min_slope() <= 0.0:
            raise ValueError("fiber map must have positive slopes")
        self.omega = wrap(omega)
        self.g = g
        self.f = f
        self._gd = g.kernel_desc()
        self._fd = f.kernel_desc()

    def step(self, p: TorusPoint) -> TorusPoint:
        x, y = p
        return TorusPoint(wrap(x + self.omega), wrap(self.g.eval(x) + self.f.eval(y)))

    def step_back(self, p: TorusPoint) -> TorusPoint:
        x, y = p
        xp = wrap(x - self.omega)
        return TorusPoint(xp, self.f.inverse(wrap(y - self.g.eval(xp))))

    def orbit_reduce(self, x: float, y: float, n: int):
        """(x_n, y_n, sum_{k<n} log f'(y_k)) in constant memory."""
        return kernels.orbit_reduce(*self._gd, *self._fd, self.omega, x, y, n)

    def orbit_back_reduce(self, x: float, y: float, n: int):
        return kernels.orbit_back_reduce(*self._gd, *self._fd, self.omega, x, y, n)

    def orbit_hist(self, x: float, y: float, n: int, counts: np.ndarray):
        return kernels.orbit_hist(*self._gd, *self._fd, self.omega, x, y, n, counts)

    def orbit_back_hist(self, x: float, y: float, n: int, counts: np.ndarray):
        return kernels.orbit_back_hist(*self._gd, *self._fd, self.omega, x, y, n, counts)

    def probe_lift(self, x: float, m_back: int, nsteps: int, y0: float):
        """Exact lift recursion for the curve x -> pi2(T^nsteps(x - m_back*w, y0))."""
        return kernels.probe_lift(*self._gd, *self._fd, self.omega, x, m_back, nsteps, y0)

    def fiber_lift(self, x: float, ylift: float) -> float:
        """Lift of the fiber action at base point x: G(x) + F(ylift)."""
        return self.g.eval_lift(x) + self.f.eval_lift(ylift)


@dataclass
class OrbitRecord:
    xs: np.ndarray | None
    ys: np.ndarray | None
    log_derivs: np.ndarray | None
    length: int

    def point(self, k: int) -> TorusPoint:
        if self.xs is None or self.ys is None:
            raise ValueError("orbit points were not recorded")
        return TorusPoint(float(self.xs[k]), float(self.ys[k]))

    def __len__(self):
        return self.length + 1


def iterate(T: SkewProductMap, p: TorusPoint, n: int, *,
            record_points: bool = True, record_logs: bool = True) -> OrbitRecord:
    """Record n forward steps (n+1 points); n < 0 iterates backward.

    Memory-lean callers can switch off either field; for pure statistics in
    constant memory use SkewProductMap.orbit_reduce / orbit_hist instead.
    """
    if n >= 0:
        xs = np.empty(n + 1)
        ys = np.empty(n + 1)
        logs = np.empty(n + 1)
        kernels.orbit_fill(*T._gd, *T._fd, T.omega, p[0], p[1], n, xs, ys, logs)
        return OrbitRecord(
            xs if record_points else None,
            ys if record_points else None,
            logs if record_logs else None,
            n,
        )
    m = -n
    xs = np.empty(m + 1)
    ys = np.empty(m + 1)
    logs = np.empty(m + 1)
    q = TorusPoint(*p)
    for k in range(m + 1):
        xs[k], ys[k] = q
        logs[k] = math.log(T.f.derivative(q.y))
        if k < m:
            q = T.step_back(q)
    return OrbitRecord(
        xs if record_points else None,
        ys if record_points else None,
        logs if record_logs else None,
        m,
    )


def fiber_derivative_log_product(T: SkewProductMap, x: float, y: float,
                                 l: int, k: int) -> float:
    """sum_{j=l}^{k} log f'(y_j) along the orbit of (x, y)."""
    if not 0 <= l <= k:
        raise ValueError("need 0 <= l <= k")
    xl, yl, _ = T.orbit_reduce(x, y, l) if l > 0 else (x, y, 0.0)
    _, _, s = T.orbit_reduce(xl, yl, k - l + 1)
    return s


def lyapunov_estimate(T: SkewProductMap, p: TorusPoint, n: int) -> float:
    """(1/n) sum_{k<n} log f'(y_k)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _, _, s = T.orbit_reduce(p[0], p[1], n)
    return s / n


def lyapunov_report(T: SkewProductMap, p: TorusPoint, n: int,
                    tail_windows: int = 10) -> dict:
    """Finite-n average plus a tail-window max as a limsup proxy."""
    if n < tail_windows:
        raise ValueError("n must be >= tail_windows")
    block = n // tail_windows
    x, y = p
    sums = []
    for _ in range(tail_windows):
        x, y, s = T.orbit_reduce(x, y, block)
        sums.append(s)
    total = sum(sums)
    nused = block * tail_windows
    window_avgs = [s / block for s in sums]
    running = np.cumsum(sums) / (block * np.arange(1, tail_windows + 1))
    return {
        "average": total / nused,
        "n": nused,
        "tail_window_max": max(window_avgs[tail_windows // 2:]),
        "running_tail_max": float(np.max(running[tail_windows // 2:])),
    }


class ConstantCurve:
    """y0(x) = c as an initial curve."""

    def __init__(self, c: float):
        self.c = wrap(c)

    def value(self, x: float) -> float:
        return self.c

    def derivative(self, x: float) -> float:
        return 0.0


class SampledCurve:
    """Monotone curve given by samples (xs, lifts); linear interpolation.

    xs strictly increasing reals (a lift chart of the base interval), lifts
    strictly increasing.
    """

    def __init__(self, xs, lifts):
        self.xs = np.asarray(xs, dtype=float)
        self.lifts = np.asarray(lifts, dtype=float)
        if len(self.xs) < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(self.xs) <= 0.0):
            raise ValueError("sample abscissae must be strictly increasing")
        if np.any(np.diff(self.lifts) <= 0.0):
            raise ValueError("curve is not strictly increasing in lift")

    def value(self, x: float) -> float:
        return wrap(self.lift_value(x))

    def lift_value(self, x: float) -> float:
        return float(np.interp(x, self.xs, self.lifts))

    def derivative(self, x: float) -> float:
        i = int(np.searchsorted(self.xs, x, side="right")) - 1
        i = min(max(i, 0), len(self.xs) - 2)
        return float(
            (self.lifts[i + 1] - self.lifts[i]) / (self.xs[i + 1] - self.xs[i])
        )


def curve_derivative(T: SkewProductMap, y0_curve, x: float, n: int) -> float:
    """d/dx of x -> pi2(T^n(x, y0(x))) by the telescoped product formula.

    y'_n(x) = g'(x_{n-1}) + g'(x_{n-2}) f'(y_{n-1}) + ... + y0'(x) prod f'(y_j);
    each term is exp of a log-accumulated suffix product.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    y = y0_curve.value(x)
    glogs = []  # log g'(x_k), k = 0..n-1
    flogs = []  # log f'(y_k), k = 0..n-1
    xk, yk = x, y
    for _ in range(n):
        glogs.append(math.log(T.g.derivative(xk)))
        flogs.append(math.log(T.f.derivative(yk)))
        xk, yk = T.step(TorusPoint(xk, yk))
    # suffix sums of flogs: suf[k] = sum_{j=k}^{n-1} log f'(y_j)
    suf = [0.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        suf[k] = suf[k + 1] + flogs[k]
    total = 0.0
    for k in range(n):
        total += math.exp(glogs[k] + suf[k + 1])
    d0 = y0_curve.derivative(x)
    if d0 != 0.0:
        total += d0 * math.exp(suf[0])
    return total


def orbit_breakpoint_margin(T: SkewProductMap, y0_curve, x: float, n: int) -> float:
    """Smallest distance of the orbit's fiber values to a slope breakpoint."""
    bps = getattr(T.f, "breakpoints", None)
    if not bps:
        return 0.5
    from .circle import circle_dist

    margin = 0.5
    xk, yk = x, y0_curve.value(x)
    for _ in range(n):
        margin = min(margin, min(circle_dist(yk, b) for b in bps))
        xk, yk = T.step(TorusPoint(xk, yk))
    return margin


def arc_image(T: SkewProductMap, x: float, Y: ArcInterval) -> ArcInterval:
    """Image arc of {x} x Y under T (orientation preserved)."""
    if Y.length >= 1.0:
        gx = T.g.eval(x)
        return ArcInterval(wrap(gx + T.f.eval(Y.start)), 1.0)
    y1 = wrap(T.g.eval(x) + T.f.eval(Y.start))
    eta1 = wrap(T.g.eval(x) + T.f.eval(Y.end))
    # length via the lift: exact integral of f' over Y
    length = T.f.eval_lift(Y.start + Y.length) - T.f.eval_lift(Y.start)
    if length >= 1.0:
        return ArcInterval(y1, 1.0)
    arc = arc_between(y1, eta1)
    # the lift length is the authoritative measure; endpoints fix the position
    return ArcInterval(arc.start, length)


# ---------------------------------------------------------------------------
# system presets


def system_preset(name: str, *, omega="golden", eps: float = 0.01,
                  K: float = 10.0, eta: float = 0.1) -> SkewProductMap:
    """Named (g, f) pairs: t0, example1, kkho, arctan."""
    w = omega_preset(omega)
    if name == "t0":
        return SkewProductMap(w, make_affine_g(2), make_identity_f())
    if name == "example1":
        return SkewProductMap(w, make_affine_g(2), make_example1_f(eps))
    if name == "kkho":
        return SkewProductMap(w, make_affine_g(2), make_kkho_fiber(eta))
    if name == "arctan":
        return SkewProductMap(w, make_affine_g(2), make_projective_arctan_f(K))
    raise ValueError(f"unknown system preset {name!r}")
