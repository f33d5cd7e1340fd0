"""Invariant-graph estimation: the attractor u, the repeller s, attraction
rates, Birkhoff averages, empirical measures, and the minimality proxy.

u(x) is estimated by pullback (iterate forward from (x - n w, seed)); s(x)
by backward pullback from (x + n w, seed in A).  Residuals are computed
from two independent pullbacks, with the accumulated log-derivative
product as the per-sample error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import circle_dist, wrap
from .skew import SkewProductMap, TorusPoint

__all__ = [
    "GraphEstimate",
    "estimate_attractor",
    "estimate_repeller",
    "attractor_value",
    "repeller_value",
    "attraction_rate",
    "attraction_report",
    "AttractionReport",
    "AttractionBatchReport",
    "birkhoff_average",
    "OBSERVABLES",
    "EmpiricalMeasure",
    "empirical_measure",
    "empirical_measure_stream",
    "backward_measure_stream",
    "pushforward_measure",
    "measure_distance",
    "minimality_coverage",
    "coverage_profile",
]


@dataclass
class GraphEstimate:
    grid: np.ndarray
    values: np.ndarray
    depth: int
    residuals: np.ndarray
    contraction_log: np.ndarray  # accumulated log derivative along each pullback
    kind: str                    # "u" or "s"
    seed: float

    @property
    def applicable(self) -> bool:
        """False when the pullback shows no contraction (e.g. f = id)."""
        return float(np.median(self.contraction_log)) < -1.0

    def value_at_index(self, i: int) -> float:
        return float(self.values[i])


def attractor_value(T: SkewProductMap, x: float, depth: int, seed: float) -> tuple[float, float]:
    """(u(x) estimate, accumulated log f' along the pullback orbit)."""
    _, y, s = T.orbit_reduce(wrap(x - depth * T.omega), seed, depth)
    return y, s


def repeller_value(T: SkewProductMap, x: float, depth: int, seed: float) -> tuple[float, float]:
    _, y, s = T.orbit_back_reduce(wrap(x + depth * T.omega), seed, depth)
    return y, s


def estimate_attractor(T: SkewProductMap, grid, depth: int, *,
                       seed: float = 0.5) -> GraphEstimate:
    """Pullback estimate of the attractor graph on the given grid.

    The residual at x is d(u(x + w), pi2 T(x, u(x))) from two independent
    pullbacks; for a system with no fiber contraction the estimate is
    flagged inapplicable rather than failing.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    grid = np.asarray(grid, dtype=float)
    values = np.empty_like(grid)
    residuals = np.empty_like(grid)
    clogs = np.empty_like(grid)
    for i, x in enumerate(grid):
        y, s = attractor_value(T, x, depth, seed)
        values[i] = y
        clogs[i] = s
        y_next, _ = attractor_value(T, wrap(x + T.omega), depth, seed)
        residuals[i] = circle_dist(y_next, T.step(TorusPoint(x, y)).y)
    return GraphEstimate(grid, values, depth, residuals, clogs, "u", seed)


def estimate_repeller(T: SkewProductMap, grid, depth: int, *,
                      seed: float) -> GraphEstimate:
    """Backward-pullback estimate of the repeller graph; residuals contract
    under T^{-1}."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    grid = np.asarray(grid, dtype=float)
    values = np.empty_like(grid)
    residuals = np.empty_like(grid)
    clogs = np.empty_like(grid)
    for i, x in enumerate(grid):
        y, s = repeller_value(T, x, depth, seed)
        values[i] = y
        clogs[i] = s
        y_prev, _ = repeller_value(T, wrap(x - T.omega), depth, seed)
        residuals[i] = circle_dist(y_prev, T.step_back(TorusPoint(x, y)).y)
    return GraphEstimate(grid, values, depth, residuals, clogs, "s", seed)


@dataclass
class AttractionReport:
    slope: float
    intercept: float
    n_points: int
    flagged: bool
    reason: str = ""


@dataclass
class AttractionBatchReport:
    """Regression slopes over a batch of starts against the (log eps)/2 bound."""

    slopes: list
    bound: float
    tolerance: float
    passed: bool
    n_flagged: int


def attraction_rate(T: SkewProductMap, x: float, y: float, n: int, *,
                    depth: int, u_seed: float, s_est: GraphEstimate | None = None,
                    floor: float = 1e-13) -> AttractionReport:
    """Least-squares slope of log d(y_k, u(x_k)) over the window where the
    distance exceeds the floor.

    Starts on or near the repeller are flagged (checked against the
    repeller estimate with a 10x-residual margin when provided).
    """
    if s_est is not None:
        i = int(np.argmin(np.abs((s_est.grid - x + 0.5) % 1.0 - 0.5)))
        margin = 10.0 * max(float(s_est.residuals[i]), 1e-15)
        if circle_dist(y, float(s_est.values[i])) <= margin:
            return AttractionReport(math.nan, math.nan, 0, True, "start on repeller")
    ks = []
    logs = []
    xk, yk = x, y
    for k in range(n):
        u, _ = attractor_value(T, xk, depth, u_seed)
        d = circle_dist(yk, u)
        if d > floor:
            ks.append(float(k))
            logs.append(math.log(d))
        xk, yk = T.step(TorusPoint(xk, yk))
    if len(ks) < 3:
        return AttractionReport(math.nan, math.nan, len(ks), True, "window too short")
    slope, intercept = np.polyfit(ks, logs, 1)
    flagged = slope >= -1e-3
    return AttractionReport(float(slope), float(intercept), len(ks), flagged,
                            "no decay" if flagged else "")


def attraction_report(T: SkewProductMap, starts, n: int, *, depth: int,
                      u_seed: float, eps: float, tolerance: float = 0.1,
                      s_est: GraphEstimate | None = None) -> AttractionBatchReport:
    """Batch attraction-rate report: passes when the median slope is below
    (log eps)/2 + tolerance."""
    slopes = []
    flagged = 0
    for x, y in starts:
        rep = attraction_rate(T, x, y, n, depth=depth, u_seed=u_seed, s_est=s_est)
        if rep.flagged:
            flagged += 1
        else:
            slopes.append(rep.slope)
    bound = math.log(eps) / 2.0
    passed = bool(slopes) and float(np.median(slopes)) <= bound + tolerance
    return AttractionBatchReport(slopes, bound, tolerance, passed, flagged)


OBSERVABLES = {
    "one": lambda x, y: 1.0,
    "cos_x": lambda x, y: math.cos(2 * math.pi * x),
    "sin_x": lambda x, y: math.sin(2 * math.pi * x),
    "cos_y": lambda x, y: math.cos(2 * math.pi * y),
    "sin_y": lambda x, y: math.sin(2 * math.pi * y),
    "cos_xy": lambda x, y: math.cos(2 * math.pi * (x + y)),
}


def birkhoff_average(T: SkewProductMap, p: TorusPoint, testfn: str, n: int) -> float:
    """(1/n) sum of the named observable over the orbit.

    "log_fp" routes through the same kernel accumulation as the Lyapunov
    estimator, so the two agree exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if testfn == "log_fp":
        _, _, s = T.orbit_reduce(p[0], p[1], n)
        return s / n
    try:
        fn = OBSERVABLES[testfn]
    except KeyError:
        raise ValueError(f"unknown observable {testfn!r}; "
                         f"choose from {sorted(OBSERVABLES)} or 'log_fp'") from None
    x, y = p
    total = 0.0
    for _ in range(n):
        total += fn(x, y)
        x, y = T.step(TorusPoint(x, y))
    return total / n


@dataclass
class EmpiricalMeasure:
    counts: np.ndarray  # (nx, ny) int64
    total: int

    @property
    def grid_shape(self) -> tuple[int, int]:
        return tuple(self.counts.shape)

    def probabilities(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty measure")
        return self.counts / float(self.total)


def empirical_measure(orbit, grid_shape: tuple[int, int]) -> EmpiricalMeasure:
    """2-D histogram of an OrbitRecord's points."""
    nx, ny = grid_shape
    if orbit.xs is None or len(orbit.xs) == 0:
        raise ValueError("empty orbit")
    ix = np.minimum((orbit.xs * nx).astype(np.int64), nx - 1)
    iy = np.minimum((orbit.ys * ny).astype(np.int64), ny - 1)
    counts = np.zeros((nx, ny), dtype=np.int64)
    np.add.at(counts, (ix, iy), 1)
    return EmpiricalMeasure(counts, int(len(orbit.xs)))


def empirical_measure_stream(T: SkewProductMap, p: TorusPoint, n: int,
                             grid_shape: tuple[int, int]) -> EmpiricalMeasure:
    """Histogram of n forward orbit points in constant memory."""
    counts = np.zeros(grid_shape, dtype=np.int64)
    T.orbit_hist(p[0], p[1], n, counts)
    return EmpiricalMeasure(counts, n)


def backward_measure_stream(T: SkewProductMap, p: TorusPoint, n: int,
                            grid_shape: tuple[int, int]) -> EmpiricalMeasure:
    counts = np.zeros(grid_shape, dtype=np.int64)
    T.orbit_back_hist(p[0], p[1], n, counts)
    return EmpiricalMeasure(counts, n)


def pushforward_measure(T: SkewProductMap, grid_shape: tuple[int, int],
                        depth: int, n_samples: int, *, seed: float = 0.5) -> EmpiricalMeasure:
    """Pushforward of the uniform base measure by x -> (x, u(x))."""
    nx, ny = grid_shape
    counts = np.zeros(grid_shape, dtype=np.int64)
    for i in range(n_samples):
        x = (i + 0.5) / n_samples
        u, _ = attractor_value(T, x, depth, seed)
        ix = min(int(x * nx), nx - 1)
        iy = min(int(u * ny), ny - 1)
        counts[ix, iy] += 1
    return EmpiricalMeasure(counts, n_samples)


def measure_distance(m1: EmpiricalMeasure, m2: EmpiricalMeasure) -> float:
    """Total variation distance on the shared grid (in [0, 1])."""
    if m1.grid_shape != m2.grid_shape:
        raise ValueError(f"grid shapes differ: {m1.grid_shape} vs {m2.grid_shape}")
    return 0.5 * float(np.abs(m1.probabilities() - m2.probabilities()).sum())


def minimality_coverage(m: EmpiricalMeasure) -> float:
    """Fraction of grid cells visited."""
    return float((m.counts > 0).sum()) / m.counts.size


def coverage_profile(T: SkewProductMap, p: TorusPoint, ns, grid_shape) -> list[float]:
    """Cumulative cell coverage at each checkpoint in ns (ascending)."""
    ns = sorted(ns)
    counts = np.zeros(grid_shape, dtype=np.int64)
    x, y = p
    done = 0
    out = []
    for n in ns:
        x, y, _ = T.orbit_hist(x, y, n - done, counts)
        done = n
        out.append(float((counts > 0).sum()) / counts.size)
    return out
