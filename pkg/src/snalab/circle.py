"""Circle points, oriented arcs, and piecewise-monotone circle maps.

Angles live on T = R/Z and are stored as binary64 in [0, 1); every
operation wraps eagerly.  Circle maps are represented through their lifts:
either piecewise linear (breakpoints / slopes / degree) or, for the two
analytic fiber families, in closed form behind the same interface.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field

__all__ = [
    "wrap",
    "circle_dist",
    "lift_frac",
    "ArcInterval",
    "arc_between",
    "ArcSet",
    "MapParams",
    "CircleMap",
    "PiecewiseMonotoneCircleMap",
    "ArctanFiberMap",
    "SineFiberMap",
    "make_example1_f",
    "make_affine_g",
    "make_projective_arctan_f",
    "make_kkho_fiber",
    "make_identity_f",
    "map_from_dict",
    "map_preset",
    "verify_A1",
    "verify_A2",
    "A1Report",
    "A2Report",
]


def wrap(t: float) -> float:
    """Project a real number to [0, 1)."""
    if not math.isfinite(t):
        raise ValueError(f"cannot wrap non-finite value {t!r}")
    r = t % 1.0
    # t % 1.0 can return 1.0 for tiny negative t due to rounding
    return r if r < 1.0 else 0.0


def circle_dist(a: float, b: float) -> float:
    """Distance in the standard metric on T; result in [0, 1/2]."""
    d = abs(a - b) % 1.0
    return d if d <= 0.5 else 1.0 - d


def lift_frac(t: float) -> tuple[float, float]:
    """Split a real into (integer part, fractional part in [0,1))."""
    n = math.floor(t)
    r = t - n
    if r >= 1.0:  # rounding at the seam
        n += 1
        r = 0.0
    return float(n), r


@dataclass(frozen=True)
class ArcInterval:
    """Positively oriented arc [start, start+length] on T."""

    start: float
    length: float

    def __post_init__(self):
        object.__setattr__(self, "start", wrap(self.start))
        if not 0.0 <= self.length <= 1.0:
            raise ValueError(f"arc length {self.length} outside [0, 1]")

    @property
    def end(self) -> float:
        return wrap(self.start + self.length)

    def contains(self, y: float, *, closed: bool = True) -> bool:
        d = (y - self.start) % 1.0
        if self.length >= 1.0:
            return True
        if closed:
            return d <= self.length or d >= 1.0 - 1e-300
        return 0.0 < d < self.length

    def translate(self, t: float) -> "ArcInterval":
        return ArcInterval(wrap(self.start + t), self.length)

    def pad(self, delta: float) -> "ArcInterval":
        return ArcInterval(wrap(self.start - delta), min(1.0, self.length + 2 * delta))

    def scaled3(self) -> "ArcInterval":
        """The concentric arc of three times the length (as in '3I')."""
        return ArcInterval(wrap(self.start - self.length), min(1.0, 3 * self.length))

    def intersects(self, other: "ArcInterval") -> bool:
        if self.length >= 1.0 or other.length >= 1.0:
            return True
        d = (other.start - self.start) % 1.0
        return d <= self.length or (1.0 - d) % 1.0 <= other.length

    def midpoint(self) -> float:
        return wrap(self.start + self.length / 2.0)


def arc_between(y: float, eta: float) -> ArcInterval:
    """Positively oriented arc [y, eta] built from representatives in [0,1)."""
    y, eta = wrap(y), wrap(eta)
    length = eta - y if y <= eta else (1.0 + eta) - y
    return ArcInterval(y, length)


class ArcSet:
    """Finite union of pairwise-disjoint arcs, kept sorted by start.

    Overlapping or touching input arcs are merged on construction.
    """

    __slots__ = ("components",)

    def __init__(self, arcs=()):
        arcs = [a for a in arcs if a.length > 0.0]
        if not arcs:
            self.components: tuple[ArcInterval, ...] = ()
            return
        if any(a.length >= 1.0 for a in arcs) or sum(a.length for a in arcs) >= 1.0 + 1e-12:
            # full circle short-circuits the merge logic below
            merged = _merge_on_line([(0.0, 1.0)])
            self.components = tuple(ArcInterval(s, l) for s, l in merged)
            return
        segs = []
        for a in arcs:
            s, l = a.start, a.length
            if s + l <= 1.0:
                segs.append((s, s + l))
            else:
                segs.append((s, 1.0))
                segs.append((0.0, s + l - 1.0))
        merged = _merge_on_line(segs)
        # re-join across the seam 1.0 ~ 0.0
        if len(merged) >= 2 and merged[0][0] <= 0.0 and merged[-1][1] >= 1.0:
            first, last = merged[0], merged[-1]
            merged = merged[1:-1]
            merged.append((last[0], last[1] + (first[1] - first[0])))
        self.components = tuple(
            ArcInterval(wrap(s), min(1.0, e - s)) for s, e in merged
        )

    @property
    def measure(self) -> float:
        return min(1.0, sum(a.length for a in self.components))

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __bool__(self):
        return bool(self.components)

    def contains(self, y: float) -> bool:
        return any(a.contains(y) for a in self.components)

    def intersects(self, other) -> bool:
        if isinstance(other, ArcInterval):
            return any(a.intersects(other) for a in self.components)
        return any(a.intersects(b) for a in self.components for b in other.components)

    def intersect_arc(self, arc: ArcInterval) -> "ArcSet":
        """Intersection with a single arc, as a new ArcSet."""
        out = []
        for a in self.components:
            # unwrap `a` relative to arc.start
            d = (a.start - arc.start) % 1.0
            lo = max(d, 0.0)
            hi = min(d + a.length, arc.length)
            if hi > lo:
                out.append(ArcInterval(wrap(arc.start + lo), hi - lo))
            # the part of `a` that wraps before arc.start
            if d + a.length > 1.0:
                hi2 = min(d + a.length - 1.0, arc.length)
                if hi2 > 0.0:
                    out.append(ArcInterval(arc.start, hi2))
        return ArcSet(out)

    def translate(self, t: float) -> "ArcSet":
        return ArcSet([a.translate(t) for a in self.components])

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(list(self.components) + list(other.components))


def _merge_on_line(segs):
    segs = sorted(segs)
    out = [list(segs[0])]
    for s, e in segs[1:]:
        if s <= out[-1][1] + 1e-15:
            out[-1][1] = max(out[-1][1], e)
        else:
            out.append([s, e])
    return [tuple(seg) for seg in out]


@dataclass(frozen=True)
class MapParams:
    """The (eps, rho, kappa) triple governing the fiber/base assumptions."""

    eps: float
    rho: float
    kappa: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must be in (0,1), got {self.eps}")
        if self.rho <= 1.0:
            raise ValueError(f"rho must be > 1, got {self.rho}")
        if self.kappa <= 1.0:
            raise ValueError(f"kappa must be > 1, got {self.kappa}")


# kernel descriptor kinds, shared with snalab._kernels / _kernels_ref
KIND_PWL = 0
KIND_ARCTAN = 1
KIND_SINE = 2


class CircleMap:
    """Common interface of all circle maps in scope.

    A map is given through a fixed lift F with F(t+1) = F(t) + degree; the
    degree law is exact by construction (the integer part of the argument
    is handled structurally, never through the transcendental branch).
    """

    degree: int

    def eval_lift(self, t: float) -> float:
        n, r = lift_frac(t)
        return n * self.degree + self._base_lift(r)

    def eval(self, y: float) -> float:
        return wrap(self._base_lift(wrap(y)))

    def derivative(self, y: float) -> float:
        """Slope at y; right-continuous at breakpoints."""
        raise NotImplementedError

    def inverse(self, y: float) -> float:
        if self.degree != 1:
            raise ValueError("inverse requires a degree-1 map")
        return wrap(self._base_inverse_lift(wrap(y)))

    def _base_lift(self, r: float) -> float:
        """Lift evaluated on the fundamental chart r in [0, 1)."""
        raise NotImplementedError

    def _base_inverse_lift(self, z: float) -> float:
        raise NotImplementedError

    def min_slope(self) -> float:
        raise NotImplementedError

    def max_slope(self) -> float:
        raise NotImplementedError

    def slope_below_arcs(self, c: float) -> ArcSet:
        """Maximal arcs on which the slope is < c."""
        raise NotImplementedError

    def slope_above_arcs(self, c: float) -> ArcSet:
        """Maximal arcs on which the slope is > c."""
        raise NotImplementedError

    def kernel_desc(self):
        """(kind, param, degree, breakpoints, lift_values, slopes) for the kernels."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class PiecewiseMonotoneCircleMap(CircleMap):
    """Circle map with a continuous piecewise-linear lift.

    ``breakpoints`` is sorted with breakpoints[0] == 0.0; piece i runs on
    [breakpoints[i], breakpoints[i+1]) with slope ``slopes[i]`` and lift
    value ``lift_values[i]`` at its left end.
    """

    def __init__(self, breakpoints, lift_values, slopes, degree: int):
        breakpoints = [float(b) for b in breakpoints]
        lift_values = [float(v) for v in lift_values]
        slopes = [float(s) for s in slopes]
        if not breakpoints or breakpoints[0] != 0.0:
            raise ValueError("breakpoints must start at 0.0")
        if sorted(breakpoints) != breakpoints or len(set(breakpoints)) != len(breakpoints):
            raise ValueError("breakpoints must be strictly increasing")
        if any(b >= 1.0 for b in breakpoints):
            raise ValueError("breakpoints must lie in [0, 1)")
        if len(lift_values) != len(breakpoints) or len(slopes) != len(breakpoints):
            raise ValueError("need one lift value and one slope per breakpoint")
        if any(s < 0.0 for s in slopes):
            raise ValueError("negative slopes are out of scope")
        # continuity of the lift across interior breakpoints and the seam
        ext = breakpoints + [1.0]
        for i in range(len(breakpoints)):
            reach = lift_values[i] + slopes[i] * (ext[i + 1] - ext[i])
            target = lift_values[i + 1] if i + 1 < len(breakpoints) else lift_values[0] + degree
            if abs(reach - target) > 1e-9:
                raise ValueError(
                    f"lift discontinuous at breakpoint {i + 1}: {reach} vs {target}"
                )
        self.breakpoints = breakpoints
        self.lift_values = lift_values
        self.slopes = slopes
        self.degree = int(degree)

    def _piece(self, r: float) -> int:
        return bisect.bisect_right(self.breakpoints, r) - 1

    def _base_lift(self, r: float) -> float:
        i = self._piece(r)
        return self.lift_values[i] + self.slopes[i] * (r - self.breakpoints[i])

    def derivative(self, y: float) -> float:
        return self.slopes[self._piece(wrap(y))]

    def _base_inverse_lift(self, z: float) -> float:
        # values ascend piece by piece since slopes >= 0 and degree == 1
        v0 = self.lift_values[0]
        zl = v0 + (z - v0) % 1.0
        vals = self.lift_values + [v0 + 1.0]
        i = bisect.bisect_right(vals, zl) - 1
        i = min(max(i, 0), len(self.slopes) - 1)
        if self.slopes[i] == 0.0:
            raise ValueError("inverse undefined on a zero-slope piece")
        return self.breakpoints[i] + (zl - vals[i]) / self.slopes[i]

    def lift_inverse_on_chart(self, zl: float) -> float:
        """x in [0,1) with _base_lift(x) = zl, for zl in [v0, v0+degree)."""
        vals = self.lift_values + [self.lift_values[0] + self.degree]
        i = bisect.bisect_right(vals, zl) - 1
        i = min(max(i, 0), len(self.slopes) - 1)
        if self.slopes[i] == 0.0:
            raise ValueError("inverse undefined on a zero-slope piece")
        return self.breakpoints[i] + (zl - vals[i]) / self.slopes[i]

    def min_slope(self) -> float:
        return min(self.slopes)

    def max_slope(self) -> float:
        return max(self.slopes)

    def _slope_arcs(self, pred) -> ArcSet:
        n = len(self.slopes)
        ext = self.breakpoints + [1.0]
        hits = [i for i in range(n) if pred(self.slopes[i])]
        if not hits:
            return ArcSet()
        arcs = [ArcInterval(self.breakpoints[i], ext[i + 1] - self.breakpoints[i]) for i in hits]
        return ArcSet(arcs)  # adjacent pieces merge in the ArcSet constructor

    def slope_below_arcs(self, c: float) -> ArcSet:
        return self._slope_arcs(lambda s: s < c)

    def slope_above_arcs(self, c: float) -> ArcSet:
        return self._slope_arcs(lambda s: s > c)

    def kernel_desc(self):
        import numpy as np

        return (
            KIND_PWL,
            0.0,
            self.degree,
            np.asarray(self.breakpoints, dtype=np.float64),
            np.asarray(self.lift_values, dtype=np.float64),
            np.asarray(self.slopes, dtype=np.float64),
        )

    def to_dict(self) -> dict:
        return {
            "kind": "pwl",
            "breakpoints": list(self.breakpoints),
            "lift_values": list(self.lift_values),
            "slopes": list(self.slopes),
            "degree": self.degree,
        }


class ArctanFiberMap(CircleMap):
    """f(y) = arctan(tan(pi y) / K^2) / pi (mod 1); contracts near 0, expands near 1/2."""

    degree = 1

    def __init__(self, K: float):
        if K <= 1.0:
            raise ValueError(f"K must be > 1, got {K}")
        self.K = float(K)

    def _base_lift(self, r: float) -> float:
        if r == 0.5:
            return 0.5
        v = math.atan(math.tan(math.pi * r) / self.K**2) / math.pi
        return v if r < 0.5 else v + 1.0

    def _base_inverse_lift(self, z: float) -> float:
        z = z % 1.0
        if z == 0.5:
            return 0.5
        v = math.atan(self.K**2 * math.tan(math.pi * z)) / math.pi
        return v if z < 0.5 else v + 1.0

    def derivative(self, y: float) -> float:
        K2 = self.K**2
        t = math.tan(math.pi * wrap(y))
        if abs(t) > 1e150:
            return K2
        t2 = t * t
        return (1.0 + t2) * K2 / (K2 * K2 + t2)

    def min_slope(self) -> float:
        return 1.0 / self.K**2

    def max_slope(self) -> float:
        return self.K**2

    def _slope_threshold(self, c: float):
        """|tan(pi y)| threshold where the slope crosses c, or None."""
        K2 = self.K**2
        num = K2 * (c * K2 - 1.0)
        den = K2 - c
        if num <= 0.0 or den <= 0.0:
            return None
        return math.sqrt(num / den)

    def slope_below_arcs(self, c: float) -> ArcSet:
        if c <= self.min_slope():
            return ArcSet()
        if c > self.max_slope():
            return ArcSet([ArcInterval(0.0, 1.0)])
        t = self._slope_threshold(c)
        y = math.atan(t) / math.pi
        return ArcSet([ArcInterval(wrap(-y), 2 * y)])

    def slope_above_arcs(self, c: float) -> ArcSet:
        if c >= self.max_slope():
            return ArcSet()
        if c < self.min_slope():
            return ArcSet([ArcInterval(0.0, 1.0)])
        t = self._slope_threshold(c)
        y = math.atan(t) / math.pi
        return ArcSet([ArcInterval(y, 1.0 - 2 * y)])

    def kernel_desc(self):
        import numpy as np

        z = np.zeros(0, dtype=np.float64)
        return (KIND_ARCTAN, self.K, 1, z, z, z)

    def to_dict(self) -> dict:
        return {"kind": "arctan", "K": self.K, "degree": 1}


class SineFiberMap(CircleMap):
    """f(y) = y + eta sin(2 pi y); a homeomorphism for |eta| < 1/(2 pi)."""

    degree = 1

    def __init__(self, eta: float):
        if abs(eta) * 2.0 * math.pi >= 1.0:
            raise ValueError(f"|eta| must be < 1/(2 pi) for invertibility, got {eta}")
        self.eta = float(eta)

    def _base_lift(self, r: float) -> float:
        return r + self.eta * math.sin(2.0 * math.pi * r)

    def derivative(self, y: float) -> float:
        return 1.0 + 2.0 * math.pi * self.eta * math.cos(2.0 * math.pi * wrap(y))

    def _base_inverse_lift(self, z: float) -> float:
        z = z % 1.0
        e = abs(self.eta)
        lo, hi = z - e, z + e
        r = z
        for _ in range(60):
            fr = r + self.eta * math.sin(2.0 * math.pi * r) - z
            if fr > 0.0:
                hi = r
            else:
                lo = r
            d = 1.0 + 2.0 * math.pi * self.eta * math.cos(2.0 * math.pi * r)
            rn = r - fr / d
            r = rn if lo < rn < hi else 0.5 * (lo + hi)
            if hi - lo < 1e-16:
                break
        return r

    def min_slope(self) -> float:
        return 1.0 - 2.0 * math.pi * abs(self.eta)

    def max_slope(self) -> float:
        return 1.0 + 2.0 * math.pi * abs(self.eta)

    def _slope_arcs_sine(self, c: float, below: bool) -> ArcSet:
        # slope < c  <=>  cos(2 pi y) < (c-1)/(2 pi eta)   (eta > 0)
        if self.eta == 0.0:
            full = below and c > 1.0 or (not below and c < 1.0)
            return ArcSet([ArcInterval(0.0, 1.0)]) if full else ArcSet()
        u = (c - 1.0) / (2.0 * math.pi * self.eta)
        if u <= -1.0:
            sub = ArcSet()
        elif u >= 1.0:
            sub = ArcSet([ArcInterval(0.0, 1.0)])
        else:
            y = math.acos(u) / (2.0 * math.pi)  # cos(2 pi y) < u <=> y in (y, 1-y)
            sub = ArcSet([ArcInterval(y, 1.0 - 2 * y)])
        if (below) == (self.eta > 0.0):
            return sub
        # complement for the other sign/direction
        if not sub:
            return ArcSet([ArcInterval(0.0, 1.0)])
        a = sub.components[0]
        if a.length >= 1.0:
            return ArcSet()
        return ArcSet([ArcInterval(a.end, 1.0 - a.length)])

    def slope_below_arcs(self, c: float) -> ArcSet:
        return self._slope_arcs_sine(c, True)

    def slope_above_arcs(self, c: float) -> ArcSet:
        return self._slope_arcs_sine(c, False)

    def kernel_desc(self):
        import numpy as np

        z = np.zeros(0, dtype=np.float64)
        return (KIND_SINE, self.eta, 1, z, z, z)

    def to_dict(self) -> dict:
        return {"kind": "sine", "eta": self.eta, "degree": 1}


# ---------------------------------------------------------------------------
# constructors for the concrete maps in scope


def make_example1_f(eps: float) -> PiecewiseMonotoneCircleMap:
    """Two-piece fiber map with slope 2/eps on A=(0,a) and eps/2 on B=(a,1).

    Here a = (2 eps - eps^2) / (4 - eps^2), which makes the lift continuous
    with f(0) = 0 and degree 1.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must be in (0, 1/2), got {eps}")
    a = (2.0 * eps - eps * eps) / (4.0 - eps * eps)
    return PiecewiseMonotoneCircleMap(
        breakpoints=[0.0, a],
        lift_values=[0.0, 2.0 * a / eps],
        slopes=[2.0 / eps, eps / 2.0],
        degree=1,
    )


def example1_arcs(eps: float) -> tuple[ArcInterval, ArcInterval]:
    """The witness arcs A=(0,a), B=(a,1) of the two-piece fiber map."""
    a = (2.0 * eps - eps * eps) / (4.0 - eps * eps)
    return ArcInterval(0.0, a), ArcInterval(a, 1.0 - a)


def make_affine_g(k: int, t: float = 0.0) -> PiecewiseMonotoneCircleMap:
    """Base map with lift G(x) = k x + t."""
    if k < 1:
        raise ValueError(f"degree must be >= 1, got {k}")
    return PiecewiseMonotoneCircleMap([0.0], [float(t)], [float(k)], k)


def make_projective_arctan_f(K: float) -> ArctanFiberMap:
    return ArctanFiberMap(K)


def make_kkho_fiber(eta: float) -> SineFiberMap:
    return SineFiberMap(eta)


def make_identity_f() -> PiecewiseMonotoneCircleMap:
    return PiecewiseMonotoneCircleMap([0.0], [0.0], [1.0], 1)


def map_from_dict(d: dict) -> CircleMap:
    kind = d["kind"]
    if kind == "pwl":
        return PiecewiseMonotoneCircleMap(
            d["breakpoints"], d["lift_values"], d["slopes"], d["degree"]
        )
    if kind == "arctan":
        return ArctanFiberMap(d["K"])
    if kind == "sine":
        return SineFiberMap(d["eta"])
    raise ValueError(f"unknown map kind {kind!r}")


def map_preset(name: str, *, eps: float = 0.01, K: float = 10.0, eta: float = 0.1,
               t: float = 0.0) -> CircleMap:
    """Maps addressable by name: example1, affine2, arctanK, kkho, identity."""
    if name == "example1":
        return make_example1_f(eps)
    if name == "affine2":
        return make_affine_g(2, t)
    if name in ("arctanK", "arctan"):
        return make_projective_arctan_f(K)
    if name == "kkho":
        return make_kkho_fiber(eta)
    if name == "identity":
        return make_identity_f()
    raise ValueError(f"unknown map preset {name!r}")


# ---------------------------------------------------------------------------
# assumption verifiers


@dataclass
class A1Report:
    passed: bool
    degree: int
    degree_ok: bool
    max_slope: float
    min_slope: float
    kappa: float
    easy_degree1: bool = False
    failures: list = field(default_factory=list)


def verify_A1(g: CircleMap, kappa: float) -> A1Report:
    """Check degree 2 and bi-Lipschitz constants < kappa for the base map.

    Degree 1 is flagged as the easy case rather than a hard failure note.
    """
    failures = []
    mx, mn = g.max_slope(), g.min_slope()
    degree_ok = g.degree == 2
    easy = g.degree == 1
    if not degree_ok:
        failures.append(f"degree {g.degree} != 2" + (" (degree-1 easy case)" if easy else ""))
    if not mx < kappa:
        failures.append(f"max slope {mx} >= kappa {kappa}")
    if not (mn > 0.0 and 1.0 / mn < kappa):
        failures.append(f"inverse slope bound violated: min slope {mn}")
    return A1Report(
        passed=not failures,
        degree=g.degree,
        degree_ok=degree_ok,
        max_slope=mx,
        min_slope=mn,
        kappa=kappa,
        easy_degree1=easy,
        failures=failures,
    )


@dataclass
class A2Report:
    passed: bool
    eps: float
    rho: float
    max_slope: float
    min_slope: float
    A: ArcInterval | None
    B: ArcInterval | None
    comp_B_measure: float | None
    image_comp_A_measure: float | None
    failures: list = field(default_factory=list)


def _image_measure(f: CircleMap, arc: ArcInterval) -> float:
    """Measure of f(arc) for an orientation-preserving degree-1 map."""
    return f.eval_lift(arc.start + arc.length) - f.eval_lift(arc.start)


def verify_A2(f: CircleMap, eps: float, rho: float) -> A2Report:
    """Search witness arcs A (strong expansion) and B (strong contraction).

    B is the longest maximal arc with slope < eps; A the maximal arc with
    slope > 1/eps whose image is largest.  The report never raises: all
    failures are collected.
    """
    failures = []
    mx, mn = f.max_slope(), f.min_slope()
    if f.degree != 1:
        failures.append(f"degree {f.degree} != 1")
    if not mx < eps ** (-rho):
        failures.append(f"max slope {mx} >= eps^-rho {eps ** (-rho)}")
    if not (mn > 0.0 and mn > eps**rho):
        failures.append(f"min slope {mn} <= eps^rho {eps ** rho}")

    B_cands = f.slope_below_arcs(eps)
    B = max(B_cands, key=lambda a: a.length) if B_cands else None
    comp_B = None
    if B is None:
        failures.append("no arc with slope < eps")
    else:
        comp_B = 1.0 - B.length
        if not comp_B < eps:
            failures.append(f"|T \\ B| = {comp_B} >= eps")

    A_cands = f.slope_above_arcs(1.0 / eps)
    A = None
    img_comp_A = None
    if not A_cands:
        failures.append("no arc with slope > 1/eps")
    else:
        if f.degree == 1:
            A = max(A_cands, key=lambda a: _image_measure(f, a))
            img_comp_A = 1.0 - _image_measure(f, A)
            if not img_comp_A < eps:
                failures.append(f"|f(T \\ A)| = {img_comp_A} >= eps")
        else:
            A = max(A_cands, key=lambda a: a.length)
            failures.append("image measure check skipped: degree != 1")
    # the witnesses are open arcs: endpoint contact is allowed
    if A is not None and B is not None and ArcSet([A]).intersect_arc(B).measure > 1e-15:
        failures.append("witness arcs A and B are not disjoint")

    return A2Report(
        passed=not failures,
        eps=eps,
        rho=rho,
        max_slope=mx,
        min_slope=mn,
        A=A,
        B=B,
        comp_B_measure=comp_B,
        image_comp_A_measure=img_comp_A,
        failures=failures,
    )
