"""Critical-set geometry: the arcs A', A'', R, the strip S, the set I0,
resonance scales (J_n, K_n, M_n, nu_n), probe curves, and the topological
predicates (overtaking, preimage components) used to track them.

Probe curves are followed in exact lift coordinates: the lift of
x -> pi2(T^k(x - M w, beta)) obeys the recursion L_{k+1} = G(x_k) + F(L_k)
with the fixed lifts G, F of the base and fiber maps, so it is evaluable
pointwise with no unwrap ambiguity, and preimages of A' are located by
monotone bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import diophantine_gamma
from .circle import ArcInterval, ArcSet, CircleMap, circle_dist, verify_A2, wrap
from .skew import SampledCurve, SkewProductMap

__all__ = [
    "CriticalSets",
    "build_critical_sets",
    "StripSection",
    "compute_I0",
    "Resonance",
    "detect_resonance",
    "separation_horizon",
    "ResonanceScale",
    "build_scale0",
    "ProbeResult",
    "ProbeGeometryError",
    "ScaleSeparationError",
    "run_probe",
    "next_scale",
    "build_scales",
    "ScaleRun",
    "overtake_points",
    "preimage_components",
    "excluded_set",
    "excluded_measure_sum",
]


class AssumptionFailure(RuntimeError):
    pass


class ScaleSeparationError(RuntimeError):
    pass


class ProbeGeometryError(RuntimeError):
    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass(frozen=True)
class CriticalSets:
    """The arcs A (expansion), A'' and A' (padded by eps/2 and eps), B,
    R = f(T \\ A), and the reference point beta = a2 + eps/4."""

    A: ArcInterval
    A1: ArcInterval
    A2: ArcInterval
    B: ArcInterval
    R: ArcInterval
    beta: float
    eps: float

    def a_prime_window(self) -> tuple[float, float]:
        """Lift representatives (lo, hi) of A' with hi - lo = |A'|."""
        lo = self.A.start - self.eps
        return lo, lo + self.A1.length


def build_critical_sets(f: CircleMap, eps: float, *, report=None) -> CriticalSets:
    """Construct A', A'', R, beta from the witness arcs of (A2).

    ``report`` may carry a previously computed verify_A2 result; otherwise
    the witness search runs here (the rho-dependent global check is not
    needed for the geometry).
    """
    if report is None:
        report = verify_A2(f, eps, rho=2.0)
    A, B = report.A, report.B
    if A is None or B is None:
        raise AssumptionFailure(f"no witness arcs: {report.failures}")
    if A.length >= eps:
        raise AssumptionFailure(f"|A| = {A.length} >= eps = {eps}")
    A1 = A.pad(eps)
    A2_ = A.pad(eps / 2.0)
    if not (2 * eps < A1.length < 3 * eps):
        raise AssumptionFailure(f"|A'| = {A1.length} outside (2 eps, 3 eps)")
    # R = f(T \ A), an arc from f(a2) to f(a1)
    r_start = f.eval(A.end)
    r_len = f.eval_lift(A.start + 1.0) - f.eval_lift(A.start + A.length)
    R = ArcInterval(r_start, r_len)
    if not R.length < eps:
        raise AssumptionFailure(f"|R| = {R.length} >= eps")
    beta = wrap(A.end + eps / 4.0)
    sets = CriticalSets(A=A, A1=A1, A2=A2_, B=B, R=R, beta=beta, eps=eps)
    # closure(T \ A') inside B
    comp = ArcInterval(A1.end, 1.0 - A1.length)
    d = (comp.start - B.start) % 1.0
    if not d + comp.length <= B.length + 1e-12:
        raise AssumptionFailure("closure(T \\ A') not contained in B")
    if not (A2_.contains(beta) and not A.contains(beta, closed=False)):
        raise AssumptionFailure("beta not in A'' \\ A")
    return sets


class StripSection:
    """The strip S: fiber over x is the arc R + g(x - w)."""

    def __init__(self, T: SkewProductMap, sets: CriticalSets):
        self.T = T
        self.sets = sets

    def arc_at(self, x: float) -> ArcInterval:
        return self.sets.R.translate(self.T.g.eval(wrap(x - self.T.omega)))

    def contains(self, x: float, y: float) -> bool:
        return self.arc_at(x).contains(y)


def compute_I0(T: SkewProductMap, sets: CriticalSets) -> ArcSet:
    """I0 = {x : (R + g(x)) n A' != 0}, via lift inversion of g.

    For degree-2 g this consists of two arcs whose lengths lie in
    [(|A'|+|R|)/kappa, kappa(|A'|+|R|)] (equality for constant slope).
    """
    g = T.g
    if not hasattr(g, "lift_inverse_on_chart"):
        raise AssumptionFailure("compute_I0 requires a piecewise-linear base map")
    alo = sets.A.start - sets.eps
    ahi = alo + sets.A1.length
    rlo = sets.R.start
    rhi = rlo + sets.R.length
    wlo = alo - rhi
    whi = ahi - rlo
    v0 = g.lift_values[0]
    deg = g.degree
    arcs = []
    m_lo = int(math.floor(v0 - whi)) - 1
    m_hi = int(math.ceil(v0 + deg - wlo)) + 1
    for m in range(m_lo, m_hi + 1):
        lo = max(wlo + m, v0)
        hi = min(whi + m, v0 + deg)
        if hi <= lo:
            continue
        x_lo = g.lift_inverse_on_chart(lo)
        x_hi = g.lift_inverse_on_chart(hi) if hi < v0 + deg else 1.0
        if x_hi > x_lo:
            arcs.append(ArcInterval(wrap(x_lo), min(1.0, x_hi - x_lo)))
    return ArcSet(arcs)


@dataclass(frozen=True)
class Resonance:
    nu: int
    first: ArcInterval   # plays the role of I^1 after relabeling
    second: ArcInterval  # plays the role of I^2


def detect_resonance(I: ArcSet, omega: float, nu_max: int) -> Resonance | None:
    """Smallest nu in [1, nu_max] with I^1 n (I^2 - nu w) != 0 (components
    relabeled so the merged J = I^1 u (I^2 - nu w) is a single arc)."""
    if nu_max < 1 or len(I) != 2:
        return None
    c1, c2 = I.components
    for nu in range(1, nu_max + 1):
        if c1.intersects(c2.translate(-nu * omega)):
            return Resonance(nu, c1, c2)
        if c2.intersects(c1.translate(-nu * omega)):
            return Resonance(nu, c2, c1)
    return None


def merge_resonant(res: Resonance, omega: float) -> ArcInterval:
    """J = I^1 u (I^2 - nu w) as a single arc."""
    a, b = res.first, res.second.translate(-res.nu * omega)
    d = (b.start - a.start) % 1.0
    if d <= a.length:
        return ArcInterval(a.start, max(a.length, d + b.length))
    d2 = (a.start - b.start) % 1.0
    return ArcInterval(b.start, max(b.length, d2 + a.length))


def separation_horizon(S: ArcSet, omega: float, cap: int) -> int:
    """Largest m <= cap with S n (S + k w) empty for all 0 < k <= m."""
    for k in range(1, cap + 1):
        if S.intersects(S.translate(k * omega)):
            return k - 1
    return cap


def _window_clear(J: ArcSet, I: ArcSet, omega: float, m_range: int,
                  exceptions: set[int]) -> int:
    """Largest m <= m_range with (J + k w) n I empty for k in [-m, m] minus
    exceptions."""
    for k in range(1, m_range + 1):
        for kk in (k, -k):
            if kk in exceptions:
                continue
            if I.intersects(J.translate(kk * omega)):
                return k - 1
    return m_range


@dataclass
class ResonanceScale:
    """One stage of the inductive construction."""

    n: int
    J: ArcSet
    J_hat: ArcSet
    K: int
    M: int
    nu: int | None
    resonant: bool
    mode: str
    sep_verified: int = 0      # horizon to which J_hat separation was checked
    sep_target: int = 0        # M^2 (the full condition's range)
    k_sep: int = 0             # measured first-violation horizon of J
    clear_translate_ok: bool = True
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.resonant:
            if len(self.J) != 1 or self.nu is None:
                raise ValueError("resonant scale must have a single-arc J and nu")
            if not 0 < self.nu * self.nu <= self.K:
                self.notes.append(f"nu^2 = {self.nu**2} > K = {self.K}")
        else:
            if self.nu is not None:
                raise ValueError("non-resonant scale must not carry nu")
        ratio = self.M / (self.K * self.K)
        if not 0.5 < ratio < 2.0:
            raise ValueError(f"M/K^2 = {ratio} outside (1/2, 2)")

    def summary(self) -> dict:
        return {
            "n": self.n,
            "components": [[a.start, a.length] for a in self.J],
            "K": self.K,
            "M": self.M,
            "nu": self.nu,
            "resonant": self.resonant,
            "mode": self.mode,
            "k_sep": self.k_sep,
            "sep_verified": self.sep_verified,
            "sep_target": self.sep_target,
            "clear_translate_ok": self.clear_translate_ok,
            "notes": self.notes,
        }


def _pad_hat(J: ArcSet, omega: float, eps: float, horizon: int, *,
             per_component_3sep: int) -> tuple[ArcSet, int]:
    """Open enlargement of J: pad symmetrically, halving until the padded
    set keeps the separation horizon and the tripled components keep
    theirs; the pad never exceeds eps (so |J_hat \\ J| < eps holds
    componentwise)."""
    pad = eps / 4.0
    for _ in range(60):
        hat = ArcSet([a.pad(pad) for a in J])
        if len(hat) == len(J) and separation_horizon(hat, omega, horizon) >= horizon:
            ok3 = all(
                separation_horizon(ArcSet([c.scaled3()]), omega, per_component_3sep)
                >= per_component_3sep
                for c in hat
            )
            if ok3:
                return hat, horizon
        pad /= 2.0
        if pad < 1e-18:
            break
    return ArcSet(list(J)), horizon  # degenerate: no padding possible


def _practical_K(sets: CriticalSets, widths_min: float, kappa: float = 2.5) -> int:
    """Smallest stretch length whose expansion can map a sub-arc of the
    current scale onto A' with room to spare: (1/eps)^(K-1) >= 4 kappa |A'| / w."""
    need = 4.0 * kappa * sets.A1.length / widths_min
    k = 1 + max(1, math.ceil(math.log(need) / math.log(1.0 / sets.eps)))
    return max(2, k)


def _build_scale(T: SkewProductMap, sets: CriticalSets, I: ArcSet, n: int,
                 mode: str, prior_scales, *, gamma: float | None,
                 sep_cap: int, K_cap: int, nu_scan_cap: int = 3) -> ResonanceScale:
    eps = sets.eps
    omega = T.omega
    notes = []
    if len(I) not in (1, 2):
        raise AssumptionFailure(f"scale input has {len(I)} components")

    if gamma is None:
        gamma = diophantine_gamma(omega, 10**6).gamma_Q

    Kprev = prior_scales[-1].K if prior_scales else 1

    if mode == "paper":
        nu_cap_f = eps ** (-Kprev / 40.0)
        nu_max = int(min(nu_cap_f, 10**6))
        res = detect_resonance(I, omega, nu_max) if len(I) == 2 else None
        if res is not None:
            J = ArcSet([merge_resonant(res, omega)])
            K = max(1, int(eps ** (-Kprev / 20.0)))
            resonant, nu = True, res.nu
        else:
            J = I
            K = max(1, int(eps ** (-Kprev / 160.0)))
            resonant, nu = False, None
        M = K * K
        if K == 1:
            notes.append("paper-mode exponents are vacuous at this eps (K=1)")
    else:
        delta = max(a.length for a in I)
        N = int(math.floor(math.sqrt(gamma / (2.0 * delta))))
        nu_max = min(max(N - 1, 0), nu_scan_cap)
        res = detect_resonance(I, omega, nu_max) if len(I) == 2 else None
        if res is not None:
            J = ArcSet([merge_resonant(res, omega)])
            resonant, nu = True, res.nu
        else:
            J = I
            resonant, nu = False, None
        K = _practical_K(sets, min(a.length for a in J))
        if resonant:
            K = max(K, nu * nu)
        if K > K_cap:
            notes.append(f"K clamped from {K} to cap {K_cap}")
            K = K_cap
        M = K * K

    k_sep = separation_horizon(J, omega, sep_cap)
    if mode == "practical":
        while K >= 2 and M + K + 1 > k_sep:
            K -= 1
            M = K * K
        if K < 2 or M + K + 1 > k_sep:
            raise ScaleSeparationError(
                f"stage {n}: separation horizon {k_sep} cannot host M+K+1 "
                f"with K >= 2"
            )
        if resonant and nu * nu > K:
            notes.append(f"nu^2 = {nu*nu} > K = {K} after separation clamp")

    sep_target = M * M
    verify_to = min(sep_target, max(M + K + 1, min(sep_target, sep_cap)))
    verified = separation_horizon(J, omega, verify_to)
    if resonant:
        # resonant window: (J + k w) n I = empty off {0, nu}
        win = _window_clear(J, I, omega, verify_to, {0, nu})
        verified = min(verified, win)
    if mode == "practical" and verified < M + K + 1:
        raise ScaleSeparationError(
            f"stage {n}: verified separation {verified} < M+K+1 = {M+K+1}"
        )

    J_hat, _ = _pad_hat(J, omega, eps, min(verified, max(M + K + 1, 1)),
                        per_component_3sep=min(verified, M + K + 1))

    scale = ResonanceScale(
        n=n, J=J, J_hat=J_hat, K=K, M=M, nu=nu, resonant=resonant, mode=mode,
        sep_verified=verified, sep_target=sep_target, k_sep=k_sep, notes=notes,
    )

    # clear-translate condition against the prior stages' neighborhoods
    if prior_scales:
        obstacles = []
        for s in prior_scales:
            Z = int(s.M ** 1.5)
            arcs = []
            for m in range(-Z, Z + 1):
                arcs.extend(a.translate(m * omega) for a in s.J_hat)
            obstacles.append(ArcSet(arcs))
        ok = True
        for shift in (-scale.M, scale.K):
            tr = scale.J.translate(shift * omega)
            if any(tr.intersects(U) for U in obstacles):
                ok = False
        if not ok and mode == "practical":
            adj = _adjust_clear(scale, obstacles, omega, k_sep)
            if adj is not None:
                scale.K, scale.M = adj
                scale.notes.append(f"clear-translate adjust to K={scale.K}, M={scale.M}")
                scale.clear_translate_ok = True
            else:
                scale.clear_translate_ok = False
                scale.notes.append("clear-translate condition unsatisfied")
        elif not ok:
            scale.clear_translate_ok = False
            scale.notes.append("clear-translate condition unsatisfied (paper mode)")
    return scale


def _adjust_clear(scale: ResonanceScale, obstacles, omega: float,
                  k_sep: int) -> tuple[int, int] | None:
    """Search small (K', M') perturbations making both probe translates
    clear of the prior-stage neighborhoods."""
    K0, M0 = scale.K, scale.M
    for dk in range(0, 2 * K0 + 2):
        for K in (K0 + dk, K0 - dk):
            if K < 2:
                continue
            for dm in range(0, K * K):
                for M in (K * K - dm, K * K + dm):
                    ratio = M / (K * K)
                    if not 0.5 < ratio < 2.0 or M + K + 1 > k_sep or M < 1:
                        continue
                    ok = True
                    for shift in (-M, K):
                        tr = scale.J.translate(shift * omega)
                        if any(tr.intersects(U) for U in obstacles):
                            ok = False
                            break
                    if ok:
                        return K, M
    return None


def build_scale0(T: SkewProductMap, sets: CriticalSets, mode: str = "practical",
                 *, gamma: float | None = None, sep_cap: int = 4000,
                 K_cap: int = 10) -> ResonanceScale:
    """Stage 0: J0 from I0, with Case R / Case NR branching.

    Paper mode evaluates the printed exponents ([eps^-1/20] resp.
    [eps^-1/160]); practical mode derives K0 from the measured separation
    horizon, keeping M0 = K0^2.
    """
    I0 = compute_I0(T, sets)
    if T.g.degree == 2 and len(I0) != 2:
        raise AssumptionFailure(f"I0 has {len(I0)} components, expected 2")
    return _build_scale(T, sets, I0, 0, mode, [], gamma=gamma,
                        sep_cap=sep_cap, K_cap=K_cap)


@dataclass
class ProbeResult:
    stage: int
    I_next: ArcSet
    component_count: int
    partial_windows: int
    boundary_gap: float
    deriv_log_bounds: tuple[float, float]
    coverage_err: float
    samples: list  # one SampledCurve per J component
    resolution_limited: bool = False

    def summary(self) -> dict:
        return {
            "stage": self.stage,
            "components": [[a.start, a.length] for a in self.I_next],
            "component_count": self.component_count,
            "partial_windows": self.partial_windows,
            "boundary_gap": self.boundary_gap,
            "deriv_log_bounds": list(self.deriv_log_bounds),
            "coverage_err": self.coverage_err,
            "resolution_limited": self.resolution_limited,
        }


def _bisect_crossing(phi, xa, xb, fa, fb, target, value_tol):
    """Monotone bisection for phi(x) = target on [xa, xb]; returns
    (x_below, x_above, err) with phi(x_below) <= target <= phi(x_above)."""
    err = max(abs(fa - target), abs(fb - target))
    for _ in range(200):
        xm = 0.5 * (xa + xb)
        if not (xa < xm < xb):
            break
        fm = phi(xm)
        if fm < target:
            xa, fa = xm, fm
        else:
            xb, fb = xm, fm
        err = min(abs(fa - target), abs(fb - target))
        if err <= value_tol:
            break
    return xa, xb, err


def run_probe(T: SkewProductMap, scale: ResonanceScale, sets: CriticalSets, *,
              value_tol: float = 1e-10, sample_budget: int = 4096) -> ProbeResult:
    """Iterate the constant curve beta over J - M w for M + K steps and
    extract the preimage components of A' by monotone bisection on the
    exact lift."""
    M, K = scale.M, scale.K
    nsteps = M + K
    beta = sets.beta
    alo, ahi = sets.a_prime_window()
    width = ahi - alo

    def phi(x: float) -> float:
        return T.probe_lift(x, M, nsteps, beta)[0]

    def dphi(x: float) -> float:
        return T.probe_lift(x, M, nsteps, beta)[1]

    comps_out = []
    partials = 0
    gap = math.inf
    dlogs = []
    cov_err = 0.0
    sample_curves = []
    res_limited = False

    for comp in scale.J:
        s = comp.start
        t = s + comp.length
        fs, ft = phi(s), phi(t)
        if not ft > fs:
            raise ProbeGeometryError(f"probe not increasing on component at {s}")
        m_lo = int(math.floor(fs - alo - width)) - 1
        m_hi = int(math.ceil(ft - alo)) + 1
        for m in range(m_lo, m_hi + 1):
            wlo = alo + m
            whi = wlo + width
            if whi <= fs or wlo >= ft:
                continue
            if wlo <= fs or whi >= ft:
                partials += 1
                continue
            _, x_lo, e1 = _bisect_crossing(phi, s, t, fs, ft, wlo, value_tol)
            x_hi, _, e2 = _bisect_crossing(phi, x_lo, t, phi(x_lo), ft, whi, value_tol)
            err = max(e1, e2)
            cov_err = max(cov_err, err)
            if err > 100 * value_tol:
                res_limited = True
            if x_hi <= x_lo:
                res_limited = True
                x_hi = x_lo + abs(x_lo) * 4e-16
            comps_out.append(ArcInterval(wrap(x_lo), x_hi - x_lo))
            gap = min(gap, x_lo - s, t - x_hi)
            for xx in (x_lo, 0.5 * (x_lo + x_hi), x_hi):
                d = dphi(xx)
                dlogs.append(math.log(d) if d > 0 else -math.inf)
        # adaptive polyline for plotting / CSV export
        xs = [s, t]
        lifts = [fs, ft]
        stack = [(s, t, fs, ft, 0)]
        while stack and len(xs) < sample_budget:
            a, b, fa, fb, depth = stack.pop()
            if fb - fa <= 0.25 or depth >= 48:
                continue
            mid = 0.5 * (a + b)
            if not (a < mid < b):
                continue
            fm = phi(mid)
            xs.append(mid)
            lifts.append(fm)
            stack.append((a, mid, fa, fm, depth + 1))
            stack.append((mid, b, fm, fb, depth + 1))
        order = np.argsort(xs)
        sample_curves.append(SampledCurve(np.asarray(xs)[order], np.asarray(lifts)[order]))

    result = ProbeResult(
        stage=scale.n,
        I_next=ArcSet(comps_out),
        component_count=len(comps_out),
        partial_windows=partials,
        boundary_gap=gap if comps_out else math.nan,
        deriv_log_bounds=(min(dlogs), max(dlogs)) if dlogs else (math.nan, math.nan),
        coverage_err=cov_err,
        samples=sample_curves,
        resolution_limited=res_limited,
    )
    if len(comps_out) != 2:
        raise ProbeGeometryError(
            f"stage {scale.n}: extracted {len(comps_out)} full components "
            f"(expected 2, {partials} partial windows)", result)
    if result.boundary_gap <= 0.0:
        raise ProbeGeometryError(f"stage {scale.n}: non-positive boundary gap", result)
    return result


def next_scale(T: SkewProductMap, scale_n: ResonanceScale, probe: ProbeResult,
               sets: CriticalSets, mode: str | None = None, *,
               prior_scales=None, gamma: float | None = None,
               sep_cap: int = 100000, K_cap: int = 10) -> ResonanceScale:
    """Build stage n+1 from stage n's probe output."""
    mode = mode or scale_n.mode
    if probe.resolution_limited:
        raise ProbeGeometryError(
            f"stage {scale_n.n}: probe output at binary64 resolution; "
            "cannot build the next scale", probe)
    priors = list(prior_scales) if prior_scales is not None else [scale_n]
    scale = _build_scale(T, sets, probe.I_next, scale_n.n + 1, mode, priors,
                         gamma=gamma, sep_cap=sep_cap, K_cap=K_cap)
    # containment J_{n+1} subset J_n
    for a in scale.J:
        inside = any(
            (a.start - b.start) % 1.0 + a.length <= b.length + 1e-12
            for b in scale_n.J
        )
        if not inside:
            scale.notes.append("J_{n+1} component not inside J_n")
    return scale


@dataclass
class ScaleRun:
    scales: list
    probes: list
    stopped: str | None = None

    def summary(self) -> list:
        out = []
        for i, s in enumerate(self.scales):
            d = s.summary()
            if i < len(self.probes):
                p = self.probes[i]
                d["boundary_gap"] = p.boundary_gap
                d["deriv_log_bounds"] = list(p.deriv_log_bounds)
                d["probe"] = p.summary()
            out.append(d)
        return out


def build_scales(T: SkewProductMap, sets: CriticalSets, *, mode: str = "practical",
                 stages: int = 3, gamma: float | None = None,
                 sep_cap: int = 100000, K_cap: int = 10,
                 value_tol: float = 1e-10) -> ScaleRun:
    """Drive the induction: scale 0, probe, scale 1, probe, ... (default 3
    stages; stops early with a recorded reason at the binary64 resolution
    boundary)."""
    if gamma is None:
        gamma = diophantine_gamma(T.omega, 10**6).gamma_Q
    scales = []
    probes = []
    stopped = None
    try:
        scales.append(build_scale0(T, sets, mode, gamma=gamma,
                                   sep_cap=min(sep_cap, 4000), K_cap=K_cap))
        while len(scales) < stages:
            probe = run_probe(T, scales[-1], sets, value_tol=value_tol)
            probes.append(probe)
            scales.append(next_scale(T, scales[-1], probe, sets, mode,
                                     prior_scales=scales, gamma=gamma,
                                     sep_cap=sep_cap, K_cap=K_cap))
        probes.append(run_probe(T, scales[-1], sets, value_tol=value_tol))
    except (ProbeGeometryError, ScaleSeparationError, AssumptionFailure) as e:
        stopped = f"{type(e).__name__}: {e}"
    return ScaleRun(scales, probes, stopped)


# ---------------------------------------------------------------------------
# topological predicates on sampled curves


def overtake_points(xs, psi_lifts, phi_lifts, *, tol: float = 1e-9):
    """Abscissae where the lift difference psi - phi increases through an
    integer.  Returns (crossings, tangential_flags)."""
    xs = np.asarray(xs, dtype=float)
    d = np.asarray(psi_lifts, dtype=float) - np.asarray(phi_lifts, dtype=float)
    crossings = []
    tangential = []
    for i in range(len(xs) - 1):
        lo, hi = d[i], d[i + 1]
        m0 = math.floor(lo)
        m = m0 + 1
        while m <= hi:
            if hi > lo:
                t = (m - lo) / (hi - lo)
                x = xs[i] + t * (xs[i + 1] - xs[i])
                if abs(hi - lo) < tol:
                    tangential.append(x)
                else:
                    crossings.append(float(x))
            m += 1
    # integer hits exactly at interior samples with no sign change
    for i in range(1, len(xs) - 1):
        if abs(d[i] - round(d[i])) < tol and not (d[i - 1] < round(d[i]) < d[i + 1]):
            tangential.append(float(xs[i]))
    return crossings, tangential


def preimage_components(curve: SampledCurve, target: ArcInterval, *,
                        tol: float = 1e-12):
    """Connected components of {x : curve(x) in target} for a strictly
    increasing sampled curve; refined by bisection on the interpolant.

    Returns (ArcSet, onto_flags): a component is `onto` when the curve
    covers the whole target over it.
    """
    fs = curve.lifts[0]
    ft = curve.lifts[-1]
    s = curve.xs[0]
    t = curve.xs[-1]
    alo = target.start
    width = target.length

    def val(x):
        return curve.lift_value(x)

    def cross(target_v, lo, hi, flo, fhi):
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                break
            fm = val(mid)
            if fm < target_v:
                lo, flo = mid, fm
            else:
                hi, fhi = mid, fm
            if hi - lo <= tol:
                break
        return 0.5 * (lo + hi)

    arcs = []
    onto = []
    m_lo = int(math.floor(fs - alo - width)) - 1
    m_hi = int(math.ceil(ft - alo)) + 1
    for m in range(m_lo, m_hi + 1):
        wlo = alo + m
        whi = wlo + width
        if whi < fs or wlo > ft:
            continue
        x_lo = s if wlo <= fs else cross(wlo, s, t, fs, ft)
        x_hi = t if whi >= ft else cross(whi, s, t, fs, ft)
        if x_hi <= x_lo:
            continue
        arcs.append(ArcInterval(wrap(x_lo), x_hi - x_lo))
        onto.append(wlo >= fs and whi <= ft)
    return ArcSet(arcs), onto


# ---------------------------------------------------------------------------
# excluded-set diagnostics


def excluded_set(scales, omega: float) -> ArcSet:
    """U_j U_{m=-M_j^{3/2}}^{K_j} (J_j + m w): the complement of the good
    set X at the computed stages."""
    arcs = []
    for s in scales:
        Z = int(s.M ** 1.5)
        for m in range(-Z, s.K + 1):
            arcs.extend(a.translate(m * omega) for a in s.J)
    return ArcSet(arcs)


def excluded_measure_sum(scales) -> float:
    """sum_j 2 M_j^{3/2} |J_j| (the measure bound on the excluded set)."""
    return sum(2.0 * s.M ** 1.5 * s.J.measure for s in scales)
