"""Rotation arithmetic: continued fractions, Diophantine constants,
entry/return times, resonant windows, and clear-translate searches."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import ArcInterval, ArcSet, wrap

__all__ = [
    "dist_to_int",
    "ContinuedFraction",
    "continued_fraction",
    "DiophantineProfile",
    "diophantine_gamma",
    "first_entry_time",
    "return_gap_bound",
    "resonant_window_check",
    "find_clear_translate",
    "ClearTranslateResult",
]


def dist_to_int(t: float) -> float:
    """Distance from a real number to the nearest integer."""
    return abs(t - round(t))


@dataclass
class ContinuedFraction:
    omega: float
    coefficients: list[int]
    convergents: list[tuple[int, int]]  # (p, q), q strictly increasing
    rational: bool = False
    precision_exhausted: bool = False

    def denominators(self) -> list[int]:
        return [q for _, q in self.convergents]


def continued_fraction(omega: float, depth: int = 40) -> ContinuedFraction:
    """Partial quotients and convergents of omega in (0,1).

    Stops early when the remainder is rational to binary64 resolution
    (flagged ``rational``) or when the convergent denominators exhaust the
    double precision of omega (flagged ``precision_exhausted``).
    """
    if depth > 40:
        raise ValueError("depth > 40 exhausts binary64 resolution")
    omega = wrap(omega)
    if omega == 0.0:
        return ContinuedFraction(omega, [], [(0, 1)], rational=True)
    coeffs: list[int] = []
    convs: list[tuple[int, int]] = []
    pm1, p = 1, 0  # p_{-1}, p_0
    qm1, q = 0, 1
    x = omega
    rational = False
    exhausted = False
    for _ in range(depth):
        inv = 1.0 / x
        a = int(math.floor(inv))
        frac = inv - a
        coeffs.append(a)
        pm1, p = p, a * p + pm1
        qm1, q = q, a * q + qm1
        convs.append((p, q))
        if frac < 1e-12:
            rational = True
            break
        # beyond ~1/sqrt(ulp), the quotients are artifacts of rounding
        if q * q * dist_to_int(q * omega) < q * q * q * 4e-16:
            exhausted = True
            break
        x = frac
    return ContinuedFraction(omega, coeffs, convs, rational, exhausted)


@dataclass
class DiophantineProfile:
    omega: float
    Q: int
    gamma_Q: float
    attaining_q: int
    table: list[tuple[int, float]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "Q": self.Q,
            "gamma_Q": self.gamma_Q,
            "attaining_q": self.attaining_q,
            "table": [[q, v] for q, v in self.table],
        }


def diophantine_gamma(omega: float, Q: int, *, brute_force: bool = False) -> DiophantineProfile:
    """gamma_Q = min_{1 <= q <= Q} q^2 dist(q omega, Z).

    Fast path evaluates convergent denominators plus small q only: on each
    block q in [q_k, q_{k+1}) both factors are minimized at q = q_k.  The
    brute-force path is the independent oracle.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    omega = wrap(omega)
    if brute_force:
        qs = np.arange(1, Q + 1, dtype=np.float64)
        vals = qs * qs * np.abs(qs * omega - np.round(qs * omega))
        i = int(np.argmin(vals))
        table = [(int(qs[i]), float(vals[i]))]
        return DiophantineProfile(omega, Q, float(vals[i]), int(qs[i]), table)
    cf = continued_fraction(omega)
    cand = sorted({q for q in cf.denominators() if q <= Q} | set(range(1, min(Q, 64) + 1)))
    table = [(q, q * q * dist_to_int(q * omega)) for q in cand]
    gamma, attaining = min(((v, q) for q, v in table), key=lambda t: (t[0], t[1]))
    return DiophantineProfile(omega, Q, gamma, attaining, table)


def first_entry_time(x: float, I, omega: float, cap: int):
    """Smallest k >= 0 with x + k omega in I, or math.inf beyond cap."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    if isinstance(I, ArcInterval):
        I = ArcSet([I])
    if not I:
        return math.inf
    xx = x
    for k in range(cap + 1):
        if I.contains(xx):
            return k
        xx = wrap(xx + omega)
    return math.inf


def return_gap_bound(gamma: float, delta: float) -> int:
    """floor(sqrt(gamma/delta)): arcs of length <= delta cannot self-overlap
    under rotation within that many steps."""
    if gamma <= 0.0 or delta <= 0.0:
        raise ValueError("gamma and delta must be positive")
    return int(math.floor(math.sqrt(gamma / delta)))


@dataclass
class ResonantWindowReport:
    passed: bool
    nu: int
    N: int
    J: ArcInterval
    failures: list = field(default_factory=list)


def resonant_window_check(I1: ArcInterval, I2: ArcInterval, nu: int,
                          omega: float, gamma: float) -> ResonantWindowReport:
    """Verify the resonant-window geometry for J = I1 u (I2 - nu omega):

    (J + k omega) disjoint from I1 u I2 for k in [nu-N, N] \\ {0, nu},
    J n I = I1 and (J + nu omega) n I = I2, with N = floor(sqrt(gamma/2delta)).
    """
    delta = max(I1.length, I2.length)
    N = int(math.floor(math.sqrt(gamma / (2.0 * delta))))
    failures = []
    I2s = I2.translate(-nu * omega)
    if not I1.intersects(I2s):
        raise ValueError("precondition failed: I1 and I2 - nu*omega do not overlap")
    if not 0 < nu < N:
        raise ValueError(f"precondition failed: need 0 < nu < N = {N}, got {nu}")
    # J as a single arc spanning both
    d = (I2s.start - I1.start) % 1.0
    if d <= I1.length:
        J = ArcInterval(I1.start, max(I1.length, d + I2s.length))
    else:
        J = ArcInterval(I2s.start, max(I2s.length, (1.0 - d) % 1.0 + I1.length))
    I = ArcSet([I1, I2])
    for k in range(nu - N, N + 1):
        if k in (0, nu):
            continue
        if I.intersects(J.translate(k * omega)):
            failures.append(f"(J + {k} w) meets I")
    cap0 = ArcSet([J]).intersect_arc(I1).measure
    cap0b = ArcSet([J]).intersect_arc(I2).measure
    if abs(cap0 - I1.length) > 1e-12 or cap0b > 1e-12:
        failures.append("J n I != I1")
    Jnu = J.translate(nu * omega)
    cap1 = ArcSet([Jnu]).intersect_arc(I2).measure
    cap1b = ArcSet([Jnu]).intersect_arc(I1).measure
    if abs(cap1 - I2.length) > 1e-12 or cap1b > 1e-12:
        failures.append("(J + nu w) n I != I2")
    return ResonantWindowReport(not failures, nu, N, J, failures)


@dataclass
class ClearTranslateResult:
    k: int | None
    admissible_count: int
    N_max: int
    hypothesis_failures: list
    blocked_by: dict  # obstacle index -> count of blocked k


def find_clear_translate(J: ArcSet, obstacles, omega: float, N_max: int,
                         *, check_hypotheses: bool = True) -> ClearTranslateResult:
    """Smallest k in [1, N_max] with J + k omega clear of all obstacle unions.

    ``obstacles`` is a list of (ArcSet I_j, N_j, Z_j); obstacle j blocks the
    translates meeting U_{|m|<=Z_j} (I_j + m omega).  Also reports the
    admissible count (the counting argument promises >= N_max/2 under the
    hypotheses).
    """
    failures = []
    p = max([len(J)] + [len(I) for I, _, _ in obstacles]) if obstacles else len(J)
    if check_hypotheses:
        widths_J = [a.length for a in J]
        for j, (I, Nj, Zj) in enumerate(obstacles):
            for comp in I:
                tripled = comp.scaled3()
                for m in range(1, min(Nj, 20000) + 1):
                    if tripled.intersects(tripled.translate(m * omega)):
                        failures.append(f"obstacle {j}: 3I separation fails at m={m}")
                        break
            if widths_J and max(widths_J) >= min(a.length for a in I):
                failures.append(f"obstacle {j}: J wider than obstacle component")
            if 10.0 * p * p * Zj / Nj >= 3.0 ** (-(j + 1)):
                failures.append(f"obstacle {j}: 10 p^2 Z/N = {10*p*p*Zj/Nj:.3g} too large")
    unions = []
    for I, _, Zj in obstacles:
        arcs = []
        for m in range(-Zj, Zj + 1):
            arcs.extend(a.translate(m * omega) for a in I)
        unions.append(ArcSet(arcs))

    blocked_by = {j: 0 for j in range(len(obstacles))}
    first_k = None
    admissible = 0
    comps = list(J)
    if not comps:
        raise ValueError("J is empty")

    starts = np.array([a.start for a in comps])
    lens = np.array([a.length for a in comps])
    ks = np.arange(1, N_max + 1, dtype=np.float64)
    ok = np.ones(N_max, dtype=bool)
    for j, U in enumerate(unions):
        hit_j = np.zeros(N_max, dtype=bool)
        for s, l in zip(starts, lens):
            ts = (s + ks * omega) % 1.0  # translated component starts
            for b in U:
                d = (b.start - ts) % 1.0
                hit = (d <= l) | (((1.0 - d) % 1.0) <= b.length)
                hit_j |= hit
        blocked_by[j] = int(hit_j.sum())
        ok &= ~hit_j
    admissible = int(ok.sum())
    idx = np.flatnonzero(ok)
    if idx.size:
        first_k = int(idx[0]) + 1
    return ClearTranslateResult(first_k, admissible, N_max, failures, blocked_by)
