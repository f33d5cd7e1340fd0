import math

import numpy as np
import pytest

from snalab.circle import (
    ArcInterval,
    ArcSet,
    arc_between,
    circle_dist,
    make_affine_g,
    make_example1_f,
    verify_A2,
    wrap,
)
from snalab.critical import (
    AssumptionFailure,
    ProbeGeometryError,
    Resonance,
    ResonanceScale,
    ScaleSeparationError,
    StripSection,
    build_critical_sets,
    build_scale0,
    build_scales,
    compute_I0,
    detect_resonance,
    excluded_measure_sum,
    excluded_set,
    merge_resonant,
    next_scale,
    overtake_points,
    preimage_components,
    run_probe,
    separation_horizon,
    _build_scale,
)
from snalab.skew import SampledCurve, SkewProductMap, TorusPoint, system_preset

RNG = np.random.default_rng(23)
EPS = 0.01


@pytest.fixture(scope="module")
def T():
    return system_preset("example1", eps=EPS)


@pytest.fixture(scope="module")
def sets(T):
    return build_critical_sets(T.f, EPS)


def test_critical_sets_example1_eps01():
    f = make_example1_f(0.1)
    s = build_critical_sets(f, 0.1)
    a = (2 * 0.1 - 0.01) / (4 - 0.01)
    assert s.A.start == 0.0 and s.A.length == pytest.approx(a, abs=1e-12)
    assert s.A1.start == pytest.approx(0.9, abs=1e-12)
    assert s.A1.length == pytest.approx(a + 0.2, abs=1e-12)
    assert s.A1.length == pytest.approx(0.247619, abs=1e-6)
    assert 0.2 < s.A1.length < 0.3
    assert s.beta == pytest.approx(0.072619, abs=1e-6)
    assert s.R.start == pytest.approx(0.952381, abs=1e-6)
    assert s.R.end == pytest.approx(0.0, abs=1e-9)
    assert s.A2.contains(s.beta)
    assert not s.A.contains(s.beta, closed=False)


def test_reference_point_clearance_sampled(sets):
    # y outside A'' implies the arc [beta, y] avoids A
    hits = 0
    for y in RNG.random(10**3):
        if sets.A2.contains(y):
            continue
        hits += 1
        arc = arc_between(sets.beta, y)
        assert not ArcSet([arc]).intersect_arc(sets.A).measure > 1e-15
    assert hits > 900


def test_step_lands_in_strip(T, sets):
    # (x, y) with y outside A lands in S after one step
    S = StripSection(T, sets)
    for x, y in RNG.random((10**4, 2)):
        if sets.A.contains(y, closed=False):
            continue
        q = T.step(TorusPoint(x, y))
        assert S.contains(q.x, q.y)


def test_compute_I0_geometry(T, sets):
    I0 = compute_I0(T, sets)
    assert len(I0) == 2
    expect = (sets.A1.length + sets.R.length) / 2.0
    for comp in I0:
        assert abs(comp.length - expect) < 1e-10
    # membership definition check on random samples
    for comp in I0:
        x = wrap(comp.start + comp.length * 0.5)
        assert sets.R.translate(T.g.eval(x)).intersects(sets.A1)
    x_out = wrap(I0.components[0].start - 0.05)
    assert not sets.R.translate(T.g.eval(x_out)).intersects(sets.A1)


def test_compute_I0_degree1_single_component():
    f = make_example1_f(EPS)
    T1 = SkewProductMap(system_preset("t0").omega, make_affine_g(1), f)
    sets1 = build_critical_sets(f, EPS)
    I0 = compute_I0(T1, sets1)
    assert len(I0) == 1


def test_strip_off_window_forces_contraction_region(T, sets):
    # (x,y) in S with x outside int(I0 + w) forces y outside int(A')
    S = StripSection(T, sets)
    I0 = compute_I0(T, sets)
    I0w = I0.translate(T.omega)
    cnt = 0
    for x in RNG.random(2000):
        if I0w.contains(x):
            continue
        arc = S.arc_at(x)
        for t in (0.0, 0.3, 0.7, 1.0):
            y = wrap(arc.start + t * arc.length)
            assert not sets.A1.contains(y, closed=False)
        cnt += 1
    assert cnt > 1500


def test_backward_step_forces_expansion_arc(T, sets):
    # x1 outside I0 + w and y1 in A' implies the preimage fiber point is in A
    I0w = compute_I0(T, sets).translate(T.omega)
    cnt = 0
    for _ in range(2000):
        x1 = RNG.random()
        if I0w.contains(x1):
            continue
        y1 = wrap(sets.A1.start + RNG.random() * sets.A1.length)
        p = T.step_back(TorusPoint(x1, y1))
        assert sets.A.contains(p.y)
        cnt += 1
    assert cnt > 1500


def test_detect_resonance_constructed():
    w = system_preset("t0").omega
    c1 = ArcInterval(0.1, 0.01)
    c2 = ArcInterval(wrap(0.103 + 3 * w), 0.01)
    I = ArcSet([c1, c2])
    res = detect_resonance(I, w, 10)
    assert res is not None and res.nu == 3
    J = merge_resonant(res, w)
    assert J.length < 0.05
    assert ArcSet([J]).intersect_arc(c1).measure == pytest.approx(0.01, abs=1e-12)
    # well separated components: no resonance within the window
    I2 = ArcSet([ArcInterval(0.1, 0.001), ArcInterval(0.7, 0.001)])
    assert detect_resonance(I2, w, 5) is None


def test_build_scale0_practical(T, sets):
    s0 = build_scale0(T, sets, "practical")
    assert not s0.resonant and s0.nu is None
    assert len(s0.J) == 2
    assert s0.K >= 2 and s0.M == s0.K * s0.K
    assert s0.sep_verified >= s0.M + s0.K + 1
    # J0 n (J0 + k w) empty for all verified k
    for k in range(1, s0.sep_verified + 1):
        assert not s0.J.intersects(s0.J.translate(k * T.omega))
    # hat encloses J with |hat \ J| < eps per component
    for a, b in zip(s0.J.components, s0.J_hat.components):
        assert b.length >= a.length
        assert b.length - a.length < EPS


def test_build_scale0_paper_formulas(T, sets):
    s0 = build_scale0(T, sets, "paper")
    # eps = 0.01, Case NR: K0 = [eps^(-1/160)] = 1 -> vacuous at desk scale
    assert s0.K == int(0.01 ** (-1.0 / 160.0)) == 1
    assert s0.M == 1
    assert any("vacuous" in n for n in s0.notes)


def test_paper_formula_case_r_synthetic():
    # resonant instance checks the printed exponents: eps=1e-40 -> K0=100
    eps = 1e-40
    f = make_example1_f(eps)
    T = system_preset("example1", eps=eps)
    sets = build_critical_sets(f, eps)
    w = T.omega
    # widths far above positional float resolution; the formula only needs
    # eps and the detected resonance
    c1 = ArcInterval(0.2, 1e-6)
    c2 = ArcInterval(wrap(0.2 + 3 * w), 1.2e-6)
    I = ArcSet([c1, c2])
    s = _build_scale(T, sets, I, 0, "paper", [], gamma=0.38, sep_cap=200, K_cap=10)
    assert s.resonant and s.nu == 3
    assert s.K == 100
    assert s.M == 10000
    assert len(s.J) == 1


def test_paper_formula_case_nr_eps1e4():
    eps = 1e-4
    T = system_preset("example1", eps=eps)
    sets = build_critical_sets(T.f, eps)
    s0 = build_scale0(T, sets, "paper")
    assert not s0.resonant
    assert s0.K == int(eps ** (-1.0 / 160.0)) == 1


def test_probe_stage0(T, sets):
    s0 = build_scale0(T, sets, "practical")
    p0 = run_probe(T, s0, sets)
    assert p0.component_count == 2
    assert p0.boundary_gap > 0.0
    assert p0.coverage_err <= 1e-8
    # paper derivative window: K/2 log(1/eps) < log phi' < rho K log(1/eps)
    lo = s0.K / 2.0 * math.log(1.0 / EPS)
    hi = 2.0 * s0.K * math.log(1.0 / EPS)
    assert lo < p0.deriv_log_bounds[0] <= p0.deriv_log_bounds[1] < hi
    # NR case: the proof-internal gap bound eps/(4 kappa)
    assert p0.boundary_gap > EPS / (4.0 * 2.5)
    # each component of I1 sits inside a component of J0
    for a in p0.I_next:
        assert any(
            (a.start - b.start) % 1.0 + a.length <= b.length + 1e-12
            for b in s0.J
        )
    # sampled curves strictly increasing
    for c in p0.samples:
        assert np.all(np.diff(c.lifts) > 0.0)


def test_probe_requires_valid_assumptions():
    # the skew shift has f' = 1: no witness arcs, no critical sets
    T0 = system_preset("t0")
    rep = verify_A2(T0.f, 0.1, 2.0)
    assert not rep.passed
    with pytest.raises(AssumptionFailure):
        build_critical_sets(T0.f, 0.1)


def test_next_scale_and_stage1_probe(T, sets):
    s0 = build_scale0(T, sets, "practical")
    p0 = run_probe(T, s0, sets)
    s1 = next_scale(T, s0, p0, sets)
    assert s1.n == 1
    assert s1.K > s0.K
    # containment J1 in J0
    for a in s1.J:
        assert any(
            (a.start - b.start) % 1.0 + a.length <= b.length + 1e-12
            for b in s0.J
        )
    # component widths match the predicted window at these scales
    for a in s1.J:
        assert EPS ** (2 * 2.0 * s0.K) < a.length < EPS ** (s0.K / 2.0)
    p1 = run_probe(T, s1, sets)
    assert p1.component_count == 2
    assert p1.boundary_gap > 0.0
    assert p1.coverage_err <= 1e-8


def test_build_scales_run(T, sets):
    run = build_scales(T, sets, mode="practical", stages=3)
    assert run.stopped is None
    assert len(run.scales) == 3
    assert len(run.probes) == 3
    ks = [s.K for s in run.scales]
    assert ks == sorted(ks)
    for p in run.probes[:2]:
        assert p.component_count == 2 and p.coverage_err <= 1e-8
    summary = run.summary()
    assert summary[0]["probe"]["component_count"] == 2


def test_excluded_measure_paper_faithful():
    # smallest eps where I0 remains positionally representable; the
    # paper-mode exponents are evaluated verbatim here
    eps = 1e-4
    T = system_preset("example1", eps=eps)
    sets = build_critical_sets(T.f, eps)
    s0 = build_scale0(T, sets, "paper", sep_cap=50)
    assert excluded_measure_sum([s0]) < 0.1


def test_excluded_set_structure(T, sets):
    s0 = build_scale0(T, sets, "practical")
    E = excluded_set([s0], T.omega)
    Z = int(s0.M ** 1.5)
    x = wrap(s0.J.components[0].start + 1e-5 - 3 * T.omega)
    assert E.contains(x)
    assert E.measure <= (Z + s0.K + 1) * s0.J.measure + 1e-12


def test_resonance_scale_invariants():
    J1 = ArcSet([ArcInterval(0.1, 0.01)])
    J2 = ArcSet([ArcInterval(0.1, 0.01), ArcInterval(0.5, 0.01)])
    with pytest.raises(ValueError):
        ResonanceScale(0, J2, J2, 2, 4, 3, True, "practical")  # resonant, 2 comps
    with pytest.raises(ValueError):
        ResonanceScale(0, J2, J2, 2, 4, 1, False, "practical")  # nu without resonance
    with pytest.raises(ValueError):
        ResonanceScale(0, J1, J1, 2, 9, None, False, "practical")  # M/K^2 out of range
    s = ResonanceScale(0, J1, J1, 2, 4, 3, True, "practical")
    assert any("nu^2" in n for n in s.notes)  # 9 > 4 recorded


def test_overtake_points_cases():
    xs = np.linspace(0.0, 1.0, 101)
    psi = 0.2 + 1.3 * xs          # strictly increasing, wraps once vs constant
    phi = np.full_like(xs, 0.7)
    crossings, tang = overtake_points(xs, psi, phi)
    assert len(crossings) == 1
    x0 = crossings[0]
    assert circle_dist(wrap(0.2 + 1.3 * x0), 0.7) < 1e-9

    # constant offset never meets an integer
    crossings, _ = overtake_points(xs, phi + 0.3, phi)
    assert crossings == []

    # lift spanning two integer windows: exactly two solutions of psi = beta
    beta = 0.55
    psi2 = beta + 0.4 + 1.8 * xs  # spans (beta+0.4, beta+2.2): hits beta+1, beta+2
    crossings, _ = overtake_points(xs, psi2, np.full_like(xs, beta))
    assert len(crossings) == 2


def test_preimage_components_cases():
    xs = np.linspace(0.0, 1.0, 200)
    target = ArcInterval(0.3, 0.1)
    one = SampledCurve(xs, 0.25 + 0.9 * xs)   # covers exactly one full window
    arcs, onto = preimage_components(one, target)
    assert len(arcs) == 1 and onto == [True]
    comp = arcs.components[0]
    assert one.lift_value(comp.start) == pytest.approx(0.3, abs=1e-9)
    assert one.lift_value(comp.start + comp.length) == pytest.approx(0.4, abs=1e-9)

    two = SampledCurve(xs, 0.28 + 2.0 * xs)   # covers two full windows
    arcs2, onto2 = preimage_components(two, target)
    assert len(arcs2) == 2 and all(onto2)

    empty = SampledCurve(xs, 0.45 + 0.2 * xs)  # range (0.45, 0.65) misses windows
    arcs3, _ = preimage_components(empty, target)
    assert len(arcs3) == 0

    with pytest.raises(ValueError):
        SampledCurve(xs, -xs)  # non-monotone input rejected


def test_separation_horizon_matches_brute_force(T):
    S = ArcSet([ArcInterval(0.1, 0.013), ArcInterval(0.52, 0.013)])
    h = separation_horizon(S, T.omega, 500)
    for k in range(1, h + 1):
        assert not S.intersects(S.translate(k * T.omega))
    assert S.intersects(S.translate((h + 1) * T.omega))
