import math

import numpy as np
import pytest

from snalab.circle import (
    ArcInterval,
    PiecewiseMonotoneCircleMap,
    circle_dist,
    make_affine_g,
    make_example1_f,
    make_identity_f,
    wrap,
)
from snalab.skew import (
    ConstantCurve,
    OMEGA_PRESETS,
    SampledCurve,
    SkewProductMap,
    TorusPoint,
    arc_image,
    curve_derivative,
    fiber_derivative_log_product,
    iterate,
    lyapunov_estimate,
    lyapunov_report,
    omega_preset,
    orbit_breakpoint_margin,
    system_preset,
)

RNG = np.random.default_rng(7)
GOLDEN = OMEGA_PRESETS["golden"]


def test_omega_presets():
    assert OMEGA_PRESETS["golden"] == (math.sqrt(5.0) - 1.0) / 2.0
    assert OMEGA_PRESETS["silver"] == math.sqrt(2.0) - 1.0
    assert OMEGA_PRESETS["invroot2"] == 1.0 / math.sqrt(2.0)
    assert omega_preset("0.25") == 0.25
    assert omega_preset(1.25) == 0.25


def test_step_examples():
    T = SkewProductMap(0.5, make_affine_g(2), make_identity_f())
    q = T.step(TorusPoint(0.25, 0.1))
    assert q.x == pytest.approx(0.75, abs=1e-15)
    assert q.y == pytest.approx(0.6, abs=1e-15)

    T1 = system_preset("example1", eps=0.1)
    q = T1.step(TorusPoint(0.0, 0.0))
    assert q.x == pytest.approx(GOLDEN, abs=1e-15)
    assert q.y == 0.0

    Tk = system_preset("kkho", omega="invroot2", eta=0.1)
    q = Tk.step(TorusPoint(0.0, 0.0))
    assert q.x == pytest.approx(0.7071068, abs=1e-7)
    assert q.y == 0.0


def test_step_back_examples():
    T = SkewProductMap(0.5, make_affine_g(2), make_identity_f())
    q = T.step_back(TorusPoint(0.75, 0.6))
    assert q.x == pytest.approx(0.25, abs=1e-12)
    assert q.y == pytest.approx(0.1, abs=1e-12)

    T1 = system_preset("example1", eps=0.1)
    q = T1.step_back(TorusPoint(GOLDEN, 0.0))
    assert circle_dist(q.x, 0.0) < 1e-12 and circle_dist(q.y, 0.0) < 1e-12


@pytest.mark.parametrize("name,kw", [
    ("example1", {"eps": 0.1}),
    ("example1", {"eps": 0.01}),
    ("kkho", {"eta": 0.1}),
    ("arctan", {"K": 10.0}),
    ("t0", {}),
])
def test_round_trip_many(name, kw):
    T = system_preset(name, **kw)
    pts = RNG.random((10**3, 2))
    for x, y in pts:
        p = TorusPoint(x, y)
        q = T.step_back(T.step(p))
        assert circle_dist(q.x, p.x) < 1e-10
        assert circle_dist(q.y, p.y) < 1e-10
        r = T.step(T.step_back(p))
        assert circle_dist(r.x, p.x) < 1e-10
        assert circle_dist(r.y, p.y) < 1e-10


def test_iterate_basics():
    T = system_preset("example1", eps=0.1)
    rec = iterate(T, TorusPoint(0.3, 0.7), 0)
    assert len(rec) == 1 and rec.point(0) == TorusPoint(0.3, 0.7)

    rec10 = iterate(T, TorusPoint(0.3, 0.7), 10)
    for k in (0, 5, 10):
        assert rec10.log_derivs[k] == math.log(T.f.derivative(rec10.ys[k]))

    # semigroup property
    p = TorusPoint(0.123, 0.456)
    full = iterate(T, p, 37)
    part = iterate(T, p, 20)
    rest = iterate(T, part.point(20), 17)
    assert circle_dist(full.point(37).x, rest.point(17).x) < 1e-9
    assert circle_dist(full.point(37).y, rest.point(17).y) < 1e-9

    # backward iteration mirrors step_back
    back = iterate(T, p, -3)
    q = p
    for k in range(3):
        q = T.step_back(q)
    assert circle_dist(back.point(3).y, q.y) < 1e-12


def test_iterate_golden_base_orbit():
    T = system_preset("t0")
    rec = iterate(T, TorusPoint(0.0, 0.0), 3)
    expect = [wrap(k * GOLDEN) for k in range(4)]
    for k in range(4):
        assert rec.xs[k] == pytest.approx(expect[k], abs=1e-12)
    assert expect[1] == pytest.approx(0.618034, abs=1e-6)
    assert expect[2] == pytest.approx(0.236068, abs=1e-6)
    assert expect[3] == pytest.approx(0.854102, abs=1e-6)


def test_fiber_derivative_log_product():
    T0 = system_preset("t0")
    assert fiber_derivative_log_product(T0, 0.2, 0.9, 0, 50) == 0.0

    T = system_preset("example1", eps=0.1)
    # single step equals the pointwise log derivative
    for x, y in RNG.random((50, 2)):
        rec = iterate(T, TorusPoint(x, y), 6)
        got = fiber_derivative_log_product(T, x, y, 3, 3)
        assert got == pytest.approx(math.log(T.f.derivative(rec.ys[3])), abs=1e-12)
    # a stretch with all fiber values on the contracting piece
    a = T.f.breakpoints[1]
    rec = iterate(T, TorusPoint(0.9, 0.5), 40)
    inside = [k for k in range(41) if a + 1e-4 < rec.ys[k] < 1.0 - 1e-4]
    runs = [k for k in inside if all(j in inside for j in range(k, k + 5))]
    assert runs, "no 5-step run on the contracting piece"
    k0 = runs[0]
    got = fiber_derivative_log_product(T, 0.9, 0.5, k0, k0 + 4)
    assert got == pytest.approx(5 * math.log(0.05), abs=1e-9)


def test_lyapunov_t0_exact_zero():
    T = system_preset("t0")
    assert lyapunov_estimate(T, TorusPoint(0.37, 0.91), 10**6) == 0.0


def test_lyapunov_rotation_fiber_zero():
    # the only constant-slope degree-1 fiber is a rotation: exponent log 1 = 0
    f = PiecewiseMonotoneCircleMap([0.0], [0.37], [1.0], 1)
    T = SkewProductMap(GOLDEN, make_affine_g(2), f)
    assert lyapunov_estimate(T, TorusPoint(0.1, 0.9), 10**4) == 0.0


def test_lyapunov_example1_negative():
    T = system_preset("example1", eps=0.01)
    lam = lyapunov_estimate(T, TorusPoint(0.511, 0.77), 10**6)
    assert lam < math.log(0.01) / 2.0


def test_lyapunov_report_fields():
    T = system_preset("example1", eps=0.01)
    rep = lyapunov_report(T, TorusPoint(0.1, 0.2), 10**5)
    assert rep["average"] < -2.0
    assert rep["tail_window_max"] <= 0.0
    assert rep["n"] == 10**5


def test_curve_derivative_single_step():
    T = system_preset("example1", eps=0.1)
    for x in RNG.random(100):
        got = curve_derivative(T, ConstantCurve(0.3), x, 1)
        assert got == pytest.approx(T.g.derivative(x), abs=1e-12)


def test_curve_derivative_skew_shift_sum():
    T = system_preset("t0")
    for x in RNG.random(20):
        for n in (1, 2, 5, 11):
            got = curve_derivative(T, ConstantCurve(0.3), x, n)
            assert got == pytest.approx(2.0 * n, abs=1e-9)


def test_curve_derivative_lower_bound():
    kappa = 2.5
    T = system_preset("example1", eps=0.1)
    xs = np.linspace(0.01, 0.99, 50)
    curve = SampledCurve(xs, xs * 0.5 + 0.1)  # increasing initial curve
    for x in RNG.uniform(0.1, 0.9, 50):
        for n in (1, 3, 7):
            assert curve_derivative(T, curve, x, n) > 1.0 / kappa


def _lift_of_iterated_curve(T, curve, x, n):
    ylift = curve.value(x)
    for k in range(n):
        ylift = T.fiber_lift(x + k * T.omega, ylift)
    return ylift


def finite_difference_check(T, curve, x, n):
    """Centered-difference oracle; returns (analytic, fd) or None when too
    close to a slope breakpoint for a trustworthy h."""
    d = curve_derivative(T, curve, x, n)
    margin = orbit_breakpoint_margin(T, curve, x, n)
    if margin < 1e-7 or not math.isfinite(d) or d <= 0:
        return None
    h = min(1e-7, 0.05 * margin / max(d, 1.0))
    if h < 1e-12:
        return None
    up = _lift_of_iterated_curve(T, curve, x + h, n)
    dn = _lift_of_iterated_curve(T, curve, x - h, n)
    return d, (up - dn) / (2.0 * h)


def test_curve_derivative_vs_finite_differences():
    T = system_preset("example1", eps=0.1)
    checked = 0
    tries = 0
    while checked < 10**3 and tries < 10**4:
        tries += 1
        x = RNG.random()
        c = ConstantCurve(RNG.random()) if RNG.random() < 0.5 else SampledCurve(
            np.linspace(0, 1, 11), np.linspace(0, 1, 11) * RNG.uniform(0.2, 2.0)
        )
        n = int(RNG.integers(1, 7))
        res = finite_difference_check(T, c, x, n)
        if res is None:
            continue
        analytic, fd = res
        assert abs(analytic - fd) <= 1e-4 * abs(fd) + 1e-12, (x, n, analytic, fd)
        checked += 1
    assert checked == 10**3


def test_arc_image_identity_and_contraction():
    T0 = system_preset("t0")
    Y = ArcInterval(0.3, 0.2)
    img = arc_image(T0, 0.7, Y)
    assert img.length == pytest.approx(0.2, abs=1e-12)

    T = system_preset("example1", eps=0.1)
    a = T.f.breakpoints[1]
    Y = ArcInterval(a + 0.1, 0.15)  # inside B
    img = arc_image(T, 0.2, Y)
    assert img.length == pytest.approx(0.05 * 0.15, rel=1e-12)

    full = arc_image(T, 0.2, ArcInterval(0.0, 1.0))
    assert full.length == 1.0


def test_arc_image_quadrature_oracle():
    T = system_preset("kkho", eta=0.1)
    for _ in range(20):
        s = RNG.random()
        ln = RNG.uniform(0.01, 0.3)
        img = arc_image(T, RNG.random(), ArcInterval(s, ln))
        ys = s + (np.arange(4096) + 0.5) / 4096 * ln
        quad = float(np.mean([T.f.derivative(y) for y in ys]) * ln)
        assert img.length == pytest.approx(quad, rel=1e-6)


def test_arc_image_orientation_cyclic_order():
    T = system_preset("example1", eps=0.1)
    for _ in range(200):
        x = RNG.random()
        y, d1, d2 = RNG.random(), RNG.uniform(0.05, 0.4), RNG.uniform(0.05, 0.4)
        eta = wrap(y + d1)
        zeta = wrap(eta + d2)
        fy = T.step(TorusPoint(x, y)).y
        feta = T.step(TorusPoint(x, eta)).y
        fzeta = T.step(TorusPoint(x, zeta)).y
        # eta in [y, zeta] must be preserved
        assert arc_image(T, x, ArcInterval(y, wrap(d1 + d2))).contains(feta) or \
            ((feta - fy) % 1.0) <= ((fzeta - fy) % 1.0) + 1e-12


def test_derivative_product_vs_arc_length():
    # |T^k fiber image of Y| = exp(sum log f') |Y| while the chain stays on
    # one slope piece
    T = system_preset("example1", eps=0.1)
    a = T.f.breakpoints[1]
    done = 0
    for _ in range(500):
        if done >= 50:
            break
        x = RNG.random()
        y0 = RNG.uniform(a + 0.05, 0.95)
        width = 1e-6
        k = int(RNG.integers(1, 6))
        rec = iterate(T, TorusPoint(x, y0), k)
        margins = [min(circle_dist(yy, 0.0), circle_dist(yy, a)) for yy in rec.ys]
        if min(margins) < 1e-3:
            continue
        Y = ArcInterval(y0, width)
        img = Y
        for j in range(k):
            img = arc_image(T, wrap(x + j * T.omega), img)
        logprod = fiber_derivative_log_product(T, x, y0, 0, k - 1)
        assert img.length == pytest.approx(math.exp(logprod) * width, rel=1e-6)
        done += 1
    assert done >= 50


def test_skew_product_validation():
    with pytest.raises(ValueError):
        SkewProductMap(GOLDEN, make_affine_g(2), make_affine_g(2))  # degree-2 fiber


def test_iterate_record_flags():
    T = system_preset("example1", eps=0.1)
    p = TorusPoint(0.2, 0.4)
    lean = iterate(T, p, 100, record_points=False)
    assert lean.xs is None and lean.ys is None
    assert lean.log_derivs is not None and len(lean.log_derivs) == 101
    with pytest.raises(ValueError):
        lean.point(0)
    nologs = iterate(T, p, 100, record_logs=False)
    assert nologs.log_derivs is None
    assert nologs.point(100) == iterate(T, p, 100).point(100)
