import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import cos3pi, cos_flow, couette, golden, kolmogorov
from hydrospec.contour import (
    contour_map,
    curve_distance,
    ellipticity_samples,
    make_contour,
    make_escape,
    validate_contour,
)
from hydrospec.errors import ContourError
from hydrospec.profiles import Circle, make_profile

PI = math.pi


def test_undeformed_map():
    p, c, _ = cos_flow(tau=0.0)
    assert contour_map(c, 0.3) == pytest.approx(0.3)


def test_endpoints_fixed():
    _, c, _ = cos_flow()
    assert contour_map(c, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert contour_map(c, -1.0) == pytest.approx(-1.0, abs=1e-15)


def test_derivative_at_zero_matches_cas():
    _, c, _ = cos_flow()
    want = golden("dgamma_sin_halfcos_0.7pi_tau0.1_x0")
    assert contour_map(c, 0.0, 1) == pytest.approx(want, abs=1e-15)
    assert want == pytest.approx(1 + 0.1 * 0.7 * PI * 1j, abs=1e-15)


@pytest.mark.parametrize("kind, params", [
    ("sin_halfcos", {"omega": 0.7 * PI}),
    ("trig_shift", {"omega": 1.2 * PI, "theta": 0.4}),
    ("couette_poiseuille", {"theta": 0.3}),
])
def test_escape_derivatives_match_cas(kind, params):
    import sympy as sp

    x = sp.symbols("x", real=True)
    expr = {
        "sin_halfcos": lambda: sp.sin(params["omega"] * x) * sp.cos(sp.pi * x / 2),
        "trig_shift": lambda: -sp.cos(params["omega"] * x + params["theta"]) * sp.cos(sp.pi * x / 2),
        "couette_poiseuille": lambda: (2 * params["theta"] * x + params["theta"] - 1) * sp.cos(sp.pi * x / 2),
    }[kind]()
    e = make_escape(kind, params)
    for x0 in np.linspace(-1, 1, 9):
        assert e.m0(x0) == pytest.approx(float(expr.subs(x, x0)), abs=1e-14)
        assert e.dm0(x0) == pytest.approx(oracles.escape_derivative(expr, x0), abs=1e-13)


def test_cos_flow_pairing_ok():
    p, c, _ = cos_flow()
    assert validate_contour(p, c, 0.0, 0.02).ok


def test_cos3pi_pairing_ok():
    p, c, _ = cos3pi(0.1)
    assert validate_contour(p, c, 0.0, 0.02).ok


def test_kolmogorov_pairing_ok():
    p, c = kolmogorov(tau=0.15)
    assert validate_contour(p, c, 0.0, 0.02).ok


@pytest.mark.xfail(strict=True, reason="tau = 1 violates the angle bound |arg gamma'| < pi/4 near the endpoints")
def test_steep_poiseuille_pairing_ok():
    p = make_profile("couette_poiseuille", {"theta": 0.99})
    c = make_contour(make_escape("couette_poiseuille", {"theta": 0.99}), 1.0)
    assert validate_contour(p, c, 0.5, 0.02).ok


def test_steep_poiseuille_failure_is_angle_only():
    p = make_profile("couette_poiseuille", {"theta": 0.99})
    c = make_contour(make_escape("couette_poiseuille", {"theta": 0.99}), 1.0)
    rep = validate_contour(p, c, 0.5, 0.02)
    assert [f.condition for f in rep.failures] == ["C1"]
    # the largest admissible tau for this escape is about 1 / max |m0'|
    c_small = make_contour(c.escape, 0.3)
    assert validate_contour(p, c_small, 0.5, 0.02).ok


def test_couette_pairing_ok():
    p, c = couette()
    for c0 in (-0.5, 0.0, 0.2, 0.7):
        assert validate_contour(p, c, c0, 0.02).ok


def test_flat_contour_fails_ellipticity():
    p, c, _ = cos_flow(tau=0.0)
    rep = validate_contour(p, c, 0.0, 0.02)
    assert rep.failed("C3")
    assert not rep.ok


def test_negated_escape_fails_sign_condition():
    p, _, _ = cos_flow()
    # -cos(0.7 pi x + 3 pi/2) cos(pi x/2) = -sin(0.7 pi x) cos(pi x/2)
    flipped = make_contour(make_escape("trig_shift", {"omega": 0.7 * PI, "theta": 1.5 * PI}), 0.1)
    rep = validate_contour(p, flipped, 0.0, 0.02)
    assert rep.failed("C2")
    roots = [f.x for f in rep.failures if f.condition == "C2"]
    assert roots


def test_report_lists_every_violation():
    p, _, _ = cos_flow()
    flipped = make_contour(make_escape("trig_shift", {"omega": 0.7 * PI, "theta": 1.5 * PI}), 2.0)
    rep = validate_contour(p, flipped, 0.0, 0.02)
    assert {"C1", "C2", "C4"} <= {f.condition for f in rep.failures}
    assert "C1 violated" in rep.render()


def test_boundary_value_rejected():
    p, c, _ = cos_flow()
    with pytest.raises(ContourError):
        validate_contour(p, c, math.cos(0.7 * PI), 0.02)


def test_bad_arguments():
    p, c, _ = cos_flow()
    with pytest.raises(ContourError):
        validate_contour(p, c, 0.0, 0.0)
    with pytest.raises(ContourError):
        validate_contour(p, c, 0.0, 0.02, n_x=32)
    with pytest.raises(ContourError):
        make_contour(make_escape("sin", {"omega": 1.0}), 0.1)  # m0(1) != 0
    with pytest.raises(ContourError):
        make_contour(make_escape("sin_halfcos", {"omega": 1.0}), -0.1)
    with pytest.raises(ContourError):
        make_escape("spiral", {})
    with pytest.raises(ContourError):
        make_contour(make_escape("neg_cos", {"k": 2.5}), 0.1, Circle())


@given(d1=st.floats(1e-3, 0.5), d2=st.floats(1e-3, 0.5), tau=st.floats(0.0, 0.12))
@settings(max_examples=40, deadline=None)
def test_ellipticity_check_monotone_in_delta(d1, d2, tau):
    lo, hi = sorted((d1, d2))
    p, c, _ = cos_flow(tau=tau)
    if not validate_contour(p, c, 0.0, hi).failed("C3"):
        assert not validate_contour(p, c, 0.0, lo).failed("C3")


def test_couette_curve_real_when_flat():
    p, c = couette(tau=0.0)
    pts = ellipticity_samples(p, c, 128)
    assert np.max(np.abs(pts.imag)) == 0
    assert pts.real.min() >= -1 and pts.real.max() <= 1


def test_cos_flow_curve_below_axis():
    p, c, _ = cos_flow()
    assert np.max(ellipticity_samples(p, c, 1024).imag) <= 1e-10


def test_kolmogorov_curve_direct_evaluation():
    p, c = kolmogorov(tau=0.15)
    pts = ellipticity_samples(p, c, 600)
    x = np.linspace(0, 2 * PI, 600, endpoint=False)
    direct = np.array([cmath.sin(3 * (t - 0.15j * math.cos(3 * t))) for t in x])
    np.testing.assert_allclose(pts, direct, atol=1e-13)
    assert np.max(pts.imag) <= 1e-14
    touching = np.abs(pts.imag) < 1e-12
    assert np.all(np.abs(np.cos(3 * x[touching])) < 1e-6)
    # closed: consecutive samples, including last-to-first, are close
    gaps = np.abs(np.diff(np.r_[pts, pts[:1]]))
    assert gaps.max() < 0.1


def test_curve_distance_polyline():
    curve = np.array([0, 1, 1 + 1j])
    assert curve_distance(0.5 + 0.5j, curve)[0] == pytest.approx(0.5)
    assert curve_distance(0.5 + 0.5j, curve, closed=True)[0] == pytest.approx(0.0, abs=1e-15)


def test_ellipticity_sample_count():
    p, c, _ = cos_flow()
    with pytest.raises(ContourError):
        ellipticity_samples(p, c, 16)
