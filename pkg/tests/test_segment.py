import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import SEGMENT_CORPUS, cos3pi, cos_flow, couette, golden
from hydrospec import segment as seg
from hydrospec.contour import curve_distance, ellipticity_samples, make_contour, make_escape
from hydrospec.eigen import eig, eig_pencil, match_spectra
from hydrospec.errors import ContourError, SingularOperatorError
from hydrospec.profiles import Segment, make_profile

PI = math.pi


def test_cheb_n1_entries():
    x, D = seg._cheb_matrix(1)
    np.testing.assert_allclose(D, np.array(golden("cheb_D_N1")), atol=1e-15)
    np.testing.assert_allclose(x, [1.0, -1.0])


def test_cheb_cubic():
    g = seg.cheb_grid(8)
    np.testing.assert_allclose(g.D @ g.x**3, 3 * g.x**2, atol=1e-11)


def test_cheb_constants():
    g = seg.cheb_grid(8)
    assert np.max(np.abs(g.D @ np.ones(9))) < 1e-12


def test_cheb_rejects_small_n():
    with pytest.raises(ValueError):
        seg.cheb_grid(1)
    with pytest.raises(ValueError):
        seg.cheb_grid(4.5)


@given(N=st.integers(2, 64))
@settings(max_examples=30, deadline=None)
def test_cheb_matches_explicit_formulas(N):
    g = seg.cheb_grid(N)
    x, D = oracles.cheb_closed_form(N)
    np.testing.assert_allclose(g.x, x, atol=1e-15)
    # off-diagonal entries agree exactly; diagonals differ only by rounding
    assert np.max(np.abs(g.D - D)) < 1e-10 * N**2
    assert np.max(np.abs(g.D.sum(axis=1))) < 1e-12 * N**2


@given(N=st.integers(2, 40), data=st.data())
@settings(max_examples=40, deadline=None)
def test_cheb_exact_on_monomials(N, data):
    m = data.draw(st.integers(0, N))
    g = seg.cheb_grid(N)
    want = m * g.x ** (m - 1) if m > 0 else np.zeros(N + 1)
    assert np.max(np.abs(g.D @ g.x**m - want)) < 1e-10 * N**4


def test_deform_identity_at_zero_tau():
    _, c, _ = cos_flow(tau=0.0)
    g = seg.cheb_grid(16)
    np.testing.assert_array_equal(seg.deform_D(g, c), g.D)


def test_chain_rule_quadratic():
    _, c, _ = cos_flow()
    g = seg.cheb_grid(32)
    z = c.gamma(g.x)
    assert np.max(np.abs(seg.deform_D(g, c) @ z**2 - 2 * z)) < 1e-8


def test_chain_rule_exponential():
    _, c, _ = cos_flow()
    g = seg.cheb_grid(48)
    z = c.gamma(g.x)
    assert np.max(np.abs(seg.deform_D(g, c) @ np.exp(2 * z) - 2 * np.exp(2 * z))) < 1e-6


def test_helmholtz_sine():
    _, c, _ = cos_flow(tau=0.0)
    g = seg.cheb_grid(32)
    Dt = seg.deform_D(g, c)
    xi = g.x[1:-1]
    u = seg.helmholtz_solve(Dt, 1.0, -np.sin(PI * xi) * (PI**2 + 1))
    assert np.max(np.abs(u - np.sin(PI * xi))) < 1e-8


def test_helmholtz_zero_forcing():
    _, c, _ = cos_flow(tau=0.0)
    g = seg.cheb_grid(32)
    u = seg.helmholtz_solve(seg.deform_D(g, c), 2.0, np.zeros(31))
    assert np.max(np.abs(u)) == 0


def test_helmholtz_constant_matches_kernel():
    _, c, _ = cos_flow(tau=0.0)
    g = seg.cheb_grid(32)
    u = seg.helmholtz_solve(seg.deform_D(g, c), 1.0, np.ones(31))
    ref = seg.greens_oracle(1.0, np.ones(33), g)
    assert np.max(np.abs(u - ref[1:-1])) < 1e-9
    # closed form for constant forcing: cosh(x)/cosh(1) - 1
    assert np.max(np.abs(u - (np.cosh(g.x[1:-1]) / np.cosh(1) - 1))) < 1e-9


def test_helmholtz_rejects_bad_alpha_and_singular():
    g = seg.cheb_grid(8)
    with pytest.raises(ValueError):
        seg.helmholtz_dirichlet(g.D, 0.0)
    with pytest.raises(SingularOperatorError) as err:
        seg.helmholtz_solve(np.eye(9), 1.0, np.ones(7))  # D^2 - 1 vanishes
    assert err.value.cond > 1e14


def test_kernel_zero():
    g = seg.cheb_grid(16)
    assert np.max(np.abs(seg.greens_oracle(1.0, np.zeros(17), g))) == 0


def test_kernel_sine():
    g = seg.cheb_grid(48)
    u = seg.greens_oracle(1.0, -(PI**2 + 1) * np.sin(PI * g.x), g)
    assert np.max(np.abs(u - np.sin(PI * g.x))) < 1e-7


@given(coeffs=st.lists(st.floats(-1, 1), min_size=3, max_size=6), alpha=st.floats(0.2, 4.0))
@settings(max_examples=20, deadline=None)
def test_kernel_agrees_with_matrix_solve(coeffs, alpha):
    g = seg.cheb_grid(48)
    f = sum(a * np.cos(k * g.x + 0.3 * k) for k, a in enumerate(coeffs)) + np.exp(g.x)
    u = seg.helmholtz_solve(g.D, alpha, f[1:-1])
    ref = seg.greens_oracle(alpha, f, g)
    assert np.max(np.abs(u - ref[1:-1])) < 1e-7 * (1 + np.max(np.abs(f)))


def test_clamped_quartic():
    _, c, _ = cos_flow(tau=0.0)
    g = seg.cheb_grid(16)
    B = seg.clamped_bilaplacian(seg.deform_D(g, c), c, g)
    xi = g.x[1:-1]
    assert np.max(np.abs(B @ (1 - xi**2) ** 2 - 24)) < 1e-8
    assert np.max(np.abs(B @ ((1 - xi**2) ** 2 * xi) - 120 * xi)) < 1e-8


def test_clamped_deformed():
    _, c, _ = cos_flow()
    g = seg.cheb_grid(48)
    B = seg.clamped_bilaplacian(seg.deform_D(g, c), c, g)
    z = c.gamma(g.x[1:-1])
    assert np.max(np.abs(B @ (1 - z**2) ** 2 - 24)) < 1e-6


def test_clamped_needs_n4():
    _, c, _ = cos_flow()
    g = seg.cheb_grid(3)
    with pytest.raises(ValueError):
        seg.clamped_bilaplacian(seg.deform_D(g, c), c, g)


def test_reference_segment_required():
    p = make_profile("couette", {}, Segment(0, 2))
    c = make_contour(make_escape("zero"), 0.0, Segment(0, 2))
    with pytest.raises(ContourError):
        seg.segment_operators(p, c, 16)


def test_inviscid_pencil_has_no_bilaplacian():
    p, c, alpha = cos_flow()
    pen = seg.assemble_os_pencil(p, c, alpha, 0.0, 32)
    ops = seg.segment_operators(p, c, 32, with_bilaplacian=False)
    L = ops.D2 - alpha**2 * np.eye(31)
    np.testing.assert_allclose(pen.A, ops.vel[:, None] * L - np.diag(ops.vel2), atol=0)
    np.testing.assert_allclose(pen.B, L, atol=0)
    assert pen.meta["eps"] == 0 and pen.meta["N"] == 32


def test_viscous_pencil_adds_bilaplacian():
    p, c, alpha = cos_flow()
    eps = 0.01
    A0 = seg.assemble_os_pencil(p, c, alpha, 0.0, 24).A
    A1 = seg.assemble_os_pencil(p, c, alpha, eps, 24).A
    ops = seg.segment_operators(p, c, 24)
    I = np.eye(23)
    extra = 1j * eps**2 / alpha * (ops.D4 - 2 * alpha**2 * ops.D2 + alpha**4 * I)
    np.testing.assert_allclose(A1 - A0, extra, atol=1e-12 * np.max(np.abs(extra)))


def test_pencil_rejects_bad_parameters():
    p, c, alpha = cos_flow()
    with pytest.raises(ValueError):
        seg.assemble_os_pencil(p, c, -1.0, 0.0, 16)
    with pytest.raises(ValueError):
        seg.assemble_os_pencil(p, c, alpha, -0.1, 16)


def test_cos_flow_smallest_eigenvalue_is_zero():
    p, c, alpha = cos_flow()
    pen = seg.assemble_os_pencil(p, c, alpha, 0.0, 64)
    vals = eig_pencil(pen.A, pen.B).values
    assert np.min(np.abs(vals)) < 1e-6


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_couette_pencil_empty_near_point(alpha):
    p, c = couette()
    pen = seg.assemble_os_pencil(p, c, alpha, 0.0, 64)
    vals = eig_pencil(pen.A, pen.B).values
    near = vals[np.abs(vals - 0.2) < 0.05]
    if near.size:
        d = curve_distance(near, ellipticity_samples(p, c, 2048))
        assert np.all(d < 0.02)


def test_couette_q_is_multiplication():
    p, c = couette()
    Q = seg.assemble_rayleigh_q(p, c, 1.3, 32)
    g = seg.cheb_grid(32)
    np.testing.assert_allclose(Q, np.diag(c.gamma(g.x[1:-1])), atol=0)


def test_cos3pi_zero_eigenvalue():
    p, c, alpha = cos3pi()
    vals = eig(seg.assemble_rayleigh_q(p, c, alpha, 96)).values
    assert np.min(np.abs(vals)) < 1e-6


def test_q_and_pencil_routes_agree():
    p, c, alpha = cos_flow()
    q = eig(seg.assemble_rayleigh_q(p, c, alpha, 64)).values
    pen = seg.assemble_os_pencil(p, c, alpha, 0.0, 64)
    w = eig_pencil(pen.A, pen.B).values
    pairs, d = match_spectra(q, w)
    assert len(pairs) == len(q)
    assert np.max(d) < 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("label, build", SEGMENT_CORPUS, ids=[c[0] for c in SEGMENT_CORPUS])
def test_spectral_convergence_corpus(label, build):
    from hydrospec.resonance import resonances_in_window

    p, c, alpha = build()
    for N in (64, 96):
        a = resonances_in_window(p, c, alpha, N, {"center": 0, "radius": 0.05}, certify=False)
        b = resonances_in_window(p, c, alpha, 2 * N, {"center": 0, "radius": 0.05}, certify=False)
        assert len(a) == len(b) == 1
        assert abs(a[0].c - b[0].c) < 1e-8


@pytest.mark.slow
def test_spectral_convergence_off_axis_resonance():
    # U = cos(0.7 pi x) at alpha = sqrt(0.7^2 - 0.45^2) pi has a resonance near 0.054 - 0.021i;
    # its resonant state is singular about tau m0 away from the contour, so it needs tau = 0.3
    from hydrospec.resonance import resonances_in_window

    p, c, _ = cos_flow(tau=0.3)
    alpha = math.sqrt(0.7**2 - 0.45**2) * PI
    win = {"center": [0.05, -0.02], "radius": 0.05}
    for N in (64, 96, 128):
        a = resonances_in_window(p, c, alpha, N, win, certify=False)
        b = resonances_in_window(p, c, alpha, 2 * N, win, certify=False)
        assert len(a) == len(b) == 1
        assert abs(a[0].c - b[0].c) < 1e-8


@pytest.mark.slow
def test_tau_invariance_cos3pi():
    from hydrospec.resonance import resonances_in_window

    p, _, alpha = cos3pi()
    found = []
    for tau in (0.05, 0.075, 0.1):
        _, c, _ = cos3pi(tau)
        recs = resonances_in_window(p, c, alpha, 192, {"center": 0, "radius": 0.3}, certify=False)
        found.append(np.array(sorted((r.c for r in recs), key=lambda z: (round(z.real, 6), z.imag))))
    assert len({len(f) for f in found}) == 1 and len(found[0]) >= 1
    for other in found[1:]:
        _, d = match_spectra(found[0], other)
        assert np.max(d) < 1e-6


@pytest.mark.parametrize("label, build", SEGMENT_CORPUS, ids=[c[0] for c in SEGMENT_CORPUS])
@pytest.mark.parametrize("N", [32, 64, 96])
def test_pencil_b_invertible(label, build, N):
    p, c, alpha = build()
    pen = seg.assemble_os_pencil(p, c, alpha, 0.0, N)
    assert np.linalg.cond(pen.B) < 1e12


def test_clenshaw_curtis_exact_on_polynomials():
    for N in (4, 7, 16):
        w = seg.clenshaw_curtis_weights(N)
        x = np.cos(np.pi * np.arange(N + 1) / N)
        for m in range(N + 1):
            exact = 0.0 if m % 2 else 2.0 / (m + 1)
            assert np.sum(w * x**m) == pytest.approx(exact, abs=1e-13)
