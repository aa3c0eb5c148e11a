"""Chebyshev collocation for the deformed Rayleigh and Orr-Sommerfeld operators on [-1, 1].

Conventions follow Trefethen's *Spectral Methods in MATLAB*: nodes
x_j = cos(j pi / N), j = 0..N, so x_0 = 1 and x_N = -1. Operator products are
discretized as products of matrices. Dirichlet restriction keeps the interior
rows and columns 1..N-1; the clamped (Dirichlet + Neumann) fourth derivative
uses the interpolant p = (1 - gamma^2) q with q(+-1) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .errors import ContourError, SingularOperatorError
from .profiles import profile_eval


@dataclass(frozen=True)
class ChebGrid:
    N: int
    x: np.ndarray
    D: np.ndarray


def _cheb_matrix(N):
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.r_[2.0, np.ones(N - 1), 2.0] * (-1.0) ** np.arange(N + 1)
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    # negative-sum trick: rows of D must annihilate constants
    D = D - np.diag(D.sum(axis=1))
    return x, D


def cheb_grid(N):
    if int(N) != N or N < 2:
        raise ValueError(f"Chebyshev grid needs an integer N >= 2, got {N!r}")
    x, D = _cheb_matrix(int(N))
    return ChebGrid(int(N), x, D)


def clenshaw_curtis_weights(N):
    """Clenshaw-Curtis weights on the nodes cos(j pi / N), j = 0..N."""
    theta = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    inner = np.arange(1, N)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N * N - 1)
        for k in range(1, N // 2):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(N * theta[inner]) / (N * N - 1)
    else:
        w[0] = w[N] = 1.0 / (N * N)
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2 * v / N
    return w


def _require_reference_segment(contour):
    if contour.domain.is_circle or (contour.domain.a, contour.domain.b) != (-1.0, 1.0):
        raise ContourError("segment discretization works on [-1, 1]; map the problem with profiles.to_reference")


def deform_D(g, contour):
    """D_tau = diag(1 / gamma'(x_j)) D: the derivative along the contour."""
    _require_reference_segment(contour)
    dg = contour.dgamma(g.x)
    if np.min(np.abs(dg)) < 1e-12:
        raise ContourError("gamma' vanishes at a grid point")
    return g.D / dg[:, None]


def helmholtz_dirichlet(D_tau, alpha):
    """Interior block of D_tau^2 minus alpha^2 I."""
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    N = D_tau.shape[0] - 1
    D2 = (D_tau @ D_tau)[1:N, 1:N]
    return D2 - alpha**2 * np.eye(N - 1)


def _checked_inverse(M, what):
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularOperatorError(f"{what} is numerically singular; increase N", cond)
    return np.linalg.inv(M)


def helmholtz_solve(D_tau, alpha, f):
    """Solve (D_tau^2 - alpha^2) u = f with u(+-1) = 0; ``f`` holds interior values."""
    L = helmholtz_dirichlet(D_tau, alpha)
    cond = np.linalg.cond(L)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularOperatorError("Dirichlet Helmholtz block is numerically singular", cond)
    return np.linalg.solve(L, f)


def greens_oracle(alpha, f, grid, n_quad=None):
    """Apply the explicit sinh kernel of (d^2/dx^2 - alpha^2)^{-1} on [-1, 1] (Dirichlet).

    ``f`` holds samples at all N + 1 Chebyshev nodes. The samples are
    interpolated with a barycentric polynomial and each kernel integral is
    computed with a Clenshaw-Curtis rule on the subinterval, so the result is
    independent of any differentiation matrix. Returns samples at the nodes.
    """
    f = np.asarray(f, dtype=complex)
    a, b = -1.0, 1.0
    interp = BarycentricInterpolator(grid.x, f)
    M = n_quad or 2 * grid.N + 32
    w = clenshaw_curtis_weights(M)
    t_ref = np.cos(np.pi * np.arange(M + 1) / M)
    norm = alpha * np.sinh(alpha * (b - a))
    out = np.zeros(grid.N + 1, dtype=complex)
    for j, x in enumerate(grid.x):
        right = left = 0.0
        if x < b:
            h = (b - x) / 2
            t = x + h * (t_ref + 1)
            right = h * np.sum(w * np.sinh(alpha * (b - t)) * interp(t))
        if x > a:
            h = (x - a) / 2
            t = a + h * (t_ref + 1)
            left = h * np.sum(w * np.sinh(alpha * (t - a)) * interp(t))
        out[j] = -(np.sinh(alpha * (x - a)) * right + np.sinh(alpha * (b - x)) * left) / norm
    return out


def clamped_bilaplacian(D_tau, contour, grid):
    """[D(tau)^4]_DN on the interior nodes.

    (diag(1 - gamma^2) D^4 - 8 diag(gamma) D^3 - 12 D^2) diag(1 / (1 - gamma^2)),
    the last factor set to 0 at the endpoints, restricted to rows/cols 1..N-1.
    """
    N = grid.N
    if N < 4:
        raise ValueError("clamped bilaplacian needs N >= 4")
    g = contour.gamma(grid.x)
    D2 = D_tau @ D_tau
    D3 = D2 @ D_tau
    D4 = D2 @ D2
    s = np.zeros(N + 1, dtype=complex)
    s[1:N] = 1.0 / (1.0 - g[1:N] ** 2)
    outer = (1 - g**2)[:, None] * D4 - 8 * g[:, None] * D3 - 12 * D2
    return (outer * s[None, :])[1:N, 1:N]


@dataclass(frozen=True)
class DiscretePencil:
    A: np.ndarray
    B: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SegmentOperators:
    """Everything assembled once per (profile, contour, N); alpha and eps enter later."""

    grid: ChebGrid
    D_tau: np.ndarray
    D2: np.ndarray  # [D_tau^2]_D
    D4: np.ndarray  # [D_tau^4]_DN
    gamma: np.ndarray  # all N + 1 contour points
    vel: np.ndarray  # U(gamma) on interior nodes
    vel2: np.ndarray  # U''(gamma) on interior nodes


def segment_operators(profile, contour, N, with_bilaplacian=True):
    _require_reference_segment(contour)
    if profile.domain.is_circle:
        raise ContourError("segment discretization needs a segment profile")
    grid = cheb_grid(N)
    D_tau = deform_D(grid, contour)
    gam = contour.gamma(grid.x)
    D2 = (D_tau @ D_tau)[1:N, 1:N]
    D4 = clamped_bilaplacian(D_tau, contour, grid) if with_bilaplacian else None
    gi = gam[1:N]
    return SegmentOperators(grid, D_tau, D2, D4, gam, profile_eval(profile, gi), profile_eval(profile, gi, 2))


def os_pencil_from(ops, alpha, eps, meta=None):
    n = ops.D2.shape[0]
    I = np.eye(n)
    L = ops.D2 - alpha**2 * I
    A = ops.vel[:, None] * L - np.diag(ops.vel2)
    if eps != 0:
        A = A + 1j * eps**2 / alpha * (ops.D4 - 2 * alpha**2 * ops.D2 + alpha**4 * I)
    return DiscretePencil(A, L, dict(meta or {}))


def assemble_os_pencil(profile, contour, alpha, eps, N):
    """Generalized eigenproblem A phi = c B phi for the deformed Orr-Sommerfeld operator.

    A = (i eps^2/alpha)([D^4]_DN - 2 alpha^2 [D^2]_D + alpha^4) + U(gamma)([D^2]_D - alpha^2) - U''(gamma)
    B = [D^2]_D - alpha^2
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    ops = segment_operators(profile, contour, N, with_bilaplacian=eps != 0)
    meta = dict(N=N, alpha=alpha, eps=eps, tau=contour.tau, profile=profile.ident, contour=contour.ident)
    return os_pencil_from(ops, alpha, eps, meta)


def rayleigh_q_from(ops, alpha):
    L = ops.D2 - alpha**2 * np.eye(ops.D2.shape[0])
    Linv = _checked_inverse(L, "Dirichlet Helmholtz block")
    return np.diag(ops.vel) - ops.vel2[:, None] * Linv


def assemble_rayleigh_q(profile, contour, alpha, N):
    """Q = diag(U(gamma)) - diag(U''(gamma)) ([D^2]_D - alpha^2)^{-1} on interior nodes.

    Eigenvalues of Q are the discrete resonance candidates; eigenvectors are
    (D^2 - alpha^2) psi for the resonant state psi.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    return rayleigh_q_from(segment_operators(profile, contour, N, with_bilaplacian=False), alpha)
