"""Viscous perturbation of inviscid resonances: closed forms and branch tracking.

On a segment a simple resonance c1 moves linearly in eps = R^{-1/2}; the slope
comes from boundary layers at both endpoints:

    c'(0) = (lam psi'(a)^2 - mu psi'(b)^2) / int_M psi (D^2 - alpha^2) psi / (U - c1) dz

with lam = 1/sqrt(i alpha (U(a) - c1)) (root with Re < 0) and
mu = 1/sqrt(i alpha (U(b) - c1)) (root with Re > 0). On the circle there is
no boundary layer and c(eps) = c1 + c~ eps^2 + O(eps^4) with

    c~ = i/alpha int_M psi/(U - c1) (D^2 - alpha^2)^2 psi dz / int_M U'' (psi/(U - c1))^2 dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from . import circle as circ
from . import segment as seg
from .eigen import cluster, eig, eig_pencil
from .errors import BranchAmbiguityError, BranchCollisionError, MultiplicityError
from .profiles import profile_eval
from .resonance import DEFAULT_CLUSTER_RADIUS


@dataclass(frozen=True)
class BoundaryConstants:
    lam: complex
    mu: complex


def _branch_sqrt(w, sign):
    s = complex(np.sqrt(complex(w)))
    if abs(s.real) <= 1e-14 * abs(s):
        raise BranchAmbiguityError(f"sqrt({w}) is purely imaginary; the branch is ambiguous")
    return s if (s.real > 0) == (sign > 0) else -s


def boundary_constants(profile, alpha, c_val):
    ua, ub = (u.real for u in profile.endpoint_values())
    c_val = complex(c_val)
    if ua == c_val.real or ub == c_val.real:
        raise BranchAmbiguityError("Re c equals a boundary value of U")
    lam = 1.0 / _branch_sqrt(1j * alpha * (ua - c_val), -1)
    mu = 1.0 / _branch_sqrt(1j * alpha * (ub - c_val), +1)
    return BoundaryConstants(lam, mu)


def _simple_state(spec, to_states, c1, radius):
    count, _ = cluster(spec, c1, radius)
    if count != 1:
        raise MultiplicityError(f"expected a simple resonance near {c1}, found {count} eigenvalues")
    i, lam = spec.nearest(c1)
    return lam, spec.vectors[:, i], to_states(spec.vectors[:, i])


def segment_resonant_state(profile, contour, alpha, c1, N, radius=DEFAULT_CLUSTER_RADIUS):
    """(discrete resonance, resonant state on all N+1 nodes, SegmentOperators)."""
    ops = seg.segment_operators(profile, contour, N, with_bilaplacian=False)
    spec = eig(seg.rayleigh_q_from(ops, alpha), vectors=True)
    L = ops.D2 - alpha**2 * np.eye(N - 1)

    def to_states(v):
        out = np.zeros(N + 1, dtype=complex)
        out[1:N] = np.linalg.solve(L, v)
        return out

    lam, _, psi = _simple_state(spec, to_states, c1, radius)
    return lam, psi, ops


def first_order_from_state(profile, contour, alpha, c1, psi, ops, upsample=4):
    """Boundary-layer slope c'(0) from a resonant state sampled on the full Chebyshev grid.

    psi and (D^2 - alpha^2) psi are smooth in x and are interpolated onto
    ``upsample * N`` Clenshaw-Curtis nodes; 1/(U - c1), whose poles sit about
    tau away from the contour, is evaluated exactly there.
    """
    N = ops.grid.N
    dpsi = ops.D_tau @ psi
    lap = (ops.D_tau @ dpsi) - alpha**2 * psi  # (D^2 - alpha^2) psi
    M = max(N, int(upsample * N))
    xf = np.cos(np.pi * np.arange(M + 1) / M)
    if M == N:
        psi_f, lap_f = psi, lap
    else:
        interp = BarycentricInterpolator(ops.grid.x, np.stack([psi, lap], axis=1))
        psi_f, lap_f = interp(xf).T
    u = profile_eval(profile, contour.gamma(xf))
    integrand = psi_f * lap_f / (u - c1) * contour.dgamma(xf)
    w = seg.clenshaw_curtis_weights(M)
    den = np.sum(w * integrand)
    scale = np.sum(w * np.abs(integrand))
    if abs(den) <= 1e-10 * max(scale, 1e-300):
        raise MultiplicityError("the normalising integral vanishes; c1 is not a simple resonance")
    bc = boundary_constants(profile, alpha, c1)
    # x_0 = +1 is b, x_N = -1 is a
    return (bc.lam * dpsi[N] ** 2 - bc.mu * dpsi[0] ** 2) / den


def first_order_segment(profile, contour, alpha, c1, N):
    """First-order coefficient c'(0) of the viscous branch through a simple resonance c1."""
    lam, psi, ops = segment_resonant_state(profile, contour, alpha, c1, N)
    return complex(first_order_from_state(profile, contour, alpha, lam, psi, ops))


def principal_value(f, g, roots, a, b, n=64):
    """p.v. int_a^b f(x) / g(x) dx where g has simple real ``roots`` in (a, b).

    Each root r gets a symmetric panel [r - h, r + h], integrated as
    int_0^h (F(r + t) + F(r - t)) dt so the odd 1/(x - r) part cancels exactly;
    the remaining gaps are regular. Gauss-Legendre with ``n`` nodes per panel.
    """
    F = lambda x: f(x) / g(x)
    roots = np.sort(np.asarray(roots, dtype=float))
    pts = np.r_[a, roots, b]
    gaps = np.diff(pts)
    h = 0.5 * np.minimum(gaps[:-1], gaps[1:])
    t, w = np.polynomial.legendre.leggauss(n)
    total = 0.0
    edges = [a]
    for r, hr in zip(roots, h):
        s = 0.5 * hr * (t + 1)
        total += 0.5 * hr * np.sum(w * (F(r + s) + F(r - s)))
        edges += [r - hr, r + hr]
    edges.append(b)
    for lo, hi in zip(edges[::2], edges[1::2]):
        if hi > lo:
            x = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
            total += 0.5 * (hi - lo) * np.sum(w * F(x))
    return total


def cos_flow_first_order(omega, n=64):
    """Closed-form c'(0) for U = cos(omega x) on [-1, 1], alpha = sqrt(omega^2 - pi^2/4), c1 = 0.

    The contour integral of cos^2(pi x/2)/cos(omega x) is a principal value plus
    the half-residues at x = +-pi/(2 omega): 2 pi i/omega cos^2(pi^2/(4 omega)).
    """
    if not (math.pi / 2 < omega < math.pi):
        raise ValueError(f"omega must lie in (pi/2, pi), got {omega}")
    alpha = math.sqrt(omega**2 - math.pi**2 / 4)
    r = math.pi / (2 * omega)
    pv = principal_value(lambda x: np.cos(math.pi * x / 2) ** 2, lambda x: np.cos(omega * x),
                         [-r, r], -1.0, 1.0, n)
    contour_integral = pv + 2j * math.pi / omega * math.cos(math.pi**2 / (4 * omega)) ** 2
    pref = math.pi**2 * np.exp(1j * math.pi / 4) / (2 * omega**2 * math.sqrt(alpha * abs(math.cos(omega))))
    return complex(pref / contour_integral)


def circle_resonant_state(profile, contour, alpha, c1, N, radius=DEFAULT_CLUSTER_RADIUS):
    ops = circ.circle_operators(profile, contour, alpha, N)
    spec = eig(circ.q_circle_from(ops, 0.0), vectors=True)
    lam, v, _ = _simple_state(spec, lambda v: v, c1, radius)
    return lam, ops.Linv @ v, ops  # psi in coefficient space


def second_order_from_state(profile, contour, alpha, c1, psi_hat, ops):
    g = ops.grid
    psi = g.to_samples(psi_hat)
    bilap = g.to_samples(ops.L @ (ops.L @ psi_hat))
    u = profile_eval(profile, ops.gamma)
    u2 = profile_eval(profile, ops.gamma, 2)
    jac = contour.dgamma(g.x) * (2 * np.pi / g.N)
    ratio = psi / (u - c1)
    num = 1j / alpha * np.sum(ratio * bilap * jac)
    den_terms = u2 * ratio**2 * jac
    den = np.sum(den_terms)
    if abs(den) <= 1e-10 * max(np.sum(np.abs(den_terms)), 1e-300):
        raise MultiplicityError("int U'' (psi/(U - c1))^2 dz vanishes; c1 is not simple")
    return num / den


def second_order_circle(profile, contour, alpha, c1, N):
    """Coefficient c~ in c(eps) = c1 + c~ eps^2 + O(eps^4) on the circle."""
    lam, psi_hat, ops = circle_resonant_state(profile, contour, alpha, c1, N)
    return complex(second_order_from_state(profile, contour, alpha, lam, psi_hat, ops))


@dataclass
class TrackedBranch:
    eps: np.ndarray
    c: np.ndarray
    alpha: float
    tau: float
    N: int
    profile: str
    match_dist: np.ndarray = field(default_factory=lambda: np.array([]))


def default_eps_grid(eps_max, levels=3):
    """{0} together with eps_max 2^-j for j = levels..0, ascending."""
    if not eps_max > 0:
        raise ValueError(f"eps_max must be > 0, got {eps_max}")
    return np.r_[0.0, eps_max * 2.0 ** -np.arange(levels, -1, -1)]


def _spectrum_function(profile, contour, alpha, N, vectors):
    if profile.domain.is_circle:
        ops = circ.circle_operators(profile, contour, alpha, N)
        return lambda e: eig(circ.q_circle_from(ops, e), vectors=vectors)
    ops = seg.segment_operators(profile, contour, N, with_bilaplacian=True)

    def solve(e):
        pen = seg.os_pencil_from(ops, alpha, e)
        return eig_pencil(pen.A, pen.B, vectors=vectors)

    return solve


def track_branch(profile, contour, alpha, c1, eps_grid, N, match="nearest", jump_factor=5.0, max_bisect=8,
                 jump_floor=1e-8):
    """Follow the eigenvalue through c1 as eps increases along ``eps_grid``.

    Each step picks the eigenvalue nearest the previous branch point (or, with
    ``match="overlap"``, the one whose eigenvector overlaps most). A step whose
    displacement per unit eps exceeds ``jump_factor`` times the previous one is
    treated as a possible branch collision and the eps step is halved.
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.size < 2 or eps_grid[0] != 0 or np.any(np.diff(eps_grid) <= 0):
        raise ValueError("eps_grid must start at 0 and increase strictly")
    if match not in ("nearest", "overlap"):
        raise ValueError(f"unknown matching mode {match!r}")
    solve = _spectrum_function(profile, contour, alpha, N, vectors=match == "overlap")

    spec = solve(0.0)
    i, c0 = spec.nearest(c1)
    if abs(c0 - c1) > 1e-8 * max(1.0, abs(c1)):
        raise ValueError(f"seed {c1} is not a discrete resonance (nearest eigenvalue {c0})")
    vec = None if spec.vectors is None else spec.vectors[:, i]
    eps_out, c_out, d_out = [0.0], [c0], [0.0]
    prev_rate = None

    for target in eps_grid[1:]:
        queue = [target]
        halvings = 0
        while queue:
            e = queue[-1]
            spec = solve(e)
            if vec is None:
                j = int(np.argmin(np.abs(spec.values - c_out[-1])))
            else:
                V = spec.vectors / np.linalg.norm(spec.vectors, axis=0)
                j = int(np.argmax(np.abs(V.conj().T @ (vec / np.linalg.norm(vec)))))
            cand = complex(spec.values[j])
            dist = abs(cand - c_out[-1])
            rate = dist / (e - eps_out[-1])
            if prev_rate is not None and dist > jump_floor and rate > jump_factor * prev_rate:
                halvings += 1
                if halvings > max_bisect:
                    raise BranchCollisionError(f"branch jump near eps = {e} persists after {max_bisect} bisections")
                queue.append(0.5 * (eps_out[-1] + e))
                continue
            queue.pop()
            eps_out.append(e)
            c_out.append(cand)
            d_out.append(dist)
            if dist > jump_floor:
                prev_rate = rate
            if vec is not None:
                vec = spec.vectors[:, j]

    return TrackedBranch(np.array(eps_out), np.array(c_out), alpha, contour.tau, N, profile.ident, np.array(d_out))


@dataclass(frozen=True)
class TaylorFit:
    coeffs: np.ndarray  # coeffs[k] multiplies eps^k; coeffs[0] is the anchor c(0)
    residual: float
    cond: float


def fit_taylor(branch, degree, parity="all"):
    """Least-squares polynomial in eps through the anchor c(0).

    With ``parity="even"`` only even powers up to ``degree`` are fitted and the
    odd coefficients are reported as zero. eps is rescaled by its maximum
    before solving, and the condition number of the scaled design is reported.
    """
    if parity not in ("all", "even"):
        raise ValueError(f"parity must be 'all' or 'even', got {parity!r}")
    eps = np.asarray(branch.eps, dtype=float)
    cv = np.asarray(branch.c, dtype=complex)
    if eps[0] != 0:
        raise ValueError("branch must start at eps = 0")
    if eps.size < degree + 2:
        raise ValueError(f"need at least {degree + 2} branch points for degree {degree}")
    powers = [k for k in range(1, degree + 1) if parity == "all" or k % 2 == 0]
    e, y = eps[1:], cv[1:] - cv[0]
    s = e.max()
    V = np.stack([(e / s) ** k for k in powers], axis=1)
    beta, *_ = np.linalg.lstsq(V, y, rcond=None)
    coeffs = np.zeros(degree + 1, dtype=complex)
    coeffs[0] = cv[0]
    for k, b in zip(powers, beta):
        coeffs[k] = b / s**k
    resid = float(np.max(np.abs(V @ beta - y))) if y.size else 0.0
    return TaylorFit(coeffs, resid, float(np.linalg.cond(V)))
