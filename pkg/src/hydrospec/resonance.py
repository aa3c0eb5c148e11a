"""Locating and certifying inviscid resonances.

Two independent routes:

* eigen route: eigenvalues of the discretized Q = U - U'' (D^2 - alpha^2)^{-1}
  on the deformed contour, with values near the ellipticity curve discarded;
* Wronskian route (segments only): shoot Rayleigh's equation along the contour
  from the left endpoint with psi = 0, dpsi/dz = 1; W(c) = psi(b) vanishes
  exactly at resonances, to the order of their multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from . import circle as circ
from . import segment as seg
from .contour import curve_distance, ellipticity_samples, sample_grid
from .eigen import eig
from .errors import ConvergenceError, EllipticityError, MultiplicityError
from .profiles import profile_eval

DEFAULT_BAND = 0.02
DEFAULT_CLUSTER_RADIUS = 1e-4
ODE_TOL = 1e-12


@dataclass(frozen=True)
class Rect:
    re: tuple
    im: tuple

    def contains(self, value):
        value = np.asarray(value)
        re, im = value.real, value.imag
        return (self.re[0] <= re) & (re <= self.re[1]) & (self.im[0] <= im) & (im <= self.im[1])


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, value):
        return np.abs(np.asarray(value) - self.center) < self.radius


def make_window(spec):
    """``{"re": [lo, hi], "im": [lo, hi]}`` or ``{"center": [re, im], "radius": r}``."""
    if isinstance(spec, (Rect, Disk)):
        return spec
    if "radius" in spec:
        cx = spec.get("center", 0.0)
        center = complex(*cx) if isinstance(cx, (list, tuple)) else complex(cx)
        r = float(spec["radius"])
        if not r > 0:
            raise ValueError("window radius must be > 0")
        return Disk(center, r)
    re, im = tuple(map(float, spec["re"])), tuple(map(float, spec["im"]))
    if not (re[0] < re[1] and im[0] < im[1]):
        raise ValueError(f"window ranges must be increasing, got re={re} im={im}")
    return Rect(re, im)


@dataclass
class ResonanceRecord:
    c: complex
    multiplicity: int
    eigen: bool = True
    wronskian: bool = False
    eigen_residual: float = math.nan
    wronskian_abs: float = math.nan
    wronskian_c: complex | None = None
    dist_to_curve: float = math.nan
    states: np.ndarray | None = None  # resonant states along the contour, one column each


def _group(values, radius):
    """Single-linkage clusters of complex values closer than ``radius``."""
    order = np.argsort(values.real, kind="stable")
    groups = []
    for i in order:
        for g in groups:
            if np.min(np.abs(values[g] - values[i])) < radius:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def discrete_resonances(profile, contour, alpha, N):
    """Eigen-decomposition of the inviscid operator; returns (spectrum, state map).

    The state map turns eigenvectors (columns) into resonant states sampled at
    the nodes along the contour, zero-padded at segment endpoints.
    """
    if profile.domain.is_circle:
        ops = circ.circle_operators(profile, contour, alpha, N)
        spec = eig(circ.q_circle_from(ops, 0.0), vectors=True)

        def states(v):
            return ops.grid.to_samples(ops.Linv @ v)

        return spec, states, ops.gamma
    ops = seg.segment_operators(profile, contour, N, with_bilaplacian=False)
    spec = eig(seg.rayleigh_q_from(ops, alpha), vectors=True)
    Lmat = ops.D2 - alpha**2 * np.eye(N - 1)

    def states(v):
        psi = np.linalg.solve(Lmat, v)
        pad = np.zeros((N + 1,) + psi.shape[1:], dtype=complex)
        pad[1:N] = psi
        return pad

    return spec, states, ops.gamma


def resonances_in_window(profile, contour, alpha, N, window, band=DEFAULT_BAND, cluster_radius=DEFAULT_CLUSTER_RADIUS,
                         certify=True, n_curve=2048):
    """Resonances of the Rayleigh operator inside ``window``, away from the ellipticity curve.

    Nearby eigenvalues (closer than ``cluster_radius``) are merged into one record
    whose multiplicity is the cluster size. On a segment each record is also
    checked by Newton on the Wronskian when ``certify`` is set.
    """
    if not band > 0:
        raise ValueError("band must be > 0")
    window = make_window(window)
    spec, to_states, _ = discrete_resonances(profile, contour, alpha, N)
    curve = ellipticity_samples(profile, contour, n_curve)
    closed = contour.domain.is_circle
    inside = np.flatnonzero(window.contains(spec.values))
    if inside.size:
        dist = curve_distance(spec.values[inside], curve, closed)
        inside, dist = inside[dist >= band], dist[dist >= band]
    records = []
    for g in _group(spec.values[inside], cluster_radius) if inside.size else []:
        idx = inside[g]
        cval = complex(np.mean(spec.values[idx]))
        rec = ResonanceRecord(
            c=cval,
            multiplicity=len(idx),
            eigen_residual=float(np.max(spec.residuals[idx])),
            dist_to_curve=float(curve_distance(cval, curve, closed)[0]),
            states=to_states(spec.vectors[:, idx]),
        )
        if certify and not profile.domain.is_circle:
            _certify(rec, profile, contour, alpha, cluster_radius)
        records.append(rec)
    records.sort(key=lambda r: (abs(r.c.imag), r.c.real))
    return records


def _certify(rec, profile, contour, alpha, agree):
    """Confirm a record on the Wronskian route; the Newton root must lie within ``agree``."""
    try:
        rec.wronskian_abs = float(abs(wronskian(profile, contour, alpha, rec.c)))
        if rec.multiplicity == 1:
            root = refine_resonance(profile, contour, alpha, rec.c)
            if abs(root - rec.c) < agree:
                rec.wronskian, rec.wronskian_c = True, root
        else:
            r = 0.5 * rec.dist_to_curve
            if multiplicity_winding(profile, contour, alpha, rec.c, min(r, 0.01)) == rec.multiplicity:
                rec.wronskian, rec.wronskian_c = True, rec.c
    except (ConvergenceError, EllipticityError, MultiplicityError):
        rec.wronskian = False


def _ellipticity_margin(profile, contour, cvals, n=4096):
    """min_x |U(gamma(x)) - c|: dense sampling, then a bounded local refinement."""
    x = sample_grid(contour.domain, n)
    curve = profile_eval(profile, contour.gamma(x))
    out = []
    for cv in np.atleast_1d(cvals):
        d = np.abs(curve - cv)
        i = int(np.argmin(d))
        lo, hi = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
        res = minimize_scalar(lambda t: abs(complex(profile_eval(profile, contour.gamma(t))) - cv),
                              bounds=(min(lo, hi), max(lo, hi)), method="bounded", options={"xatol": 1e-14})
        out.append(min(d[i], float(res.fun)))
    return np.array(out)


def shoot(profile, contour, alpha, c_vals, with_derivative=False, tol=ODE_TOL):
    """Integrate Rayleigh's equation along the contour for several c at once.

    In the contour parameter x, with z = gamma(x):
        d psi / dx = gamma'(x) psi_z,   d psi_z / dx = gamma'(x) (alpha^2 + U''/(U - c)) psi.
    Returns psi(b) (and d psi(b) / dc when ``with_derivative``) per c value.
    """
    if contour.domain.is_circle:
        raise ValueError("the Wronskian route needs a segment (no boundary points on a circle)")
    cv = np.atleast_1d(np.asarray(c_vals, dtype=complex))
    margin = _ellipticity_margin(profile, contour, cv)
    if np.min(margin) <= 1e-8:
        bad = cv[int(np.argmin(margin))]
        raise EllipticityError(f"U(gamma(x)) - c nearly vanishes on the contour for c = {bad}")
    K = cv.size
    a2 = alpha * alpha

    def rhs(x, y):
        z = contour.gamma(x)
        dg = contour.dgamma(x)
        u, u2 = profile_eval(profile, z), profile_eval(profile, z, 2)
        diff = u - cv
        q = a2 + u2 / diff
        y = y.reshape(-1, K)
        out = np.empty_like(y)
        out[0] = dg * y[1]
        out[1] = dg * q * y[0]
        if with_derivative:
            out[2] = dg * y[3]
            out[3] = dg * (q * y[2] + u2 / diff**2 * y[0])
        return out.ravel()

    rows = 4 if with_derivative else 2
    y0 = np.zeros((rows, K), dtype=complex)
    y0[1] = 1.0
    sol = solve_ivp(rhs, (contour.domain.a, contour.domain.b), y0.ravel(), method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise ConvergenceError(f"Rayleigh shooting failed: {sol.message}")
    yb = sol.y[:, -1].reshape(rows, K)
    if with_derivative:
        return yb[0], yb[2]
    return yb[0]


def wronskian(profile, contour, alpha, c_val):
    """W(c) = f_c^+(b): the left-anchored Rayleigh solution evaluated at the right end."""
    w = shoot(profile, contour, alpha, c_val)
    return complex(w[0]) if np.ndim(c_val) == 0 else w


def refine_resonance(profile, contour, alpha, c_init, tol=1e-10, max_iter=50):
    """Newton iteration on W, with dW/dc from the variational equation."""
    cz = complex(c_init)
    w_init = None
    for _ in range(max_iter):
        w, dw = shoot(profile, contour, alpha, cz, with_derivative=True)
        w, dw = complex(w[0]), complex(dw[0])
        if abs(w) < tol:
            # one last Newton step polishes the root when W is well conditioned there
            if abs(dw) > 1e-12 and abs(w / dw) < 1e-6:
                cz -= w / dw
            return cz
        w_init = abs(w) if w_init is None else w_init
        if abs(dw) < 1e-12 * max(1.0, abs(w)):
            if abs(w) < 1e-3 * max(w_init, 1.0):
                raise MultiplicityError(f"dW/dc vanishes near c = {cz}; use multiplicity_winding")
            raise ConvergenceError(f"W is flat at c = {cz}, far from any root (started at {c_init})")
        step = w / dw
        cz -= step
        if abs(step) < 1e-14 * (1 + abs(cz)):
            if abs(complex(wronskian(profile, contour, alpha, cz))) < 1e3 * tol:
                return cz
            break
    raise ConvergenceError(f"Newton on the Wronskian did not converge from {c_init}")


def multiplicity_winding(profile, contour, alpha, center, radius, n_nodes=256, max_nodes=4096):
    """Number of zeros of W (with multiplicity) inside the circle |c - center| < radius."""
    if n_nodes < 256:
        raise ValueError("use at least 256 nodes")
    curve = ellipticity_samples(profile, contour, 4096)
    if curve_distance(center, curve)[0] <= radius:
        raise EllipticityError("the disc reaches the ellipticity curve, where W is not analytic")
    n = n_nodes
    while True:
        theta = 2 * np.pi * np.arange(n) / n
        w = np.asarray(wronskian(profile, contour, alpha, center + radius * np.exp(1j * theta)))
        if np.min(np.abs(w)) <= 1e-10:
            raise ConvergenceError("W vanishes on the integration circle; change the radius")
        dphi = np.angle(np.roll(w, -1) / w)
        if np.max(np.abs(dphi)) <= math.pi / 2:
            break
        if 2 * n > max_nodes:
            raise ConvergenceError("phase of W jumps too fast even with the maximum node count")
        n *= 2
    turns = np.sum(dphi) / (2 * math.pi)
    k = int(round(turns))
    if abs(turns - k) > 0.1:
        raise ConvergenceError(f"winding number {turns:.3f} is not close to an integer")
    return k
