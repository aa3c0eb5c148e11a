"""Complex deformations x -> x + i tau m0(x) of a segment or circle.

An escape function m0 bends the real domain into the half-plane where the
Rayleigh operator becomes elliptic near a regular value c0 of U. Built-in
families (parameters in braces):

    zero                 m0 = 0
    sin_halfcos {omega}  m0 = sin(omega x) cos(pi x / 2)
    sin {omega}          m0 = sin(omega x)
    neg_cos {k}          m0 = -cos(k x)
    couette_poiseuille {theta}
                         m0 = (2 theta x + theta - 1) cos(pi x / 2)
    trig_shift {omega, theta}
                         m0 = -cos(omega x + theta) cos(pi x / 2)

``trig_shift`` generalises ``sin_halfcos`` (theta = pi/2) to the profiles
sin(omega x + theta): m0 U' = -omega cos^2(omega x + theta) cos(pi x/2) <= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ContourError
from .profiles import Circle, Segment, profile_eval

HALF_PI = 0.5 * math.pi

_FAMILIES = {
    "zero": (),
    "sin_halfcos": ("omega",),
    "sin": ("omega",),
    "neg_cos": ("k",),
    "couette_poiseuille": ("theta",),
    "trig_shift": ("omega", "theta"),
}


@dataclass(frozen=True)
class EscapeFunction:
    kind: str
    params: tuple = ()

    @property
    def ident(self):
        inner = ",".join(f"{k}={v:.12g}" for k, v in self.params)
        return f"{self.kind}({inner})"

    def m0(self, x):
        return _escape_eval(self, np.asarray(x, dtype=float), 0)

    def dm0(self, x):
        return _escape_eval(self, np.asarray(x, dtype=float), 1)


def make_escape(kind, params=None):
    if kind not in _FAMILIES:
        raise ContourError(f"unknown escape family {kind!r}; expected one of {tuple(_FAMILIES)}")
    params = dict(params or {})
    need = _FAMILIES[kind]
    if set(params) != set(need):
        raise ContourError(f"escape {kind} takes parameters {need}, got {sorted(params)}")
    clean = []
    for name in need:
        try:
            value = float(params[name])
        except (TypeError, ValueError):
            raise ContourError(f"escape parameter {name} must be real, got {params[name]!r}") from None
        if not math.isfinite(value):
            raise ContourError(f"escape parameter {name} must be finite")
        clean.append((name, value))
    return EscapeFunction(kind, tuple(clean))


def _escape_eval(e, x, order):
    p = dict(e.params)
    if e.kind == "zero":
        return np.zeros_like(x)
    if e.kind == "sin":
        om = p["omega"]
        return np.sin(om * x) if order == 0 else om * np.cos(om * x)
    if e.kind == "neg_cos":
        k = p["k"]
        return -np.cos(k * x) if order == 0 else k * np.sin(k * x)

    # remaining families are f(x) cos(pi x / 2)
    h, dh = np.cos(HALF_PI * x), -HALF_PI * np.sin(HALF_PI * x)
    if e.kind == "sin_halfcos":
        om = p["omega"]
        f, df = np.sin(om * x), om * np.cos(om * x)
    elif e.kind == "couette_poiseuille":
        th = p["theta"]
        f, df = 2 * th * x + th - 1, np.full_like(x, 2 * th)
    else:  # trig_shift
        om, th = p["omega"], p["theta"]
        f, df = -np.cos(om * x + th), om * np.sin(om * x + th)
    return f * h if order == 0 else df * h + f * dh


@dataclass(frozen=True)
class DeformedContour:
    """gamma_tau(x) = x + i tau m0(x) over a segment or a circle."""

    escape: EscapeFunction
    tau: float
    domain: Segment | Circle = field(default_factory=Segment)

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ContourError(f"tau must be a finite number >= 0, got {self.tau}")
        if self.domain.is_circle:
            L = self.domain.L
            probe = np.array([0.0, 0.37, 1.3])
            if np.max(np.abs(self.escape.m0(probe + L) - self.escape.m0(probe))) > 1e-12:
                raise ContourError(f"escape {self.escape.ident} is not {L}-periodic")
        else:
            ends = self.escape.m0(np.array([self.domain.a, self.domain.b]))
            if np.max(np.abs(ends)) > 1e-12:
                raise ContourError(
                    f"escape {self.escape.ident} must vanish at the segment endpoints, got m0 = {ends}"
                )

    @property
    def ident(self):
        return f"{self.escape.ident}*tau={self.tau:.12g}"

    def gamma(self, x):
        x = np.asarray(x, dtype=float)
        return x + 1j * self.tau * self.escape.m0(x)

    def dgamma(self, x):
        x = np.asarray(x, dtype=float)
        return 1 + 1j * self.tau * self.escape.dm0(x)


def make_contour(escape, tau, domain=None):
    if isinstance(escape, dict):
        escape = make_escape(escape["kind"], escape.get("params"))
    return DeformedContour(escape, float(tau), domain if domain is not None else Segment())


def contour_map(contour, x, order=0):
    """gamma_tau(x) for order 0, gamma_tau'(x) for order 1."""
    if order == 0:
        out = contour.gamma(x)
    elif order == 1:
        out = contour.dgamma(x)
    else:
        raise ContourError(f"contour order must be 0 or 1, got {order!r}")
    return complex(out) if np.ndim(out) == 0 else out


def sample_grid(domain, n):
    if domain.is_circle:
        return np.linspace(0.0, domain.L, n, endpoint=False)
    return np.linspace(domain.a, domain.b, n)


def ellipticity_samples(profile, contour, n_s=1024):
    """The curve {U(gamma_tau(x))}: c values where Rayleigh's equation is not elliptic.

    Discrete eigenvalues hugging this curve are discretization artefacts.
    """
    if n_s < 64:
        raise ContourError(f"need at least 64 samples, got {n_s}")
    x = sample_grid(contour.domain, n_s)
    return profile_eval(profile, contour.gamma(x))


def curve_distance(points, curve, closed=False):
    """Distance from each point to the polyline through ``curve``."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    cv = np.asarray(curve, dtype=complex)
    if closed:
        cv = np.append(cv, cv[0])
    if cv.size == 1:
        return np.abs(pts - cv[0])
    a, d = cv[:-1], np.diff(cv)
    dd = np.abs(d) ** 2
    dd[dd == 0] = 1.0
    t = np.real((pts[:, None] - a[None, :]) * np.conj(d)[None, :]) / dd[None, :]
    t = np.clip(t, 0.0, 1.0)
    return np.min(np.abs(pts[:, None] - (a[None, :] + t * d[None, :])), axis=1)


def _segment_polyline_distance(lo, hi, curve, closed):
    """Distance between the real interval [lo, hi] and a complex polyline."""
    cv = np.asarray(curve, dtype=complex)
    if closed:
        cv = np.append(cv, cv[0])
    p, q = cv[:-1], cv[1:]
    # a polyline edge crossing the real axis inside [lo, hi] touches the interval
    crosses = (p.imag <= 0) & (q.imag >= 0) | (p.imag >= 0) & (q.imag <= 0)
    dy = q.imag - p.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(dy != 0, -p.imag / dy, 0.0)
    xr = p.real + s * (q.real - p.real)
    flat = crosses & (dy == 0)
    hit = crosses & ~flat & (xr >= lo) & (xr <= hi)
    hit |= flat & (np.maximum(p.real, q.real) >= lo) & (np.minimum(p.real, q.real) <= hi)
    if np.any(hit):
        return 0.0
    ends = np.array([lo, hi], dtype=complex)
    d1 = np.min(curve_distance(ends, cv))
    xc = np.clip(cv.real, lo, hi)
    d2 = np.min(np.abs(cv - xc))
    return float(min(d1, d2))


@dataclass(frozen=True)
class Failure:
    condition: str
    x: float
    value: float


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple = ()
    margins: tuple = ()

    @property
    def ok(self):
        return not self.failures

    def failed(self, condition):
        return any(f.condition == condition for f in self.failures)

    def render(self):
        lines = ["contour validation: " + ("ok" if self.ok else "FAILED")]
        for name, value in self.margins:
            lines.append(f"  margin {name}: {value:.6g}")
        for f in self.failures:
            lines.append(f"  {f.condition} violated at x = {f.x:.6g} (value {f.value:.6g})")
        return "\n".join(lines)


def _real_roots(profile, c0, domain, n):
    """Roots of Re U(x) - c0 inside the open domain, by bracketing on a grid."""
    if domain.is_circle:
        x = np.linspace(0.0, domain.L, n + 1)
    else:
        x = np.linspace(domain.a, domain.b, n + 1)
    f = np.real(profile_eval(profile, x)) - c0
    roots = []
    for i in range(n):
        if f[i] == 0.0 and (domain.is_circle or 0 < i):
            roots.append(x[i])
        elif f[i] * f[i + 1] < 0:
            roots.append(brentq(lambda s: np.real(profile_eval(profile, s)) - c0, x[i], x[i + 1], xtol=1e-14))
    if domain.is_circle:
        roots = [r for r in roots if r < domain.L]
    return np.array(roots)


def validate_contour(profile, contour, c0, delta, n_x=512, n_t=5, tol=None):
    """Check on finite grids that the contour makes Rayleigh's equation elliptic near c0.

    Conditions
      C1  |arg(1 + i tau m0'(x))| < pi/4
      C2  m0 U' <= 0 everywhere, < 0 at the real roots of U - c0
      C3  the curve U(gamma_tau(x)) stays away from the real interval [c0 - delta, c0 + delta]
      C4  Im U(x + i t tau m0(x)) <= tol for t in linspace(0, 1, n_t)

    C3 is checked against the whole interval (not only its endpoints and
    centre) so the result is monotone in delta.
    """
    if not delta > 0:
        raise ContourError(f"delta must be > 0, got {delta}")
    if n_x < 64 or n_t < 2:
        raise ContourError("grid sizes must be n_x >= 64 and n_t >= 2")
    if type(profile.domain) is not type(contour.domain):
        raise ContourError("profile and contour live on different kinds of domain")
    if not profile.domain.is_circle:
        ua, ub = profile.endpoint_values()
        if min(abs(ua - c0), abs(ub - c0)) < 1e-10:
            raise ContourError(f"c0 = {c0} is a boundary value of U")
    if tol is None:
        tol = 1e-10 * (1 + contour.tau)

    x = sample_grid(contour.domain, n_x)
    failures = []
    margins = []

    # C1
    ang = np.abs(np.angle(contour.dgamma(x)))
    i = int(np.argmax(ang))
    margins.append(("C1", float(math.pi / 4 - ang[i])))
    if ang[i] >= math.pi / 4:
        failures.append(Failure("C1", float(x[i]), float(ang[i])))

    # C2
    m0 = contour.escape.m0(x)
    sign = m0 * np.real(profile_eval(profile, x, 1))
    i = int(np.argmax(sign))
    scale = 1e-14 * (1 + np.max(np.abs(sign)))
    if sign[i] > scale:
        failures.append(Failure("C2", float(x[i]), float(sign[i])))
    roots = _real_roots(profile, c0, contour.domain, 4 * n_x)
    if roots.size:
        at_roots = contour.escape.m0(roots) * np.real(profile_eval(profile, roots, 1))
        j = int(np.argmax(at_roots))
        margins.append(("C2", float(-at_roots[j])))
        if at_roots[j] >= -scale:
            failures.append(Failure("C2", float(roots[j]), float(at_roots[j])))

    # C3
    curve = profile_eval(profile, contour.gamma(x))
    gap = _segment_polyline_distance(c0 - delta, c0 + delta, curve, contour.domain.is_circle)
    margins.append(("C3", gap))
    if gap <= 1e-10 * (1 + np.max(np.abs(curve))):
        k = int(np.argmin(np.abs(curve - np.clip(curve.real, c0 - delta, c0 + delta))))
        failures.append(Failure("C3", float(x[k]), float(gap)))

    # C4
    worst, worst_x = -np.inf, 0.0
    for t in np.linspace(0.0, 1.0, n_t):
        im = np.imag(profile_eval(profile, x + 1j * t * contour.tau * m0))
        k = int(np.argmax(im))
        if im[k] > worst:
            worst, worst_x = float(im[k]), float(x[k])
    margins.append(("C4", tol - worst))
    if worst > tol:
        failures.append(Failure("C4", worst_x, worst))

    return ValidationReport(tuple(failures), tuple(margins))
