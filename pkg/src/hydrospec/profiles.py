"""Closed-form shear profiles U with analytic continuation to complex arguments.

Built-in kinds:

    couette             U(x) = x
    couette_poiseuille  U(x) = (1 - theta) x + theta (1 - x^2)
    trig                U(x) = sin(omega x + theta)
    kolmogorov          U(x) = sin(k x),  k a positive integer

All of them are entire functions, so ``profile_eval`` never fails. Profiles are
immutable and can be shared between worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ProfileError

KINDS = ("couette", "couette_poiseuille", "trig", "kolmogorov")

_REQUIRED = {
    "couette": (),
    "couette_poiseuille": ("theta",),
    "trig": ("omega", "theta"),
    "kolmogorov": ("k",),
}


@dataclass(frozen=True)
class Segment:
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ProfileError(f"segment needs finite a < b, got [{self.a}, {self.b}]")

    @property
    def is_circle(self):
        return False


@dataclass(frozen=True)
class Circle:
    L: float = 2 * math.pi

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise ProfileError(f"circle needs period L > 0, got {self.L}")

    @property
    def is_circle(self):
        return True


def make_domain(spec):
    """Build a domain from ``{"segment": [a, b]}`` or ``{"circle": L}``."""
    if isinstance(spec, (Segment, Circle)):
        return spec
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ProfileError(f"domain must be {{'segment': [a, b]}} or {{'circle': L}}, got {spec!r}")
    (name, value), = spec.items()
    if name == "segment":
        try:
            a, b = (float(v) for v in value)
        except (TypeError, ValueError):
            raise ProfileError(f"segment endpoints must be two reals, got {value!r}") from None
        return Segment(a, b)
    if name == "circle":
        try:
            L = float(value)
        except (TypeError, ValueError):
            raise ProfileError(f"circle period must be a real, got {value!r}") from None
        return Circle(L)
    raise ProfileError(f"unknown domain type {name!r}")


@dataclass(frozen=True)
class ShearProfile:
    """A shear profile on a segment or circle.

    ``scale`` and ``shift`` describe an affine change of variable
    x = shift + scale * s applied before the closed form; they are 1 and 0
    unless the profile was produced by :func:`to_reference`.
    """

    kind: str
    params: tuple = ()
    domain: Segment | Circle = field(default_factory=Segment)
    scale: float = 1.0
    shift: float = 0.0

    @property
    def param_dict(self):
        return dict(self.params)

    @property
    def ident(self):
        inner = ",".join(f"{k}={v:.12g}" for k, v in self.params)
        return f"{self.kind}({inner})"

    def __call__(self, z, order=0):
        return profile_eval(self, z, order)

    def endpoint_values(self):
        if self.domain.is_circle:
            raise ProfileError("a circle profile has no endpoints")
        return (complex(profile_eval(self, self.domain.a)), complex(profile_eval(self, self.domain.b)))


def make_profile(kind, params=None, domain=None):
    """Build a :class:`ShearProfile` and check its parameters.

    ``params`` is a mapping using the names ``theta``, ``omega`` and ``k``.
    ``domain`` is a :class:`Segment`, :class:`Circle` or a config-style dict;
    it defaults to the segment [-1, 1].
    """
    if kind not in _REQUIRED:
        raise ProfileError(f"unknown profile kind {kind!r}; expected one of {KINDS}")
    params = dict(params or {})
    required = _REQUIRED[kind]
    missing = [p for p in required if p not in params]
    extra = [p for p in params if p not in required]
    if missing or extra:
        raise ProfileError(f"{kind} takes parameters {required}; missing {missing}, unexpected {extra}")

    clean = []
    for name in required:
        value = params[name]
        if name == "k":
            if isinstance(value, bool) or not float(value).is_integer() or value <= 0:
                raise ProfileError(f"kolmogorov wavenumber k must be a positive integer, got {value!r}")
            value = int(value)
        else:
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ProfileError(f"parameter {name} must be real, got {value!r}") from None
            if not math.isfinite(value):
                raise ProfileError(f"parameter {name} must be finite, got {value!r}")
        clean.append((name, value))

    dom = make_domain(domain) if domain is not None else Segment()
    profile = ShearProfile(kind, tuple(clean), dom)
    if dom.is_circle:
        _check_periodic(profile)
    return profile


def _check_periodic(profile):
    probe = np.array([0.1, 0.7, 1.9, 3.3])
    for order in (0, 1):
        gap = np.abs(profile_eval(profile, probe + profile.domain.L, order) - profile_eval(profile, probe, order))
        if np.max(gap) > 1e-9 * (1 + np.max(np.abs(profile_eval(profile, probe, order)))):
            raise ProfileError(f"{profile.ident} is not {profile.domain.L}-periodic")


def profile_eval(profile, z, order=0):
    """U(z), U'(z) or U''(z) for complex (array) ``z``; returns complex values."""
    if order not in (0, 1, 2):
        raise ProfileError(f"order must be 0, 1 or 2, got {order!r}")
    z = np.asarray(z, dtype=complex)
    w = profile.shift + profile.scale * z
    prm = profile.param_dict
    if profile.kind == "couette":
        out = (w, np.ones_like(w), np.zeros_like(w))[order]
    elif profile.kind == "couette_poiseuille":
        th = prm["theta"]
        if order == 0:
            out = (1 - th) * w + th * (1 - w * w)
        elif order == 1:
            out = (1 - th) - 2 * th * w
        else:
            out = np.full_like(w, -2 * th)
    else:
        if profile.kind == "trig":
            om, th = prm["omega"], prm["theta"]
        else:
            om, th = float(prm["k"]), 0.0
        arg = om * w + th
        out = (np.sin(arg), om * np.cos(arg), -om * om * np.sin(arg))[order]
    out = out * profile.scale**order
    return out[()] if out.ndim == 0 else out


def to_reference(profile, alpha=None, eps=None):
    """Map a profile onto the reference domain used by the discretizations.

    Segments go to [-1, 1], circles to R/2piZ. With x = shift + h s, the
    Orr-Sommerfeld problem keeps its eigenvalues c when alpha -> alpha h and
    eps -> eps / sqrt(h). Returns ``(profile, alpha, eps)``.
    """
    if profile.domain.is_circle:
        h = profile.domain.L / (2 * math.pi)
        shift = profile.shift
        dom = Circle()
    else:
        a, b = profile.domain.a, profile.domain.b
        h = (b - a) / 2
        shift = profile.shift + profile.scale * (a + b) / 2
        dom = Segment()
    ref = replace(profile, domain=dom, scale=profile.scale * h, shift=shift)
    new_alpha = None if alpha is None else alpha * h
    new_eps = None if eps is None else eps / math.sqrt(h)
    return ref, new_alpha, new_eps
