"""Fourier discretization of the deformed operators on R / 2 pi Z.

Operators act on coefficient vectors. The transform is the unitary DFT
``fft(samples) / sqrt(N)`` with wavenumbers in numpy ``fftfreq`` order
(0..N/2-1, -N/2..-1); differentiation is ``diag(i k)``. A multiplication by f
along the contour becomes F diag(f(gamma(x_j))) F^*. These conventions are
checked against analytic probes by :func:`convention_self_test` before any
assembly is trusted.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourError, HydrospecError, SingularOperatorError
from .profiles import profile_eval

CONVENTION = {
    "transform": "coefficients = fft(samples) / sqrt(N)",
    "wavenumbers": "fftfreq order 0..N/2-1, -N/2..-1",
    "derivative": "diag(i k)",
    "laplacian": "L = D^2 - alpha^2, L e^{ikx} = -(k^2 + alpha^2) e^{ikx} at tau = 0",
}


@dataclass(frozen=True)
class FourierGrid:
    N: int
    x: np.ndarray
    k: np.ndarray
    F: np.ndarray
    Finv: np.ndarray

    def to_coeffs(self, samples):
        return np.fft.fft(samples, axis=0) / math.sqrt(self.N)

    def to_samples(self, coeffs):
        return np.fft.ifft(coeffs, axis=0) * math.sqrt(self.N)


def fourier_grid(N):
    if int(N) != N or N < 4 or N % 2:
        raise ValueError(f"Fourier grid needs an even N >= 4, got {N!r}")
    N = int(N)
    x = 2 * np.pi * np.arange(N) / N
    k = np.fft.fftfreq(N, 1.0 / N)
    F = np.fft.fft(np.eye(N), axis=0) / math.sqrt(N)
    return FourierGrid(N, x, k, F, F.conj().T)


def _require_reference_circle(contour):
    if not contour.domain.is_circle or abs(contour.domain.L - 2 * np.pi) > 1e-14:
        raise ContourError("Fourier discretization works on R/2piZ; map the problem with profiles.to_reference")


def multiplication(g, values):
    """Matrix of multiplication by a function with samples ``values``, in coefficient space."""
    return (g.F * values[None, :]) @ g.Finv


def fourier_deformed_D(g, contour):
    """(1 + i tau m0')^{-1} d/dx in coefficient space."""
    _require_reference_circle(contour)
    dg = contour.dgamma(g.x)
    if np.min(np.abs(dg)) < 1e-12:
        raise ContourError("gamma' vanishes at a grid point")
    return multiplication(g, 1.0 / dg) * (1j * g.k)[None, :]


def convention_self_test(N=32, tol=1e-12):
    """Apply the derivative and Laplacian to analytic probes at tau = 0.

    Returns ``{probe: max error}``; every entry must be below ``tol``.
    """
    from .contour import make_contour, make_escape
    from .profiles import Circle

    g = fourier_grid(N)
    flat = make_contour(make_escape("zero"), 0.0, Circle())
    D = fourier_deformed_D(g, flat)
    results = {}
    for name, m in (("constant", 0), ("exp(+ix)", 1), ("exp(-ix)", -1), ("exp(3ix)", 3)):
        u = g.to_coeffs(np.exp(1j * m * g.x))
        want = g.to_coeffs(1j * m * np.exp(1j * m * g.x))
        results[name] = float(np.max(np.abs(D @ u - want)))
    alpha = 1.5
    u = g.to_coeffs(np.exp(2j * g.x))
    L = D @ D - alpha**2 * np.eye(N)
    results["laplacian exp(2ix)"] = float(np.max(np.abs(L @ u + (4 + alpha**2) * u)))
    results["round trip"] = float(np.max(np.abs(g.to_samples(g.to_coeffs(np.cos(g.x))) - np.cos(g.x))))
    results["passed"] = all(v < tol for v in results.values())
    return results


@functools.lru_cache(maxsize=1)
def _self_test_ok():
    return convention_self_test()["passed"]


@dataclass(frozen=True)
class CircleOperators:
    grid: FourierGrid
    D: np.ndarray
    L: np.ndarray
    Linv: np.ndarray
    MU: np.ndarray
    MU2: np.ndarray
    gamma: np.ndarray
    alpha: float


def circle_operators(profile, contour, alpha, N):
    if not profile.domain.is_circle:
        raise ContourError("Fourier discretization needs a circle profile")
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if not _self_test_ok():
        raise HydrospecError("Fourier convention self-test failed; refusing to assemble")
    g = fourier_grid(N)
    D = fourier_deformed_D(g, contour)
    L = D @ D - alpha**2 * np.eye(N)
    cond = np.linalg.cond(L)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularOperatorError("circle Helmholtz operator is numerically singular", cond)
    gam = contour.gamma(g.x)
    return CircleOperators(
        g, D, L, np.linalg.inv(L),
        multiplication(g, profile_eval(profile, gam)),
        multiplication(g, profile_eval(profile, gam, 2)),
        gam, alpha,
    )


def q_circle_from(ops, eps):
    Q = ops.MU - ops.MU2 @ ops.Linv
    if eps != 0:
        Q = Q + 1j * eps**2 / ops.alpha * ops.L
    return Q


def assemble_q_circle(profile, contour, alpha, eps, N):
    """Q = (i eps^2/alpha) L + M_U - M_U'' L^{-1} with L = D^2 - alpha^2 along the contour."""
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    return q_circle_from(circle_operators(profile, contour, alpha, N), eps)
