"""Dense non-Hermitian eigenproblems, backed by LAPACK through scipy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .errors import EigenSolveError, SingularOperatorError


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray | None = None
    residuals: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def nearest(self, target):
        i = int(np.argmin(np.abs(self.values - target)))
        return i, complex(self.values[i])


def _check_matrix(M, name):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _residuals(A, B, values, vectors):
    Av = A @ vectors
    Bv = vectors if B is None else B @ vectors
    r = np.linalg.norm(Av - Bv * values[None, :], axis=0)
    return r / np.linalg.norm(vectors, axis=0)


def eig(M, vectors=False, meta=None):
    M = _check_matrix(M, "matrix")
    try:
        if vectors:
            w, v = sla.eig(M)
        else:
            w, v = sla.eigvals(M), None
    except sla.LinAlgError as exc:
        raise EigenSolveError(f"eigenvalue iteration failed to converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigenSolveError("eigenvalue solver returned non-finite values")
    res = _residuals(M, None, w, v) if vectors else None
    return Spectrum(w, v, res, dict(meta or {}))


def eig_pencil(A, B, vectors=False, meta=None, max_cond=1e14):
    """Eigenvalues of A v = c B v via QZ; B must be invertible."""
    A = _check_matrix(A, "A")
    B = _check_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"A and B differ in shape: {A.shape} vs {B.shape}")
    cond = np.linalg.cond(B)
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularOperatorError("pencil matrix B is numerically singular", cond)
    try:
        if vectors:
            w, v = sla.eig(A, B)
        else:
            w, v = sla.eigvals(A, B), None
    except sla.LinAlgError as exc:
        raise EigenSolveError(f"QZ iteration failed to converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigenSolveError("QZ returned infinite eigenvalues although B is invertible")
    res = _residuals(A, B, w, v) if vectors else None
    return Spectrum(w, v, res, dict(meta or {}))


def cluster(spectrum, center, radius):
    """Eigenvalues within ``radius`` of ``center``; the count estimates multiplicity."""
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    values = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=complex)
    members = values[np.abs(values - center) < radius]
    return len(members), members


def match_spectra(a, b, tol=np.inf):
    """Optimal pairing of two eigenvalue multisets.

    Returns ``(pairs, distances)`` restricted to pairs closer than ``tol``;
    pairs index into ``a`` and ``b``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size == 0 or b.size == 0:
        return [], np.array([])
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    d = cost[rows, cols]
    keep = d <= tol
    return list(zip(rows[keep].tolist(), cols[keep].tolist())), d[keep]
