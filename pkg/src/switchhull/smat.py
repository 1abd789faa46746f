"""Small dense symmetric matrices (dimension <= 6).

Eigenvalues come from a cyclic Jacobi sweep compiled with numba; at these
sizes it is both simpler and more accurate than a QR iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MAX_DIM = 6


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerances shared by every membership test.

    psd_tol is relative: a matrix passes as PSD when its smallest eigenvalue
    is at least ``-psd_tol * (1 + max|S_ij|)``.  eq_tol is an absolute slack
    on linear (in)equalities.
    """

    psd_tol: float = 1e-9
    eq_tol: float = 1e-9

    def __post_init__(self):
        if not (self.psd_tol > 0 and self.eq_tol > 0):
            raise ValueError("tolerances must be strictly positive")

    def loosened(self, factor: float) -> "TolerancePolicy":
        return TolerancePolicy(self.psd_tol * factor, self.eq_tol * factor)


DEFAULT_TOL = TolerancePolicy()


class SymMat:
    """Symmetric matrix stored by its upper triangle (row-major)."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries):
        entries = np.asarray(entries, dtype=float).ravel()
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"dim must be in [1, {MAX_DIM}], got {dim}")
        if entries.size != dim * (dim + 1) // 2:
            raise ValueError(
                f"dim {dim} needs {dim * (dim + 1) // 2} entries, got {entries.size}")
        self.dim = dim
        self.entries = entries
        self.entries.setflags(write=False)

    @classmethod
    def from_dense(cls, a) -> "SymMat":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * (1 + np.abs(a).max(initial=0))):
            raise ValueError("matrix is not symmetric")
        iu = np.triu_indices(a.shape[0])
        return cls(a.shape[0], a[iu])

    def dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        iu = np.triu_indices(self.dim)
        a[iu] = self.entries
        a.T[iu] = self.entries
        return a

    def __array__(self, dtype=None, copy=None):
        a = self.dense()
        return a if dtype is None else a.astype(dtype)

    def __repr__(self):
        return f"SymMat({self.dim}, {self.entries.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, SymMat):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.entries, other.entries)

    __hash__ = None


@njit(cache=True)
def jacobi_eigh(a):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi.

    Returns ``(w, v)`` with eigenvalues in ascending order and eigenvectors in
    the columns of ``v``.  Sweeps continue until the off-diagonal mass stops
    being representable next to the diagonal.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    for _sweep in range(100):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                # skip once apq is negligible against both diagonal entries
                if (abs(apq) * 1e18 < abs(app) and abs(apq) * 1e18 < abs(aqq)):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    order = np.argsort(w)
    return w[order], v[:, order]


@njit(cache=True)
def _eig_min(a):
    w, v = jacobi_eigh(a)
    return w[0], v[:, 0].copy()


def _as_dense(S) -> np.ndarray:
    if isinstance(S, SymMat):
        return S.dense()
    a = np.ascontiguousarray(S, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or not 1 <= a.shape[0] <= MAX_DIM:
        raise ValueError(f"expected a square matrix of size <= {MAX_DIM}, got {a.shape}")
    return a


def eigh(S):
    """All eigenvalues (ascending) and eigenvectors of ``S``."""
    return jacobi_eigh(_as_dense(S))


def eig_min(S):
    """Smallest eigenvalue of ``S`` and a unit eigenvector for it."""
    return _eig_min(_as_dense(S))


def psd_scale(S) -> float:
    a = _as_dense(S)
    return 1.0 + float(np.abs(a).max())


def psd_margin(S) -> float:
    """``eig_min(S)`` divided by ``1 + max|S_ij|``; negative means indefinite."""
    a = _as_dense(S)
    return float(_eig_min(a)[0]) / (1.0 + float(np.abs(a).max()))


def is_psd(S, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return psd_margin(S) >= -tol.psd_tol


def schur_complement(S, k: int) -> np.ndarray:
    """Schur complement of the leading ``k x k`` block ``A`` in ``[[A, B], [B', C]]``.

    ``A`` must be nonsingular; ``C - B' A^{-1} B`` is returned.
    """
    a = _as_dense(S)
    A, B, C = a[:k, :k], a[:k, k:], a[k:, k:]
    return C - B.T @ np.linalg.solve(A, B)
