"""Support functions of the convex representations by the ellipsoid method.

All four systems live in the 10-dimensional space of
``(x1, x2, X11, X12, X22, y1, y2, Y12, alpha1, alpha2)`` and every feasible
point lies in the unit box, so the method starts from the ball of radius
``sqrt(10)/2`` around the box centre.  A separation routine returns either
"feasible" or a violated linear inequality:

* linear rows are returned as they are;
* for an affine PSD condition ``M(v) >= 0`` with ``w'M(v)w < 0`` (``w`` an
  eigenvector of the smallest eigenvalue) the cut is ``w'M(v')w >= 0``,
  which is linear in ``v'``;
* in the disjunctive system ``beta`` is eliminated by its pointwise
  smallest admissible value ``beta_j(v) = max(alpha_j^2/(y_j - Y12),
  X_jj - x_j + alpha_j)``, a convex function of ``v``.  The conditions that
  involve it are concave in ``v`` and are cut by their linearisation.

At a feasible centre the objective cut ``c.v >= best`` is applied.  Every
optimal point stays inside the ellipsoid, so ``c.x_k + sqrt(c'P_k c)`` is an
upper bound and the best feasible centre a lower bound; the loop stops when
they are within the requested accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .hull2 import (DISJ_LINEAR, LINEAR_ROWS, NVAR, PSD_CONDITIONS, VAR_NAMES, LiftedPoint,
                    System, _M, _t_original, affine_map, check)
from .oracle import Objective
from .smat import DEFAULT_TOL, TolerancePolicy, jacobi_eigh

RADIUS = math.sqrt(NVAR) / 2.0
MAXDIM = 5


class SolverError(RuntimeError):
    pass


class Cut(NamedTuple):
    """Feasible points satisfy ``normal . v <= offset``; ``normal`` has unit norm."""

    normal: np.ndarray
    offset: float
    name: str


@dataclass
class SolveResult:
    value: float
    argmax: LiftedPoint
    iterations: int
    certified_gap: float
    upper_bound: float
    system: System


class _SystemData(NamedTuple):
    names: tuple
    A: np.ndarray
    b: np.ndarray
    C: np.ndarray  # (k, 5, 5) constant parts, zero padded
    B: np.ndarray  # (k, 10, 5, 5) linear parts
    dims: np.ndarray
    psd_names: tuple
    disj: bool


def _box_rows():
    rows = []
    for i, name in enumerate(VAR_NAMES):
        a = np.zeros(NVAR)
        a[i] = -1.0
        rows.append((f"box_{name}_lower", a, 0.0))
        rows.append((f"box_{name}_upper", -a, 1.0))
    return rows


@lru_cache(maxsize=None)
def system_data(system) -> _SystemData:
    system = System.parse(system)
    if system is System.DISJUNCTIVE:
        rows = DISJ_LINEAR
        builders = {"M_beta": (lambda v: _M(v, (0.0, 0.0)), 3)}
    elif system is System.MINIMAL:
        rows = LINEAR_ROWS
        builders = {"5x5": (PSD_CONDITIONS["5x5"][0], 5)}
    elif system is System.NOBETA:
        rows = LINEAR_ROWS
        builders = {name: (PSD_CONDITIONS[name][0], d)
                    for name, d in (("3x3", 3), ("4x4first", 4), ("4x4second", 4), ("5x5", 5))}
    else:
        rows = LINEAR_ROWS
        builders = {"t_original": (_t_original, 5)}
    rows = list(rows) + _box_rows()
    A = np.array([a for _, a, _ in rows])
    b = np.array([r for _, _, r in rows])
    k = len(builders)
    C = np.zeros((k, MAXDIM, MAXDIM))
    B = np.zeros((k, NVAR, MAXDIM, MAXDIM))
    dims = np.zeros(k, dtype=np.int64)
    for i, (builder, d) in enumerate(builders.values()):
        Ci, Bi = affine_map(builder, d)
        C[i, :d, :d] = Ci
        B[i, :, :d, :d] = Bi
        dims[i] = d
    return _SystemData(tuple(n for n, _, _ in rows), A, b, C, B, dims,
                       tuple(builders), system is System.DISJUNCTIVE)


# ------------------------------------------------------------ numba core

@njit(cache=True)
def _beta_j(v, j, grad):
    """Pointwise smallest beta_j and a subgradient (written into ``grad``)."""
    xi, Xi, yi, ai = j, 2 + 2 * j, 5 + j, 8 + j
    p2 = v[Xi] - v[xi] + v[ai]
    s = v[yi] - v[7]
    a = v[ai]
    p1 = a * a / s if s > 0.0 else 0.0
    grad[:] = 0.0
    if p1 >= p2:
        if s > 0.0:
            grad[ai] = 2.0 * a / s
            grad[yi] = -(a / s) ** 2
            grad[7] = (a / s) ** 2
        return p1
    grad[Xi] = 1.0
    grad[xi] = -1.0
    grad[ai] = 1.0
    return p2


@njit(cache=True)
def _separate(v, A, b, C, B, dims, disj, tol, cut):
    """Return ``(code, offset)``; code -1 means feasible.

    Otherwise ``cut . v' <= offset`` holds for every feasible ``v'`` and is
    violated at ``v``.  Codes: ``i < len(b)`` linear row ``i``; ``len(b) + k``
    PSD condition ``k``; ``len(b) + len(dims) + 2j (+1)`` the disjunctive
    conditions ``beta_j <= X_jj`` (``beta_j <= alpha_j``).
    """
    n = v.shape[0]
    m = b.shape[0]
    worst = tol
    code = -1
    for i in range(m):
        r = 0.0
        for k in range(n):
            r += A[i, k] * v[k]
        nrm = 0.0
        for k in range(n):
            nrm += A[i, k] * A[i, k]
        viol = (r - b[i]) / math.sqrt(nrm)
        if viol > worst:
            worst = viol
            code = i
    if code >= 0:
        for k in range(n):
            cut[k] = A[code, k]
        return code, b[code]

    g = np.empty(n)
    if disj:
        for j in range(2):
            bj = _beta_j(v, j, g)
            Xi, ai = 2 + 2 * j, 8 + j
            # beta_j(v') - X_jj' <= 0 and beta_j(v') - alpha_j' <= 0, linearized at v
            for which in range(2):
                idx = Xi if which == 0 else ai
                val = bj - v[idx]
                if val > tol:
                    for k in range(n):
                        cut[k] = g[k]
                    cut[idx] -= 1.0
                    off = 0.0
                    for k in range(n):
                        off += cut[k] * v[k]
                    return m + dims.shape[0] + 2 * j + which, off - val

    betas = np.zeros(2)
    gb = np.zeros((2, n))
    if disj:
        for j in range(2):
            betas[j] = _beta_j(v, j, gb[j])
    for p in range(dims.shape[0]):
        d = dims[p]
        M = C[p, :d, :d].copy()
        for k in range(n):
            if v[k] != 0.0:
                M += v[k] * B[p, k, :d, :d]
        if disj:
            M[1, 1] -= betas[0]
            M[2, 2] -= betas[1]
        scale = 1.0
        for i in range(d):
            for k in range(d):
                if abs(M[i, k]) + 1.0 > scale:
                    scale = abs(M[i, k]) + 1.0
        w, V = jacobi_eigh(M)
        if w[0] < -tol * scale:
            u = V[:, 0].copy()
            # g(v') = u' M(v') u, cut: -grad g . v' <= g(v) - grad g . v
            gval = w[0]
            for k in range(n):
                s = 0.0
                Bk = B[p, k, :d, :d]
                for i in range(d):
                    for l in range(d):
                        s += u[i] * Bk[i, l] * u[l]
                g[k] = s
            if disj:
                for k in range(n):
                    g[k] -= u[1] * u[1] * gb[0, k] + u[2] * u[2] * gb[1, k]
            off = 0.0
            for k in range(n):
                cut[k] = -g[k]
                off += cut[k] * v[k]
            return m + p, off + gval
    return -1, 0.0


@njit(cache=True)
def _ellipsoid(c, A, b, C, B, dims, disj, accuracy, max_iter, x0, r0, tol):
    n = x0.shape[0]
    x = x0.copy()
    # the ellipsoid is {x + Bu : |u| <= 1}, i.e. P = B B'; updating B keeps
    # P positive semidefinite whatever the round-off
    Bf = np.eye(n) * r0
    lb = -np.inf
    ub = np.inf
    best = x0.copy()
    found = False
    cut = np.empty(n)
    nn = float(n)
    status = 1  # 0 converged, 1 iteration cap, 2 numerical breakdown
    it = 0
    for it in range(1, max_iter + 1):
        Bc = Bf.T @ c
        bound = c @ x + math.sqrt(Bc @ Bc)
        if bound < ub:
            ub = bound
        if found and ub - lb <= accuracy:
            status = 0
            break
        code, off = _separate(x, A, b, C, B, dims, disj, tol, cut)
        if code < 0:
            val = c @ x
            if (not found) or val > lb:
                lb = val
                best[:] = x
                found = True
            for k in range(n):
                cut[k] = -c[k]
            off = -lb
        Ba = Bf.T @ cut
        sq = math.sqrt(Ba @ Ba)
        if not sq > 0.0:
            status = 2
            break
        depth = (cut @ x - off) / sq
        if depth >= 1.0:
            # the ellipsoid, which holds every feasible point better than lb,
            # misses the half-space: no such point is left and lb is optimal
            if found:
                ub = lb
                status = 0
            else:
                status = 2
            break
        if depth < 0.0:
            depth = 0.0
        tau = (1.0 + nn * depth) / (nn + 1.0)
        sigma = 2.0 * (1.0 + nn * depth) / ((nn + 1.0) * (1.0 + depth))
        delta = nn * nn * (1.0 - depth * depth) / (nn * nn - 1.0)
        p = Ba / sq
        g = Bf @ p
        x = x - tau * g
        # P' = delta (P - sigma g g') with g = B p
        Bf = math.sqrt(delta) * (Bf - (1.0 - math.sqrt(1.0 - sigma)) * np.outer(g, p))
    return best, lb, ub, it, status, found


# ------------------------------------------------------------ public API

def separate(v, system, tol: float = 1e-12) -> Optional[Cut]:
    """A violated valid inequality at ``v``, or ``None`` if ``v`` is feasible.

    ``tol`` is the violation (in the units of each condition: normalized
    linear residual or eigenvalue relative to ``1 + max|entry|``) that is
    still treated as feasible; the default absorbs round-off only.  The
    ellipsoid loop itself separates with ``tol = 0``.
    """
    d = system_data(System.parse(system))
    v = np.ascontiguousarray(v, dtype=float)
    cut = np.empty(NVAR)
    code, off = _separate(v, d.A, d.b, d.C, d.B, d.dims, d.disj, float(tol), cut)
    if code < 0:
        return None
    m, k = len(d.b), len(d.dims)
    if code < m:
        name = d.names[code]
    elif code < m + k:
        name = f"psd_{d.psd_names[code - m]}"
    else:
        j, which = divmod(code - m - k, 2)
        name = f"beta{j + 1}_le_{'X' if which == 0 else 'alpha'}{j + 1}"
    nrm = float(np.linalg.norm(cut))
    return Cut(cut / nrm, off / nrm, name)


def iteration_cap(accuracy: float, obj_norm: float) -> int:
    """``2 n^2 ln(R |c| / eps)`` central-cut iterations, doubled for slack."""
    n = NVAR
    return int(4 * n * n * math.log(RADIUS * max(obj_norm, 1.0) / accuracy)) + 1000


def support(system, obj: Objective, accuracy: float = 1e-6,
            tol: TolerancePolicy = DEFAULT_TOL, max_iter: Optional[int] = None) -> SolveResult:
    """Maximum of ``obj`` over a representation, within ``accuracy``."""
    if not accuracy >= 1e-8:
        raise ValueError("accuracy must be at least 1e-8")
    system = System.parse(system)
    d = system_data(system)
    c = obj.lifted_vector()
    cap = max_iter or iteration_cap(accuracy, float(np.linalg.norm(c)))
    x0 = np.full(NVAR, 0.5)
    best, lb, ub, it, status, found = _ellipsoid(
        c, d.A, d.b, d.C, d.B, d.dims, d.disj, float(accuracy), cap, x0, RADIUS, 0.0)
    if not found:
        raise SolverError(f"{system.value}: no feasible centre after {it} iterations")
    if status != 0:
        reason = "iteration cap" if status == 1 else "numerical breakdown"
        raise SolverError(f"{system.value}: {reason} after {it} iterations, gap {ub - lb:.3e}")
    z = LiftedPoint.from_vector(best)
    if system is System.DISJUNCTIVE:
        z = z.with_beta(minimal_beta(z))
    rep = check(z, system, tol.loosened(10.0))
    if not rep:
        raise SolverError(f"{system.value}: argmax fails its own check: {rep.violated}")
    return SolveResult(float(lb), z, int(it), float(ub - lb), float(ub), system)


def minimal_beta(z: LiftedPoint) -> tuple:
    v = z.vector()
    g = np.empty(NVAR)
    return (float(_beta_j(v, 0, g)), float(_beta_j(v, 1, g)))
