"""Convex hull of ``(x1, x1^2, y1)`` with ``0 <= x1 <= y1``, ``y1`` binary.

The hull is ``{(x1, X11, y1) in PER : y1 <= 1}``.  The certificate behind it
is a 4 x 4 doubly nonnegative matrix built from the slack ``s1 = y1 - x1``
and the complement ``t1 = 1 - y1``; :func:`h1_witness` assembles it.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .cones import Membership, per_slacks
from .smat import DEFAULT_TOL, SymMat, TolerancePolicy


class NotAMemberError(ValueError):
    """Raised when a certificate is requested for a point outside the hull."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or {}


class H1Point(NamedTuple):
    x1: float
    X11: float
    y1: float


class H1Witness(NamedTuple):
    s1: float
    t1: float
    Z11: float
    S11: float
    W: SymMat


def h1_contains(p, tol: TolerancePolicy = DEFAULT_TOL) -> Membership:
    """Membership in the n = 1 hull.

    Violations are reported under PER's names (``per_conic`` for the
    perspective inequality, the others for the ordering ``0 <= X11 <= x1 <= y1``)
    plus ``y1_le_1``.
    """
    x1, X11, y1 = p
    slacks = per_slacks((x1, X11, y1))
    slacks["y1_le_1"] = 1.0 - y1
    return Membership.from_slacks(slacks, tol.eq_tol)


def h1_matrix(p) -> np.ndarray:
    """The relaxed moment matrix of ``(1, x1, s1, t1)`` for any point.

    No membership is assumed; for points outside the hull the result fails to
    be doubly nonnegative.
    """
    x1, X11, y1 = p
    t1 = 1.0 - y1
    s1 = y1 - x1
    Z11 = x1 - X11
    S11 = y1 + X11 - 2.0 * x1
    return np.array([
        [1.0, x1, s1, t1],
        [x1, X11, Z11, 0.0],
        [s1, Z11, S11, 0.0],
        [t1, 0.0, 0.0, t1],
    ])


def h1_witness(p, tol: TolerancePolicy = DEFAULT_TOL) -> H1Witness:
    m = h1_contains(p, tol)
    if not m:
        raise NotAMemberError(f"{tuple(p)} is not in the n=1 hull: {m.violations}", m.violations)
    W = h1_matrix(p)
    return H1Witness(s1=W[0, 2], t1=W[0, 3], Z11=W[1, 2], S11=W[2, 2], W=SymMat.from_dense(W))
