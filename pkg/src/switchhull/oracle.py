"""Exact support function of the nonconvex set of rank-one points.

The hull is the convex hull of ``(x, xx', y, y1*y2)`` over the four binary
``y`` and ``0 <= x <= y``, so its support function in a direction is the
best of four box-constrained (possibly nonconvex) quadratic maxima.  In two
variables those are solved exactly by enumerating the faces of the box.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hull2 import Atom, YBITS


@dataclass(frozen=True)
class Objective:
    """Linear functional ``c_x.x + <Q, X> + c_y.y + c_Y*Y12`` on hull points.

    ``Q`` is given by its upper triangle ``(Q11, Q12, Q22)``, so the ``X``
    part is ``Q11*X11 + 2*Q12*X12 + Q22*X22``.  Lift variables carry no cost.
    """

    c_x: tuple = (0.0, 0.0)
    Q: tuple = (0.0, 0.0, 0.0)
    c_y: tuple = (0.0, 0.0)
    c_Y: float = 0.0

    def __post_init__(self):
        for name in ("c_x", "Q", "c_y"):
            object.__setattr__(self, name, tuple(float(t) for t in getattr(self, name)))
        object.__setattr__(self, "c_Y", float(self.c_Y))
        if not np.all(np.isfinite(self.coefficients())):
            raise ValueError("objective coefficients must be finite")

    def coefficients(self) -> np.ndarray:
        """The 8 coefficients in report order ``(c_x, Q11, Q12, Q22, c_y, c_Y)``."""
        return np.array([*self.c_x, *self.Q, *self.c_y, self.c_Y])

    @classmethod
    def from_coefficients(cls, c) -> "Objective":
        c = [float(t) for t in c]
        return cls(c[0:2], c[2:5], c[5:7], c[7])

    def lifted_vector(self) -> np.ndarray:
        """Coefficients on the 10 solver variables (zero on alpha)."""
        Q11, Q12, Q22 = self.Q
        return np.array([*self.c_x, Q11, 2.0 * Q12, Q22, *self.c_y, self.c_Y, 0.0, 0.0])

    def Q_matrix(self) -> np.ndarray:
        Q11, Q12, Q22 = self.Q
        return np.array([[Q11, Q12], [Q12, Q22]])

    def scaled(self, s: float) -> "Objective":
        return Objective.from_coefficients(s * self.coefficients())


def _quad(c, Q, x):
    return float(c @ x + x @ Q @ x)


def max_quad_box(c, Q, ub):
    """Global maximum of ``c.x + x'Qx`` over ``[0, ub1] x [0, ub2]``.

    Candidates: the four vertices, the stationary point of each edge, and the
    interior stationary point when ``Q`` is nonsingular.  When ``Q`` is
    singular the objective is affine along a null direction, so some
    maximizer lies on the boundary and the interior candidate can be skipped.
    """
    c = np.asarray(c, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Q.shape == (3,):
        Q = np.array([[Q[0], Q[1]], [Q[1], Q[2]]])
    ub = np.asarray(ub, dtype=float)
    if np.any(ub < 0):
        raise ValueError("upper bounds must be nonnegative")

    cands = [np.array([a, b]) for a in (0.0, ub[0]) for b in (0.0, ub[1])]
    for i in range(2):
        j = 1 - i
        if Q[i, i] == 0.0:
            continue
        for fixed in (0.0, ub[j]):
            # d/dt of c_i t + Q_ii t^2 + 2 Q_ij t fixed
            num = -(c[i] + 2.0 * Q[i, j] * fixed)
            den = 2.0 * Q[i, i]
            if abs(num) > abs(den) * ub[i]:
                continue  # stationary point beyond the segment (also avoids overflow)
            t = num / den
            if 0.0 <= t <= ub[i]:
                x = np.empty(2)
                x[i], x[j] = t, fixed
                cands.append(x)
    det = 4.0 * (Q[0, 0] * Q[1, 1] - Q[0, 1] ** 2)
    scale = 1.0 + np.abs(Q).max() ** 2
    if abs(det) > 1e-12 * scale:
        x = np.linalg.solve(2.0 * Q, -c)
        if np.all(x >= 0.0) and np.all(x <= ub):
            cands.append(x)
    vals = [_quad(c, Q, x) for x in cands]
    k = int(np.argmax(vals))
    return vals[k], cands[k]


def support_atoms(obj: Objective, restrict_Y: bool = False):
    """``max`` of ``obj`` over the hull, with the maximizing atom.

    ``restrict_Y`` asks for the hull that forgets ``Y12``; it is only
    meaningful for objectives with ``c_Y = 0``.
    """
    if restrict_Y and obj.c_Y != 0.0:
        raise ValueError("restrict_Y requires c_Y == 0")
    c_x = np.asarray(obj.c_x)
    Q = obj.Q_matrix()
    best = None
    for bits, y in YBITS.items():
        val, x = max_quad_box(c_x, Q, y)
        val += obj.c_y[0] * y[0] + obj.c_y[1] * y[1] + obj.c_Y * y[0] * y[1]
        if best is None or val > best[0]:
            best = (val, Atom(bits, (float(x[0]), float(x[1]))))
    return best
