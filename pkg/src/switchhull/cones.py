"""Membership tests for the elementary sets PER, RLT_x, RLT_y and DNN.

Every test returns a :class:`Membership`, which is truthy when the point is
in the set and carries the slack of each violated condition by name.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .smat import DEFAULT_TOL, SymMat, TolerancePolicy, psd_margin


@dataclass
class Membership:
    ok: bool
    violations: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    @classmethod
    def from_slacks(cls, slacks: dict, tol: float) -> "Membership":
        """Build from ``{name: slack}`` where a condition holds iff slack >= -tol."""
        bad = {k: s for k, s in slacks.items() if not s >= -tol}
        return cls(not bad, bad)

    def merged(self, other: "Membership", prefix: str = "") -> "Membership":
        bad = dict(self.violations)
        bad.update({prefix + k: s for k, s in other.violations.items()})
        return Membership(self.ok and other.ok, bad)


class PerPoint(NamedTuple):
    alpha: float
    beta: float
    gamma: float


class RltyPoint(NamedTuple):
    y: tuple
    Y12: float


class RltxMat(NamedTuple):
    """The bordered matrix ``[[lam, x'], [x, X]]`` with ``X`` 2 x 2."""

    lam: float
    x: tuple
    X: tuple  # (X11, X12, X22)

    @classmethod
    def from_matrix(cls, m) -> "RltxMat":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], (m[0, 1], m[0, 2]), (m[1, 1], m[1, 2], m[2, 2]))


def per_slacks(p) -> dict:
    a, b, g = p
    return {
        "per_conic": b * g - a * a,
        "per_beta_nonneg": b,
        "per_beta_le_alpha": a - b,
        "per_alpha_le_gamma": g - a,
    }


def per_contains(p, tol: TolerancePolicy = DEFAULT_TOL) -> Membership:
    """``alpha^2 <= beta*gamma`` and ``0 <= beta <= alpha <= gamma``."""
    return Membership.from_slacks(per_slacks(p), tol.eq_tol)


def rltx_slacks(m) -> dict:
    lam, (x1, x2), (X11, X12, X22) = m
    return {
        "rltx_lambda_nonneg": lam,
        "rltx_X11_nonneg": X11,
        "rltx_X22_nonneg": X22,
        "rltx_X11_le_x1": x1 - X11,
        "rltx_X22_le_x2": x2 - X22,
        "rltx_X12_nonneg": X12,
        "rltx_X12_lower": X12 - (x1 + x2 - lam),
        "rltx_X12_le_x1": x1 - X12,
        "rltx_X12_le_x2": x2 - X12,
    }


def rltx_contains(m, tol: TolerancePolicy = DEFAULT_TOL) -> Membership:
    return Membership.from_slacks(rltx_slacks(m), tol.eq_tol)


def rlty_slacks(p) -> dict:
    (y1, y2), Y12 = p
    return {
        "rlty_Y12_nonneg": Y12,
        "rlty_Y12_lower": Y12 - (y1 + y2 - 1.0),
        "rlty_Y12_le_y1": y1 - Y12,
        "rlty_Y12_le_y2": y2 - Y12,
    }


def rlty_contains(p, tol: TolerancePolicy = DEFAULT_TOL) -> Membership:
    return Membership.from_slacks(rlty_slacks(p), tol.eq_tol)


def dnn4_contains(W, tol: TolerancePolicy = DEFAULT_TOL) -> Membership:
    """Entrywise nonnegative and PSD (the 4 x 4 case, where DNN = CP)."""
    a = W.dense() if isinstance(W, SymMat) else np.asarray(W, dtype=float)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4 x 4 matrix, got {a.shape}")
    slacks = {f"dnn_W{i + 1}{j + 1}_nonneg": a[i, j] for i in range(4) for j in range(i, 4)}
    res = Membership.from_slacks(slacks, tol.eq_tol)
    margin = psd_margin(a)
    if margin < -tol.psd_tol:
        res = res.merged(Membership(False, {"dnn_psd": margin}))
    return res
