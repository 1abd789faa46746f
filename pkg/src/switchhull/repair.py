"""Completing a certificate: from the single 5 x 5 condition to all four.

A lifted point that satisfies the linear conditions and the 5 x 5 PSD
condition can still violate one of the two 4 x 4 conditions (never both,
and the 3 x 3 one never).  :func:`repair` moves ``alpha_2`` (after swapping
coordinates if the second 4 x 4 condition is the one that fails) to the
nearer end of the interval on which the failing condition holds, keeping
``(x, X, y, Y12)`` and ``alpha_1`` fixed.  The result satisfies the full
four-condition system, which certifies hull membership.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .hull2 import (PSD_CONDITIONS, ConsistencyError, HullPoint, LiftedPoint, check,
                    linear_slacks, _m5x5)
from .sampling import random_lifted_hull_point
from .smat import DEFAULT_TOL, TolerancePolicy, psd_margin


class RepairError(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionError(ValueError):
    pass


class FailureProfile(NamedTuple):
    fails_3x3: bool
    fails_4x4first: bool
    fails_4x4second: bool
    fails_5x5: bool
    margins: dict

    @property
    def lacks_only_first(self) -> bool:
        return self.fails_4x4first and not (self.fails_3x3 or self.fails_4x4second or self.fails_5x5)


class Alpha2Interval(NamedTuple):
    theta: float
    lo: float
    hi: float


class LambdaInterval(NamedTuple):
    rho: float
    lo: float
    hi: float


def _require_linear_and_5x5(z, tol):
    bad = {k: s for k, s in linear_slacks(z).items() if not s >= -tol.eq_tol}
    m5 = psd_margin(_m5x5(z.vector()))
    if m5 < -tol.psd_tol:
        bad["psd_5x5"] = m5
    if bad:
        raise PreconditionError(f"point violates the linear/5x5 conditions: {bad}")


def classify(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> FailureProfile:
    """Which of the four PSD conditions fail at a point that has the 5 x 5 one."""
    _require_linear_and_5x5(z, tol)
    v = z.vector()
    margins = {name: psd_margin(builder(v)) for name, (builder, _) in PSD_CONDITIONS.items()}
    fails = {name: m < -tol.psd_tol for name, m in margins.items()}
    if fails["3x3"]:
        raise ConsistencyError(f"3x3 condition fails under the linear conditions: {margins}")
    if fails["4x4first"] and fails["4x4second"]:
        raise ConsistencyError(f"both 4x4 conditions fail alongside a valid 5x5: {margins}")
    return FailureProfile(fails["3x3"], fails["4x4first"], fails["4x4second"], fails["5x5"], margins)


def reduce_alpha1(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL, verify: bool = True) -> LiftedPoint:
    """Fold ``alpha_1`` into ``(x_1, X_11)``.

    Returns the point with ``x_1 - alpha_1``, ``X_11 - alpha_1^2/(y_1 - Y12)``
    and ``alpha = (0, alpha_2)``; it lacks the first 4 x 4 condition exactly
    when ``z`` does.
    """
    a1, a2 = z.alpha
    s1 = z.y[0] - z.Y12
    if not a1 > tol.eq_tol:
        raise PreconditionError(f"alpha_1 = {a1:g} is not positive")
    if not s1 > tol.eq_tol:
        raise PreconditionError(f"y_1 - Y12 = {s1:g} with alpha_1 = {a1:g} > 0")
    if verify and not classify(z, tol).lacks_only_first:
        raise PreconditionError("point does not lack only the first 4x4 condition")
    (x1, x2), (X11, X12, X22) = z.x, z.X
    base = HullPoint((x1 - a1, x2), (X11 - a1 * a1 / s1, X12, X22), z.y, z.Y12)
    out = LiftedPoint(base, (0.0, a2))
    if verify and not classify(out, tol).lacks_only_first:
        raise ConsistencyError("reduced point no longer lacks only the first 4x4 condition")
    return out


def alpha2_interval(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> Alpha2Interval:
    """Interval of ``alpha_2`` on which the first 4 x 4 condition holds (``alpha_1 = 0``).

    With ``theta = Y12 X11 - x1^2``, the roots of ``det V`` in ``x2 - alpha_2``
    are ``X12 x1/X11 + (theta +- sqrt(theta (theta + 4 X12 (x1 - X12)))) / (2 X11)``.
    """
    if abs(z.alpha[0]) > tol.eq_tol:
        raise PreconditionError("alpha2_interval needs alpha_1 = 0")
    (x1, x2), (X11, X12, _) = z.x, z.X
    Y12 = z.Y12
    if not X11 > tol.eq_tol:
        raise PreconditionError(f"X11 = {X11:g} must be positive")
    theta = Y12 * X11 - x1 * x1
    if theta < -tol.eq_tol:
        raise PreconditionError(f"theta = {theta:g} is negative")
    theta = max(theta, 0.0)
    k = max(X12 * (x1 - X12), 0.0)
    root = math.sqrt(theta * (theta + 4.0 * k))
    centre = x2 - X12 * x1 / X11
    lo = centre - (theta + root) / (2.0 * X11)
    # theta - root written without cancellation
    hi = centre + (2.0 * theta * k / (X11 * (root + theta)) if theta > 0.0 else 0.0)
    return Alpha2Interval(theta, lo, hi)


def alpha2_star(z: LiftedPoint) -> float:
    """Maximizer over ``alpha_2`` of the 4 x 4 determinant left when ``alpha_1 = 0``."""
    (x1, x2), (X11, X12, _) = z.x, z.X
    s2 = z.y[1] - z.Y12
    return s2 * (x2 * X11 - x1 * X12) / (z.y[1] * X11 - x1 * x1)


def lambda_interval(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> LambdaInterval:
    """Roots ``lambda^-, lambda^+`` of ``x2 - a = X22 - a^2 / (y2 - Y12)``.

    Between them the first 4 x 4 condition implies the 5 x 5 one; outside
    them the implication runs the other way.
    """
    if abs(z.alpha[0]) > tol.eq_tol:
        raise PreconditionError("lambda_interval needs alpha_1 = 0")
    s2 = z.y[1] - z.Y12
    gap = z.x[1] - z.X[2]
    if not s2 > tol.eq_tol:
        raise PreconditionError(f"y_2 - Y12 = {s2:g} must be positive")
    if gap < -tol.eq_tol or gap > 0.25 * s2 + tol.eq_tol:
        raise PreconditionError(f"x2 - X22 = {gap:g} outside [0, (y2 - Y12)/4]")
    rho = math.sqrt(min(1.0, max(0.0, 1.0 - 4.0 * gap / s2)))
    return LambdaInterval(rho, 0.5 * (1.0 - rho) * s2, 0.5 * (1.0 + rho) * s2)


def repair(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL) -> LiftedPoint:
    """Return ``z`` with ``alpha`` adjusted so that all four PSD conditions hold.

    Raises :class:`PreconditionError` if ``z`` fails the single-condition
    system and :class:`RepairError` if the output does not verify.
    """
    rep = check(z, "minimal", tol)
    if not rep:
        raise PreconditionError(f"point fails the minimal system: {rep.violated}")
    prof = classify(z, tol)
    if not (prof.fails_4x4first or prof.fails_4x4second):
        return z
    if prof.fails_4x4second:
        return repair(z.swapped(), tol).swapped()

    a1, a2 = z.alpha
    work = reduce_alpha1(z, tol) if a1 > tol.eq_tol else z.with_alpha((0.0, a2))
    iv = alpha2_interval(work, tol)
    if a2 < iv.lo:
        a2_new = iv.lo
    elif a2 > iv.hi:
        a2_new = iv.hi
    else:
        # alpha_2 already inside: the reported failure is round-off
        loose = tol.loosened(10.0)
        rep = check(z, "nobeta", loose)
        if rep:
            return z
        raise RepairError("alpha_2 inside its interval but the 4x4 condition fails", rep)
    out = z.with_alpha((a1, a2_new))
    rep = check(out, "nobeta", tol)
    if not rep:
        raise RepairError(f"repaired point fails the four-condition system:\n{rep.format()}", rep)
    return out


def sample_lacking(seed: int, budget: int, tol: TolerancePolicy = DEFAULT_TOL,
                   margin: float = 1e-6, max_draws: int = 200) -> list:
    """Points that satisfy the minimal system but fail the first 4 x 4 condition.

    ``(x, X, y, Y12)`` is a random convex combination of atoms; ``alpha`` is
    then drawn inside its linear box (``alpha_1 = 0`` for half the draws).
    The first 4 x 4 condition can only fail alongside the 5 x 5 one when
    ``X22 - alpha_2^2/(y2 - Y12) > x2 - alpha_2``, i.e. for ``alpha_2``
    strictly between the roots of :func:`lambda_interval`, and only outside
    the :func:`alpha2_interval` of the point with ``alpha_1`` folded in; so
    ``alpha_2`` is drawn from that set.  A draw is kept when the 5 x 5
    condition holds and the first 4 x 4 condition fails by at least
    ``margin``.  Deterministic in ``seed``; may return fewer than ``budget``
    points.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(budget * max_draws):
        if len(out) >= budget:
            break
        z = random_lifted_hull_point(rng, snap=0.6)
        (x1, x2), (X11, X12, X22), (y1, y2), Y12 = z.x, z.X, z.y, z.Y12
        s1, s2 = y1 - Y12, y2 - Y12
        gap2 = x2 - X22
        if not (s2 > tol.eq_tol and gap2 < 0.25 * s2):
            continue
        rho = math.sqrt(1.0 - 4.0 * max(gap2, 0.0) / s2)
        lam_lo, lam_hi = 0.5 * (1.0 - rho) * s2, 0.5 * (1.0 + rho) * s2
        # X12 <= x_j - alpha_j and X12 >= x1 + x2 - alpha1 - alpha2 - Y12
        hi1 = min(s1, x1 - X12)
        a1 = 0.0 if rng.random() < 0.5 or hi1 <= 0.0 else rng.uniform(0.0, hi1)
        lo2 = max(0.0, x1 + x2 - Y12 - X12 - a1, lam_lo)
        hi2 = min(s2, x2 - X12, lam_hi)
        X11r = X11 - a1 * a1 / s1 if a1 > 0.0 else X11
        if lo2 >= hi2 or not X11r > tol.eq_tol:
            continue
        folded = LiftedPoint(HullPoint((x1 - a1, x2), (X11r, X12, X22), z.y, Y12))
        try:
            iv = alpha2_interval(folded, tol)
        except PreconditionError:
            continue
        pieces = [(lo2, min(hi2, iv.lo)), (max(lo2, iv.hi), hi2)]
        lengths = np.array([max(b - a, 0.0) for a, b in pieces])
        if lengths.sum() <= 0.0:
            continue
        a, b = pieces[rng.choice(2, p=lengths / lengths.sum())]
        a2 = rng.uniform(a, b)
        w = z.with_alpha((a1, a2)).with_beta(None)
        if not check(w, "minimal", tol):
            continue
        if psd_margin(PSD_CONDITIONS["4x4first"][0](w.vector())) > -margin:
            continue
        out.append(w)
    return out
