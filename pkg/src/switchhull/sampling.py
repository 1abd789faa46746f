"""Random test points: atoms, convex combinations of atom lifts, and points
satisfying only the linear conditions."""
from __future__ import annotations

import numpy as np

from .hull2 import YBITS, Atom, HullPoint, LiftedPoint, atom_lift, combine

_BITS = tuple(YBITS)


def random_atom(rng: np.random.Generator, snap: float = 0.3) -> Atom:
    """An atom with uniform ``y`` pattern; ``x`` coordinates are snapped to
    their bounds with probability ``snap`` so that faces get exercised."""
    bits = _BITS[rng.integers(4)]
    y = YBITS[bits]
    x = []
    for yj in y:
        if yj == 0:
            x.append(0.0)
        elif rng.random() < snap:
            x.append(float(rng.integers(2)))
        else:
            x.append(float(rng.random()))
    return Atom(bits, tuple(x))


def random_lifted_hull_point(rng: np.random.Generator, max_atoms: int = 6,
                             snap: float = 0.3) -> LiftedPoint:
    """Convex combination of 1..max_atoms atom lifts (beta included)."""
    k = int(rng.integers(1, max_atoms + 1))
    atoms = [atom_lift(random_atom(rng, snap)) for _ in range(k)]
    w = rng.dirichlet(np.ones(k))
    return combine(w, atoms)


def random_linear_point(rng: np.random.Generator, snap: float = 0.2) -> LiftedPoint:
    """A point satisfying the linear conditions only (no PSD condition).

    Coordinates are drawn in dependency order, each uniformly within the
    range left open by the ones before it; with probability ``snap`` a
    coordinate is put at an end of its range instead.
    """
    def draw(lo, hi):
        if hi <= lo:
            return lo
        r = rng.random()
        if r < snap / 2:
            return lo
        if r < snap:
            return hi
        return lo + (hi - lo) * rng.random()

    y1, y2 = draw(0.0, 1.0), draw(0.0, 1.0)
    Y12 = draw(max(0.0, y1 + y2 - 1.0), min(y1, y2))
    a1, a2 = draw(0.0, y1 - Y12), draw(0.0, y2 - Y12)
    # u_j = x_j - alpha_j needs u_j <= Y12 for the X12 bounds to be consistent
    u1 = draw(0.0, min(Y12, y1 - a1))
    u2 = draw(0.0, min(Y12, y2 - a2))
    x1, x2 = u1 + a1, u2 + a2
    X12 = draw(max(0.0, u1 + u2 - Y12), min(u1, u2))
    X11, X22 = draw(0.0, x1), draw(0.0, x2)
    return LiftedPoint(HullPoint((x1, x2), (X11, X12, X22), (y1, y2), Y12), (a1, a2))


def random_objective_coefficients(rng: np.random.Generator, free_Y: bool = True) -> np.ndarray:
    c = rng.uniform(-1.0, 1.0, 8)
    if not free_Y:
        c[7] = 0.0
    return c
