"""The n = 2 hull of ``(x, xx', y, y1*y2)`` over ``0 <= x <= y``, ``y`` binary.

Points are ``(x, X, y, Y12)`` with ``X`` symmetric 2 x 2; lifted points add
the auxiliary ``alpha`` (and, for the disjunctive system, ``beta``).  Four
constraint systems describe the hull (or, for ``conjecture``, a candidate
description of its projection that forgets ``Y12``):

``disjunctive``
    ``x <= y``, ``M(beta) in PSD & RLT_x``, ``(alpha_j, beta_j, y_j - Y12)``
    in PER, ``(y, Y12)`` in RLT_y.
``nobeta``
    the linear conditions below plus four PSD conditions ``M(beta_pq) >= 0``.
``minimal``
    the linear conditions plus the single 5 x 5 PSD condition.
``conjecture``
    the linear conditions plus the natural 5 x 5 moment matrix in ``t = e - y``.

Every PSD condition except the disjunctive ``M(beta)`` is affine in the
10-vector ``(x1, x2, X11, X12, X22, y1, y2, Y12, alpha1, alpha2)``; the
solver extracts those affine maps from the builders defined here.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from .cones import Membership, per_slacks, rltx_slacks, rlty_slacks
from .hull1 import h1_contains
from .smat import DEFAULT_TOL, SymMat, TolerancePolicy, psd_margin

VAR_NAMES = ("x1", "x2", "X11", "X12", "X22", "y1", "y2", "Y12", "alpha1", "alpha2")
NVAR = len(VAR_NAMES)
IDX = {name: i for i, name in enumerate(VAR_NAMES)}


class DegenerateLiftError(ValueError):
    """``y_j - Y12 = 0`` while ``alpha_j != 0``: ``alpha_j^2 / (y_j - Y12)`` is undefined."""


class DecompositionError(ValueError):
    pass


class System(str, enum.Enum):
    DISJUNCTIVE = "disjunctive"
    NOBETA = "nobeta"
    MINIMAL = "minimal"
    CONJECTURE = "conjecture"

    @classmethod
    def parse(cls, s) -> "System":
        if isinstance(s, cls):
            return s
        aliases = {"disj": "disjunctive", "conj": "conjecture"}
        return cls(aliases.get(s, s))


@dataclass(frozen=True)
class HullPoint:
    x: tuple
    X: tuple  # (X11, X12, X22)
    y: tuple
    Y12: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(t) for t in self.x))
        object.__setattr__(self, "X", tuple(float(t) for t in self.X))
        object.__setattr__(self, "y", tuple(float(t) for t in self.y))
        object.__setattr__(self, "Y12", float(self.Y12))
        if len(self.x) != 2 or len(self.X) != 3 or len(self.y) != 2:
            raise ValueError("expected x, y of length 2 and X of length 3")
        if not np.all(np.isfinite(self.x + self.X + self.y + (self.Y12,))):
            raise ValueError("hull point entries must be finite")

    @property
    def X_matrix(self) -> np.ndarray:
        X11, X12, X22 = self.X
        return np.array([[X11, X12], [X12, X22]])


@dataclass(frozen=True)
class LiftedPoint:
    base: HullPoint
    alpha: tuple = (0.0, 0.0)
    beta: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(t) for t in self.alpha))
        if len(self.alpha) != 2 or not np.all(np.isfinite(self.alpha)):
            raise ValueError("alpha must be two finite numbers")
        if self.beta is not None:
            object.__setattr__(self, "beta", tuple(float(t) for t in self.beta))
            if len(self.beta) != 2 or not np.all(np.isfinite(self.beta)):
                raise ValueError("beta must be two finite numbers")

    # convenience accessors
    x = property(lambda self: self.base.x)
    X = property(lambda self: self.base.X)
    y = property(lambda self: self.base.y)
    Y12 = property(lambda self: self.base.Y12)

    def vector(self) -> np.ndarray:
        b = self.base
        return np.array([*b.x, *b.X, *b.y, b.Y12, *self.alpha])

    @classmethod
    def from_vector(cls, v, beta=None) -> "LiftedPoint":
        v = [float(t) for t in v]
        return cls(HullPoint(v[0:2], v[2:5], v[5:7], v[7]), (v[8], v[9]), beta)

    def with_alpha(self, alpha) -> "LiftedPoint":
        return replace(self, alpha=tuple(alpha))

    def with_beta(self, beta) -> "LiftedPoint":
        return replace(self, beta=None if beta is None else tuple(beta))

    def swapped(self) -> "LiftedPoint":
        """Exchange the roles of coordinates 1 and 2 (an involution)."""
        b = self.base
        X11, X12, X22 = b.X
        base = HullPoint(b.x[::-1], (X22, X12, X11), b.y[::-1], b.Y12)
        beta = None if self.beta is None else self.beta[::-1]
        return LiftedPoint(base, self.alpha[::-1], beta)


def combine(weights, points) -> LiftedPoint:
    """Convex combination of lifted points (beta kept only if every point has one)."""
    weights = np.asarray(weights, dtype=float)
    v = sum(w * p.vector() for w, p in zip(weights, points))
    if all(p.beta is not None for p in points):
        beta = tuple(sum(w * np.asarray(p.beta) for w, p in zip(weights, points)))
    else:
        beta = None
    return LiftedPoint.from_vector(v, beta)


# ---------------------------------------------------------------- atoms

YBITS = {"0": (0, 0), "e1": (1, 0), "e2": (0, 1), "e": (1, 1)}


class Atom(NamedTuple):
    ybits: str  # one of "0", "e1", "e2", "e"
    x: tuple

    @property
    def y(self):
        return YBITS[self.ybits]

    def hull_point(self) -> HullPoint:
        x1, x2 = self.x
        y1, y2 = self.y
        return HullPoint((x1, x2), (x1 * x1, x1 * x2, x2 * x2), (y1, y2), y1 * y2)


def atom_lift(a: Atom) -> LiftedPoint:
    """The rank-one point of an atom with its canonical ``(alpha, beta)``.

    ``(alpha, beta)`` is ``(x1 e1, x1^2 e1)`` for ``y = e1``, ``(x2 e2, x2^2 e2)``
    for ``y = e2`` and zero otherwise.
    """
    if a.ybits not in YBITS:
        raise ValueError(f"unknown ybits {a.ybits!r}")
    x = np.asarray(a.x, dtype=float)
    y = np.asarray(a.y, dtype=float)
    if x.shape != (2,) or np.any(x < 0) or np.any(x > y):
        raise ValueError(f"atom x={tuple(x)} violates 0 <= x <= y={tuple(y)}")
    x1, x2 = x
    if a.ybits == "e1":
        alpha, beta = (x1, 0.0), (x1 * x1, 0.0)
    elif a.ybits == "e2":
        alpha, beta = (0.0, x2), (0.0, x2 * x2)
    else:
        alpha, beta = (0.0, 0.0), (0.0, 0.0)
    return LiftedPoint(a.hull_point(), alpha, beta)


# ------------------------------------------------------- matrix builders
# All builders take the 10-vector v and are affine in it unless stated.

def _M(v, beta) -> np.ndarray:
    x1, x2, X11, X12, X22, _, _, Y12, a1, a2 = v
    b1, b2 = beta
    return np.array([
        [Y12, x1 - a1, x2 - a2],
        [x1 - a1, X11 - b1, X12],
        [x2 - a2, X12, X22 - b2],
    ])


def _m3x3(v) -> np.ndarray:
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    return np.array([
        [Y12, x1 - a1, x2 - a2],
        [x1 - a1, x1 - a1, X12],
        [x2 - a2, X12, x2 - a2],
    ])


def _m4x4first(v) -> np.ndarray:
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    return np.array([
        [y1 - Y12, 0.0, a1, 0.0],
        [0.0, Y12, x1 - a1, x2 - a2],
        [a1, x1 - a1, X11, X12],
        [0.0, x2 - a2, X12, x2 - a2],
    ])


def _m4x4second(v) -> np.ndarray:
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    return np.array([
        [y2 - Y12, 0.0, 0.0, a2],
        [0.0, Y12, x1 - a1, x2 - a2],
        [0.0, x1 - a1, x1 - a1, X12],
        [a2, x2 - a2, X12, X22],
    ])


def _m5x5(v) -> np.ndarray:
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    return np.array([
        [y1 - Y12, 0.0, 0.0, a1, 0.0],
        [0.0, y2 - Y12, 0.0, 0.0, a2],
        [0.0, 0.0, Y12, x1 - a1, x2 - a2],
        [a1, 0.0, x1 - a1, X11, X12],
        [0.0, a2, x2 - a2, X12, X22],
    ])


def _t_original(v) -> np.ndarray:
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    t1, t2, T12 = 1.0 - y1, 1.0 - y2, 1.0 + Y12 - y1 - y2
    return np.array([
        [1.0, x1, x2, t1, t2],
        [x1, X11, X12, 0.0, a1],
        [x2, X12, X22, a2, 0.0],
        [t1, 0.0, a2, t1, T12],
        [t2, a1, 0.0, T12, t2],
    ])


def _t_strengthened(v) -> np.ndarray:
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    t1, t2, T12 = 1.0 - y1, 1.0 - y2, 1.0 + Y12 - y1 - y2
    return np.array([
        [1.0 - T12, x1, x2, t1 - T12, t2 - T12],
        [x1, X11, X12, 0.0, a1],
        [x2, X12, X22, a2, 0.0],
        [t1 - T12, 0.0, a2, t1 - T12, 0.0],
        [t2 - T12, a1, 0.0, 0.0, t2 - T12],
    ])


T_CORRECTION = np.array([1.0, 0.0, 0.0, 1.0, 1.0])

# Primed (Schur-expanded) forms of the four conditions of the nobeta system,
# keyed by name, with the beta rule each one corresponds to: "X" means
# X_jj - x_j + alpha_j, "Q" means alpha_j^2 / (y_j - Y12).
PSD_CONDITIONS = {
    "3x3": (_m3x3, ("X", "X")),
    "4x4first": (_m4x4first, ("Q", "X")),
    "4x4second": (_m4x4second, ("X", "Q")),
    "5x5": (_m5x5, ("Q", "Q")),
}


def affine_map(builder: Callable, dim: int):
    """``(C, B)`` with ``builder(v) == C + sum_i v_i B[i]`` for an affine builder."""
    C = builder(np.zeros(NVAR))
    B = np.stack([builder(np.eye(NVAR)[i]) - C for i in range(NVAR)])
    assert C.shape == (dim, dim)
    return C, B


# ------------------------------------------------------ public builders

def _quotient(a, s, tol):
    """``a^2 / s`` with ``0/0 := 0``."""
    if abs(s) <= tol:
        if abs(a) <= tol:
            return 0.0
        raise DegenerateLiftError(f"y_j - Y12 = {s:g} but alpha_j = {a:g}")
    return a * a / s


def build_M(z: LiftedPoint, beta) -> np.ndarray:
    """``[[Y12, (x - alpha)'], [x - alpha, X - Diag(beta)]]``."""
    return _M(z.vector(), beta)


def beta_pq(z: LiftedPoint, p: int, q: int, tol: TolerancePolicy = DEFAULT_TOL) -> tuple:
    """The beta functions indexed as ``beta_11, beta_21, beta_12, beta_22``.

    ``p`` selects the rule for the first component and ``q`` for the second:
    index 1 is ``X_jj - x_j + alpha_j``, index 2 is ``alpha_j^2 / (y_j - Y12)``.
    So ``beta_21 = (alpha_1^2/(y_1 - Y12), X22 - x2 + alpha2)``.
    """
    if p not in (1, 2) or q not in (1, 2):
        raise ValueError("p and q must be 1 or 2")
    v = z.vector()
    x, Xd, y, Y12, a = v[0:2], v[[2, 4]], v[5:7], v[7], v[8:10]
    out = []
    for j, rule in enumerate((p, q)):
        if rule == 1:
            out.append(Xd[j] - x[j] + a[j])
        else:
            out.append(_quotient(a[j], y[j] - Y12, tol.eq_tol))
    return tuple(out)


_RULE_INDEX = {"X": 1, "Q": 2}


def psd_condition_matrices(z: LiftedPoint, name: str, tol: TolerancePolicy = DEFAULT_TOL):
    """The primed matrix of a named condition and the matching ``M(beta_pq)``."""
    builder, (r1, r2) = PSD_CONDITIONS[name]
    v = z.vector()
    beta = beta_pq(z, _RULE_INDEX[r1], _RULE_INDEX[r2], tol)
    return builder(v), _M(v, beta)


def strengthened_moment(z: LiftedPoint) -> np.ndarray:
    return _t_strengthened(z.vector())


def original_moment(z: LiftedPoint) -> np.ndarray:
    return _t_original(z.vector())


class TMatrices(NamedTuple):
    strengthened: SymMat
    original: SymMat
    t: tuple
    T12: float


class ConsistencyError(AssertionError):
    """Two derivations of the same condition disagree; indicates a bug."""


def t_matrices(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL, cross_check=True) -> TMatrices:
    v = z.vector()
    y1, y2, Y12 = v[5], v[6], v[7]
    T12 = 1.0 + Y12 - y1 - y2
    orig = _t_original(v)
    strong = _t_strengthened(v)
    if cross_check:
        if not np.allclose(strong, orig - T12 * np.outer(T_CORRECTION, T_CORRECTION), atol=1e-14):
            raise ConsistencyError("strengthened != original - T12 u u'")
        m_strong, m_5 = psd_margin(strong), psd_margin(_m5x5(v))
        if _signs_disagree(m_strong, m_5, tol.psd_tol):
            raise ConsistencyError(
                f"strengthened t-matrix margin {m_strong:g} vs 5x5 margin {m_5:g}")
    return TMatrices(SymMat.from_dense(strong), SymMat.from_dense(orig), (1.0 - y1, 1.0 - y2), T12)


def _signs_disagree(m1, m2, tol, slack=1e-7):
    """True when one margin clearly passes and the other clearly fails.

    Congruent matrices share inertia but not eigenvalue magnitudes, so margins
    within ``slack`` of zero are not compared.
    """
    if min(abs(m1), abs(m2)) <= slack:
        return False
    return (m1 >= -tol) != (m2 >= -tol)


# --------------------------------------------------- linear conditions

def _row(name, rhs, **coef):
    a = np.zeros(NVAR)
    for k, c in coef.items():
        a[IDX[k]] = c
    return name, a, float(rhs)


# a . v <= rhs
LINEAR_ROWS = [
    _row("X11_le_x1", 0, X11=1, x1=-1),
    _row("X22_le_x2", 0, X22=1, x2=-1),
    _row("x1_le_y1", 0, x1=1, y1=-1),
    _row("x2_le_y2", 0, x2=1, y2=-1),
    _row("X12_nonneg", 0, X12=-1),
    _row("X12_lower", 0, x1=1, alpha1=-1, x2=1, alpha2=-1, Y12=-1, X12=-1),
    _row("X12_le_x1_minus_alpha1", 0, X12=1, x1=-1, alpha1=1),
    _row("X12_le_x2_minus_alpha2", 0, X12=1, x2=-1, alpha2=1),
    _row("alpha1_nonneg", 0, alpha1=-1),
    _row("alpha2_nonneg", 0, alpha2=-1),
    _row("alpha1_le_y1_minus_Y12", 0, alpha1=1, y1=-1, Y12=1),
    _row("alpha2_le_y2_minus_Y12", 0, alpha2=1, y2=-1, Y12=1),
    _row("rlty_Y12_nonneg", 0, Y12=-1),
    _row("rlty_Y12_lower", 1, y1=1, y2=1, Y12=-1),
    _row("rlty_Y12_le_y1", 0, Y12=1, y1=-1),
    _row("rlty_Y12_le_y2", 0, Y12=1, y2=-1),
]

# rows of LINEAR_ROWS that the disjunctive system states directly; the
# remaining two (diag(X) <= x) follow from its beta conditions
DISJ_LINEAR = [r for r in LINEAR_ROWS if r[0] not in ("X11_le_x1", "X22_le_x2")]


def linear_matrix(rows=LINEAR_ROWS):
    A = np.array([a for _, a, _ in rows])
    b = np.array([r for _, _, r in rows])
    return A, b


def linear_slacks(z: LiftedPoint, rows=LINEAR_ROWS) -> dict:
    v = z.vector()
    return {name: rhs - a @ v for name, a, rhs in rows}


# ----------------------------------------------------------------- check

@dataclass
class CheckReport:
    system: System
    passed: bool
    slacks: dict = field(default_factory=dict)
    violated: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def format(self) -> str:
        lines = [f"system: {self.system.value}", f"result: {'PASS' if self.passed else 'FAIL'}"]
        for k, s in self.slacks.items():
            flag = "  VIOLATED" if k in self.violated else ""
            lines.append(f"  {k:32s} {s: .6e}{flag}")
        return "\n".join(lines)


def _disjunctive_slacks(z: LiftedPoint) -> tuple:
    """Linear-type slacks (absolute) and the PSD margin of ``M(beta)``."""
    if z.beta is None:
        raise ValueError("the disjunctive system needs beta")
    v = z.vector()
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = v
    b1, b2 = z.beta
    slacks = {"x1_le_y1": y1 - x1, "x2_le_y2": y2 - x2}
    M = _M(v, z.beta)
    slacks.update(rltx_slacks((M[0, 0], (M[0, 1], M[0, 2]), (M[1, 1], M[1, 2], M[2, 2]))))
    for j, (a, b, s) in enumerate(((a1, b1, y1 - Y12), (a2, b2, y2 - Y12)), start=1):
        slacks.update({f"{k}_{j}": val for k, val in per_slacks((a, b, s)).items()})
    slacks.update(rlty_slacks(((y1, y2), Y12)))
    return slacks, psd_margin(M)


def check(z: LiftedPoint, system="minimal", tol: TolerancePolicy = DEFAULT_TOL) -> CheckReport:
    """Evaluate every constraint of ``system`` at ``z``.

    Linear slacks are absolute; PSD entries (``psd_*``) are eigenvalue
    margins relative to ``1 + max|entry|``.  For ``nobeta`` each condition is
    evaluated both through ``M(beta_pq)`` (``psd_<name>_M``) and through its
    primed form (``psd_<name>``); the two are required to agree in sign.
    """
    system = System.parse(system)
    lin_tol, psd_tol = tol.eq_tol, tol.psd_tol
    if system is System.DISJUNCTIVE:
        lin, margin = _disjunctive_slacks(z)
        psd = {"psd_M_beta": margin}
    else:
        lin = linear_slacks(z)
        v = z.vector()
        if system is System.MINIMAL:
            psd = {"psd_5x5": psd_margin(_m5x5(v))}
        elif system is System.CONJECTURE:
            psd = {"psd_t_original": psd_margin(_t_original(v))}
        else:
            psd = {}
            for name in PSD_CONDITIONS:
                primed, M = psd_condition_matrices(z, name, tol)
                mp, mm = psd_margin(primed), psd_margin(M)
                if _signs_disagree(mp, mm, psd_tol):
                    raise ConsistencyError(
                        f"{name}: primed margin {mp:g} disagrees with M(beta) margin {mm:g}")
                psd[f"psd_{name}"] = mp
                psd[f"psd_{name}_M"] = mm
    violated = {k: s for k, s in lin.items() if not s >= -lin_tol}
    violated.update({k: s for k, s in psd.items() if not k.endswith("_M") and not s >= -psd_tol})
    return CheckReport(system, not violated, {**lin, **psd}, violated)


# ---------------------------------------------------------- decomposition

def lambda_weights(y, Y12) -> tuple:
    """Weights of the four ``y`` patterns ``(0, e1, e2, e)``.

    The second index uses ``y2 - Y12`` (the symmetric counterpart of
    ``y1 - Y12``); anything else breaks ``sum = 1``.
    """
    y1, y2 = y
    return (1.0 - y1 - y2 + Y12, y1 - Y12, y2 - Y12, Y12)


@dataclass
class Decomposition:
    lambdas: tuple  # (lam_0, lam_e1, lam_e2, lam_e)
    blocks: tuple  # four 3 x 3 arrays (Z_0, Z_e1, Z_e2, Z_e)
    residual: float
    memberships: dict

    def reconstruct(self) -> np.ndarray:
        return sum(l * Z for l, Z in zip(self.lambdas, self.blocks))


def _scaled(num: np.ndarray, lam: float) -> np.ndarray:
    # 0/0 := 0
    if lam == 0.0:
        return np.zeros_like(num)
    return num / lam


def decompose(z: LiftedPoint, tol: TolerancePolicy = DEFAULT_TOL,
              weights: Optional[Callable] = None, identity_tol: float = 1e-10) -> Decomposition:
    """Split a disjunctive-feasible point into its four ``H_y`` pieces.

    Raises :class:`DecompositionError` if a weight is negative, the weights
    do not sum to one, the blocks do not reproduce ``[[1, x'], [x, X]]``, or
    a block falls outside its piece of the hull.
    """
    if z.beta is None:
        raise ValueError("decompose needs beta")
    x1, x2, X11, X12, X22, y1, y2, Y12, a1, a2 = z.vector()
    b1, b2 = z.beta
    lams = tuple(float(l) for l in (weights or lambda_weights)((y1, y2), Y12))
    l0, l1, l2, le = lams
    Z0 = _scaled(np.array([[l0, 0, 0], [0, 0, 0], [0, 0, 0]], dtype=float), l0)
    Z1 = _scaled(np.array([[l1, a1, 0], [a1, b1, 0], [0, 0, 0]], dtype=float), l1)
    Z2 = _scaled(np.array([[l2, 0, a2], [0, 0, 0], [a2, 0, b2]], dtype=float), l2)
    Ze = _scaled(np.array([[le, x1 - a1, x2 - a2],
                           [x1 - a1, X11 - b1, X12],
                           [x2 - a2, X12, X22 - b2]]), le)
    target = np.array([[1.0, x1, x2], [x1, X11, X12], [x2, X12, X22]])
    dec = Decomposition(lams, (Z0, Z1, Z2, Ze), 0.0, {})
    dec.residual = float(np.abs(dec.reconstruct() - target).max())

    problems = {}
    for name, l in zip(("lambda_0", "lambda_e1", "lambda_e2", "lambda_e"), lams):
        if l < -tol.eq_tol:
            problems[name] = l
    if abs(sum(lams) - 1.0) > tol.eq_tol:
        problems["lambda_sum"] = sum(lams) - 1.0
    if dec.residual > identity_tol:
        problems["identity_residual"] = dec.residual

    m = {"Z_0": Membership(True)}
    # Z_e1 / Z_e2 live in H_e1 / H_e2: the normalized (alpha_j, beta_j, 1)
    # is in the n = 1 hull; an all-zero block (lam = 0) is trivially fine
    for key, Z, l, j in (("Z_e1", Z1, l1, 1), ("Z_e2", Z2, l2, 2)):
        if l == 0.0:
            m[key] = Membership(True)
        else:
            m[key] = h1_contains((Z[0, j], Z[j, j], Z[0, 0]), tol)
    if le == 0.0:
        m["Z_e"] = Membership(True)
    else:
        rx = Membership.from_slacks(rltx_slacks((Ze[0, 0], (Ze[0, 1], Ze[0, 2]),
                                                  (Ze[1, 1], Ze[1, 2], Ze[2, 2]))), tol.eq_tol)
        margin = psd_margin(Ze)
        m["Z_e"] = rx.merged(Membership(margin >= -tol.psd_tol,
                                        {} if margin >= -tol.psd_tol else {"psd": margin}))
    dec.memberships = m
    for k, mem in m.items():
        if not mem:
            problems[k] = mem.violations
    if problems:
        err = DecompositionError(f"decomposition failed: {problems}")
        err.decomposition = dec
        err.problems = problems
        raise err
    return dec
