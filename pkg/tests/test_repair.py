import numpy as np
import pytest

from switchhull.hull2 import PSD_CONDITIONS, Atom, HullPoint, LiftedPoint, atom_lift, check
from switchhull.repair import (PreconditionError, alpha2_interval, alpha2_star, classify,
                               lambda_interval, reduce_alpha1, repair, sample_lacking)
from switchhull.sampling import random_lifted_hull_point, random_linear_point
from switchhull.smat import TolerancePolicy, is_psd, psd_margin

first = PSD_CONDITIONS["4x4first"][0]
five = PSD_CONDITIONS["5x5"][0]


def lp(x, X, y, Y12, alpha=(0, 0)):
    return LiftedPoint(HullPoint(x, X, y, Y12), alpha)


def V(z):
    """The 3 x 3 block of the first 4 x 4 condition that carries alpha_2 (alpha_1 = 0)."""
    return first(z.vector())[1:, 1:]


@pytest.fixture(scope="module")
def lacking():
    return sample_lacking(1, 300)


# --------------------------------------------------------------- classify

def test_classify_atoms_clean():
    for a in [Atom("0", (0, 0)), Atom("e1", (0.6, 0)), Atom("e2", (0, 0.3)), Atom("e", (1, 0.2))]:
        prof = classify(atom_lift(a))
        assert not any(prof[:4])


def test_classify_rank_one_trivial_lift():
    x = np.array([0.3, 0.8])
    prof = classify(lp(x, (x[0]**2, x[0] * x[1], x[1]**2), (1, 1), 1))
    assert not any(prof[:4])


def test_classify_lacking(lacking):
    assert len(lacking) == 300
    for z in lacking:
        assert classify(z).lacks_only_first


def test_classify_requires_preconditions():
    with pytest.raises(PreconditionError):
        classify(lp((1, 0), (1, 0, 0), (1, 0), 0, (0.5, 0)))


def test_at_most_one_4x4_fails_on_random_points():
    rng = np.random.default_rng(0)
    seen = 0
    for _ in range(20_000):
        z = random_linear_point(rng)
        if not check(z, "minimal"):
            continue
        prof = classify(z)  # raises ConsistencyError if the structure is violated
        assert not prof.fails_3x3
        assert not (prof.fails_4x4first and prof.fails_4x4second)
        seen += 1
    assert seen > 1000


# ---------------------------------------------------------- reduce_alpha1

def test_reduce_alpha1_formula():
    z = lp((0.6, 0.3), (0.5, 0.1, 0.2), (0.9, 0.6), 0.4, (0.2, 0.1))
    out = reduce_alpha1(z, verify=False)
    assert out.x[0] == pytest.approx(0.4) and out.X[0] == pytest.approx(0.42)
    assert out.alpha == (0.0, 0.1) and out.x[1] == 0.3 and out.y == z.y
    with pytest.raises(PreconditionError):
        reduce_alpha1(out, verify=False)


def test_reduce_alpha1_keeps_lacking(lacking):
    n = 0
    for z in lacking:
        if z.alpha[0] > 1e-9:
            assert classify(reduce_alpha1(z)).lacks_only_first
            n += 1
    assert n > 50


def test_reduce_alpha1_degenerate():
    with pytest.raises(PreconditionError):
        reduce_alpha1(lp((0.5, 0), (0.25, 0, 0), (1, 0), 1, (0.1, 0)), verify=False)


# --------------------------------------------------------- alpha2_interval

def test_alpha2_interval_theta_zero():
    iv = alpha2_interval(lp((0.5, 0.5), (0.5, 0.25, 0.3), (1, 1), 0.5))
    assert iv.theta == 0.0 and iv.lo == pytest.approx(0.25) and iv.hi == pytest.approx(0.25)


def test_alpha2_interval_x12_zero():
    z = lp((0.4, 0.5), (0.3, 0.0, 0.3), (1, 1), 0.8)
    iv = alpha2_interval(z)
    theta = 0.8 * 0.3 - 0.16
    assert iv.theta == pytest.approx(theta)
    assert iv.lo == pytest.approx(0.5 - theta / 0.3) and iv.hi == pytest.approx(0.5)


def test_alpha2_interval_errors():
    with pytest.raises(PreconditionError):
        alpha2_interval(lp((0.4, 0.5), (0.0, 0.0, 0.3), (1, 1), 0.8))
    with pytest.raises(PreconditionError):
        alpha2_interval(lp((0.9, 0.5), (0.3, 0.0, 0.3), (1, 1), 0.8))
    with pytest.raises(PreconditionError):
        alpha2_interval(lp((0.4, 0.5), (0.3, 0.0, 0.3), (1, 1), 0.8, (0.1, 0)))


def _folded(z):
    return reduce_alpha1(z) if z.alpha[0] > 1e-9 else z


def test_alpha2_interval_bounds_and_sign(lacking):
    for z in lacking:
        w = _folded(z)
        (x1, x2), (X11, X12, _) = w.x, w.X
        iv = alpha2_interval(w)
        centre = x2 - X12 * x1 / X11
        assert iv.lo <= iv.hi
        assert iv.lo <= centre - iv.theta / X11 + 1e-12
        assert iv.hi >= centre - 1e-12
        mid = w.with_alpha((0.0, 0.5 * (iv.lo + iv.hi)))
        assert np.linalg.det(V(mid)) >= -1e-12
        if iv.theta > 1e-6:
            for a in (iv.lo - 1e-3, iv.hi + 1e-3):
                assert np.linalg.det(V(w.with_alpha((0.0, a)))) < 0


def test_alpha2_interval_grid(lacking):
    """Inside [lo, hi] the first 4x4 condition holds; 1e-3 outside it fails."""
    for z in lacking:
        w = _folded(z)
        iv = alpha2_interval(w)
        for a in np.linspace(iv.lo, iv.hi, 11):
            assert is_psd(first(w.with_alpha((0.0, a)).vector()), TolerancePolicy(psd_tol=1e-8))
        for a in (iv.lo - 1e-3, iv.hi + 1e-3):
            assert not is_psd(first(w.with_alpha((0.0, a)).vector()))


# --------------------------------------------------------- lambda_interval

def test_lambda_interval_examples():
    iv = lambda_interval(lp((0.5, 0.6), (0.3, 0.1, 0.4), (1, 1), 0.2))
    assert iv.rho == pytest.approx(0.0, abs=1e-7) and iv.lo == pytest.approx(0.4, abs=1e-7)
    assert iv.hi == pytest.approx(0.4, abs=1e-7)
    iv = lambda_interval(lp((0.5, 0.6), (0.3, 0.1, 0.6), (1, 1), 0.2))
    assert (iv.rho, iv.lo) == (1.0, 0.0) and iv.hi == pytest.approx(0.8)


def test_lambda_interval_errors():
    with pytest.raises(PreconditionError):
        lambda_interval(lp((0.5, 0.6), (0.3, 0.1, 0.3), (1, 1), 0.2))  # gap 0.3 > 0.8/4
    with pytest.raises(PreconditionError):
        lambda_interval(lp((0.5, 0.6), (0.3, 0.1, 0.6), (1, 1), 1.0))


def _alpha2_points(rng, n):
    out = []
    while len(out) < n:
        z = random_lifted_hull_point(rng) if rng.random() < 0.5 else random_linear_point(rng)
        s2 = z.y[1] - z.Y12
        gap = z.x[1] - z.X[2]
        # alpha_2 range allowed by the linear conditions when alpha_1 = 0
        lo = max(0.0, z.x[0] + z.x[1] - z.Y12 - z.X[1])
        hi = min(s2, z.x[1] - z.X[1])
        if s2 > 1e-6 and 0 <= gap <= s2 / 4 and lo < hi:
            out.append(z.with_alpha((0.0, rng.uniform(lo, hi))))
    return out


def test_lambda_roots_solve_the_quadratic():
    rng = np.random.default_rng(1)
    for z in _alpha2_points(rng, 2000):
        iv = lambda_interval(z)
        s2 = z.y[1] - z.Y12
        assert 0 <= iv.rho <= 1 and 0 <= iv.lo <= iv.hi <= s2 + 1e-15
        for a in (iv.lo, iv.hi):
            assert (z.x[1] - a) - (z.X[2] - a * a / s2) == pytest.approx(0, abs=1e-10)


def test_lambda_interval_brackets_5x5_failures():
    rng = np.random.default_rng(2)
    counts = [0, 0]
    for z in _alpha2_points(rng, 20_000):
        iv = lambda_interval(z)
        v = z.vector()
        m_first, m_five = psd_margin(first(v)), psd_margin(five(v))
        inside = iv.lo <= z.alpha[1] <= iv.hi
        if inside and m_first >= 0:
            assert m_five >= -1e-9
            counts[0] += 1
        if not inside and m_five >= 0:
            assert m_first >= -1e-9
            counts[1] += 1
    assert min(counts) > 100


# ----------------------------------------------------------- alpha2_star

def test_alpha2_star_maximizes_determinant(lacking):
    def det(w, a):
        M = five(w.with_alpha((0.0, a)).vector())
        return np.linalg.det(M[1:, 1:])

    for z in lacking[:100]:
        w = _folded(z)
        a = alpha2_star(w)
        d0 = det(w, a)
        assert d0 >= det(w, a - 1e-4) and d0 >= det(w, a + 1e-4)


# ------------------------------------------------------------------ repair

def test_repair_feasible_unchanged():
    z = atom_lift(Atom("e1", (0.6, 0))).with_beta(None)
    assert repair(z) is z


def test_repair_rejects_non_minimal():
    with pytest.raises(PreconditionError):
        repair(lp((1, 0), (1, 0, 0), (1, 0), 0, (0.5, 0)))


def test_repair_lacking(lacking):
    tol = TolerancePolicy(psd_tol=1e-8)
    below = 0
    for z in lacking:
        out = repair(z, tol)
        assert check(out, "nobeta", tol)
        assert out.base == z.base and out.alpha[0] == z.alpha[0]
        if z.alpha[0] == 0.0:
            iv = alpha2_interval(z)
            if z.alpha[1] < iv.lo:
                assert out.alpha[1] == iv.lo
                below += 1
            else:
                assert out.alpha[1] == iv.hi
    assert below > 0


def test_repair_second_condition_by_symmetry(lacking):
    for z in lacking[:100]:
        s = z.swapped()
        prof = classify(s)
        assert prof.fails_4x4second and not prof.fails_4x4first
        out = repair(s)
        assert check(out, "nobeta")
        assert out.base == s.base and out.alpha[1] == s.alpha[1]


def test_sample_lacking_deterministic():
    a, b = sample_lacking(5, 20), sample_lacking(5, 20)
    assert a == b and len(a) == 20
    assert sample_lacking(6, 20) != a
    with pytest.raises(ValueError):
        sample_lacking(1, 0)
