from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from polyincidence.algebra import (MultiPoly, format_scalar, make_point, poly_eval, poly_gradient,
                                   poly_restrict_to_flat, to_scalar, univariate_real_root_count,
                                   veronese_dimension, veronese_lift)
from polyincidence.algebra import linalg, univariate as U
from polyincidence.algebra.poly import hyperplane_pullback, monomials
from polyincidence.varieties import Flat, embed_complex_line

from conftest import rationals

F = Fraction
x1, x2 = MultiPoly.var(0, 2), MultiPoly.var(1, 2)


def random_poly(rng, nvars, deg, lo=-10, hi=10):
    terms = {e: int(rng.integers(lo, hi + 1)) for e in monomials(nvars, deg)}
    return MultiPoly(nvars, terms)


@st.composite
def polys(draw, nvars=2, max_deg=3):
    mons = monomials(nvars, max_deg)
    coeffs = draw(st.lists(st.integers(-5, 5), min_size=len(mons), max_size=len(mons)))
    return MultiPoly(nvars, dict(zip(mons, coeffs)))


# scalars ---------------------------------------------------------------------

def test_scalar_parsing_and_format():
    assert to_scalar("6/4") == F(3, 2)
    assert format_scalar(F(3, 2)) == "3/2"
    assert format_scalar(F(4, 2)) == "2"
    assert format_scalar(F(-1, 3)) == "-1/3"
    assert make_point(["1/2", 3]) == (F(1, 2), F(3))


def test_scalar_rejects_floats_with_hidden_rounding():
    with pytest.raises((TypeError, ValueError)):
        to_scalar(float("nan"))


@given(rationals())
def test_scalar_roundtrip(x):
    assert to_scalar(format_scalar(x)) == x


# poly_eval -------------------------------------------------------------------

def test_eval_unit_circle():
    p = x1 * x1 + x2 * x2 - 1
    assert poly_eval(p, (1, 0)) == 0


def test_eval_zero_polynomial():
    assert poly_eval(MultiPoly(2), (F(7, 3), -4)) == 0


def test_eval_hyperbola():
    assert poly_eval(x1 * x2 - 2, (F(3, 2), F(4, 3))) == 0


def test_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        poly_eval(x1 + x2, (1, 2, 3))


@given(polys(), polys(), st.tuples(rationals(), rationals()))
def test_eval_is_a_ring_homomorphism(p, q, x):
    assert poly_eval(p + q, x) == poly_eval(p, x) + poly_eval(q, x)
    assert poly_eval(p * q, x) == poly_eval(p, x) * poly_eval(q, x)


# gradient ----------------------------------------------------------------------

def test_gradient_examples():
    assert poly_gradient(x1 * x1 + x2 * x2) == [2 * x1, 2 * x2]
    assert poly_gradient(MultiPoly.constant(3, 5)) == [MultiPoly(3)] * 3
    assert poly_gradient(x1 * x2) == [x2, x1]


def test_gradient_matches_finite_differences(rng):
    h = 1e-6
    for _ in range(30):
        deg = int(rng.integers(1, 7))
        p = random_poly(rng, 2, deg)
        x = rng.uniform(-1, 1, size=2)
        grad = poly_gradient(p)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (float(poly_eval(p, x + e)) - float(poly_eval(p, x - e))) / (2 * h)
            exact = float(poly_eval(grad[i], x))
            assert abs(fd - exact) <= 1e-4 * max(1.0, abs(exact))


# restriction to flats ---------------------------------------------------------

def test_restrict_circle_to_axis():
    line = Flat((0, 0), ((1, 0),))
    q = poly_restrict_to_flat(x1 * x1 + x2 * x2 - 1, line)
    t = MultiPoly.var(0, 1)
    assert q == t * t - 1


def test_restrict_to_point_is_constant():
    p = x1 * x1 * x2 - 3 * x2 + 1
    pt = Flat((2, F(1, 3)), ())
    q = poly_restrict_to_flat(p, pt)
    assert q.nvars == 0 and q.constant_term() == poly_eval(p, (2, F(1, 3)))


def test_restrict_to_complex_line_cancels(rng):
    y = [MultiPoly.var(i, 4) for i in range(4)]
    f = embed_complex_line((1, 0), (0, 0))
    q = poly_restrict_to_flat(y[2] - y[0], f)
    assert q.is_zero()
    for _ in range(10):
        s, t = (F(int(v), 7) for v in rng.integers(-50, 50, size=2))
        assert poly_eval(q, (s, t)) == poly_eval(y[2] - y[0], f.point_at((s, t)))


def test_restrict_dimension_mismatch():
    with pytest.raises(ValueError):
        poly_restrict_to_flat(x1, Flat((0, 0, 0), ((1, 0, 0),)))


@given(polys(nvars=3, max_deg=3), st.lists(rationals(), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.tuples(rationals(), rationals()))
def test_restriction_commutes_with_evaluation(p, base, dirs, t):
    d1, d2 = dirs[:3], dirs[3:]
    if linalg.rank([list(map(F, d1)), list(map(F, d2))]) < 2:
        return
    f = Flat(base, (d1, d2))
    q = poly_restrict_to_flat(p, f)
    assert q.degree() <= p.degree()
    assert poly_eval(q, t) == poly_eval(p, f.point_at(t))


# veronese ---------------------------------------------------------------------

def test_veronese_examples():
    assert veronese_lift((3,), 2) == (3, 9)
    assert veronese_lift((F(1, 2), 5), 1) == (F(1, 2), 5)
    assert veronese_lift((2, 3), 2) == (2, 3, 4, 6, 9)


def test_veronese_dimension():
    assert veronese_dimension(2, 2) == 5
    assert veronese_dimension(4, 3) == 34
    assert len(veronese_lift((1, 2, 3, 4), 3)) == 34


@given(st.lists(st.integers(-9, 9), min_size=9, max_size=9), st.integers(-9, 9),
       st.tuples(rationals(), rationals()))
def test_hyperplane_pullback_identity(w, c, x):
    p = hyperplane_pullback(w, c, 2, 3)
    lifted = veronese_lift(x, 3)
    assert sum(a * b for a, b in zip(w, lifted)) + c == poly_eval(p, x)


# univariate root counts ------------------------------------------------------

t = MultiPoly.var(0, 1)


def test_root_count_examples():
    assert univariate_real_root_count(t * t - 1) == 2
    assert univariate_real_root_count(t * t + 1) == 0
    assert univariate_real_root_count((t - 1) * (t - 1) * (t - 3), (F(0), F(2))) == 1


def test_root_count_zero_polynomial():
    with pytest.raises(ValueError, match="identically zero"):
        univariate_real_root_count(MultiPoly(1))


def test_root_count_matches_sympy(rng):
    s = sympy.Symbol("s")
    for _ in range(40):
        deg = int(rng.integers(1, 9))
        coeffs = [int(c) for c in rng.integers(-6, 7, size=deg + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = 1
        # repeated factors now and then
        if rng.random() < 0.3:
            coeffs = U.mul(coeffs, U.mul([1, 1], [1, 1]))
        mine = U.count_roots([F(c) for c in coeffs])
        oracle = len(set(sympy.Poly(list(reversed(coeffs)), s).real_roots()))
        assert mine == oracle
        assert mine <= len(coeffs) - 1


def test_isolation_intervals_are_disjoint_and_contain_one_root(rng):
    for _ in range(20):
        coeffs = [F(int(c)) for c in rng.integers(-5, 6, size=6)]
        if coeffs[-1] == 0:
            coeffs[-1] = F(1)
        ivs = U.isolate_real_roots(coeffs)
        assert len(ivs) == U.count_roots(coeffs)
        for lo, hi in ivs:
            assert lo < hi
            assert U.count_roots(coeffs, lo, hi) == 1
            assert U.evaluate(coeffs, lo) != 0 and U.evaluate(coeffs, hi) != 0
        for (a, b), (c, d) in zip(ivs, ivs[1:]):
            assert b <= c


def test_resultant_matches_sympy(rng):
    s = sympy.Symbol("s")
    for _ in range(20):
        p = [F(int(c)) for c in rng.integers(-4, 5, size=int(rng.integers(2, 5)))]
        q = [F(int(c)) for c in rng.integers(-4, 5, size=int(rng.integers(2, 5)))]
        p[-1] = p[-1] or F(1)
        q[-1] = q[-1] or F(1)
        ps = sympy.Poly([int(c) for c in reversed(p)], s)
        qs = sympy.Poly([int(c) for c in reversed(q)], s)
        # sympy's sign convention differs, so compare magnitudes here
        assert abs(U.resultant(p, q)) == abs(int(sympy.resultant(ps, qs)))


def test_resultant_with_linear_factor_is_evaluation(rng):
    # Res(t - a, q) = q(a)
    for _ in range(20):
        a = F(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        q = [F(int(c)) for c in rng.integers(-4, 5, size=int(rng.integers(2, 6)))]
        q[-1] = q[-1] or F(1)
        assert U.resultant([-a, F(1)], q) == U.evaluate(q, a)


def test_interpolation_recovers_polynomial(rng):
    coeffs = [F(int(c)) for c in rng.integers(-9, 10, size=5)]
    xs = [F(i) for i in range(5)]
    ys = [U.evaluate(coeffs, x) for x in xs]
    assert U.trim(U.interpolate(xs, ys)) == U.trim(coeffs)


# linear algebra ---------------------------------------------------------------

def test_det_matches_sympy(rng):
    for n in range(1, 6):
        A = [[F(int(v), int(w)) for v, w in zip(rng.integers(-5, 6, size=n), rng.integers(1, 4, size=n))]
             for _ in range(n)]
        assert linalg.det(A) == sympy.Matrix(A).det()


def test_solve_and_nullspace():
    A = [[F(1), F(2), F(3)], [F(2), F(4), F(6)]]
    sol = linalg.solve(A, [F(1), F(2)])
    x, basis = sol
    assert sum(a * b for a, b in zip(A[0], x)) == 1
    assert len(basis) == 2
    assert linalg.solve(A, [F(1), F(3)]) is None
    assert linalg.rank(A) == 1


def test_poly_json_roundtrip():
    p = x1 * x1 * F(3, 2) - x2 + 7
    doc = p.to_json()
    assert doc[0] == {"exponents": [0, 0], "coeff": "7"}
    assert MultiPoly.from_json(2, doc) == p
