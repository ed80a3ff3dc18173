from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from trainpoly.laurent import (LaurentPoly, determinant, eval_positive, substitute_character,
                               unit_normalize)

from oracles import permutation_determinant

NV = 2


@st.composite
def polys(draw, nvars=NV, max_terms=4):
    terms = draw(st.dictionaries(
        st.tuples(*[st.integers(-3, 3)] * nvars), st.integers(-4, 4), max_size=max_terms))
    return LaurentPoly(terms, nvars)


@st.composite
def matrices(draw, n=None):
    n = n if n is not None else draw(st.integers(1, 4))
    return [[draw(polys(max_terms=2)) for _ in range(n)] for _ in range(n)]


positive = st.fractions(min_value=Fraction(1, 4), max_value=4).filter(lambda q: q > 0)


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == LaurentPoly.zero(NV)


@given(polys(), polys(), positive, positive)
def test_evaluation_is_a_ring_map(p, q, a, b):
    pt = (a, b)
    assert eval_positive(p * q, pt) == eval_positive(p, pt) * eval_positive(q, pt)
    assert eval_positive(p + q, pt) == eval_positive(p, pt) + eval_positive(q, pt)


@given(matrices())
def test_determinant_matches_leibniz(M):
    assert determinant(M) == permutation_determinant(M)


@given(matrices(n=3), positive, positive)
def test_determinant_commutes_with_evaluation(M, a, b):
    import sympy
    pt = (a, b)
    num = sympy.Matrix([[sympy.Rational(eval_positive(e, pt)) for e in row] for row in M])
    assert sympy.Rational(eval_positive(determinant(M), pt)) == num.det()


@given(polys(), st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.sampled_from([1, -1]))
def test_unit_normalize_ignores_units(p, shift, sign):
    if p.is_zero():
        return
    assert unit_normalize(p.shift(shift) * sign) == unit_normalize(p)


def test_negative_power():
    t = LaurentPoly.variable(0, 2)
    assert t ** -2 * t ** 2 == LaurentPoly.constant(1, 2)
    with pytest.raises(Exception):
        (t + 1) ** -1


def test_substitution():
    # t^2 x - 3 t^-1 at u = (1, 2) gives zeta^4 - 3 zeta^-1
    p = LaurentPoly({(2, 1): 1, (-1, 0): -3}, 2)
    assert substitute_character(p, (1, 2)) == LaurentPoly({(4,): 1, (-1,): -3}, 1)


def test_eval_rejects_nonpositive():
    p = LaurentPoly({(1, 0): 1}, 2)
    with pytest.raises(ValueError):
        eval_positive(p, (0, 1))


def test_serialization_round_trip():
    p = LaurentPoly({(2, 1): 5, (-1, 0): -3}, 2)
    assert LaurentPoly.from_dict(p.to_dict(["t", "x"])) == p
    assert p.format(["t", "x"]) == "5*t^2*x - 3*t^-1"
