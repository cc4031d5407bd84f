from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homsynth.errors import EvaluationError, FormatError
from homsynth.poly import (
    MERSENNE_61,
    SparsePolynomial,
    Var,
    aux_var,
    colsub_var,
    hom_var,
    parse_number,
    parse_var,
    to_field,
)


def test_hom_var_is_unordered():
    assert hom_var(3, 1) == hom_var(1, 3) == Var("hom", (1, 3))
    assert str(hom_var(2, 2)) == "x[2,2]"


def test_colsub_var_swaps_colors_with_edge():
    v = colsub_var(4, 2, 7, 1)
    assert v == colsub_var(2, 4, 1, 7)
    assert str(v) == "x[e=2-4][1,7]"


@pytest.mark.parametrize("text", ["x[1,2]", "x[e=1-3][2,2]", "y[2-5]"])
def test_var_spelling_round_trip(text):
    assert str(parse_var(text)) == text


@pytest.mark.parametrize("text", ["x[1]", "z[1,2]", "x[e=2-2][1,1]", ""])
def test_bad_var_spelling(text):
    with pytest.raises(FormatError):
        parse_var(text)


def test_numbers():
    assert parse_number("3") == 3 and isinstance(parse_number("4/2"), int)
    assert parse_number("1/3") == Fraction(1, 3)
    with pytest.raises(FormatError):
        parse_number("1/0")
    assert to_field(Fraction(1, 2), 7) == 4
    assert to_field(-1, MERSENNE_61) == MERSENNE_61 - 1


def test_arithmetic_and_queries():
    x, y = SparsePolynomial.variable(hom_var(1, 2)), SparsePolynomial.variable(aux_var(1, 2))
    p = (x + y) * (x + y)
    assert len(p) == 3
    assert p.coefficient([hom_var(1, 2), aux_var(1, 2)]) == 2
    assert p.degree == 2 and p.is_monotone()
    assert p.variables() == {hom_var(1, 2), aux_var(1, 2)}
    assert p.evaluate({hom_var(1, 2): 2, aux_var(1, 2): 3}) == 25
    assert p.scale(-1).is_monotone() is False
    assert (p + p.scale(-1)) == SparsePolynomial()


def test_evaluate_missing_variable():
    with pytest.raises(EvaluationError):
        SparsePolynomial.variable(hom_var(1, 1)).evaluate({})


def test_dump_format():
    p = SparsePolynomial.constant(2) + SparsePolynomial.variable(hom_var(1, 2)) * SparsePolynomial.variable(hom_var(1, 1))
    assert p.dump() == "2 1\n1 x[1,1]*x[1,2]\n"
    assert SparsePolynomial.parse_dump(p.dump()) == p
    with pytest.raises(FormatError, match="line 1"):
        SparsePolynomial.parse_dump("oops")


_vars = st.sampled_from([hom_var(1, 1), hom_var(1, 2), hom_var(2, 2), aux_var(1, 2)])
_polys = st.builds(
    lambda terms: sum((SparsePolynomial({tuple(sorted(m)): c}) for m, c in terms), SparsePolynomial()),
    st.lists(st.tuples(st.lists(_vars, max_size=3), st.integers(-3, 3).filter(bool)), max_size=5),
)
_points = st.fixed_dictionaries({v: st.integers(-5, 5) for v in [hom_var(1, 1), hom_var(1, 2), hom_var(2, 2), aux_var(1, 2)]})


@given(_polys, _polys, _points)
def test_evaluation_is_a_ring_homomorphism(p, q, pt):
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p * q).evaluate(pt, MERSENNE_61) == (p * q).evaluate(pt) % MERSENNE_61


@given(_polys)
def test_dump_round_trip(p):
    assert SparsePolynomial.parse_dump(p.dump()) == p
