from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from basilica.errors import DomainError, InputError, ResourceError
from basilica.rational import (
    SquareClass,
    class_rank,
    degree_condition,
    field_degree,
    kummer_generators,
    parse_range,
    scan,
    scan_range,
    square_class,
    square_subsets,
)

QUALIFYING = [5, 6, 10, 11, 12, 13, 14, 19, 20, 21, 22, 23]

# small enough that every product stays under the 2^64 factoring bound
nonzero = st.fractions(max_denominator=300).filter(lambda q: q != 0 and abs(q) < 10**4)
root_points = nonzero.filter(lambda q: q != -1)


def sympy_independent(x0) -> bool:
    """Third oracle: no product of a nonempty subset has a rational square root."""
    gens = [sympy.Rational(g.numerator, g.denominator) for g in kummer_generators(x0)]
    for mask in range(1, 16):
        prod = sympy.Integer(1)
        for k in range(4):
            if mask >> k & 1:
                prod *= gens[k]
        if sympy.sqrt(prod).is_rational:
            return False
    return True


class TestSquareClass:
    def test_examples(self):
        assert square_class(4).squarefree == 1
        assert square_class(-64 * 36 * 5).squarefree == -5
        assert square_class(Fraction(6, 25)).squarefree == 6
        assert square_class("3/8").squarefree == 6
        assert square_class(-1).squarefree == -1

    def test_errors(self):
        with pytest.raises(DomainError):
            square_class(0)
        with pytest.raises(InputError):
            square_class(0.5)
        with pytest.raises(ResourceError):
            square_class(2**70 + 1)

    @given(nonzero, nonzero)
    def test_multiplicative(self, q, r):
        assert square_class(q * r) == square_class(q) * square_class(r)

    @given(nonzero, nonzero)
    def test_squares_drop_out(self, q, r):
        assert square_class(q * r * r) == square_class(q)

    def test_mul_by_self_is_trivial(self):
        assert (SquareClass(-15) * SquareClass(-15)).is_trivial


class TestCondition:
    def test_examples(self):
        assert degree_condition(5)
        assert not degree_condition(3)
        assert not degree_condition(2)
        assert field_degree(5) == 16
        assert field_degree(3) == 8

    def test_collapse_witnesses(self):
        # 1 + 3 = 4 is a square
        assert (1,) in square_subsets(3)
        # (-2) * (-1) * 2 = 4
        assert (0, 2, 3) in square_subsets(2)

    def test_domain(self):
        for bad in (0, -1, "0", "-1/1"):
            with pytest.raises(DomainError):
                degree_condition(bad)

    @given(root_points)
    def test_oracles_agree(self, x0):
        assert degree_condition(x0) == (class_rank(x0) == 4) == sympy_independent(x0)

    @given(root_points)
    def test_symmetry(self, x0):
        assert degree_condition(x0) == degree_condition(-1 - x0)


class TestScan:
    def test_qualifying_up_to_23(self):
        assert scan_range(1, 23) == QUALIFYING

    def test_mirror(self):
        assert scan_range(-24, -6) == sorted(-1 - x for x in QUALIFYING)

    def test_small_values_fail(self):
        assert scan([Fraction(k) for k in range(1, 5)]) == []

    def test_skips_excluded_points(self):
        assert scan_range(-1, 0) == []

    def test_rationals(self):
        assert scan(["3/2", "1/3"]) == sorted(q for q in (Fraction(3, 2), Fraction(1, 3)) if degree_condition(q))

    def test_ranges(self):
        assert parse_range("-5..7") == (-5, 7)
        with pytest.raises(InputError):
            parse_range("5-7")
        with pytest.raises(InputError):
            scan_range(3, 1)
