import math
from decimal import Decimal, getcontext
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from modbm.errors import NotIrrational, ParseError, RangeError, UndecidableAtPrecision
from modbm.exactnum import (CertifiedDecimal, Ordering, Quadratic, compare, floor_multiple,
                            frac_of_quotient, parse_constant, sign_surd)

getcontext().prec = 80

SQRT2 = Quadratic.sqrt(2)
PHI = Quadratic(1, 1, 5, 2)


def dec_sqrt(d):
    return Decimal(d).sqrt()


def certified_sqrt(d, budget=200):
    # fn(D) within 10**-D of sqrt(d)
    return CertifiedDecimal.from_function(
        lambda D: F(math.isqrt(d * 10 ** (2 * D)), 10 ** D), budget=budget, label=f"sqrt{d}")


class TestCompare:
    def test_sqrt2_below_three_halves(self):
        assert compare(SQRT2, F(3, 2)) == Ordering.LESS

    def test_golden_ratio_above_eight_fifths(self):
        # (2*phi - 1)^2 = 5 ; (2*8/5 - 1)^2 = 121/25 < 5
        assert 5 * 25 > 121
        assert compare(PHI, F(8, 5)) == Ordering.GREATER

    def test_certified_straddle_is_undecidable(self):
        x = CertifiedDecimal.from_literal("1.4142", radius=F(1, 100))
        with pytest.raises(UndecidableAtPrecision):
            compare(x, F(1414, 1000))

    def test_literal_ulp_radius_decides_far_values(self):
        x = CertifiedDecimal.from_literal("1.4142")
        assert compare(x, F(1414, 1000)) == Ordering.GREATER
        assert compare(x, F(3, 2)) == Ordering.LESS

    def test_refinable_certified_decides_close_values(self):
        x = certified_sqrt(2)
        # 1.41421356237 < sqrt 2 < 1.41421356238
        assert compare(x, F(141421356237, 10 ** 11)) == Ordering.GREATER
        assert compare(x, F(141421356238, 10 ** 11)) == Ordering.LESS

    def test_rational_variant_can_be_equal(self):
        assert compare(Quadratic.of_rational(F(3, 7)), F(3, 7)) == Ordering.EQUAL


@pytest.mark.parametrize(("x", "n", "expected"), [
    (SQRT2, 5, 7),
    (SQRT2, 1, 1),
    (PHI, 4, 6),
])
def test_floor_multiple_examples(x, n, expected):
    assert floor_multiple(x, n) == expected


def test_floor_multiple_decimal_oracle():
    phi = (1 + dec_sqrt(5)) / 2
    for n in range(1, 400):
        assert floor_multiple(PHI, n) == int((n * phi).to_integral_value(rounding="ROUND_FLOOR"))
        assert floor_multiple(SQRT2, n) == int((n * dec_sqrt(2)).to_integral_value(rounding="ROUND_FLOOR"))


def test_floor_multiple_rejects_bad_input():
    with pytest.raises(RangeError):
        floor_multiple(SQRT2, 0)
    with pytest.raises(RangeError):
        floor_multiple(-SQRT2, 3)


class TestFracOfQuotient:
    def test_zero(self):
        whole, frac = frac_of_quotient(0, SQRT2)
        assert whole == 0 and frac.compare(0) == Ordering.EQUAL

    def test_four_over_sqrt2(self):
        whole, frac = frac_of_quotient(4, SQRT2)
        assert whole == 2
        assert frac == Quadratic(-2, 2, 2, 1)  # 2*sqrt2 - 2
        assert 2 ** 2 < 8 < 3 ** 2

    def test_seven_over_sqrt2(self):
        whole, frac = frac_of_quotient(7, SQRT2)
        assert whole == 4
        assert abs(float(frac) - 0.9497474683058) < 1e-12

    def test_requires_irrational_above_one(self):
        with pytest.raises(NotIrrational):
            frac_of_quotient(3, Quadratic.of_rational(F(3, 2)))
        with pytest.raises(RangeError):
            frac_of_quotient(3, SQRT2 - 1)

    def test_certified_matches_quadratic(self):
        cs = certified_sqrt(2)
        for m in range(0, 60):
            wq, fq = frac_of_quotient(m, SQRT2)
            wc, fc = frac_of_quotient(m, cs)
            assert wq == wc
            lo, hi = fc.enclosure(30)
            assert lo <= fq.enclosure(30)[1] and fq.enclosure(30)[0] <= hi


class TestQuadraticForm:
    def test_canonical(self):
        q = Quadratic(2, 4, 2, -6)
        assert (q.e, q.f, q.d, q.g) == (-1, -2, 2, 3)

    def test_square_factor_pulled_out(self):
        assert Quadratic(0, 1, 8, 1) == Quadratic(0, 2, 2, 1)

    def test_perfect_square_collapses_to_rational(self):
        q = Quadratic(1, 1, 4, 1)
        assert q.kind == "rational" and q.as_fraction() == 3
        with pytest.raises(NotIrrational):
            q.require_irrational()

    def test_mixed_radicands_rejected(self):
        with pytest.raises(ValueError):
            SQRT2 + Quadratic.sqrt(3)

    def test_reciprocal(self):
        assert SQRT2.reciprocal() == Quadratic(0, 1, 2, 2)
        assert (PHI * PHI.reciprocal()).compare(1) == Ordering.EQUAL


ints = st.integers(min_value=-10 ** 6, max_value=10 ** 6)
nonsquares = st.integers(min_value=2, max_value=500).filter(lambda d: math.isqrt(d) ** 2 != d)


@given(ints, ints, nonsquares)
def test_sign_surd_matches_decimal(p, q, d):
    val = p + q * dec_sqrt(d)
    expected = (val > 0) - (val < 0)
    assert sign_surd(p, q, d) == expected


@given(ints, ints.filter(bool), nonsquares, st.integers(min_value=1, max_value=1000))
def test_floor_bracket_invariant(e, f, d, g):
    x = Quadratic(e, f, d, g)
    fl = x.floor()
    assert x.compare(fl) == Ordering.GREATER
    assert x.compare(fl + 1) == Ordering.LESS


@given(st.integers(min_value=1, max_value=10 ** 6), nonsquares)
def test_floor_multiple_brackets(n, d):
    x = Quadratic.sqrt(d)
    fl = floor_multiple(x, n)
    assert compare(x, F(fl, n)) == Ordering.GREATER
    assert compare(x, F(fl + 1, n)) == Ordering.LESS


@given(st.fractions(), st.fractions(), st.fractions())
def test_rational_round_trip(a, b, c):
    qa, qb = Quadratic.of_rational(a), Quadratic.of_rational(b)
    assert (qa + qb).as_fraction() == a + b
    assert (qa * qb).as_fraction() == a * b
    assert (qa - c).as_fraction() == a - c
    assert qa.floor() == math.floor(a)
    assert int(qa.compare(c)) == (a > c) - (a < c)


@settings(max_examples=50)
@given(st.fractions(min_value=1, max_value=3), st.integers(min_value=10, max_value=60))
def test_precision_refinement_is_monotone(q, start):
    x = certified_sqrt(2)
    decided = x.compare(q)
    for budget in (start, 2 * start, 200):
        y = CertifiedDecimal(x.approx, start_digits=start, budget=budget, label="s")
        try:
            assert y.compare(q) == decided
        except UndecidableAtPrecision:
            pass


class TestParse:
    def test_forms(self):
        assert parse_constant("rat:3/4").as_fraction() == F(3, 4)
        assert parse_constant("quad:1,1,5,2") == PHI
        assert parse_constant("quad:-1,+1,2,1") == SQRT2 - 1
        assert parse_constant("dec:1.4142").kind == "certified-decimal"

    @pytest.mark.parametrize(("text", "pos"), [
        ("quad:1,x,5,2", 7),
        ("rat:3/", 6),
        ("foo:1", 0),
        ("quad:1,1,5", 5),
        ("dec:1.4a", 7),
        ("1.5", 0),
    ])
    def test_errors_carry_position(self, text, pos):
        with pytest.raises(ParseError) as info:
            parse_constant(text)
        assert info.value.position == pos
