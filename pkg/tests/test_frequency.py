"""
Tests for rotation frequencies and continued fractions.
"""

from fractions import Fraction

import pytest

from qpcocycle.core.frequency import Frequency, continued_fraction, convergents_of
from qpcocycle.exceptions import InputError, InvalidFrequency


def test_continued_fraction_of_fraction():
    """Exact fractions terminate."""
    assert continued_fraction(Fraction(13, 8), 10) == [1, 1, 1, 1, 2]


def test_convergents_recurrence():
    """Convergents start at a0/1."""
    assert convergents_of([0, 2, 3]) == [(0, 1), (1, 2), (3, 7)]


class TestRational:
    def test_reduced_mod_q(self):
        """p is reduced modulo q."""
        freq = Frequency.rational(7, 5)
        assert (freq.p, freq.q) == (2, 5)
        assert freq.value == pytest.approx(0.4)
        assert freq.is_rational
        assert freq.kind == "rational"

    def test_not_lowest_terms(self):
        """gcd(p, q) must be 1."""
        with pytest.raises(InvalidFrequency):
            Frequency.rational(2, 4)

    def test_bad_denominator(self):
        """q must be positive; the error is an input error."""
        with pytest.raises(InputError):
            Frequency.rational(1, 0)

    def test_convergent_of_rational_is_itself(self):
        """A rational frequency is its own convergent."""
        freq = Frequency.rational(1, 3)
        assert freq.convergent(4) is freq


class TestIrrational:
    def test_golden_convergents(self):
        """Golden-mean convergents are Fibonacci ratios."""
        approximants = Frequency.golden().convergents_between(21, 377)
        assert [f.q for f in approximants] == [21, 34, 55, 89, 144, 233, 377]
        assert [f.p for f in approximants] == [13, 21, 34, 55, 89, 144, 233]

    def test_golden_value(self):
        """The golden frequency is (sqrt 5 - 1) / 2."""
        freq = Frequency.golden()
        assert freq.value == pytest.approx((5**0.5 - 1) / 2, abs=1e-15)
        assert not freq.is_rational
        assert str(freq) == "golden"

    def test_sqrt2m1_partial_quotients(self):
        """sqrt(2) - 1 = [0; 2, 2, 2, ...]."""
        freq = Frequency.sqrt2m1(depth=8)
        assert [q for _, q in freq.convergents[:5]] == [1, 2, 5, 12, 29]

    def test_missing_convergent(self):
        """Indices beyond the expansion depth are rejected."""
        with pytest.raises(InvalidFrequency):
            Frequency.golden(depth=5).convergent(10)


class TestParse:
    @pytest.mark.parametrize(
        "text,q",
        [("2/5", 5), (" 3 / 8 ", 8), ("-1/3", 3)],
    )
    def test_rational_literals(self, text, q):
        """p/q literals parse to rational frequencies."""
        freq = Frequency.parse(text)
        assert freq.q == q

    def test_named_constants(self):
        """Named frequencies parse case-insensitively."""
        assert Frequency.parse("golden").label == "golden"
        assert Frequency.parse("SQRT2M1").label == "sqrt2m1"

    def test_decimal_literal(self):
        """Decimals are exact: 0.375 expands to 3/8."""
        freq = Frequency.parse("0.375")
        assert not freq.is_rational
        assert freq.value == pytest.approx(0.375)
        assert freq.convergents[-1] == (3, 8)

    @pytest.mark.parametrize("text", ["pi", "1/0", "", "1/2/3"])
    def test_garbage(self, text):
        """Anything else is an invalid frequency."""
        with pytest.raises(InvalidFrequency):
            Frequency.parse(text)
