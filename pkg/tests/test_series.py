"""Tests for truncated ε-series."""

from fractions import Fraction

import pytest

from dskplab.errors import TruncationError
from dskplab.projective import GaussianRational
from dskplab.series import EpsilonSeries, series_pivot_rank


class TestEpsilonSeries:
    """Tests for EpsilonSeries arithmetic and precision tracking."""

    def test_geometric_inverse(self):
        """Test 1/(1 + ε) = 1 - ε + ε² - ε³ + O(ε⁴)."""
        s = EpsilonSeries({0: 1, 1: 1}, precision=4)
        inv = s.inverse()
        assert inv.precision == 4
        assert [inv.coefficient(e) for e in range(4)] == [1, -1, 1, -1]
        with pytest.raises(TruncationError, match="unknown at precision 4"):
            inv.coefficient(4)

    def test_inverse_of_shifted_series(self):
        """Test that a valuation v costs 2v orders of precision."""
        s = EpsilonSeries({2: Fraction(1, 2), 3: 1}, precision=6)
        inv = s.inverse()
        assert inv.valuation == -2
        assert inv.precision == 2
        assert inv.leading_coefficient() == 2

    def test_product_precision(self):
        """Test that an exact monomial shifts the precision of a truncated factor."""
        product = EpsilonSeries.monomial(1, 1) * EpsilonSeries({0: 3}, precision=3)
        assert product.precision == 4
        assert product.coefficient(1) == 3

    def test_exact_monomial_inverse(self):
        """Test that exact monomials invert exactly."""
        assert EpsilonSeries.monomial(2, 3).inverse() == EpsilonSeries.monomial(Fraction(1, 2), -3)

    def test_truncated_never_equals_exact(self):
        """Test that equality needs an exactly zero difference."""
        assert EpsilonSeries({0: 1}) == 1
        assert EpsilonSeries({0: 1}, precision=2) != 1

    def test_scalar_mixing(self):
        """Test ints, Fractions and Gaussian rationals as coefficients."""
        i = EpsilonSeries.constant(GaussianRational(0, 1))
        assert i * i == -1
        assert 1 - EpsilonSeries.monomial(Fraction(1, 3), 0) == Fraction(2, 3)

    def test_errors(self):
        """Test division by zero and unresolved leading terms."""
        with pytest.raises(ZeroDivisionError, match="exact zero"):
            EpsilonSeries().inverse()
        with pytest.raises(TruncationError, match="needs a precision"):
            EpsilonSeries({0: 1, 1: 1}).inverse()
        with pytest.raises(TruncationError, match="No nonzero coefficient"):
            EpsilonSeries({5: 1}, precision=3).leading_coefficient()

    def test_pivot_rank(self):
        """Test that known small valuations are preferred as pivots."""
        low = EpsilonSeries({1: 1}, precision=5)
        high = EpsilonSeries({3: 1}, precision=5)
        unknown = EpsilonSeries({}, precision=5)
        ranked = sorted([unknown, high, low], key=series_pivot_rank)
        assert ranked[0] is low
        assert ranked[-1] is unknown
        assert series_pivot_rank(low) < series_pivot_rank(high) < series_pivot_rank(unknown)
        assert series_pivot_rank(Fraction(1)) == (0, 0)
