"""Tests for Gaussian rationals and projective-line arithmetic."""

import random
from fractions import Fraction

import pytest

from dskplab.projective import (
    INDETERMINATE,
    INFINITY,
    GaussianRational,
    MobiusMap,
    format_value,
    from_homogeneous,
    is_indeterminate,
    is_infinite,
    is_zero,
    parse_value,
    proj_add,
    proj_div,
    proj_mul,
    proj_sub,
    random_gaussian,
    random_rational,
    to_homogeneous,
)


class TestGaussianRational:
    """Tests for exact arithmetic in Q(i)."""

    def test_field_operations(self):
        """Test sum, product and quotient against hand-computed values."""
        a = GaussianRational(1, 2)
        b = GaussianRational(Fraction(1, 2), -1)
        assert a + b == GaussianRational(Fraction(3, 2), 1)
        assert a * b == GaussianRational(Fraction(5, 2), 0)
        assert (a / b) * b == a
        assert a - a == 0

    def test_mixed_with_fraction(self):
        """Test that ints and Fractions coerce on both sides."""
        a = GaussianRational(0, 1)
        assert a * a == -1
        assert 1 + a == GaussianRational(1, 1)
        assert Fraction(1, 2) * a == GaussianRational(0, Fraction(1, 2))
        assert 1 / a == GaussianRational(0, -1)

    def test_power_and_conjugate(self):
        """Test integer powers, including negative ones, and the norm."""
        a = GaussianRational(1, 1)
        assert a ** 4 == -4
        assert a ** -2 == GaussianRational(0, Fraction(-1, 2))
        assert a.norm() == 2
        assert a * a.conjugate() == 2

    def test_division_by_zero(self):
        """Test that dividing by zero raises ZeroDivisionError."""
        with pytest.raises(ZeroDivisionError, match="division by zero"):
            GaussianRational(1, 1) / GaussianRational(0, 0)

    def test_hash_matches_fraction_for_real_values(self):
        """Test that real Gaussian rationals hash like the equal Fraction."""
        assert hash(GaussianRational(Fraction(3, 4))) == hash(Fraction(3, 4))
        assert not GaussianRational(0, 0)

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("3", GaussianRational(3)),
            ("-1/2", GaussianRational(Fraction(-1, 2))),
            ("i", GaussianRational(0, 1)),
            ("-2*i", GaussianRational(0, -2)),
            ("1/2-3/4*i", GaussianRational(Fraction(1, 2), Fraction(-3, 4))),
        ],
    )
    def test_parse(self, text, expected):
        """Test the p/q+r/s*i text form."""
        assert GaussianRational.parse(text) == expected

    def test_str_roundtrip_of_complex_value(self):
        """Test that str output parses back to the same number."""
        value = GaussianRational(Fraction(-5, 3), Fraction(7, 2))
        assert str(value) == "-5/3+7/2*i"
        assert GaussianRational.parse(str(value)) == value


class TestProjectiveArithmetic:
    """Tests for arithmetic on the projective line."""

    def test_infinity_rules(self):
        """Test the finite/infinite combinations."""
        assert proj_add(INFINITY, 3) is INFINITY
        assert proj_mul(2, INFINITY) is INFINITY
        assert proj_div(1, 0) is INFINITY
        assert proj_div(5, INFINITY) == 0

    def test_indeterminate_forms(self):
        """Test that inf-inf, 0*inf, 0/0 and inf/inf are INDETERMINATE."""
        assert proj_sub(INFINITY, INFINITY) is INDETERMINATE
        assert proj_mul(0, INFINITY) is INDETERMINATE
        assert proj_div(0, 0) is INDETERMINATE
        assert proj_div(INFINITY, INFINITY) is INDETERMINATE
        assert proj_add(INDETERMINATE, 1) is INDETERMINATE

    def test_homogeneous_coordinates(self):
        """Test [p:q] conversions."""
        assert to_homogeneous(INFINITY) == (1, 0)
        assert from_homogeneous(0, 0) is INDETERMINATE
        assert from_homogeneous(3, 0) is INFINITY
        assert from_homogeneous(Fraction(1), Fraction(2)) == Fraction(1, 2)
        with pytest.raises(ValueError, match="no homogeneous"):
            to_homogeneous(INDETERMINATE)

    def test_is_zero(self):
        """Test zero detection across the supported values."""
        assert is_zero(0)
        assert is_zero(GaussianRational(0))
        assert not is_zero(INFINITY)
        assert not is_zero(INDETERMINATE)

    def test_special_values(self):
        """Test the INFINITY and INDETERMINATE predicates."""
        assert is_infinite(INFINITY)
        assert not is_infinite(0)
        assert is_indeterminate(proj_div(0, 0))
        assert not is_indeterminate(INFINITY)


class TestMobiusMap:
    """Tests for projective maps used for chart changes."""

    def test_inverse_roundtrip(self):
        """Test that M^-1(M(z)) = z, at infinity and at the pole too."""
        rng = random.Random(3)
        m = MobiusMap.random(rng)
        for z in [Fraction(1, 3), Fraction(-7, 2), INFINITY, -m.delta / m.gamma]:
            assert m.inverse()(m(z)) == z

    def test_pole_maps_to_infinity(self):
        """Test that -delta/gamma is sent to INFINITY."""
        m = MobiusMap(Fraction(1), Fraction(2), Fraction(3), Fraction(4))
        assert m(Fraction(-4, 3)) is INFINITY
        assert m(INFINITY) == Fraction(1, 3)

    def test_degenerate_map_rejected(self):
        """Test that a zero determinant raises ValueError."""
        with pytest.raises(ValueError, match="alpha\\*delta"):
            MobiusMap(1, 2, 2, 4)


class TestTextForms:
    """Tests for parse_value and format_value."""

    def test_parse_and_format(self):
        """Test the canonical serialisations."""
        assert parse_value("7/10") == Fraction(7, 10)
        assert parse_value("inf") is INFINITY
        assert format_value(INFINITY) == "inf"
        assert format_value(Fraction(3, 2)) == "3/2"
        assert format_value(GaussianRational(2, 0)) == "2"
        assert format_value(parse_value("1/2+1*i")) == "1/2+1*i"

    def test_indeterminate_never_serialized(self):
        """Test that INDETERMINATE cannot be formatted."""
        with pytest.raises(ValueError, match="cannot be serialized"):
            format_value(INDETERMINATE)

    def test_random_values_are_seeded(self):
        """Test that random draws depend only on the seed and are nonzero."""
        first = [random_rational(random.Random(11)) for _ in range(3)]
        second = [random_rational(random.Random(11)) for _ in range(3)]
        assert first == second
        assert all(x != 0 for x in first)
        assert random_gaussian(random.Random(2)).re != 0
