"""Tests for exact linear algebra."""

from fractions import Fraction

import pytest

from dskplab.errors import SingularError
from dskplab.poly import MultiPoly
from dskplab.utils.linalg import (
    bareiss_determinant,
    determinant,
    identity_matrix,
    inverse_matrix,
    matrix_product,
    nullspace,
    rank,
)

M = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]


class TestDeterminants:
    """Tests for Gaussian and fraction-free determinants."""

    def test_gaussian_elimination(self):
        """Test the determinant of a fixed integer matrix."""
        assert determinant(M) == 18
        assert determinant([]) == 1

    def test_row_swap_sign(self):
        """Test that a leading zero pivot flips the sign correctly."""
        assert determinant([[0, 1], [1, 0]]) == -1

    def test_singular_matrix(self):
        """Test that a rank-deficient matrix has determinant zero."""
        assert determinant([[1, 2], [2, 4]]) == 0

    def test_bareiss_matches_on_polynomials(self):
        """Test Bareiss on a symbolic 2x2 and 3x3 matrix."""
        a, b = MultiPoly.variable("a"), MultiPoly.variable("b")
        assert bareiss_determinant([[a, b], [b, a]]) == a * a - b * b
        rows = [[MultiPoly.constant(x) for x in row] for row in M]
        assert bareiss_determinant(rows) == MultiPoly.constant(18)


class TestInverseAndKernel:
    """Tests for inverses, kernels and ranks."""

    def test_inverse(self):
        """Test that M M^-1 is the identity."""
        inverse = inverse_matrix(M)
        product = matrix_product(M, inverse)
        assert (product == identity_matrix(3)).all()
        assert inverse[0, 0] == Fraction(11, 18)

    def test_inverse_of_singular_matrix(self):
        """Test that a singular matrix raises SingularError."""
        with pytest.raises(SingularError, match="not invertible"):
            inverse_matrix([[1, 2], [2, 4]])

    def test_nullspace(self):
        """Test a kernel basis of a rank-one matrix."""
        basis = nullspace([[1, 2, 3]])
        assert len(basis) == 2
        for v in basis:
            assert 1 * v[0] + 2 * v[1] + 3 * v[2] == 0
        assert rank([[1, 2, 3], [2, 4, 6]]) == 1
