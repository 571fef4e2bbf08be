"""Tests for Aztec diamond weights, closed forms and singular-data experiments."""

import random
from fractions import Fraction

import pytest

from dskplab.aztec import (
    AztecWeights,
    _hermite_basis,
    _lattice_class,
    constant_row_sum,
    cyclic_row_shift,
    devron_experiment,
    dodgson,
    dodgson_matrix,
    harmonic_mean_value,
    inverse_entry_sum,
    kernel_formula_Y,
    periodic_columns_check,
    periodic_weights,
    vertical_shift,
    vertical_shift_check,
    y_value,
    y_via_Cinverse,
    z_perm_forest,
    z_value,
)
from dskplab.cwgraph import aztec_apex
from dskplab.errors import SingularError, SizeGuardError
from dskplab.lattice import InitialData, aztec_heights, evolve
from dskplab.projective import random_rational


class TestAztecWeights:
    """Tests for the (c, d) parametrisation of A_k."""

    def test_shape_validation(self):
        """Test that c and d must have sizes k+1 and k."""
        with pytest.raises(ValueError, match="c must be a 2x2 matrix"):
            AztecWeights(1, [[1, 2]], [[3]])
        with pytest.raises(ValueError, match="d must be a 1x1 matrix"):
            AztecWeights(1, [[1, 2], [3, 4]], [])

    def test_random_weights_are_distinct(self):
        """Test that generic weights never repeat."""
        w = AztecWeights.random(2, random.Random(1))
        values = list(w.face_weights().values())
        assert len(values) == 13
        assert len(set(values)) == 13

    def test_constant_columns(self):
        """Test column constants and their rejection for generic d."""
        w = AztecWeights.random(3, random.Random(2), constant_columns=True)
        assert w.has_constant_columns()
        assert len(w.column_constants()) == 3
        with pytest.raises(ValueError, match="constant d columns"):
            AztecWeights.random(3, random.Random(2)).column_constants()

    @pytest.mark.parametrize("k", [1, 2])
    def test_from_initial_data(self, k):
        """Test that Y of the diamond cut from initial data is x at the apex."""
        rng = random.Random(k)
        heights = aztec_heights(k + 2)
        data = InitialData.from_function(heights, lambda i, j, h: random_rational(rng))
        w = AztecWeights.from_initial_data(data, k)
        apex = aztec_apex(k)
        assert y_value(w) == evolve(data, "dskp", apex[2]).value(*apex)

    def test_to_dict(self):
        """Test the JSON form keeps the matrix shapes."""
        payload = AztecWeights.random(2, random.Random(3)).to_dict()
        assert payload["k"] == 2
        assert len(payload["c"]) == 3
        assert len(payload["d"][0]) == 2


class TestAztecIdentities:
    """Tests for permutation forests, shifts and the C-matrix ratio formulas."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_permutation_forests(self, k):
        """Test that the permutation sum is ±Z for constant d columns."""
        w = AztecWeights.random(k, random.Random(10 + k), constant_columns=True)
        z = z_value(w)
        assert z_perm_forest(w) in (z, -z)

    def test_permutation_guard(self, monkeypatch):
        """Test the permutation size guard."""
        monkeypatch.setattr("dskplab.config.BASE_PERMUTATION_SIZE", 2)
        w = AztecWeights.random(2, random.Random(1), constant_columns=True)
        with pytest.raises(SizeGuardError, match="Permutation forest sum"):
            z_perm_forest(w)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_vertical_shift(self, k):
        """Test Z(shifted) = (-1)^k Z and Y(shifted) = Y."""
        w = AztecWeights.random(k, random.Random(20 + k), constant_columns=True)
        check = vertical_shift_check(w)
        assert check.z_holds
        assert check.y_holds
        assert vertical_shift(w).c[0][-1] == w.c[0][0]

    @pytest.mark.parametrize("k", [1, 2])
    def test_ratio_formulas(self, k):
        """Test the C-inverse and kernel formulas against Y."""
        w = AztecWeights.random(k, random.Random(30 + k), constant_columns=True)
        y = y_value(w)
        assert y_via_Cinverse(w) == y
        assert kernel_formula_Y(w) == y


class TestDodgson:
    """Tests for constant-d closed forms."""

    @pytest.mark.parametrize("k", [1, 2])
    def test_closed_forms(self, k):
        """Test Y = d + sum(N^-1) and Z = ± prod(c - d) det N."""
        w = AztecWeights.random(k, random.Random(40 + k), constant_d=True)
        result = dodgson(w)
        z = z_value(w)
        assert result.y == y_value(w)
        assert result.z in (z, -z)

    def test_harmonic_mean(self):
        """Test the harmonic-mean closed form on a small example."""
        assert harmonic_mean_value([1, 3], 0) == Fraction(3, 2)
        assert harmonic_mean_value([Fraction(2), Fraction(4)], 1) == Fraction(5, 2)

    def test_row_sum_identity(self):
        """Test Σ(N^-1) = n / s for constant row sums s and its row-shift invariance."""
        n_matrix = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(0)]]
        assert constant_row_sum(n_matrix) == 3
        assert inverse_entry_sum(n_matrix) == Fraction(2, 3)
        assert cyclic_row_shift(n_matrix) == [[3, 0], [1, 2]]
        assert inverse_entry_sum(cyclic_row_shift(n_matrix)) == Fraction(2, 3)
        assert constant_row_sum([[1, 2], [3, 4]]) is None

    def test_singular_dodgson_matrix(self):
        """Test that c equal to d raises SingularError."""
        with pytest.raises(SingularError, match="different from d"):
            dodgson_matrix([[1, 2], [3, 4]], 4)

    def test_requires_single_d(self):
        """Test that generic d is rejected."""
        with pytest.raises(ValueError, match="every d_"):
            dodgson(AztecWeights.random(2, random.Random(1)))


class TestPeriodicColumns:
    """Tests for periodic column weights."""

    def test_full_shift(self):
        """Test that p = 1 behaves like the vertical shift."""
        check = periodic_columns_check(3, 1, seed=2)
        assert check.expected_sign == 1
        assert check.z_holds
        assert check.y_holds

    def test_sparse_constant_columns(self):
        """Test Y invariance for m = 3 with every second column constant."""
        check = periodic_columns_check(3, 2, seed=1)
        assert check.expected_sign is None
        assert check.y_holds

    def test_invalid_parameters(self):
        """Test the parameter checks."""
        with pytest.raises(ValueError, match="m >= 2"):
            periodic_weights(1, 1, random.Random(1))


class TestDevronExperiments:
    """Tests for singular initial data."""

    def test_dodgson_two(self):
        """Test that 2-Dodgson data becomes constant at level 2 with the closed value."""
        report = devron_experiment("dodgson", m=2, seed=3)
        assert report.predicted_level == 2
        assert report.holds
        assert report.closed_form_matches
        assert report.passed
        assert len(report.final_values) == 1

    def test_harmonic_dodgson(self):
        """Test the harmonic-mean value of data with an extra shift symmetry."""
        report = devron_experiment("dodgson", m=2, harmonic_shift=1, seed=4)
        assert report.holds
        assert report.closed_form_matches

    def test_two_periodic(self):
        """Test that (2,0), (0,2) periodic data is constant on diagonals at level 2."""
        report = devron_experiment("two_periodic", periods=(2, 0, 0, 2), seed=5)
        assert report.predicted_level == 2
        assert report.holds
        assert report.to_dict()["closed_form"] is None

    def test_unknown_kind(self):
        """Test that an unknown kind raises ValueError."""
        with pytest.raises(ValueError, match="Unknown kind"):
            devron_experiment("spiral")

    def test_collinear_periods(self):
        """Test that collinear periods are rejected."""
        with pytest.raises(ValueError, match="collinear"):
            devron_experiment("two_periodic", periods=(2, 0, 4, 0))


class TestPeriodLattice:
    """Tests for the Hermite basis of a period lattice."""

    def test_hermite_basis(self):
        """Test Z(s,t) + Z(u,v) = Z(h11, h12) + Z(0, h22) on two period pairs."""
        assert _hermite_basis(2, 0, 0, 2) == (2, 0, 2)
        assert _hermite_basis(2, 0, 1, 1) == (1, 1, 2)

    def test_lattice_class(self):
        """Test that points differing by a period share a class."""
        basis = _hermite_basis(2, 0, 1, 1)
        assert _lattice_class((3, 2), basis) == (0, 1)
        assert _lattice_class((3, 2), basis) == _lattice_class((0, 1), basis)
        assert _lattice_class((0, 0), basis) != _lattice_class((0, 1), basis)
