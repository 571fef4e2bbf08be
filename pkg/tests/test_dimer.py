"""Tests for oriented dimer partition functions and the ratio function."""

import random
from fractions import Fraction

import pytest

from dskplab.aztec import distinct_rationals
from dskplab.cwgraph import build_cw_graph, kasteleyn_orientation, parse_graph_spec
from dskplab.dimer import (
    dkp_solution,
    enumerate_matchings,
    kasteleyn_matrix,
    orientation_sign,
    prefactor,
    ratio_function_Y,
    symbolic_ratio,
    z_det,
    z_oriented,
)
from dskplab.errors import SingularError, SizeGuardError
from dskplab.lattice import InitialData, dkp_step, dskp_step, evolve


def graph_with_data(spec: str, seed: int):
    heights, p = parse_graph_spec(spec)
    points = list(heights.points())
    values = distinct_rationals(random.Random(seed), len(points), bound=len(points))
    data = InitialData(heights, dict(zip(points, values)))
    return build_cw_graph(heights, p, data), data, p


def one_step_labels(g):
    w = g.weights
    return w[(0, 0)], w[(1, 0)], w[(-1, 0)], w[(0, 1)], w[(0, -1)]


class TestPartitionFunctions:
    """Tests for Z by enumeration and by determinant."""

    @pytest.mark.parametrize("spec,count", [("aztec:1", 2), ("aztec:2", 8), ("aztec:3", 64)])
    def test_matching_counts(self, spec, count):
        """Test the number of perfect matchings of A_k."""
        g, _, _ = graph_with_data(spec, 1)
        assert len(enumerate_matchings(g)) == count

    def test_enumeration_matches_determinant(self):
        """Test that z_oriented is det K up to the orientation sign."""
        g, _, _ = graph_with_data("aztec:2", 3)
        orientation = kasteleyn_orientation(g)
        sign = orientation_sign(g, orientation)
        assert sign in (1, -1)
        assert z_oriented(g, orientation=orientation) == sign * z_det(g)

    def test_symbolic_one_step(self):
        """Test that Z of A_1 has six monomials in both modes."""
        g, _, _ = graph_with_data("aztec:1", 1)
        z_enum = z_oriented(g, mode="symbolic")
        z_sym = z_det(g, mode="symbolic")
        assert len(z_enum) == 6
        assert z_enum.max_exponent() == 1
        assert z_enum == z_sym or z_enum == -z_sym

    def test_kasteleyn_matrix_shape(self):
        """Test that K is square with one row per white vertex."""
        g, _, _ = graph_with_data("aztec:2", 1)
        k = kasteleyn_matrix(g)
        assert k.entries.shape == (6, 6)

    def test_unknown_mode(self):
        """Test that an unknown mode raises ValueError."""
        g, _, _ = graph_with_data("aztec:1", 1)
        with pytest.raises(ValueError, match="Unknown mode"):
            z_det(g, mode="float")

    def test_size_guard(self, monkeypatch):
        """Test that enumeration above the guard raises SizeGuardError."""
        monkeypatch.setattr("dskplab.config.BASE_MATCHING_VERTICES", 2)
        g, _, _ = graph_with_data("aztec:1", 1)
        with pytest.raises(SizeGuardError, match="DSKP_SIZE_GUARD"):
            enumerate_matchings(g)


class TestRatioFunction:
    """Tests for Y(G, a) against the recurrence."""

    def test_prefactor_of_a1(self):
        """Test C(A_1, a) = a00 a10 a-10 a01 a0-1."""
        g, _, _ = graph_with_data("aztec:1", 2)
        a, b, c, d, e = one_step_labels(g)
        assert prefactor(g) == a * b * c * d * e

    def test_one_step(self):
        """Test that Y on A_1 equals a single dSKP step."""
        for seed in range(3):
            g, _, _ = graph_with_data("aztec:1", seed)
            a, b, c, d, e = one_step_labels(g)
            assert ratio_function_Y(g) == dskp_step(b, c, d, e, a)

    def test_equal_equator_values(self):
        """Test that Y stays defined where the one-step formula is singular."""
        g, _, _ = graph_with_data("aztec:1", 2)
        weights = dict(g.weights)
        _, b, c, d, _ = one_step_labels(g)
        weights[(0, -1)] = c
        with pytest.raises(SingularError, match="equal adjacent equator values"):
            dskp_step(b, c, d, c, weights[(0, 0)])
        assert ratio_function_Y(g, weights, rng=random.Random(1)) == c

    @pytest.mark.parametrize("spec", ["aztec:2", "aztec:3", "tilted:2,0,4"])
    def test_matches_evolution(self, spec):
        """Test that Y(G_p, a) is the value of the recurrence at p."""
        g, data, p = graph_with_data(spec, 4)
        solution = evolve(data, "dskp", p[2])
        assert ratio_function_Y(g) == solution.value(*p)

    def test_methods_agree(self):
        """Test the det and enumeration methods on A_2."""
        g, _, _ = graph_with_data("aztec:2", 6)
        assert ratio_function_Y(g, method="det") == ratio_function_Y(g, method="enumeration")

    def test_zero_weight_uses_chart_change(self):
        """Test that a zero weight is resolved through a Mobius chart."""
        g, _, _ = graph_with_data("aztec:1", 5)
        weights = dict(g.weights)
        weights[(0, 0)] = Fraction(0)
        _, b, c, d, e = one_step_labels(g)
        value = ratio_function_Y(g, weights, rng=random.Random(1))
        assert value == dskp_step(b, c, d, e, Fraction(0))

    def test_unknown_method(self):
        """Test that an unknown method raises ValueError."""
        g, _, _ = graph_with_data("aztec:1", 1)
        with pytest.raises(ValueError, match="Unknown method"):
            ratio_function_Y(g, method="guess")

    def test_missing_weights(self):
        """Test that weights must cover every face."""
        g, _, _ = graph_with_data("aztec:1", 1)
        with pytest.raises(ValueError, match="Missing weights"):
            ratio_function_Y(g, {(0, 0): Fraction(1)})

    def test_symbolic_ratio_of_a1(self):
        """Test the symbolic one-step numerator and denominator sizes."""
        g, _, _ = graph_with_data("aztec:1", 1)
        r = symbolic_ratio(g)
        assert len(r.numerator) == 6
        assert len(r.denominator) == 6
        a, b, c, d, e = one_step_labels(g)
        values = dict(g.weights)
        assert r.evaluate(values) == dskp_step(b, c, d, e, a)


class TestDimerSolution:
    """Tests for the octahedron-recurrence solution."""

    def test_one_step(self):
        """Test that C_dim Z_dim on A_1 is one dKP step."""
        g, _, _ = graph_with_data("aztec:1", 2)
        a, b, c, d, e = one_step_labels(g)
        assert dkp_solution(g) == dkp_step(b, c, d, e, a)

    def test_matches_dkp_evolution(self):
        """Test C_dim Z_dim on A_2 against evolving dKP."""
        g, data, p = graph_with_data("aztec:2", 8)
        assert dkp_solution(g) == evolve(data, "dkp", p[2]).value(*p)
