"""Tests for quadrangulations, Temperley's bijection and tree/forest configurations."""

import random

import pytest

from dskplab.cwgraph import build_cw_graph, is_isomorphic, parse_graph_spec
from dskplab.errors import SizeGuardError
from dskplab.forests import (
    B_EXTRA,
    B_ROOT,
    W_ROOT,
    Quadrangulation,
    count_rooted_spanning_trees,
    det_C_identity,
    enumerate_tree_forest,
    find_cycle,
    iter_double_matchings,
    pair_weight,
    quadrangulate_aztec,
    reverse_temperley,
    signed_polynomial,
    temperley,
)
from dskplab.projective import random_rational


def random_face_weights(q: Quadrangulation, seed: int):
    rng = random.Random(seed)
    return {f: random_rational(rng) for f in q.face_list()}


class TestQuadrangulation:
    """Tests for the Aztec quadrangulation."""

    @pytest.mark.parametrize("k,faces,white", [(1, 5, 2), (2, 13, 6), (3, 25, 12)])
    def test_sizes(self, k, faces, white):
        """Test |F| = |W| + |B̃| and |W| = |B| for A_k."""
        q = quadrangulate_aztec(k)
        assert len(q.faces) == faces
        assert len(q.white) == white
        assert len(q.black) == white
        assert len(q.black_tilde) == white + 1
        assert q.forest_roots[0] == B_ROOT

    @pytest.mark.parametrize("k", [1, 2])
    def test_dimer_graph_is_aztec(self, k):
        """Test that the dimer graph of the quadrangulation is A_k."""
        heights, p = parse_graph_spec(f"aztec:{k}")
        assert is_isomorphic(quadrangulate_aztec(k).dimer_graph(), build_cw_graph(heights, p))

    def test_invalid_size(self):
        """Test that k < 1 is rejected."""
        with pytest.raises(ValueError, match="must be >= 1"):
            quadrangulate_aztec(0)

    def test_bad_corner_list(self):
        """Test that faces must have four corners."""
        with pytest.raises(ValueError, match="expected 4"):
            Quadrangulation({"f": (B_ROOT, W_ROOT, "b")}, [], ["b"], [])

    def test_to_dict(self):
        """Test the JSON form lists every face with its corners."""
        payload = quadrangulate_aztec(1).to_dict()
        assert payload["b_root"] == B_ROOT
        assert len(payload["faces"]) == 5
        assert all(len(face["corners"]) == 4 for face in payload["faces"])


class TestTemperley:
    """Tests for Temperley's bijection."""

    @pytest.mark.parametrize("k", [1, 2])
    def test_matchings_are_tree_pairs(self, k):
        """Test that every matching gives a tree pair and is recovered from its black tree."""
        q = quadrangulate_aztec(k)
        matchings = list(iter_double_matchings(q))
        assert len(matchings) == count_rooted_spanning_trees(q)
        for matching in matchings:
            pair = temperley(q, matching)
            assert reverse_temperley(q, pair.black_tree) == matching
            assert find_cycle(q, pair.black_tree) is None

    def test_spanning_tree_count(self):
        """Test the matrix-tree count of G• on A_1, a 4-cycle with one chord."""
        assert count_rooted_spanning_trees(quadrangulate_aztec(1)) == 8

    def test_incomplete_matching(self):
        """Test that a partial matching is rejected."""
        with pytest.raises(ValueError, match="every vertex"):
            temperley(quadrangulate_aztec(1), {})

    def test_reverse_needs_spanning_tree(self):
        """Test that a non-tree is rejected."""
        with pytest.raises(ValueError, match="Not a spanning tree"):
            reverse_temperley(quadrangulate_aztec(1), {})


class TestTreeForest:
    """Tests for complementary tree/forest configurations."""

    def test_one_step_counts(self):
        """Test six configurations and six monomials on A_1."""
        q = quadrangulate_aztec(1)
        configs = enumerate_tree_forest(q)
        assert len(configs) == 6
        assert len(signed_polynomial(configs)) == 6
        assert all(c.sign in (1, -1) for c in configs)

    @pytest.mark.parametrize("k", [1, 2])
    def test_forest_sizes(self, k):
        """Test |T| = |B̃| and |F| = |B̃| + 1 - ℓ for every configuration."""
        q = quadrangulate_aztec(k)
        for c in enumerate_tree_forest(q):
            assert len(c.tree) == len(q.black_tilde)
            assert len(c.forest) == len(q.black_tilde) + 1 - len(q.forest_roots)

    def test_polynomial_is_block_determinant(self):
        """Test that the signed sum equals det(C(1)^B̃ | C(a)^B) on A_1."""
        q = quadrangulate_aztec(1)
        assert signed_polynomial(enumerate_tree_forest(q)) == q.c_determinant(symbolic=True)

    def test_a2_counts(self):
        """Test 220 configurations and monomials on A_2."""
        configs = enumerate_tree_forest(quadrangulate_aztec(2))
        assert len(configs) == 220
        assert len(signed_polynomial(configs)) == 220

    def test_pair_weight_matches_configuration(self):
        """Test that pair_weight reproduces the configuration weight."""
        q = quadrangulate_aztec(1)
        weights = random_face_weights(q, 3)
        for c in enumerate_tree_forest(q):
            assert pair_weight(q, c.tree, c.forest, weights) == c.weight(weights)

    def test_cycle_reversal_negates(self):
        """Test that reversing the cycle of a cycle-rooted pair negates its signed weight."""
        q = quadrangulate_aztec(2)
        tree = {
            (1, 0): (0, 0),
            (1, 2): (0, 2),
            (1, 4): (0, 4),
            (3, 0): (4, 0),
            (3, 2): (4, 2),
            (3, 4): (3, 3),
            B_EXTRA: (4, 4),
        }
        cycle = [(1, 0), (1, 2), (3, 2), (3, 0)]
        forest = {(1, 0): (1, 1), (1, 2): (2, 2), (3, 2): (3, 1), (3, 0): (2, 0)}
        forest.update({(1, 4): (1, 3), (3, 4): (2, 4)})
        reversed_forest = dict(forest)
        reversed_forest.update({(1, 2): (1, 1), (3, 2): (2, 2), (3, 0): (3, 1), (1, 0): (2, 0)})
        assert sorted(find_cycle(q, forest)) == sorted(cycle)
        assert sorted(find_cycle(q, reversed_forest)) == sorted(cycle)

        weights = random_face_weights(q, 5)
        weight = pair_weight(q, tree, forest, weights)
        assert weight != 0
        assert pair_weight(q, tree, reversed_forest, weights) == -weight

    def test_size_guard(self, monkeypatch):
        """Test that the forest guard stops large enumerations."""
        monkeypatch.setattr("dskplab.config.BASE_FOREST_EDGES", 4)
        with pytest.raises(SizeGuardError, match="Tree/forest enumeration"):
            enumerate_tree_forest(quadrangulate_aztec(1))


class TestCMatrixIdentity:
    """Tests for det K = ± det(C(1)^B̃ | C(a)^B)."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_identity_holds(self, k):
        """Test the stacked-product identity with random weights."""
        q = quadrangulate_aztec(k)
        check = det_C_identity(q, random_face_weights(q, k))
        assert check.zero_block
        assert check.kasteleyn_block
        assert check.holds
        assert check.to_dict()["holds"] is True
