"""Tests for crosses-and-wrenches graphs and their local moves."""

from fractions import Fraction

import pytest

from dskplab.cwgraph import (
    aztec_apex,
    build_cw_graph,
    contract_vertex,
    degree_two_vertices,
    expand_vertex,
    is_isomorphic,
    iter_lattice_targets,
    kasteleyn_orientation,
    parse_graph_spec,
    raise_by_moves,
    spider_move,
)
from dskplab.errors import WindowTooSmallError
from dskplab.lattice import InitialData, aztec_heights, dskp_step, linear_solution


def aztec_graph(k: int):
    heights, p = parse_graph_spec(f"aztec:{k}")
    return build_cw_graph(heights, p)


class TestBuild:
    """Tests for building G_p from a height function."""

    @pytest.mark.parametrize("k,vertices,inner", [(1, 4, 1), (2, 12, 5), (3, 24, 13)])
    def test_aztec_sizes(self, k, vertices, inner):
        """Test vertex and inner-face counts of the Aztec graphs A_1 to A_3."""
        g = aztec_graph(k)
        assert g.vertex_count == vertices
        assert len(g.inner) == inner
        assert len(g.edges) == 4 * k * k
        g.validate()

    def test_a1_is_a_square(self):
        """Test that A_1 is a single degree-4 face with four open neighbours."""
        g = aztec_graph(1)
        assert g.inner == {(0, 0)}
        assert g.open == {(1, 0), (-1, 0), (0, 1), (0, -1)}
        assert g.degree((0, 0)) == 4

    def test_wrench_graph_is_balanced(self):
        """Test |W| = |B| and even inner degrees on a surface with wrenches."""
        heights, p = parse_graph_spec("tilted:2,0,4")
        g = build_cw_graph(heights, p)
        g.validate()
        assert len(g.white) == len(g.black)

    def test_weights_from_data(self):
        """Test that faces carry the initial weights."""
        heights = aztec_heights(3)
        data = InitialData.from_function(heights, linear_solution(Fraction(1), 9, 5, 0))
        g = build_cw_graph(heights, aztec_apex(1), data)
        assert g.weights[(0, 0)] == 0
        assert g.weights[(1, 0)] == 1 + 5

    def test_target_not_above_surface(self):
        """Test that a point on the surface is rejected."""
        with pytest.raises(ValueError, match="does not lie above"):
            build_cw_graph(aztec_heights(3), (0, 0, 0))

    def test_cone_outside_window(self):
        """Test that a cone reaching the boundary raises WindowTooSmallError."""
        with pytest.raises(WindowTooSmallError, match="reaches the window boundary"):
            build_cw_graph(aztec_heights(3), (0, 0, 6))

    def test_to_dict_with_orientation(self):
        """Test the JSON dump of A_1 with edge signs."""
        g = aztec_graph(1)
        payload = g.to_dict(kasteleyn_orientation(g))
        assert len(payload["vertices"]) == 4
        assert all(edge["phi"] in (1, -1) for edge in payload["edges"])
        kinds = sorted(face["kind"] for face in payload["faces"])
        assert kinds == ["inner", "open", "open", "open", "open"]

    def test_lattice_targets(self):
        """Test that every yielded target has a fitting cone."""
        targets = list(iter_lattice_targets(aztec_heights(3), 2))
        assert (0, 0, 2) in targets
        assert all(k == 2 for _, _, k in targets)


class TestGraphSpec:
    """Tests for parse_graph_spec."""

    def test_aztec(self):
        """Test the aztec family window and apex."""
        heights, p = parse_graph_spec("aztec:2")
        assert p == (1, 0, 3)
        assert heights.imax == 4
        assert aztec_apex(3) == (0, 0, 4)

    def test_point_families(self):
        """Test pyramid and tilted targets."""
        heights, p = parse_graph_spec("pyramid:1,0,3")
        assert p == (1, 0, 3)
        assert heights.imax == 5

    @pytest.mark.parametrize(
        "text,message",
        [
            ("hexagon:1", "Unknown graph family"),
            ("aztec:x", "Malformed graph coordinates"),
            ("aztec:0", "Expected aztec:K"),
            ("tilted:1,2", "Expected tilted:I,J,K"),
            ("tilted:1,0,0", "not a lattice point"),
        ],
    )
    def test_invalid(self, text, message):
        """Test the error message for each malformed spec."""
        with pytest.raises(ValueError, match=message):
            parse_graph_spec(text)


class TestKasteleyn:
    """Tests for Kasteleyn orientations."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_orientation_condition(self, k):
        """Test the face-product condition on A_k."""
        g = aztec_graph(k)
        assert kasteleyn_orientation(g).is_kasteleyn(g)

    def test_gauge_preserves_condition(self):
        """Test that flipping all signs at a vertex keeps the condition."""
        g = aztec_graph(2)
        orientation = kasteleyn_orientation(g)
        gauged = orientation.gauge(g, g.white[0])
        assert gauged.is_kasteleyn(g)
        assert gauged.signs != orientation.signs


class TestLocalMoves:
    """Tests for spider moves, expansions and contractions."""

    def test_spider_move_updates_weight(self):
        """Test that the new centre weight is the dSKP value above the face."""
        heights = aztec_heights(3)
        func = linear_solution(Fraction(1), 9, 5, 0)
        data = InitialData.from_function(heights, func)
        g = build_cw_graph(heights, aztec_apex(1), data)
        result = spider_move(g, (0, 0))
        assert result.weight == func(0, 0, 2)
        assert result.graph.weights[(0, 0)] == func(0, 0, 2)
        assert result.weight == dskp_step(
            func(1, 0, 1), func(-1, 0, 1), func(0, 1, 1), func(0, -1, 1), func(0, 0, 0)
        )

    def test_spider_move_shape(self):
        """Test vertex and degree changes of a spider move on A_1."""
        g = aztec_graph(1)
        moved = spider_move(g, (0, 0)).graph
        assert moved.vertex_count == 8
        assert moved.degree((0, 0)) == 4
        assert moved.degree((1, 0)) == 3

    def test_spider_move_carries_orientation(self):
        """Test that the carried orientation is again Kasteleyn."""
        g = aztec_graph(2)
        result = spider_move(g, (1, 0), kasteleyn_orientation(g))
        assert result.orientation.is_kasteleyn(result.graph)

    def test_spider_move_rejects_open_face(self):
        """Test that an open face cannot be moved."""
        with pytest.raises(ValueError, match="inner face of degree 4"):
            spider_move(aztec_graph(1), (1, 0))

    def test_expand_then_contract(self):
        """Test that contracting the new middle vertex undoes an expansion."""
        g = aztec_graph(2)
        orientation = kasteleyn_orientation(g)
        expanded = expand_vertex(g, (2, 2), (0, 0), (1, 1), orientation)
        assert expanded.graph.vertex_count == g.vertex_count + 2
        assert expanded.orientation.is_kasteleyn(expanded.graph)
        middle = ("split", (2, 2), 0)
        assert middle in degree_two_vertices(expanded.graph)
        contracted = contract_vertex(expanded.graph, middle, expanded.orientation)
        assert is_isomorphic(contracted.graph, g)
        assert contracted.orientation.is_kasteleyn(contracted.graph)

    def test_expand_needs_incident_faces(self):
        """Test that faces away from the vertex are rejected."""
        g = aztec_graph(2)
        with pytest.raises(ValueError, match="distinct inner faces"):
            expand_vertex(g, (2, 2), (0, 0), (0, 0))

    def test_contract_rejects_regular_vertex(self):
        """Test that a degree-4 vertex cannot be contracted."""
        g = aztec_graph(2)
        with pytest.raises(ValueError, match="not a degree-2 vertex"):
            contract_vertex(g, (2, 2))

    def test_isomorphism_distinguishes_sizes(self):
        """Test is_isomorphic on equal and different graphs."""
        assert is_isomorphic(aztec_graph(2), aztec_graph(2))
        assert not is_isomorphic(aztec_graph(1), aztec_graph(2))

    def test_raise_by_moves_on_a3(self):
        """Test that raising the centre of A_3 matches a spider move."""
        heights, p = parse_graph_spec("aztec:3")
        comparison = raise_by_moves(heights, p, (0, 0))
        assert comparison.contractions == 0
        assert comparison.moved.vertex_count == comparison.target.vertex_count
        assert comparison.isomorphic

    def test_raise_needs_local_minimum(self):
        """Test that a face which is not a local minimum is rejected."""
        heights, p = parse_graph_spec("aztec:3")
        with pytest.raises(ValueError, match="not a local minimum"):
            raise_by_moves(heights, p, (1, 0))
