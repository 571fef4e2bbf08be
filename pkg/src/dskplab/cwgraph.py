"""Crosses-and-wrenches graphs, Kasteleyn orientations and local moves.

A CwGraph is a planar bipartite graph with inner and open faces. The embedding is kept
combinatorially: every edge records the face on the right of white -> black and the face
on the right of black -> white. Faces are labelled by points (i, j) of the initial surface.

Vertices built from a height function are identified by their position at scale 4: the
face (i, j) is centred at (4i, 4j), a cross sits at the centre of its unit square and a
wrench endpoint halfway between the square centre and the corner it is attached to.
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterator, List, Mapping, NamedTuple, Optional, Set, Tuple

import networkx as nx

from dskplab.errors import WindowTooSmallError
from dskplab.lattice import (
    HeightFunction,
    InitialData,
    LatticePoint,
    Point,
    aztec_heights,
    dskp_step,
    pyramid_heights,
    tilted_heights,
)
from dskplab.projective import format_value

logger = logging.getLogger(__name__)

Face = Hashable
Vertex = Hashable

# Dual-tree node standing for the union of all open faces
OUTER = ("outer",)

# Corner offsets of the unit square with lower-left corner (i, j), counterclockwise
SQUARE_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))


class CwEdge(NamedTuple):
    """Edge between a white and a black vertex with its two faces."""

    white: Vertex
    black: Vertex
    right: Face  # face on the right of white -> black
    left: Face  # face on the right of black -> white


@dataclass
class CwGraph:
    """Finite planar bipartite graph with inner/open faces and face weights."""

    white: List[Vertex]
    black: List[Vertex]
    edges: List[CwEdge]
    inner: Set[Face]
    open: Set[Face]
    weights: Dict[Face, Any] = field(default_factory=dict)
    positions: Dict[Vertex, Tuple[Any, Any]] = field(default_factory=dict)

    def __post_init__(self):
        self._colour: Dict[Vertex, str] = {}
        for v in self.white:
            self._colour[v] = "white"
        for v in self.black:
            if v in self._colour:
                raise ValueError(f"Vertex {v!r} is both white and black")
            self._colour[v] = "black"
        self._face_edges: Dict[Face, List[int]] = {}
        self._vertex_edges: Dict[Vertex, List[int]] = {v: [] for v in self._colour}
        for idx, e in enumerate(self.edges):
            if self._colour.get(e.white) != "white" or self._colour.get(e.black) != "black":
                raise ValueError(f"Edge {idx} must join a white and a black vertex")
            if e.right == e.left:
                raise ValueError(f"Edge {idx} has the same face {e.right!r} on both sides")
            self._face_edges.setdefault(e.right, []).append(idx)
            self._face_edges.setdefault(e.left, []).append(idx)
            self._vertex_edges[e.white].append(idx)
            self._vertex_edges[e.black].append(idx)
        unknown = set(self._face_edges) - self.inner - self.open
        if unknown:
            raise ValueError(f"Edges border faces that are neither inner nor open: {unknown}")

    @property
    def vertex_count(self) -> int:
        return len(self.white) + len(self.black)

    def faces(self) -> List[Face]:
        return sorted(self.inner | self.open)

    def colour(self, v: Vertex) -> str:
        return self._colour[v]

    def degree(self, f: Face) -> int:
        """Number of edges adjacent to face f."""
        return len(self._face_edges.get(f, []))

    def face_edges(self, f: Face) -> List[int]:
        return list(self._face_edges.get(f, []))

    def vertex_edges(self, v: Vertex) -> List[int]:
        return list(self._vertex_edges[v])

    def vertex_degree(self, v: Vertex) -> int:
        return len(self._vertex_edges[v])

    def other_end(self, idx: int, v: Vertex) -> Vertex:
        e = self.edges[idx]
        return e.black if e.white == v else e.white

    def outward_faces(self, idx: int, v: Vertex) -> Tuple[Face, Face]:
        """(right, left) faces of edge idx directed away from v."""
        e = self.edges[idx]
        if e.white == v:
            return e.right, e.left
        return e.left, e.right

    def rotation(self, v: Vertex) -> List[int]:
        """Edges at v in counterclockwise order; starts after the outer gap if v has one."""
        edges = self._vertex_edges[v]
        by_right = {}
        for idx in edges:
            by_right[self.outward_faces(idx, v)[0]] = idx
        lefts = {self.outward_faces(idx, v)[1] for idx in edges}
        starts = [idx for idx in edges if self.outward_faces(idx, v)[0] not in lefts]
        current = starts[0] if starts else edges[0]
        order = [current]
        while len(order) < len(edges):
            nxt = by_right.get(self.outward_faces(current, v)[1])
            if nxt is None or nxt in order:
                break
            order.append(nxt)
            current = nxt
        return order

    def boundary_vertices(self) -> List[Vertex]:
        """Vertices where two open faces meet without an edge between them."""
        result = []
        for v in self.white + self.black:
            rights = {self.outward_faces(idx, v)[0] for idx in self._vertex_edges[v]}
            lefts = {self.outward_faces(idx, v)[1] for idx in self._vertex_edges[v]}
            if rights != lefts:
                result.append(v)
        return result

    def with_weights(self, weights: Mapping[Face, Any]) -> "CwGraph":
        return replace(self, weights=dict(weights))

    def validate(self) -> None:
        """Check the invariants of graphs built from height functions.

        Raises:
            ValueError: If |W| != |B| or an inner face has odd degree
        """
        if len(self.white) != len(self.black):
            raise ValueError(f"|W| = {len(self.white)} differs from |B| = {len(self.black)}")
        for f in self.inner:
            if self.degree(f) % 2:
                raise ValueError(f"Inner face {f!r} has odd degree {self.degree(f)}")

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for v in self.white:
            graph.add_node(v, colour="white")
        for v in self.black:
            graph.add_node(v, colour="black")
        for idx, e in enumerate(self.edges):
            graph.add_edge(e.white, e.black, index=idx, faces=(e.right, e.left))
        return graph

    def to_dict(self, orientation: Optional["KasteleynOrientation"] = None) -> Dict[str, Any]:
        """JSON-ready dump: coloured vertices, edges with faces, labelled faces."""
        names = {v: n for n, v in enumerate(self.white + self.black)}
        return {
            "vertices": [
                {
                    "id": names[v],
                    "colour": self._colour[v],
                    "position": _jsonable(self.positions.get(v)),
                }
                for v in self.white + self.black
            ],
            "edges": [
                {
                    "white": names[e.white],
                    "black": names[e.black],
                    "right": list(e.right),
                    "left": list(e.left),
                    **({"phi": orientation.signs[idx]} if orientation is not None else {}),
                }
                for idx, e in enumerate(self.edges)
            ],
            "faces": [
                {
                    "label": list(f),
                    "kind": "inner" if f in self.inner else "open",
                    "degree": self.degree(f),
                    **({"weight": format_value(self.weights[f])} if f in self.weights else {}),
                }
                for f in self.faces()
            ],
        }


def _jsonable(position):
    if position is None:
        return None
    return [str(c) for c in position]


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _right_face(u_pos, v_pos, face_a: Face, face_b: Face) -> Tuple[Face, Face]:
    """(right, left) of the directed segment u -> v among two faces on opposite sides."""
    side = _cross(u_pos[0], u_pos[1], v_pos[0], v_pos[1], 4 * face_a[0], 4 * face_a[1])
    return (face_a, face_b) if side < 0 else (face_b, face_a)


def _square_pieces(heights: HeightFunction, i: int, j: int):
    """Vertices of the unit square (i, j): its cross or its two wrench endpoints.

    Returns:
        (vertex_for_corner, handle) where vertex_for_corner maps each corner offset to the
        vertex attached to the sides incident to it, and handle is (v1, v2, g1, g2) with
        the separated height-h0 corners, or None for a cross.
    """
    corners = [(i + di, j + dj) for di, dj in SQUARE_CORNERS]
    h = [heights(*c) for c in corners]
    centre = (4 * i + 2, 4 * j + 2)
    if h[0] == h[2] and h[1] == h[3]:
        return {c: centre for c in corners}, None
    if h[0] == h[2]:
        flat, extreme = (corners[0], corners[2]), (corners[1], corners[3])
    else:
        flat, extreme = (corners[1], corners[3]), (corners[0], corners[2])
    attach = {}
    wrench = []
    for c in extreme:
        v = (2 * i + 1 + 2 * c[0], 2 * j + 1 + 2 * c[1])
        wrench.append(v)
        attach[c] = v
    # each flat corner side is attached through the extreme corner at its other end
    return attach, (wrench[0], wrench[1], flat[0], flat[1])


def build_cw_graph(
    heights: HeightFunction, p: Point, data: Optional[InitialData] = None
) -> CwGraph:
    """Crosses-and-wrenches graph G_p of a height function.

    Args:
        heights: Height function on a finite window
        p: Target lattice point strictly above the initial surface
        data: Optional initial data providing the face weights

    Returns:
        CwGraph whose inner faces are the initial points inside the open cone of p

    Raises:
        ValueError: If p is off the lattice or not above the surface
        WindowTooSmallError: If the cone of p reaches the window boundary
    """
    pi, pj, pk = LatticePoint.of(*p)
    if not heights.contains(pi, pj):
        raise WindowTooSmallError(f"({pi}, {pj}) lies outside the window")
    if pk <= heights(pi, pj):
        raise ValueError(f"{tuple(p)} does not lie above the initial surface")
    if not heights.cone_fits((pi, pj, pk)):
        raise WindowTooSmallError(f"The square cone of {tuple(p)} reaches the window boundary")

    inner = {
        (i, j)
        for i, j in heights.points()
        if heights(i, j) < pk - abs(i - pi) - abs(j - pj)
    }
    squares = sorted({(i - di, j - dj) for i, j in inner for di in (0, 1) for dj in (0, 1)})
    pieces = {s: _square_pieces(heights, *s) for s in squares}

    found: Dict[frozenset, Tuple[Vertex, Vertex, Face, Face]] = {}
    for (si, sj), (attach, handle) in pieces.items():
        corners = [(si + di, sj + dj) for di, dj in SQUARE_CORNERS]
        for n in range(4):
            ca, cb = corners[n], corners[(n + 1) % 4]
            if ca not in inner and cb not in inner:
                continue
            # neighbour square across the side ca-cb
            if ca[1] == cb[1]:
                other = (si, sj - 1) if ca[1] == sj else (si, sj + 1)
            else:
                other = (si - 1, sj) if ca[0] == si else (si + 1, sj)
            u = attach.get(ca, attach.get(cb))
            o_attach = pieces[other][0]
            w = o_attach.get(ca, o_attach.get(cb))
            found.setdefault(frozenset((u, w)), (u, w, ca, cb))
        if handle is not None:
            v1, v2, g1, g2 = handle
            if g1 in inner or g2 in inner:
                found.setdefault(frozenset((v1, v2)), (v1, v2, g1, g2))

    graph = nx.Graph()
    for u, w, _, _ in found.values():
        graph.add_edge(u, w)
    start = min(graph.nodes)
    colouring = nx.bipartite.color(graph)
    white_colour = colouring[start]
    white = sorted(v for v in graph.nodes if colouring[v] == white_colour)
    black = sorted(v for v in graph.nodes if colouring[v] != white_colour)
    white_set = set(white)

    edges = []
    for key in sorted(found, key=lambda k: sorted(k)):
        u, w, fa, fb = found[key]
        wv, bv = (u, w) if u in white_set else (w, u)
        right, left = _right_face(wv, bv, fa, fb)
        edges.append(CwEdge(wv, bv, right, left))

    faces = {e.right for e in edges} | {e.left for e in edges}
    weights = {f: data.weight(*f) for f in faces} if data is not None else {}
    result = CwGraph(
        white=white,
        black=black,
        edges=edges,
        inner=set(inner),
        open=faces - inner,
        weights=weights,
        positions={v: v for v in white + black},
    )
    logger.debug(
        f"Built G_p at {tuple(p)}: |V|={result.vertex_count}, |E|={len(edges)}, "
        f"{len(inner)} inner and {len(result.open)} open faces"
    )
    return result


@dataclass
class KasteleynOrientation:
    """Signs phi_(w,b) indexed by edge position."""

    signs: Dict[int, int]

    def sign(self, idx: int) -> int:
        return self.signs[idx]

    def face_product(self, g: CwGraph, f: Face) -> int:
        product = 1
        for idx in g.face_edges(f):
            product *= self.signs[idx]
        return product

    def is_kasteleyn(self, g: CwGraph) -> bool:
        """Check prod phi = (-1)^(d/2 + 1) around every inner face."""
        return all(
            self.face_product(g, f) == (-1) ** (g.degree(f) // 2 + 1) for f in g.inner
        )

    def gauge(self, g: CwGraph, v: Vertex) -> "KasteleynOrientation":
        """Flip every sign at v; the result is again a Kasteleyn orientation."""
        signs = dict(self.signs)
        for idx in g.vertex_edges(v):
            signs[idx] = -signs[idx]
        return KasteleynOrientation(signs)


def kasteleyn_orientation(g: CwGraph, root: Optional[Vertex] = None) -> KasteleynOrientation:
    """Kasteleyn orientation by fixing the edges of a spanning tree to +1.

    Non-tree edges form a spanning tree of the dual (open faces merged into one outer
    node); they are fixed leaf first so each inner face gets the required product.

    Raises:
        ValueError: If the non-tree edges do not form a dual spanning tree
    """
    primal = g.to_networkx()
    if root is None:
        root = g.white[0]
    tree_edges = {frozenset(e) for e in nx.bfs_edges(primal, root)}
    signs: Dict[int, int] = {}
    dual = nx.MultiGraph()
    dual.add_node(OUTER)
    dual.add_nodes_from(g.inner)
    for idx, e in enumerate(g.edges):
        if frozenset((e.white, e.black)) in tree_edges:
            signs[idx] = 1
        else:
            fa = e.right if e.right in g.inner else OUTER
            fb = e.left if e.left in g.inner else OUTER
            dual.add_edge(fa, fb, key=idx)

    if dual.number_of_edges() != len(g.inner) or not nx.is_connected(dual):
        raise ValueError("Non-tree edges do not form a spanning tree of the dual graph")

    dual_tree = nx.dfs_tree(dual, OUTER)
    for f in nx.dfs_postorder_nodes(dual_tree, OUTER):
        if f == OUTER:
            continue
        (parent,) = dual_tree.predecessors(f)
        (idx,) = dual[f][parent].keys()
        product = 1
        for other in g.face_edges(f):
            if other != idx:
                product *= signs[other]
        signs[idx] = (-1) ** (g.degree(f) // 2 + 1) * product

    orientation = KasteleynOrientation(signs)
    if not orientation.is_kasteleyn(g):
        raise ValueError("Constructed orientation violates the Kasteleyn condition")
    return orientation


def ccw_boundary(g: CwGraph, f: Face) -> Tuple[List[Vertex], List[Face], List[int]]:
    """Vertices of face f in counterclockwise order with the face across each edge.

    Returns:
        (vertices v_0..v_{d-1}, neighbours s_0..s_{d-1}, edge indices) where the edge
        v_n -> v_{n+1} has f on its left and s_n on its right
    """
    step: Dict[Vertex, Tuple[Vertex, Face, int]] = {}
    for idx in g.face_edges(f):
        e = g.edges[idx]
        if e.left == f:
            step[e.white] = (e.black, e.right, idx)
        else:
            step[e.black] = (e.white, e.left, idx)
    start = min(step, key=repr)
    vertices, neighbours, indices = [], [], []
    v = start
    while True:
        nxt, across, idx = step[v]
        vertices.append(v)
        neighbours.append(across)
        indices.append(idx)
        v = nxt
        if v == start:
            break
    if len(vertices) != len(step):
        raise ValueError(f"Face {f!r} is not bounded by a single cycle")
    return vertices, neighbours, indices


@dataclass
class MoveResult:
    """Graph produced by a local move and the carried Kasteleyn orientation."""

    graph: CwGraph
    orientation: Optional[KasteleynOrientation]
    weight: Any = None


def spider_weight(centre, east, north, west, south):
    """New centre weight satisfying the dSKP relation with the four surrounding faces.

    Raises:
        SingularError: If the relation cannot be solved
    """
    return dskp_step(east, west, north, south, centre)


def spider_move(
    g: CwGraph, f: Face, orientation: Optional[KasteleynOrientation] = None
) -> MoveResult:
    """Replace the degree-4 face f by a smaller square joined by four new edges.

    The centre weight is updated by the dSKP relation; the orientation, when given, is
    negated on the square and set to +1 on the four new edges.

    Raises:
        ValueError: If f is not an inner face of degree 4 with four distinct neighbours
        SingularError: If the new weight is undefined
    """
    if f not in g.inner or g.degree(f) != 4:
        raise ValueError(f"Spider move needs an inner face of degree 4, got {f!r}")
    vertices, around, square = ccw_boundary(g, f)
    if len(set(around)) != 4:
        raise ValueError(f"Face {f!r} is not surrounded by four distinct faces")

    new_weight = None
    if g.weights:
        offsets = {(s[0] - f[0], s[1] - f[1]): s for s in around}
        if set(offsets) == {(1, 0), (0, 1), (-1, 0), (0, -1)}:
            east, north, west, south = (offsets[o] for o in ((1, 0), (0, 1), (-1, 0), (0, -1)))
        else:
            east, north, west, south = around
        w = g.weights
        new_weight = spider_weight(w[f], w[east], w[north], w[west], w[south])

    centroid = None
    if all(v in g.positions for v in vertices):
        centroid = tuple(
            sum(Fraction(g.positions[v][c]) for v in vertices) / 4 for c in (0, 1)
        )
    tag = 0
    while any(("spider", f, tag, n) in g._colour for n in range(4)):
        tag += 1
    new_vertices = [("spider", f, tag, n) for n in range(4)]
    positions = dict(g.positions)
    colour = dict(g._colour)
    white, black = list(g.white), list(g.black)
    for v, u in zip(vertices, new_vertices):
        if centroid is not None:
            positions[u] = tuple((Fraction(g.positions[v][c]) + centroid[c]) / 2 for c in (0, 1))
        if colour[v] == "white":
            colour[u] = "black"
            black.append(u)
        else:
            colour[u] = "white"
            white.append(u)

    square_set = set(square)
    kept = [idx for idx in range(len(g.edges)) if idx not in square_set]
    edges = [g.edges[idx] for idx in kept]
    signs = [orientation.signs[idx] for idx in kept] if orientation is not None else []

    def add(a, b, right, left, sign):
        # right/left of the direction a -> b
        if colour[a] == "white":
            edges.append(CwEdge(a, b, right, left))
        else:
            edges.append(CwEdge(b, a, left, right))
        signs.append(sign)

    for n, v in enumerate(vertices):
        u, u_next = new_vertices[n], new_vertices[(n + 1) % 4]
        add(v, u, around[n], around[n - 1], 1)
        flipped = -orientation.signs[square[n]] if orientation is not None else 0
        add(u, u_next, around[n], f, flipped)

    weights = dict(g.weights)
    if new_weight is not None:
        weights[f] = new_weight
    result = CwGraph(white, black, edges, set(g.inner), set(g.open), weights, positions)
    carried = KasteleynOrientation(dict(enumerate(signs))) if orientation is not None else None
    return MoveResult(result, carried, new_weight)


def expand_vertex(
    g: CwGraph,
    v: Vertex,
    face_a: Face,
    face_b: Face,
    orientation: Optional[KasteleynOrientation] = None,
) -> MoveResult:
    """Split v into v1 - u - v2 so that the two new edges separate face_a from face_b.

    Raises:
        ValueError: If face_a, face_b are not distinct inner faces around v
    """
    if face_a == face_b or face_a not in g.inner or face_b not in g.inner:
        raise ValueError("Expansion needs two distinct inner faces")
    order = g.rotation(v)
    sectors = [g.outward_faces(idx, v)[1] for idx in order]  # sector after each edge
    if face_a not in sectors or face_b not in sectors:
        raise ValueError(f"Faces {face_a!r} and {face_b!r} must both be incident to {v!r}")
    start = sectors.index(face_a)
    rotated = order[start + 1:] + order[: start + 1]
    rotated_sectors = sectors[start + 1:] + sectors[: start + 1]
    cut = rotated_sectors.index(face_b) + 1
    arc_a, arc_b = rotated[:cut], rotated[cut:]

    v1, v2, u = ("split", v, 1), ("split", v, 2), ("split", v, 0)
    reattach = {idx: v1 for idx in arc_a}
    reattach.update({idx: v2 for idx in arc_b})
    edges = []
    for idx, e in enumerate(g.edges):
        if idx in reattach:
            target = reattach[idx]
            e = e._replace(white=target) if e.white == v else e._replace(black=target)
        edges.append(e)

    white, black = list(g.white), list(g.black)
    if g.colour(v) == "white":
        white.remove(v)
        white += [v1, v2]
        black.append(u)
        # u -> v1 has face_a on its right, u -> v2 has face_b on its right
        edges.append(CwEdge(v1, u, face_b, face_a))
        edges.append(CwEdge(v2, u, face_a, face_b))
    else:
        black.remove(v)
        black += [v1, v2]
        white.append(u)
        edges.append(CwEdge(u, v1, face_a, face_b))
        edges.append(CwEdge(u, v2, face_b, face_a))

    positions = {k: p for k, p in g.positions.items() if k != v}
    carried = None
    if orientation is not None:
        signs = dict(orientation.signs)
        signs[len(g.edges)] = 1
        signs[len(g.edges) + 1] = -1
        carried = KasteleynOrientation(signs)
    result = CwGraph(white, black, edges, set(g.inner), set(g.open), dict(g.weights), positions)
    return MoveResult(result, carried)


def degree_two_vertices(g: CwGraph) -> List[Vertex]:
    """Degree-2 vertices whose two edges separate the same two distinct inner faces."""
    result = []
    for v in g.white + g.black:
        if g.vertex_degree(v) != 2:
            continue
        e1, e2 = (g.edges[idx] for idx in g.vertex_edges(v))
        pair = {e1.right, e1.left}
        if pair == {e2.right, e2.left} and pair <= g.inner:
            result.append(v)
    return result


def contract_vertex(
    g: CwGraph, u: Vertex, orientation: Optional[KasteleynOrientation] = None
) -> MoveResult:
    """Remove a degree-2 vertex u and merge its two neighbours.

    Raises:
        ValueError: If u is not contractible
    """
    if u not in degree_two_vertices(g):
        raise ValueError(f"{u!r} is not a degree-2 vertex between two distinct inner faces")
    i1, i2 = g.vertex_edges(u)
    v1, v2 = g.other_end(i1, u), g.other_end(i2, u)

    signs = dict(orientation.signs) if orientation is not None else None
    if signs is not None and signs[i1] * signs[i2] != -1:
        for idx in g.vertex_edges(v2):
            signs[idx] = -signs[idx]

    edges, kept_signs = [], {}
    for idx, e in enumerate(g.edges):
        if idx in (i1, i2):
            continue
        if e.white == v2:
            e = e._replace(white=v1)
        elif e.black == v2:
            e = e._replace(black=v1)
        if signs is not None:
            kept_signs[len(edges)] = signs[idx]
        edges.append(e)

    white = [v for v in g.white if v not in (u, v2)]
    black = [v for v in g.black if v not in (u, v2)]
    positions = {k: p for k, p in g.positions.items() if k not in (u, v2)}
    result = CwGraph(white, black, edges, set(g.inner), set(g.open), dict(g.weights), positions)
    carried = KasteleynOrientation(kept_signs) if signs is not None else None
    return MoveResult(result, carried)


def is_isomorphic(g1: CwGraph, g2: CwGraph) -> bool:
    """Graph isomorphism preserving vertex colours and the multiset of face degrees."""
    degrees1 = sorted(g1.degree(f) for f in g1.faces())
    same_faces = degrees1 == sorted(g2.degree(f) for f in g2.faces())
    return same_faces and nx.is_isomorphic(
        g1.to_networkx(),
        g2.to_networkx(),
        node_match=lambda a, b: a["colour"] == b["colour"],
    )


def iter_lattice_targets(heights: HeightFunction, max_level: int) -> Iterator[Point]:
    """Points above the surface up to max_level whose cone fits in the window."""
    for k in range(min(heights.values.values()) + 1, max_level + 1):
        for i, j in heights.points():
            if (i + j + k) % 2 == 0 and k > heights(i, j) and heights.cone_fits((i, j, k)):
                yield i, j, k


GRAPH_FAMILIES = {
    "aztec": aztec_heights,
    "pyramid": pyramid_heights,
    "tilted": tilted_heights,
}


def aztec_apex(k: int) -> Point:
    """Target point whose crosses-and-wrenches graph for h = [i + j]_2 is A_k."""
    return (0 if k % 2 else 1, 0, k + 1)


def parse_graph_spec(text: str) -> Tuple[HeightFunction, Point]:
    """Parse "aztec:K", "pyramid:I,J,K" or "tilted:I,J,K" into a window and a target.

    The window is chosen just large enough for the cone of the target to fit.

    Raises:
        ValueError: If the family is unknown or the coordinates are malformed
    """
    family, _, rest = text.partition(":")
    family = family.strip().lower()
    if family not in GRAPH_FAMILIES:
        raise ValueError(f"Unknown graph family {family!r}, use one of {sorted(GRAPH_FAMILIES)}")
    try:
        coords = [int(part) for part in rest.split(",")] if rest else []
    except ValueError:
        raise ValueError(f"Malformed graph coordinates in {text!r}")
    if family == "aztec":
        if len(coords) != 1 or coords[0] < 1:
            raise ValueError(f"Expected aztec:K with K >= 1, got {text!r}")
        k = coords[0]
        return aztec_heights(k + 2), aztec_apex(k)
    if len(coords) != 3:
        raise ValueError(f"Expected {family}:I,J,K, got {text!r}")
    i, j, k = LatticePoint.of(*coords)
    return GRAPH_FAMILIES[family](abs(i) + abs(j) + abs(k) + 1), (i, j, k)


@dataclass
class RaiseComparison:
    """G_p after a spider move and contractions, next to G_p of the raised surface."""

    moved: CwGraph
    target: CwGraph
    contractions: int

    @property
    def isomorphic(self) -> bool:
        return is_isomorphic(self.moved, self.target)


def raise_by_moves(heights: HeightFunction, p: Point, face: Face) -> RaiseComparison:
    """Raise h by 2 at a local minimum and replay it on G_p as a spider move.

    Raises:
        ValueError: If face is not a local minimum or not a degree-4 inner face of G_p
    """
    target = build_cw_graph(heights.raised(*face), p)
    moved = spider_move(build_cw_graph(heights, p), face).graph
    contractions = 0
    while True:
        candidates = degree_two_vertices(moved)
        if not candidates:
            break
        moved = contract_vertex(moved, candidates[0]).graph
        contractions += 1
    logger.debug(f"Raised {face}: {contractions} contractions after the spider move")
    return RaiseComparison(moved, target, contractions)
