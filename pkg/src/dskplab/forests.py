"""Sphere quadrangulations, Temperley's bijection and complementary trees and forests.

A Quadrangulation stores, for every face-vertex f, its four corners in counterclockwise
order starting from a black corner. The two black corners of f span the edge of G•
carried by f, the two white corners the edge of G° carried by f.

C(a) is the face-by-vertex matrix with entries +a_f, +a_f, -a_f, -a_f along each corner
list, so consecutive (black, white) corners share a sign and consecutive (white, black)
corners have opposite signs.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterator, List, Mapping, Optional, Tuple

import networkx as nx
from sympy.combinatorics import Permutation

from dskplab.config import config
from dskplab.cwgraph import CwEdge, CwGraph
from dskplab.dimer import kasteleyn_matrix, z_det
from dskplab.errors import SizeGuardError
from dskplab.poly import Monomial, MultiPoly
from dskplab.projective import format_value
from dskplab.utils.linalg import as_matrix, bareiss_determinant, determinant, matrix_product

logger = logging.getLogger(__name__)

Face = Hashable
Vertex = Hashable

W_ROOT = "w_r"
B_ROOT = "b_r"
B_EXTRA = "b_extra"

# C(1) signs along a corner list (black, white, black, white)
CORNER_SIGNS = (1, 1, -1, -1)


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


@dataclass
class Quadrangulation:
    """Quadrangulation of the sphere with marked adjacent roots w_r, b_r.

    Attributes:
        faces: Corner lists (black, white, black, white), counterclockwise
        white: W, the white vertices other than w_r
        black_tilde: B̃, the black vertices other than b_r
        black: B ⊆ B̃, the black vertices kept in the dimer graph
    """

    faces: Dict[Face, Tuple[Vertex, Vertex, Vertex, Vertex]]
    white: List[Vertex]
    black_tilde: List[Vertex]
    black: List[Vertex]
    w_root: Vertex = W_ROOT
    b_root: Vertex = B_ROOT
    weights: Dict[Face, Any] = field(default_factory=dict)

    def __post_init__(self):
        whites = set(self.white) | {self.w_root}
        blacks = set(self.black_tilde) | {self.b_root}
        for f, corners in self.faces.items():
            if len(corners) != 4:
                raise ValueError(f"Face {f!r} has {len(corners)} corners, expected 4")
            if not (corners[0] in blacks and corners[2] in blacks):
                raise ValueError(f"Face {f!r} must list black corners at positions 0 and 2")
            if not (corners[1] in whites and corners[3] in whites):
                raise ValueError(f"Face {f!r} must list white corners at positions 1 and 3")
        if not set(self.black) <= set(self.black_tilde):
            raise ValueError("B must be a subset of B̃")
        if len(self.black) != len(self.white):
            raise ValueError(f"|B| = {len(self.black)} differs from |W| = {len(self.white)}")
        if len(self.white) + len(self.black_tilde) != len(self.faces):
            raise ValueError(
                f"|W| + |B̃| = {len(self.white) + len(self.black_tilde)} differs from "
                f"|F| = {len(self.faces)}; not a quadrangulation of the sphere"
            )
        if not any(self._roots_adjacent(c) for c in self.faces.values()):
            raise ValueError("w_r and b_r must be adjacent")
        self._incidence: Dict[Vertex, List[Face]] = {}
        for f in self.face_list():
            for v in self.faces[f]:
                self._incidence.setdefault(v, []).append(f)

    def _roots_adjacent(self, corners) -> bool:
        return any(
            {corners[n], corners[(n + 1) % 4]} == {self.w_root, self.b_root} for n in range(4)
        )

    def face_list(self) -> List[Face]:
        """Faces in canonical (sorted) order; rows of every C matrix."""
        return sorted(self.faces)

    @property
    def forest_roots(self) -> List[Vertex]:
        """(B̃ ∪ {b_r}) minus B."""
        kept = set(self.black)
        return [self.b_root] + [b for b in self.black_tilde if b not in kept]

    def incident_faces(self, v: Vertex) -> List[Face]:
        return list(self._incidence.get(v, []))

    def black_diagonal(self, f: Face) -> Tuple[Vertex, Vertex]:
        corners = self.faces[f]
        return corners[0], corners[2]

    def white_diagonal(self, f: Face) -> Tuple[Vertex, Vertex]:
        corners = self.faces[f]
        return corners[1], corners[3]

    def across(self, f: Face, v: Vertex) -> Vertex:
        """The corner of f opposite to v."""
        corners = self.faces[f]
        return corners[(corners.index(v) + 2) % 4]

    def c_sign(self, f: Face, v: Vertex) -> int:
        """C(1)_{f,v}; 0 when v is not a corner of f."""
        corners = self.faces[f]
        if v not in corners:
            return 0
        return CORNER_SIGNS[corners.index(v)]

    def black_graph(self) -> nx.MultiGraph:
        """G•: one edge per face, keyed by the face."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.black_tilde + [self.b_root])
        for f in self.face_list():
            b0, b1 = self.black_diagonal(f)
            graph.add_edge(b0, b1, key=f)
        return graph

    def white_graph(self) -> nx.MultiGraph:
        """G°: one edge per face, keyed by the face."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.white + [self.w_root])
        for f in self.face_list():
            w0, w1 = self.white_diagonal(f)
            graph.add_edge(w0, w1, key=f)
        return graph

    def c_matrix(self, columns: List[Vertex], weights: Optional[Mapping[Face, Any]] = None):
        """Rows of C(a) restricted to the given columns; C(1) when weights is None."""
        rows = []
        for f in self.face_list():
            scale = 1 if weights is None else weights[f]
            rows.append([self.c_sign(f, v) * scale for v in columns])
        return rows

    def block_matrix(self, weights: Optional[Mapping[Face, Any]] = None, symbolic: bool = False):
        """(C(1)^B̃ | C(a)^B) as nested rows.

        Args:
            weights: Face weights, self.weights when omitted
            symbolic: Use the face variables; every entry is then a MultiPoly
        """
        if symbolic:
            weights = {f: MultiPoly.variable(f) for f in self.faces}
        elif weights is None:
            weights = self.weights
        left = self.c_matrix(self.black_tilde)
        right = self.c_matrix(self.black, weights)
        rows = [lrow + rrow for lrow, rrow in zip(left, right)]
        if symbolic:
            rows = [[MultiPoly._lift(x) for x in row] for row in rows]
        return rows

    def c_determinant(self, weights: Optional[Mapping[Face, Any]] = None, symbolic: bool = False):
        """det(C(1)^B̃ | C(a)^B)."""
        rows = self.block_matrix(weights, symbolic)
        if symbolic:
            return bareiss_determinant(rows)
        return determinant(rows)

    def dimer_graph(self) -> CwGraph:
        """The bipartite graph G on W ∪ B, faces labelled as in the quadrangulation.

        Faces whose four corners all survive are inner; the others are open.
        """
        kept = set(self.white) | set(self.black)
        sides: Dict[Tuple[Vertex, Vertex], Dict[str, Face]] = {}
        inner, open_faces = set(), set()
        for f in self.face_list():
            corners = self.faces[f]
            touched = False
            for n in range(4):
                u, v = corners[n], corners[(n + 1) % 4]
                if u not in kept or v not in kept:
                    continue
                touched = True
                # f lies on the left of u -> v
                if n % 2 == 0:
                    sides.setdefault((v, u), {})["right"] = f
                else:
                    sides.setdefault((u, v), {})["left"] = f
            if all(c in kept for c in corners):
                inner.add(f)
            elif touched:
                open_faces.add(f)
        edges = [
            CwEdge(w, b, faces["right"], faces["left"]) for (w, b), faces in sorted(sides.items())
        ]
        weights = {f: self.weights[f] for f in inner | open_faces if f in self.weights}
        return CwGraph(list(self.white), list(self.black), edges, inner, open_faces, weights)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w_root": _jsonable(self.w_root),
            "b_root": _jsonable(self.b_root),
            "white": [_jsonable(w) for w in self.white],
            "black_tilde": [_jsonable(b) for b in self.black_tilde],
            "black": [_jsonable(b) for b in self.black],
            "faces": [
                {
                    "label": _jsonable(f),
                    "corners": [_jsonable(v) for v in self.faces[f]],
                    **({"weight": format_value(self.weights[f])} if f in self.weights else {}),
                }
                for f in self.face_list()
            ],
        }


def quadrangulate_aztec(k: int, weights: Optional[Mapping[Face, Any]] = None) -> Quadrangulation:
    """Quadrangulation whose dimer graph is the Aztec diamond A_k.

    Coordinates (U, V) run over [0, 2k]². Faces sit at even U + V, white vertices at
    (even, odd) and black vertices at (odd, even). Black corners left of the diamond merge
    into b_r, those right of it into the extra black vertex, and white corners above or
    below it into w_r.

    Raises:
        ValueError: If k < 1
    """
    if k < 1:
        raise ValueError(f"Aztec diamond size must be >= 1, got {k}")
    top = 2 * k

    def corner(u: int, v: int) -> Vertex:
        if u % 2:
            if u < 0:
                return B_ROOT
            if u > top:
                return B_EXTRA
            return (u, v)
        if v < 0 or v > top:
            return W_ROOT
        return (u, v)

    faces = {}
    for u in range(top + 1):
        for v in range(top + 1):
            if (u + v) % 2:
                continue
            east, north, west, south = (u + 1, v), (u, v + 1), (u - 1, v), (u, v - 1)
            order = (east, north, west, south) if u % 2 == 0 else (north, west, south, east)
            faces[(u, v)] = tuple(corner(*p) for p in order)

    white = [(u, v) for u in range(0, top + 1, 2) for v in range(1, top, 2)]
    black = [(u, v) for u in range(1, top, 2) for v in range(0, top + 1, 2)]
    q = Quadrangulation(faces, white, black + [B_EXTRA], black, weights=dict(weights or {}))
    logger.debug(f"Aztec quadrangulation k={k}: |F|={len(faces)} |W|={len(white)}")
    return q


# Temperley's bijection


@dataclass
class TreePair:
    """Dual spanning trees of G• and G°, each vertex mapped to the face of its outgoing edge."""

    black_tree: Dict[Vertex, Face]
    white_tree: Dict[Vertex, Face]

    def black_edges(self, q: Quadrangulation) -> List[Tuple[Vertex, Vertex, Face]]:
        return [(b, q.across(f, b), f) for b, f in self.black_tree.items()]

    def white_edges(self, q: Quadrangulation) -> List[Tuple[Vertex, Vertex, Face]]:
        return [(w, q.across(f, w), f) for w, f in self.white_tree.items()]


def _is_rooted_tree(q: Quadrangulation, out_faces: Mapping[Vertex, Face], roots) -> bool:
    """Every non-root vertex has one outgoing edge and following them reaches a root."""
    graph = nx.DiGraph()
    graph.add_nodes_from(out_faces)
    graph.add_nodes_from(roots)
    for v, f in out_faces.items():
        graph.add_edge(v, q.across(f, v))
    return nx.is_directed_acyclic_graph(graph) and all(
        graph.out_degree(r) == 0 for r in roots
    )


def temperley(q: Quadrangulation, matching: Mapping[Vertex, Face]) -> TreePair:
    """Pair of dual spanning trees from a perfect matching of G^D_r.

    Each vertex matched to the face f is prolonged through f to the opposite corner.

    Args:
        q: Quadrangulation
        matching: Face matched to every vertex of W ∪ B̃

    Raises:
        ValueError: If matching is not a perfect matching of G^D_r
    """
    vertices = set(q.white) | set(q.black_tilde)
    if set(matching) != vertices:
        raise ValueError("Invalid matching: every vertex of W and B̃ must be matched")
    if len(set(matching.values())) != len(matching):
        raise ValueError("Invalid matching: a face is matched twice")
    for v, f in matching.items():
        if v not in q.faces[f]:
            raise ValueError(f"Invalid matching: {v!r} is not a corner of face {f!r}")

    pair = TreePair(
        {b: matching[b] for b in q.black_tilde}, {w: matching[w] for w in q.white}
    )
    if not _is_rooted_tree(q, pair.black_tree, [q.b_root]):
        raise ValueError("Invalid matching: black half-edges do not form a tree")
    if not _is_rooted_tree(q, pair.white_tree, [q.w_root]):
        raise ValueError("Invalid matching: white half-edges do not form a tree")
    return pair


def reverse_temperley(q: Quadrangulation, black_tree: Mapping[Vertex, Face]) -> Dict[Vertex, Face]:
    """Perfect matching of G^D_r from a spanning tree of G• rooted at b_r.

    The dual tree of G° uses the remaining faces and is oriented towards w_r.

    Raises:
        ValueError: If black_tree is not a spanning tree rooted at b_r
    """
    if set(black_tree) != set(q.black_tilde) or not _is_rooted_tree(q, black_tree, [q.b_root]):
        raise ValueError("Not a spanning tree of G• rooted at b_r")
    used = set(black_tree.values())
    dual = nx.MultiGraph()
    dual.add_nodes_from(q.white + [q.w_root])
    for f in q.face_list():
        if f not in used:
            dual.add_edge(*q.white_diagonal(f), key=f)
    if not nx.is_tree(dual):
        raise ValueError("Remaining faces do not form a spanning tree of G°")

    matching = dict(black_tree)
    for parent, child in nx.bfs_edges(dual, q.w_root):
        (f,) = dual[parent][child].keys()
        matching[child] = f
    return matching


def iter_double_matchings(q: Quadrangulation) -> Iterator[Dict[Vertex, Face]]:
    """Perfect matchings of G^D_r (roots removed) by backtracking.

    Raises:
        SizeGuardError: If |F| exceeds the forest guard
    """
    if len(q.faces) > config.max_forest_edges:
        raise SizeGuardError("Double graph matching", len(q.faces), config.max_forest_edges)
    order = q.white + q.black_tilde
    used = set()
    chosen: Dict[Vertex, Face] = {}

    def extend(n: int):
        if n == len(order):
            yield dict(chosen)
            return
        v = order[n]
        for f in q.incident_faces(v):
            if f in used:
                continue
            used.add(f)
            chosen[v] = f
            yield from extend(n + 1)
            del chosen[v]
            used.discard(f)

    yield from extend(0)


def count_rooted_spanning_trees(q: Quadrangulation) -> int:
    """Number of spanning trees of G•, by the matrix-tree theorem."""
    graph = q.black_graph()
    graph.remove_edges_from(list(nx.selfloop_edges(graph, keys=True)))
    # b_r last; its row and column are dropped
    laplacian = nx.laplacian_matrix(graph, nodelist=q.black_tilde + [q.b_root]).toarray()
    minor = [[int(x) for x in row[:-1]] for row in laplacian[:-1]]
    return int(determinant(minor))


# Complementary trees and forests


class _RollbackUnionFind:
    """Union-find without path compression so unions can be undone in LIFO order."""

    def __init__(self, nodes):
        self.parent = {v: v for v in nodes}
        self.size = {v: 1 for v in nodes}
        self.history: List[Vertex] = []

    def find(self, v):
        while self.parent[v] != v:
            v = self.parent[v]
        return v

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.history.append(rb)
        return True

    def rollback(self) -> None:
        rb = self.history.pop()
        ra = self.parent[rb]
        self.size[ra] -= self.size[rb]
        self.parent[rb] = rb


@dataclass
class TreeForestConfig:
    """Complementary tree T (rooted at b_r) and forest F of G•.

    Each map sends a vertex to the face carrying its outgoing edge.
    """

    tree: Dict[Vertex, Face]
    forest: Dict[Vertex, Face]
    sign: int

    def monomial(self) -> Monomial:
        return tuple(sorted((f, 1) for f in self.forest.values()))

    def weight(self, weights: Mapping[Face, Any]):
        value = self.sign
        for f in self.forest.values():
            value = value * weights[f]
        return value

    def to_dict(self, q: Quadrangulation) -> Dict[str, Any]:
        def edges(out_faces):
            return [
                {
                    "from": _jsonable(v),
                    "to": _jsonable(q.across(f, v)),
                    "face": _jsonable(f),
                }
                for v, f in out_faces.items()
            ]

        return {"tree": edges(self.tree), "forest": edges(self.forest), "sign": self.sign}


def _orient(q: Quadrangulation, faces: List[Face], roots: List[Vertex]) -> Dict[Vertex, Face]:
    graph = nx.MultiGraph()
    graph.add_nodes_from(roots)
    for f in faces:
        graph.add_edge(*q.black_diagonal(f), key=f)
    out: Dict[Vertex, Face] = {}
    for root in roots:
        for parent, child in nx.bfs_edges(graph, root):
            (f,) = graph[parent][child].keys()
            out[child] = f
    return out


def configuration_sign(
    q: Quadrangulation, tree_faces: Mapping[Vertex, Face], forest_faces: Mapping[Vertex, Face]
) -> int:
    """Coefficient of the matching pair in the expansion of det(C(1)^B̃ | C(a)^B).

    Columns are B̃ then B; the pair sends column j to the row of its face. The result is
    sgn of that permutation times the C(1) entries used.

    Raises:
        ValueError: If the faces are not distinct or a vertex is not a corner of its face
    """
    rows = {f: n for n, f in enumerate(q.face_list())}
    assignment = [(b, tree_faces[b]) for b in q.black_tilde]
    assignment += [(b, forest_faces[b]) for b in q.black]
    perm = [rows[f] for _, f in assignment]
    if sorted(perm) != list(range(len(rows))):
        raise ValueError("Matching pair must use every face exactly once")
    sign = Permutation(perm).signature()
    for b, f in assignment:
        entry = q.c_sign(f, b)
        if not entry:
            raise ValueError(f"{b!r} is not a corner of face {f!r}")
        sign *= entry
    return sign


def iter_tree_forest(q: Quadrangulation) -> Iterator[TreeForestConfig]:
    """Complementary tree/forest pairs of G•, with their signs.

    Every edge of G• goes either to the tree or to the forest; two union-finds reject
    cycles, the forest one with all roots merged.

    Raises:
        SizeGuardError: If G• has more edges than the forest guard
    """
    faces = q.face_list()
    if len(faces) > config.max_forest_edges:
        raise SizeGuardError("Tree/forest enumeration", len(faces), config.max_forest_edges)
    nodes = q.black_tilde + [q.b_root]
    roots = q.forest_roots
    tree_size = len(nodes) - 1
    forest_size = len(nodes) - len(roots)
    if tree_size + forest_size != len(faces):
        raise ValueError(
            f"|T| + |F| = {tree_size + forest_size} does not cover the {len(faces)} edges of G•"
        )

    tree_uf = _RollbackUnionFind(nodes)
    forest_uf = _RollbackUnionFind(nodes)
    for r in roots[1:]:
        forest_uf.union(roots[0], r)
    diagonals = [q.black_diagonal(f) for f in faces]
    in_tree: List[Face] = []
    in_forest: List[Face] = []

    def extend(n: int):
        if n == len(faces):
            tree = _orient(q, in_tree, [q.b_root])
            forest = _orient(q, in_forest, roots)
            yield TreeForestConfig(tree, forest, configuration_sign(q, tree, forest))
            return
        b0, b1 = diagonals[n]
        if len(in_tree) < tree_size and tree_uf.union(b0, b1):
            in_tree.append(faces[n])
            yield from extend(n + 1)
            in_tree.pop()
            tree_uf.rollback()
        if len(in_forest) < forest_size and forest_uf.union(b0, b1):
            in_forest.append(faces[n])
            yield from extend(n + 1)
            in_forest.pop()
            forest_uf.rollback()

    yield from extend(0)


def enumerate_tree_forest(q: Quadrangulation) -> List[TreeForestConfig]:
    configs = list(iter_tree_forest(q))
    logger.info(f"Enumerated {len(configs)} tree/forest configurations on {len(q.faces)} edges")
    return configs


def signed_polynomial(configs: List[TreeForestConfig]) -> MultiPoly:
    """Sum of sign(T, F) times the product of the forest face variables."""
    total = MultiPoly()
    for c in configs:
        total.add_term(c.monomial(), c.sign)
    return total


def find_cycle(q: Quadrangulation, out_faces: Mapping[Vertex, Face]) -> Optional[List[Vertex]]:
    """A directed cycle of the out-edge map, as its list of vertices, or None."""
    graph = nx.DiGraph()
    for v, f in out_faces.items():
        graph.add_edge(v, q.across(f, v))
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return None
    return [u for u, _ in cycle]


def pair_weight(
    q: Quadrangulation,
    tree_faces: Mapping[Vertex, Face],
    forest_faces: Mapping[Vertex, Face],
    weights: Mapping[Face, Any],
):
    """Signed weight of any matching pair in the expansion of det(C(1)^B̃ | C(a)^B)."""
    value = configuration_sign(q, tree_faces, forest_faces)
    for b in q.black:
        value = value * weights[forest_faces[b]]
    return value


# Matrix identities


def reference_tree(q: Quadrangulation) -> Dict[Vertex, Face]:
    """Breadth-first spanning tree of G• rooted at b_r, smallest face on parallel edges."""
    graph = q.black_graph()
    tree: Dict[Vertex, Face] = {}
    for parent, child in nx.bfs_edges(graph, q.b_root):
        tree[child] = min(graph[parent][child].keys())
    return tree


@dataclass
class IdentityCheck:
    """Outcome of the C-matrix identity on one set of weights."""

    det_k: Any
    det_c: Any
    det_stacked: Any
    det_star: Any
    zero_block: bool
    kasteleyn_block: bool

    @property
    def holds(self) -> bool:
        return (
            (self.det_c == self.det_k or self.det_c == -self.det_k)
            and self.det_stacked in (1, -1)
            and self.det_star in (1, -1)
            and self.zero_block
            and self.kasteleyn_block
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "det_K": format_value(self.det_k),
            "det_C": format_value(self.det_c),
            "det_stacked": format_value(self.det_stacked),
            "det_star": format_value(self.det_star),
            "zero_block": self.zero_block,
            "kasteleyn_block": self.kasteleyn_block,
            "holds": self.holds,
        }


def det_C_identity(
    q: Quadrangulation, weights: Optional[Mapping[Face, Any]] = None
) -> IdentityCheck:
    """Check det K = ± det(C(1)^B̃ | C(a)^B) through the stacked product.

    The rows (C(1)^t_W ; M), with M the B̃-part of the matching of a reference tree pair,
    times (C(1)^B̃ | C(a)^B) must give a zero W×B̃ block, K as the W×B block and a
    unimodular B̃×B̃ block.
    """
    weights = q.weights if weights is None else weights
    faces = q.face_list()
    matching = reverse_temperley(q, reference_tree(q))
    column = {f: n for n, f in enumerate(faces)}

    stacked = [[q.c_sign(f, w) for f in faces] for w in q.white]
    for b in q.black_tilde:
        row = [0] * len(faces)
        row[column[matching[b]]] = 1
        stacked.append(row)

    block = q.block_matrix(weights)
    product = matrix_product(as_matrix(stacked), as_matrix(block))
    n_white, n_tilde = len(q.white), len(q.black_tilde)

    g = q.dimer_graph()
    kasteleyn = kasteleyn_matrix(g, weights).entries
    zero_block = all(product[r, c] == 0 for r in range(n_white) for c in range(n_tilde))
    kasteleyn_block = all(
        product[r, n_tilde + c] == kasteleyn[r, c]
        for r in range(n_white)
        for c in range(len(q.black))
    )
    star = product[n_white:, :n_tilde]
    check = IdentityCheck(
        det_k=z_det(g, weights),
        det_c=determinant(block),
        det_stacked=determinant(stacked),
        det_star=determinant(star),
        zero_block=zero_block,
        kasteleyn_block=kasteleyn_block,
    )
    logger.debug(f"C-matrix identity on |F|={len(faces)}: holds={check.holds}")
    return check
