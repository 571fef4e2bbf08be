"""Oriented dimer partition functions, Kasteleyn matrices and the ratio function Y.

Weights are face-indexed mappings. Numeric weights are exact field elements (Fraction,
GaussianRational, Dual, series); symbolic weights are face variables in MultiPoly form.
"""

import logging
import random
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Mapping, Optional

import numpy as np

from dskplab.config import config
from dskplab.cwgraph import CwGraph, KasteleynOrientation, kasteleyn_orientation
from dskplab.errors import SingularError, SizeGuardError
from dskplab.poly import MultiPoly, RationalFunction
from dskplab.projective import (
    INDETERMINATE,
    INFINITY,
    GaussianRational,
    MobiusMap,
    is_zero,
    proj_div,
)
from dskplab.utils.linalg import bareiss_determinant, determinant

logger = logging.getLogger(__name__)

MODES = ("numeric", "symbolic")

# Chart changes tried before a ratio is declared singular
MAX_CHART_RETRIES = 5


@dataclass
class KasteleynMatrix:
    """K_{w,b} = a_{f(w,b)} - a_{f(b,w)}, rows indexed by white and columns by black vertices."""

    white: List[Any]
    black: List[Any]
    entries: np.ndarray

    def determinant(self):
        if self.entries.size and isinstance(self.entries[0, 0], MultiPoly):
            return bareiss_determinant(self.entries.tolist())
        return determinant(self.entries)


def symbolic_weights(g: CwGraph, inverse: bool = False) -> Dict[Any, MultiPoly]:
    """Face variables a_f, or their inverses a_f^-1."""
    exponent = -1 if inverse else 1
    return {f: MultiPoly.variable(f, exponent) for f in g.faces()}


def _weights_for(g: CwGraph, weights: Optional[Mapping[Any, Any]]) -> Mapping[Any, Any]:
    weights = g.weights if weights is None else weights
    missing = [f for f in g.faces() if f not in weights]
    if missing:
        raise ValueError(f"Missing weights for {len(missing)} faces, first {missing[0]!r}")
    return weights


def kasteleyn_matrix(g: CwGraph, weights: Optional[Mapping[Any, Any]] = None) -> KasteleynMatrix:
    weights = _weights_for(g, weights)
    if len(g.white) != len(g.black):
        raise ValueError(f"|W| = {len(g.white)} differs from |B| = {len(g.black)}")
    rows = {w: n for n, w in enumerate(g.white)}
    cols = {b: n for n, b in enumerate(g.black)}
    zero = next(iter(weights.values())) * 0
    entries = np.empty((len(g.white), len(g.black)), dtype=object)
    for r in range(len(g.white)):
        for c in range(len(g.black)):
            entries[r, c] = zero
    for e in g.edges:
        entries[rows[e.white], cols[e.black]] = weights[e.right] - weights[e.left]
    return KasteleynMatrix(list(g.white), list(g.black), entries)


def _check_matching_guard(g: CwGraph) -> None:
    if g.vertex_count > config.max_matching_vertices:
        raise SizeGuardError("Matching enumeration", g.vertex_count, config.max_matching_vertices)


def iter_matchings(g: CwGraph) -> Iterator[List[int]]:
    """Perfect matchings as lists of edge indices, one per white vertex in order.

    Raises:
        SizeGuardError: If |V| exceeds the matching guard
    """
    _check_matching_guard(g)
    if len(g.white) != len(g.black):
        return
    column = {b: n for n, b in enumerate(g.black)}
    options = [
        sorted(g.vertex_edges(w), key=lambda idx: column[g.edges[idx].black]) for w in g.white
    ]
    used = set()
    chosen: List[int] = []

    def extend(n: int):
        if n == len(g.white):
            yield list(chosen)
            return
        for idx in options[n]:
            b = g.edges[idx].black
            if b in used:
                continue
            used.add(b)
            chosen.append(idx)
            yield from extend(n + 1)
            chosen.pop()
            used.discard(b)

    yield from extend(0)


def enumerate_matchings(g: CwGraph) -> List[List[int]]:
    matchings = list(iter_matchings(g))
    logger.debug(f"Enumerated {len(matchings)} perfect matchings on |V|={g.vertex_count}")
    return matchings


def z_oriented(
    g: CwGraph,
    weights: Optional[Mapping[Any, Any]] = None,
    orientation: Optional[KasteleynOrientation] = None,
    mode: str = "numeric",
):
    """Oriented dimer partition function by enumeration.

    Z = sum over matchings M of prod_{wb in M} phi_(w,b) (a_{f(w,b)} - a_{f(b,w)}).

    Args:
        g: Bipartite graph with open faces
        weights: Face weights; ignored in symbolic mode
        orientation: Kasteleyn orientation, computed when omitted
        mode: "numeric" for an exact value, "symbolic" for a MultiPoly in the face variables

    Raises:
        SizeGuardError: If the graph is too large to enumerate
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode {mode!r}; use numeric or symbolic")
    if orientation is None:
        orientation = kasteleyn_orientation(g)
    weights = symbolic_weights(g) if mode == "symbolic" else _weights_for(g, weights)

    edge_weight = {
        idx: orientation.signs[idx] * (weights[e.right] - weights[e.left])
        for idx, e in enumerate(g.edges)
    }
    total = MultiPoly() if mode == "symbolic" else 0
    count = 0
    for matching in iter_matchings(g):
        term = 1
        for idx in matching:
            term = edge_weight[idx] * term
        total = total + term
        count += 1
    logger.debug(f"Oriented partition function summed over {count} matchings")
    return total


def z_det(g: CwGraph, weights: Optional[Mapping[Any, Any]] = None, mode: str = "numeric"):
    """det K, equal to the oriented partition function up to a sign fixed by the orientation.

    Symbolic mode runs fraction-free elimination over the polynomial ring.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown mode {mode!r}; use numeric or symbolic")
    if mode == "symbolic":
        weights = symbolic_weights(g)
    return kasteleyn_matrix(g, weights).determinant()


def orientation_sign(
    g: CwGraph, orientation: KasteleynOrientation, weights: Optional[Mapping[Any, Any]] = None
) -> int:
    """The sign eps with z_oriented = eps * det K.

    Raises:
        SingularError: If det K vanishes at these weights
    """
    det = z_det(g, weights)
    if is_zero(det):
        raise SingularError("det K vanishes; pick other weights to resolve the sign")
    z = z_oriented(g, weights, orientation)
    if z == det:
        return 1
    if z == -det:
        return -1
    raise ValueError("Oriented partition function differs from det K by more than a sign")


def i_power(n: int):
    """i^n as an int when real, else a GaussianRational."""
    return (1, GaussianRational(0, 1), -1, GaussianRational(0, -1))[n % 4]


def face_exponents(g: CwGraph) -> Dict[Any, int]:
    """Exponent of each face in C(G, a): d/2 - 1 inside, ceil(d/2) on open faces."""
    exponents = {f: g.degree(f) // 2 - 1 for f in g.inner}
    exponents.update({f: (g.degree(f) + 1) // 2 for f in g.open})
    return exponents


def prefactor(g: CwGraph, weights: Optional[Mapping[Any, Any]] = None):
    """C(G, a) = i^|V| prod_inner a^(d/2-1) prod_open a^ceil(d/2)."""
    weights = _weights_for(g, weights)
    value = i_power(g.vertex_count)
    for f, e in face_exponents(g).items():
        value = value * weights[f] ** e
    return value


def symbolic_prefactor(g: CwGraph) -> MultiPoly:
    mono = tuple(sorted((f, e) for f, e in face_exponents(g).items() if e))
    return MultiPoly.monomial(mono, i_power(g.vertex_count))


def _needs_chart_change(weights: Mapping[Any, Any]) -> bool:
    return any(v is INFINITY or v is INDETERMINATE or is_zero(v) for v in weights.values())


def _ratio(g: CwGraph, weights: Mapping[Any, Any], orientation, method: str):
    inverse = {f: 1 / v for f, v in weights.items()}
    if method == "det":
        z, z_inv = z_det(g, weights), z_det(g, inverse)
    elif method == "enumeration":
        if orientation is None:
            orientation = kasteleyn_orientation(g)
        z, z_inv = z_oriented(g, weights, orientation), z_oriented(g, inverse, orientation)
    else:
        raise ValueError(f"Unknown method {method!r}; use det or enumeration")
    return proj_div(prefactor(g, weights) * z_inv, z)


def ratio_function_Y(
    g: CwGraph,
    weights: Optional[Mapping[Any, Any]] = None,
    orientation: Optional[KasteleynOrientation] = None,
    method: str = "det",
    rng: Optional[random.Random] = None,
):
    """Ratio function Y(G, a) = C(G, a) Z(G, a^-1) / Z(G, a).

    Weights equal to 0 or inf, or a 0/0 ratio, trigger a random Mobius change of chart:
    Y is computed for M(a) and mapped back through M^-1.

    Args:
        g: Graph with open faces
        weights: Face weights, g.weights when omitted
        orientation: Used by the enumeration method only
        method: "det" (Kasteleyn determinants) or "enumeration" (oriented matchings)
        rng: Generator for chart changes, seeded from DSKP_SEED when omitted

    Returns:
        A ProjectiveValue, possibly INFINITY

    Raises:
        SingularError: If no chart gives a determined ratio
    """
    weights = _weights_for(g, weights)
    if not _needs_chart_change(weights):
        value = _ratio(g, weights, orientation, method)
        if value is not INDETERMINATE:
            return value
        logger.debug("Ratio is 0/0, retrying in another chart")

    rng = rng or random.Random(config.default_seed)
    for attempt in range(MAX_CHART_RETRIES):
        chart = MobiusMap.random(rng)
        moved = {f: chart(v) for f, v in weights.items()}
        if _needs_chart_change(moved):
            continue
        value = _ratio(g, moved, orientation, method)
        if value is not INDETERMINATE:
            logger.debug(f"Ratio resolved after {attempt + 1} chart change(s)")
            return chart.inverse()(value)
    raise SingularError(f"Ratio function stays 0/0 after {MAX_CHART_RETRIES} chart changes")


def _symbolic_inverse_det(g: CwGraph) -> MultiPoly:
    """det K(a^-1) as det(m K(a^-1)) / m^n, with m the product of all face variables."""
    scale = MultiPoly.monomial(tuple((f, 1) for f in g.faces()))
    laurent = kasteleyn_matrix(g, symbolic_weights(g, inverse=True)).entries.tolist()
    scaled = bareiss_determinant([[entry * scale for entry in row] for row in laurent])
    return scaled / scale ** len(g.white)


def symbolic_ratio(g: CwGraph, method: str = "det") -> RationalFunction:
    """Y as a rational function: (C * Z(a^-1)) / Z(a) in the face variables.

    The numerator C * Z(a^-1) is a polynomial.
    """
    if method == "det":
        z, z_inv = z_det(g, mode="symbolic"), _symbolic_inverse_det(g)
    else:
        orientation = kasteleyn_orientation(g)
        z = z_oriented(g, orientation=orientation, mode="symbolic")
        z_inv = z_oriented(g, symbolic_weights(g, inverse=True), orientation)
    return RationalFunction(symbolic_prefactor(g) * z_inv, z)


def dimer_prefactor(g: CwGraph, weights: Optional[Mapping[Any, Any]] = None):
    """C_dim(G, a): the face product of C(G, a) without the i^|V| factor."""
    weights = _weights_for(g, weights)
    value = 1
    for f, e in face_exponents(g).items():
        value = value * weights[f] ** e
    return value


def z_dimer(g: CwGraph, weights: Optional[Mapping[Any, Any]] = None):
    """Sum over matchings of prod 1/(a_f a_f') over the two faces of each edge."""
    weights = _weights_for(g, weights)
    total = 0
    for matching in iter_matchings(g):
        term = 1
        for idx in matching:
            e = g.edges[idx]
            term = term / (weights[e.right] * weights[e.left])
        total = total + term
    return total


def dkp_solution(g: CwGraph, weights: Optional[Mapping[Any, Any]] = None):
    """Octahedron-recurrence value C_dim(G, a) * Z_dim(G, a).

    Raises:
        SingularError: If a face weight is 0 or inf
        SizeGuardError: If the graph is too large to enumerate
    """
    weights = _weights_for(g, weights)
    if _needs_chart_change(weights):
        raise SingularError("dKP solution needs finite nonzero face weights")
    return dimer_prefactor(g, weights) * z_dimer(g, weights)
