"""Solutions of the chi3, chi4 and chi5 recurrences as leading coefficients of dSKP solutions.

With initial weights rescaled as ε^m a, m = i - j + h(i, j), the leading coefficient in ε
of the dSKP ratio function solves chi4. Rescaling further by δ^n, n = i + j + h(i, j), and
taking the leading coefficient in δ solves chi5. Substituting a -> 1 + ρa into the chi4
solution and taking the leading coefficient in ρ of (Y - 1) solves chi3.

Face exponents of an Aztec diamond are read off the lattice labels of its faces, so the
monomial counts and the constrained forests below both work on lattice-labelled faces.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Tuple

import networkx as nx
from sympy import ZZ, field as fraction_field, symbols

from dskplab.config import config
from dskplab.cwgraph import CwGraph, aztec_apex, build_cw_graph
from dskplab.dimer import kasteleyn_matrix, prefactor, symbolic_ratio
from dskplab.errors import DskpError, SingularError, SizeGuardError, TruncationError
from dskplab.forests import (
    Quadrangulation,
    TreeForestConfig,
    Vertex,
    iter_tree_forest,
    quadrangulate_aztec,
)
from dskplab.lattice import (
    SINGULAR,
    Face,
    HeightFunction,
    InitialData,
    Point,
    aztec_heights,
    evolve,
    octahedron_inputs,
    step_function,
)
from dskplab.poly import ONE_MONOMIAL, Monomial, MultiPoly
from dskplab.projective import GaussianRational, format_value, random_rational
from dskplab.series import EpsilonSeries, series_pivot_rank
from dskplab.utils.linalg import determinant

logger = logging.getLogger(__name__)

VARIANTS = ("chi3", "chi4", "chi5")
COUNT_VARIANTS = ("chi2",) + VARIANTS
SIDES = ("num", "den")
LIMIT_METHODS = ("symbolic", "series")
COUNT_METHODS = ("auto", "limit", "recurrence")

# Doublings of the series order before giving up
MAX_DOUBLINGS = 5

# Unit steps (dU, dV) of an oriented forest edge in the Aztec quadrangulation
DIRECTIONS = {(-1, 0): "SE", (1, 0): "NW", (0, 1): "NE", (0, -1): "SW"}

# Forest edge directions excluded from contributing configurations, per (variant, side)
FORBIDDEN_DIRECTIONS = {
    ("chi4", "den"): {"black": ("SE",), "white": ()},
    ("chi4", "num"): {"black": (), "white": ("NW",)},
    ("chi5", "den"): {"black": ("SE",), "white": ("NE",)},
    ("chi5", "num"): {"black": ("SW",), "white": ("NW",)},
}


def _check_variant(variant: str, allowed=VARIANTS) -> None:
    if variant not in allowed:
        raise ValueError(f"Unknown variant {variant!r}; choose one of {', '.join(allowed)}")


def epsilon_exponent(heights: HeightFunction, face: Face) -> int:
    """m = i - j + h(i, j)."""
    i, j = face
    return i - j + heights(i, j)


def delta_exponent(heights: HeightFunction, face: Face) -> int:
    """n = i + j + h(i, j)."""
    i, j = face
    return i + j + heights(i, j)


def monomial_weight(mono: Monomial, exponents: Mapping[Face, int]) -> int:
    return sum(exponents[v] * e for v, e in mono)


def lowest_weight_part(
    poly: MultiPoly, weight: Callable[[Monomial], Any]
) -> Tuple[MultiPoly, Any]:
    """Terms of poly of minimal weight, with that weight.

    Raises:
        ValueError: If poly is zero
    """
    if not poly:
        raise ValueError("The zero polynomial has no lowest-weight part")
    weights = {mono: weight(mono) for mono in poly.terms}
    low = min(weights.values())
    return MultiPoly({m: c for m, c in poly.terms.items() if weights[m] == low}), low


def _sub_monomials(mono: Monomial, order: int) -> Iterator[Tuple[Monomial, int]]:
    """Monomials ν <= mono of total degree order, with the product of binomials."""
    if order == 0:
        yield ONE_MONOMIAL, 1
        return
    if not mono:
        return
    (var, exp), rest = mono[0], mono[1:]
    remaining = sum(e for _, e in rest)
    binomial = 1
    for taken in range(0, min(exp, order) + 1):
        if taken:
            binomial = binomial * (exp - taken + 1) // taken
        if order - taken > remaining:
            continue
        for sub, mult in _sub_monomials(rest, order - taken):
            yield (((var, taken),) + sub if taken else sub), binomial * mult


def shifted_lowest_order(poly: MultiPoly) -> Tuple[MultiPoly, int]:
    """Lowest nonzero ρ coefficient of poly(1 + ρa), with its order in ρ.

    Raises:
        ValueError: If poly is zero
    """
    if not poly:
        raise ValueError("The zero polynomial has no lowest ρ coefficient")
    for order in range(poly.degree() + 1):
        part = MultiPoly()
        for mono, coeff in poly.terms.items():
            for sub, mult in _sub_monomials(mono, order):
                part.add_term(sub, coeff * mult)
        if part:
            return part, order
    raise ValueError("poly(1 + ρa) vanishes identically")


@dataclass
class LeadingParts:
    """Numerator and denominator polynomials whose ratio is the chi solution."""

    variant: str
    numerator: MultiPoly
    denominator: MultiPoly
    valuation: Any
    rho_orders: Optional[Tuple[int, int]] = None

    def evaluate(self, weights: Mapping[Face, Any]):
        """Value at the given face weights.

        Raises:
            SingularError: If the denominator vanishes there
        """
        den = self.denominator.evaluate(weights)
        if den == 0:
            raise SingularError(f"{self.variant} leading denominator vanishes at these weights")
        value = self.numerator.evaluate(weights) / den
        if isinstance(value, GaussianRational) and value.im == 0:
            return value.re
        return value


def leading_parts(
    variant: str, numerator: MultiPoly, denominator: MultiPoly, heights: HeightFunction
) -> LeadingParts:
    """Leading-coefficient polynomials of the ratio numerator/denominator.

    Args:
        variant: chi3, chi4 or chi5
        numerator, denominator: Polynomials in lattice-labelled face variables
        heights: Height function giving the exponents of each face

    Raises:
        DskpError: If the chi4 ratio does not tend to 1 under a -> 1 + ρa
    """
    _check_variant(variant)
    faces = numerator.variables() | denominator.variables()
    eps = {f: epsilon_exponent(heights, f) for f in faces}
    if variant == "chi5":
        delta = {f: delta_exponent(heights, f) for f in faces}

        def weight(mono):
            return monomial_weight(mono, eps), monomial_weight(mono, delta)

        num, v_num = lowest_weight_part(numerator, weight)
        den, v_den = lowest_weight_part(denominator, weight)
        return LeadingParts(variant, num, den, (v_num[0] - v_den[0], v_num[1] - v_den[1]))

    num, v_num = lowest_weight_part(numerator, lambda mono: monomial_weight(mono, eps))
    den, v_den = lowest_weight_part(denominator, lambda mono: monomial_weight(mono, eps))
    if variant == "chi4":
        return LeadingParts(variant, num, den, v_num - v_den)

    low_den, den_order = shifted_lowest_order(den)
    low_num, num_order = shifted_lowest_order(num)
    mono, coeff = next(iter(low_den.terms.items()))
    if isinstance(coeff, int):
        coeff = Fraction(coeff)
    scale = low_num.terms.get(mono, 0) / coeff if num_order == den_order else 0
    if not scale or low_num != low_den * scale:
        raise DskpError("chi4 leading ratio does not tend to 1 under a -> 1 + ρa")
    if scale != 1:
        logger.debug(f"Normalising the chi4 numerator by {scale}")
        num = num / scale
    chi3_num, chi3_order = shifted_lowest_order(num - den)
    return LeadingParts(variant, chi3_num, low_den, v_num - v_den, (chi3_order, den_order))


# Limit solutions


@dataclass
class ChiLimit:
    """Solution of a chi recurrence obtained as a leading coefficient."""

    variant: str
    value: Any
    method: str
    valuation: Any
    numerator: Optional[MultiPoly] = None
    denominator: Optional[MultiPoly] = None
    rho_orders: Optional[Tuple[int, int]] = None
    order: Optional[int] = None

    def to_dict(self, emit_polys: bool = False) -> Dict[str, Any]:
        payload = {
            "variant": self.variant,
            "method": self.method,
            "value": format_value(self.value),
            "valuation": list(self.valuation)
            if isinstance(self.valuation, tuple)
            else self.valuation,
        }
        if self.rho_orders is not None:
            payload["rho_orders"] = list(self.rho_orders)
        if self.order is not None:
            payload["series_order"] = self.order
        if emit_polys and self.numerator is not None:
            payload["numerator"] = self.numerator.to_text()
            payload["denominator"] = self.denominator.to_text()
        return payload


def _series_ratio(
    g: CwGraph, weights: Mapping[Face, Any], exponents: Mapping[Face, int], order: int
):
    scaled = {f: EpsilonSeries.monomial(weights[f], exponents[f], order) for f in g.faces()}
    inverse = {f: 1 / s for f, s in scaled.items()}
    det = determinant(kasteleyn_matrix(g, scaled).entries, pivot_key=series_pivot_rank)
    det_inv = determinant(kasteleyn_matrix(g, inverse).entries, pivot_key=series_pivot_rank)
    return prefactor(g, scaled) * det_inv / det


def chi4_series_limit(
    g: CwGraph,
    heights: HeightFunction,
    weights: Optional[Mapping[Face, Any]] = None,
    start_order: Optional[int] = None,
) -> ChiLimit:
    """lc_ε Y(G, ε^m a) from Kasteleyn determinants over truncated series.

    The order starts at 2 max|m| + 2 and doubles until two consecutive orders give the same
    leading term.

    Raises:
        TruncationError: If the leading term is still unresolved after MAX_DOUBLINGS
    """
    weights = g.weights if weights is None else weights
    exponents = {f: epsilon_exponent(heights, f) for f in g.faces()}
    order = start_order or 2 * max(abs(e) for e in exponents.values()) + 2
    previous = None
    for _ in range(MAX_DOUBLINGS + 1):
        try:
            y = _series_ratio(g, weights, exponents, order)
            current = (y.valuation, y.leading_coefficient())
        except TruncationError as e:
            logger.debug(f"Series order {order} is too low: {e}")
            current = None
        if current is not None and current == previous:
            value = current[1]
            if isinstance(value, GaussianRational) and value.im == 0:
                value = value.re
            return ChiLimit("chi4", value, "series", current[0], order=order // 2)
        previous = current
        order *= 2
    raise TruncationError(f"Leading term unresolved after {MAX_DOUBLINGS} doublings")


def chi_solution_via_limit(
    variant: str,
    g: CwGraph,
    heights: HeightFunction,
    weights: Optional[Mapping[Face, Any]] = None,
    method: str = "symbolic",
) -> ChiLimit:
    """Value of the chi3, chi4 or chi5 solution at the target of a crosses-and-wrenches graph.

    Args:
        variant: chi3, chi4 or chi5
        g: Graph G_p with lattice-labelled faces
        heights: Height function the graph was built from
        weights: Face weights, g.weights when omitted
        method: "symbolic" (leading parts of the symbolic ratio) or "series" (chi4 only)

    Returns:
        ChiLimit with the value, the valuation and the leading polynomials

    Raises:
        SingularError: If the leading denominator vanishes at the weights
        TruncationError: If the series route cannot resolve the leading term
    """
    _check_variant(variant)
    weights = g.weights if weights is None else weights
    if method == "series":
        if variant != "chi4":
            raise ValueError("The series route computes chi4 only; use method='symbolic'")
        return chi4_series_limit(g, heights, weights)
    if method != "symbolic":
        raise ValueError(f"Unknown method {method!r}; use symbolic or series")

    ratio = symbolic_ratio(g)
    parts = leading_parts(variant, ratio.numerator, ratio.denominator, heights)
    value = parts.evaluate(weights)
    logger.debug(
        f"{variant} leading parts: {len(parts.numerator)} / {len(parts.denominator)} monomials"
    )
    return ChiLimit(
        variant,
        value,
        "symbolic",
        parts.valuation,
        parts.numerator,
        parts.denominator,
        parts.rho_orders,
    )


# Aztec diamonds


def aztec_face_label(k: int, face: Tuple[int, int]) -> Face:
    """Lattice label (i, j) of the quadrangulation face (U, V) of A_k."""
    u, v = face
    i0 = aztec_apex(k)[0]
    return i0 + (v - u) // 2, (u + v) // 2 - k


def _relabel(k: int, faces) -> Monomial:
    return tuple(sorted((aztec_face_label(k, f), 1) for f in faces))


@lru_cache(maxsize=None)
def configuration_polynomials(k: int) -> Tuple[MultiPoly, MultiPoly]:
    """Σ sign Π_T a and Σ sign Π_F a over tree/forest pairs of A_k, lattice-labelled.

    Their ratio is the dSKP solution at the apex of A_k. The returned polynomials are
    shared between calls and must not be modified in place.

    Raises:
        SizeGuardError: If A_k exceeds the forest enumeration guard
    """
    q = quadrangulate_aztec(k)
    num, den = MultiPoly(), MultiPoly()
    configs = 0
    for c in iter_tree_forest(q):
        num.add_term(_relabel(k, c.tree.values()), c.sign)
        den.add_term(_relabel(k, c.forest.values()), c.sign)
        configs += 1
    logger.info(f"A_{k}: {configs} tree/forest configurations")
    return num, den


def _count_guard(variant: str, k: int, method: str) -> None:
    limit = config.max_symbolic_k
    if k <= limit:
        return
    if config.size_guard == 1 and k == limit + 1 and variant in ("chi3", "chi5"):
        if method in ("auto", "recurrence"):
            return
    raise SizeGuardError(f"{variant} monomial count on A_{k}", k, limit)


def _fraction_to_poly(poly, labels: List[Face]) -> MultiPoly:
    result = MultiPoly()
    for exps, coeff in poly.terms():
        mono = tuple(sorted((labels[n], e) for n, e in enumerate(exps) if e))
        result.add_term(mono, int(coeff))
    return result


def recurrence_polynomials(variant: str, k: int) -> Tuple[MultiPoly, MultiPoly]:
    """Reduced numerator and denominator of the chi solution at the apex of A_k.

    The recurrence is iterated in the field of rational functions over Z of the initial
    weights the apex depends on; every step cancels common factors.
    """
    _check_variant(variant)
    heights = aztec_heights(k + 2)
    apex = aztec_apex(k)
    needed, pending, seen = set(), [apex], set()
    while pending:
        p = pending.pop()
        if p in seen:
            continue
        seen.add(p)
        if heights.is_initial(p):
            needed.add(p[:2])
        else:
            pending.extend(octahedron_inputs(p))

    labels = sorted(needed)
    names = symbols([f"a_{i}_{j}" for i, j in labels])
    _, *gens = fraction_field(names, ZZ)
    values: Dict[Point, Any] = {
        (i, j, heights(i, j)): gen for (i, j), gen in zip(labels, gens)
    }
    step = step_function(variant)
    for p in sorted(seen - set(values), key=lambda p: p[2]):
        values[p] = step(*(values[x] for x in octahedron_inputs(p)))
    logger.debug(f"Iterated {variant} over {len(seen) - len(labels)} points of A_{k}")
    x = values[apex]
    return _fraction_to_poly(x.numer, labels), _fraction_to_poly(x.denom, labels)


@dataclass
class ChiCounts:
    """Monomial counts of the leading numerator and denominator on A_k."""

    variant: str
    k: int
    numerator: int
    denominator: int
    method: str
    numerator_poly: Optional[MultiPoly] = field(default=None, repr=False)
    denominator_poly: Optional[MultiPoly] = field(default=None, repr=False)

    def to_dict(self, emit_polys: bool = False) -> Dict[str, Any]:
        payload = {
            "variant": self.variant,
            "k": self.k,
            "method": self.method,
            "numerator": self.numerator,
            "denominator": self.denominator,
        }
        if emit_polys and self.numerator_poly is not None:
            payload["numerator_poly"] = self.numerator_poly.to_text()
            payload["denominator_poly"] = self.denominator_poly.to_text()
        return payload


def chi_monomial_counts(variant: str, k: int, method: str = "auto") -> ChiCounts:
    """Numbers of monomials in the numerator and denominator of the solution on A_k.

    The limit route reads the leading parts off the tree/forest polynomials of A_k; the
    recurrence route iterates the recurrence over rational functions. "auto" takes the
    limit route for k <= 3 and the recurrence otherwise.

    Raises:
        SizeGuardError: Above k = 3, except k = 4 for chi3 and chi5 by recurrence
    """
    _check_variant(variant, COUNT_VARIANTS)
    if method not in COUNT_METHODS:
        raise ValueError(f"Unknown method {method!r}; choose one of {', '.join(COUNT_METHODS)}")
    if k < 1:
        raise ValueError(f"Aztec diamond size must be >= 1, got {k}")
    _count_guard(variant, k, method)
    if method == "auto":
        method = "limit" if k <= 3 else "recurrence"

    if method == "recurrence":
        if variant == "chi2":
            raise ValueError("chi2 counts come from the limit route")
        num, den = recurrence_polynomials(variant, k)
    else:
        num, den = configuration_polynomials(k)
        if variant != "chi2":
            parts = leading_parts(variant, num, den, aztec_heights(k + 2))
            num, den = parts.numerator, parts.denominator
    counts = ChiCounts(variant, k, len(num), len(den), method, num, den)
    logger.info(f"{variant} on A_{k}: {counts.numerator} / {counts.denominator} monomials")
    return counts


# Constrained forests


def edge_direction(v: Vertex, f: Tuple[int, int]) -> str:
    """Compass direction of the forest edge leaving v through the face f."""
    return DIRECTIONS[(f[0] - v[0], f[1] - v[1])]


def white_forest(q: Quadrangulation, c: TreeForestConfig) -> Dict[Vertex, Face]:
    """F° on G°: the white diagonals of the faces of F, oriented towards w_r."""
    graph = nx.MultiGraph()
    graph.add_node(q.w_root)
    for f in c.forest.values():
        graph.add_edge(*q.white_diagonal(f), key=f)
    out: Dict[Vertex, Face] = {}
    for parent, child in nx.bfs_edges(graph, q.w_root):
        (f,) = graph[parent][child].keys()
        out[child] = f
    if len(out) != len(q.white):
        raise ValueError("White diagonals of the forest do not span G°")
    return out


def satisfies_constraints(
    q: Quadrangulation, c: TreeForestConfig, variant: str, side: str
) -> bool:
    rules = FORBIDDEN_DIRECTIONS[(variant, side)]
    if any(edge_direction(v, f) in rules["black"] for v, f in c.forest.items()):
        return False
    if rules["white"]:
        white = white_forest(q, c)
        if any(edge_direction(v, f) in rules["white"] for v, f in white.items()):
            return False
    return True


def constrained_configurations(variant: str, k: int, side: str) -> List[TreeForestConfig]:
    """Tree/forest pairs of A_k whose forests avoid the excluded directions.

    Raises:
        SizeGuardError: If A_k exceeds the forest enumeration guard
    """
    _check_variant(variant, ("chi4", "chi5"))
    if side not in SIDES:
        raise ValueError(f"Unknown side {side!r}; use num or den")
    q = quadrangulate_aztec(k)
    return [c for c in iter_tree_forest(q) if satisfies_constraints(q, c, variant, side)]


def constrained_forest_count(variant: str, k: int, side: str) -> int:
    count = len(constrained_configurations(variant, k, side))
    logger.info(f"{variant} {side} on A_{k}: {count} constrained configurations")
    return count


def constrained_polynomial(variant: str, k: int, side: str) -> MultiPoly:
    """Σ sign Π a over constrained pairs: tree faces for num, forest faces for den."""
    total = MultiPoly()
    for c in constrained_configurations(variant, k, side):
        faces = c.tree.values() if side == "num" else c.forest.values()
        total.add_term(_relabel(k, faces), c.sign)
    return total


# Checks against the recurrences


@dataclass
class ChiCheck:
    """Limit solution against forward iteration at the apex of A_k."""

    variant: str
    k: int
    seed: int
    method: str
    expected: Any = None
    value: Any = None
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.expected is not None and self.expected is not SINGULAR and (
            self.value == self.expected
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "k": self.k,
            "seed": self.seed,
            "method": self.method,
            "expected": None
            if self.expected is None or self.expected is SINGULAR
            else format_value(self.expected),
            "value": None if self.value is None else format_value(self.value),
            "passed": self.passed,
            "warnings": self.warnings,
        }


def random_aztec_data(k: int, rng: random.Random) -> InitialData:
    heights = aztec_heights(k + 2)
    return InitialData(heights, {p: random_rational(rng) for p in heights.points()})


def chi_check(variant: str, k: int, seed: int, method: str = "symbolic") -> ChiCheck:
    """Compare chi_solution_via_limit with evolve on seeded random data."""
    data = random_aztec_data(k, random.Random(seed))
    apex = aztec_apex(k)
    check = ChiCheck(variant, k, seed, method)
    solution = evolve(data, variant, k + 1)
    check.expected = solution.value(*apex)
    if check.expected is SINGULAR:
        check.warnings.append(f"{variant} iteration is singular at {apex}")
        return check
    g = build_cw_graph(data.heights, apex, data)
    try:
        check.value = chi_solution_via_limit(variant, g, data.heights, method=method).value
    except SingularError as e:
        check.warnings.append(str(e))
    return check
