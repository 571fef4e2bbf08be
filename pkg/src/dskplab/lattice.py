"""Octahedral lattice, height functions, initial data and forward recurrences.

A lattice point (i, j, k) has i + j + k even. A recurrence step computes x at p + e3 from
the five values x(p ± e1), x(p ± e2), x(p - e3) around an odd point p. Step arguments
always come in the order (x_pe1, x_me1, x_pe2, x_me2, x_me3).
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple

from dskplab.errors import SingularError, WindowTooSmallError
from dskplab.projective import (
    INDETERMINATE,
    INFINITY,
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
    to_homogeneous,
)

logger = logging.getLogger(__name__)

Face = Tuple[int, int]
Point = Tuple[int, int, int]

# Recurrence names accepted by evolve
RECURRENCES = ("dskp", "dkp", "chi3", "chi4", "chi5")


class LatticePoint(NamedTuple):
    """Point of the octahedral lattice."""

    i: int
    j: int
    k: int

    @classmethod
    def of(cls, i: int, j: int, k: int) -> "LatticePoint":
        """Build a point, checking i + j + k is even.

        Raises:
            ValueError: If the point is off the lattice
        """
        if (i + j + k) % 2:
            raise ValueError(f"({i}, {j}, {k}) is not a lattice point: i+j+k must be even")
        return cls(i, j, k)


class _Singular:
    """Cell state of a value whose defining step was singular."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "SINGULAR"


SINGULAR = _Singular()


@dataclass
class HeightFunction:
    """Height function h on the rectangle [imin, imax] x [jmin, jmax]."""

    imin: int
    imax: int
    jmin: int
    jmax: int
    values: Dict[Face, int]

    def __post_init__(self):
        for i, j in self.points():
            if (i, j) not in self.values:
                raise ValueError(f"Height function is missing the window point ({i}, {j})")
            h = self.values[(i, j)]
            if (i + j + h) % 2:
                raise ValueError(f"(i, j, h) = ({i}, {j}, {h}) is not a lattice point")
            for ni, nj in ((i + 1, j), (i, j + 1)):
                if (ni, nj) in self.values and abs(self.values[(ni, nj)] - h) != 1:
                    raise ValueError(
                        f"Heights at ({i}, {j}) and ({ni}, {nj}) must differ by exactly 1"
                    )

    @classmethod
    def from_function(
        cls, func: Callable[[int, int], int], imin: int, imax: int, jmin: int, jmax: int
    ) -> "HeightFunction":
        values = {
            (i, j): func(i, j) for i in range(imin, imax + 1) for j in range(jmin, jmax + 1)
        }
        return cls(imin, imax, jmin, jmax, values)

    def __call__(self, i: int, j: int) -> int:
        try:
            return self.values[(i, j)]
        except KeyError:
            raise WindowTooSmallError(f"({i}, {j}) lies outside the height-function window")

    def contains(self, i: int, j: int) -> bool:
        return self.imin <= i <= self.imax and self.jmin <= j <= self.jmax

    def points(self) -> Iterator[Face]:
        for i in range(self.imin, self.imax + 1):
            for j in range(self.jmin, self.jmax + 1):
                yield i, j

    def boundary_points(self) -> Iterator[Face]:
        for i, j in self.points():
            if i in (self.imin, self.imax) or j in (self.jmin, self.jmax):
                yield i, j

    def is_initial(self, p: Point) -> bool:
        return self.contains(p[0], p[1]) and p[2] == self(p[0], p[1])

    def is_above(self, p: Point) -> bool:
        """True when p lies strictly above the initial surface."""
        return p[2] > self(p[0], p[1])

    def cone_fits(self, p: Point) -> bool:
        """True when every initial point of the open square cone of p lies strictly inside."""
        pi, pj, pk = p
        if not self.contains(pi, pj):
            return False
        return all(
            self(i, j) >= pk - abs(i - pi) - abs(j - pj) for i, j in self.boundary_points()
        )

    def raised(self, i: int, j: int) -> "HeightFunction":
        """h + 2 at a local minimum (i, j).

        Raises:
            ValueError: If (i, j) is not an interior local minimum
        """
        h = self(i, j)
        neighbours = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
        if not all(self.contains(*n) and self(*n) == h + 1 for n in neighbours):
            raise ValueError(f"({i}, {j}) is not a local minimum of the height function")
        values = dict(self.values)
        values[(i, j)] = h + 2
        return HeightFunction(self.imin, self.imax, self.jmin, self.jmax, values)


def aztec_heights(radius: int) -> HeightFunction:
    """h(i, j) = [i + j]_2 on [-radius, radius]^2."""
    return HeightFunction.from_function(lambda i, j: (i + j) % 2, -radius, radius, -radius, radius)


def pyramid_heights(radius: int) -> HeightFunction:
    """h(i, j) = |i| + |j|, a surface made of wrenches away from the axes."""
    return HeightFunction.from_function(
        lambda i, j: abs(i) + abs(j), -radius, radius, -radius, radius
    )


def tilted_heights(radius: int) -> HeightFunction:
    """h(i, j) = max([i + j]_2, i + |j| - 2), flat on the left and sloped on the right."""
    return HeightFunction.from_function(
        lambda i, j: max((i + j) % 2, i + abs(j) - 2), -radius, radius, -radius, radius
    )


@dataclass
class InitialData:
    """Face weights a_{i,j} = x(i, j, h(i, j)) on the window of a height function."""

    heights: HeightFunction
    a: Dict[Face, Any]

    def __post_init__(self):
        missing = [p for p in self.heights.points() if p not in self.a]
        if missing:
            raise ValueError(f"Initial data is missing {len(missing)} weights, first {missing[0]}")

    @classmethod
    def from_function(
        cls, heights: HeightFunction, func: Callable[[int, int, int], Any]
    ) -> "InitialData":
        """Sample x = func(i, j, k) on the initial surface."""
        return cls(heights, {(i, j): func(i, j, heights(i, j)) for i, j in heights.points()})

    def weight(self, i: int, j: int):
        try:
            return self.a[(i, j)]
        except KeyError:
            raise WindowTooSmallError(f"No initial weight at ({i}, {j})")

    def mapped(self, func: Callable[[Any], Any]) -> "InitialData":
        return InitialData(self.heights, {f: func(v) for f, v in self.a.items()})

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready form: window, height rows and weight rows (rows indexed by i)."""
        h = self.heights
        return {
            "window": [h.imin, h.imax, h.jmin, h.jmax],
            "h": [[h(i, j) for j in range(h.jmin, h.jmax + 1)] for i in range(h.imin, h.imax + 1)],
            "a": [
                [format_value(self.a[(i, j)]) for j in range(h.jmin, h.jmax + 1)]
                for i in range(h.imin, h.imax + 1)
            ],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "InitialData":
        """Inverse of to_dict.

        Raises:
            ValueError: If the payload does not match the window
        """
        try:
            imin, imax, jmin, jmax = payload["window"]
            h_rows = payload["h"]
            a_rows = payload["a"]
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"Invalid initial data payload: {e}")
        if len(h_rows) != imax - imin + 1 or len(a_rows) != imax - imin + 1:
            raise ValueError("Row count of 'h' and 'a' must match the window")
        values, weights = {}, {}
        for di, (h_row, a_row) in enumerate(zip(h_rows, a_rows)):
            if len(h_row) != jmax - jmin + 1 or len(a_row) != jmax - jmin + 1:
                raise ValueError("Column count of 'h' and 'a' must match the window")
            for dj, (hv, av) in enumerate(zip(h_row, a_row)):
                values[(imin + di, jmin + dj)] = int(hv)
                weights[(imin + di, jmin + dj)] = parse_value(str(av))
        return cls(HeightFunction(imin, imax, jmin, jmax, values), weights)


def linear_solution(a, b, c, d) -> Callable[[int, int, int], Any]:
    """x(i, j, k) = i*a + j*b + k*c + d, a solution of dSKP."""
    return lambda i, j, k: i * a + j * b + k * c + d


def multiplicative_solution(a, b, c, d) -> Callable[[int, int, int], Any]:
    """x(i, j, k) = a^i b^j c^k d, a solution of dSKP."""
    return lambda i, j, k: a ** i * b ** j * c ** k * d


def _bracket(x, y):
    """Homogeneous difference [x, y] = p_x q_y - p_y q_x."""
    px, qx = to_homogeneous(x)
    py, qy = to_homogeneous(y)
    return px * qy - py * qx


def _same(x, y) -> bool:
    if x is INFINITY or y is INFINITY:
        return x is y
    return is_zero(x - y)


def dskp_step(x_pe1, x_me1, x_pe2, x_me2, x_me3):
    """Solve the dSKP relation for x_{e3}.

    Raises:
        SingularError: If two consecutive equator values coincide or the solve is 0/0
    """
    for x in (x_pe1, x_me1, x_pe2, x_me2, x_me3):
        if x is INDETERMINATE:
            raise SingularError("dSKP step with an indeterminate input")
    if (
        _same(x_pe1, x_pe2)
        or _same(x_pe2, x_me1)
        or _same(x_me1, x_me2)
        or _same(x_me2, x_pe1)
    ):
        raise SingularError("dSKP step with two equal adjacent equator values")

    try:
        a_h = _bracket(x_me3, x_pe2) * _bracket(x_me2, x_pe1)
        b_h = _bracket(x_pe2, x_me1) * _bracket(x_pe1, x_me3)
        p_me1, q_me1 = to_homogeneous(x_me1)
        p_me2, q_me2 = to_homogeneous(x_me2)
        result = from_homogeneous(a_h * p_me1 - b_h * p_me2, a_h * q_me1 - b_h * q_me2)
    except ZeroDivisionError:
        raise SingularError("dSKP step divides by a non-invertible element")
    if result is INDETERMINATE:
        raise SingularError("dSKP step is 0/0")
    return result


def dskp_relation(x_pe1, x_me1, x_pe2, x_me2, x_pe3, x_me3):
    """Cross-ratio (x₋₃−x₂)(x₋₁−x₃)(x₋₂−x₁) / ((x₂−x₋₁)(x₃−x₋₂)(x₁−x₋₃)).

    Equals -1 on dSKP solutions.
    """
    num = proj_mul(
        proj_mul(proj_sub(x_me3, x_pe2), proj_sub(x_me1, x_pe3)), proj_sub(x_me2, x_pe1)
    )
    den = proj_mul(
        proj_mul(proj_sub(x_pe2, x_me1), proj_sub(x_pe3, x_me2)), proj_sub(x_pe1, x_me3)
    )
    return proj_div(num, den)


def octahedral_symmetries() -> Iterator[Dict[int, int]]:
    """The 48 signed permutations of the axes, as maps on the labels ±1, ±2, ±3."""
    for perm in itertools.permutations((1, 2, 3)):
        for signs in itertools.product((1, -1), repeat=3):
            mapping = {}
            for axis, image, sign in zip((1, 2, 3), perm, signs):
                mapping[axis] = sign * image
                mapping[-axis] = -sign * image
            yield mapping


def apply_symmetry(values: Mapping[int, Any], mapping: Mapping[int, int]) -> Dict[int, Any]:
    """Relabel an octahedron: the value at label l moves to label mapping[l]."""
    return {mapping[label]: value for label, value in values.items()}


def dkp_step(x_pe1, x_me1, x_pe2, x_me2, x_me3):
    """Octahedron recurrence x_{e3} = (x_{e1}x_{-e1} + x_{e2}x_{-e2}) / x_{-e3}.

    Raises:
        SingularError: On an indeterminate form
    """
    result = proj_div(
        proj_add(proj_mul(x_pe1, x_me1), proj_mul(x_pe2, x_me2)),
        x_me3,
    )
    if result is INDETERMINATE:
        raise SingularError("dKP step is indeterminate")
    return result


def _require_finite_nonzero(values, names: str, variant: str) -> None:
    for x in values:
        if is_infinite(x) or is_indeterminate(x):
            raise SingularError(f"{variant} step needs finite inputs")
        if is_zero(x):
            raise SingularError(f"{variant} step divides by zero among {names}")


def chi_step(variant: str, x_pe1, x_me1, x_pe2, x_me2, x_me3):
    """Solve the chi3, chi4 or chi5 relation for x_{e3}.

    Raises:
        SingularError: If a denominator of the relation vanishes
        ValueError: For an unknown variant
    """
    xs = (x_pe1, x_me1, x_pe2, x_me2, x_me3)
    if any(is_infinite(x) or is_indeterminate(x) for x in xs):
        raise SingularError(f"{variant} step needs finite inputs")
    try:
        if variant == "chi3":
            den = x_me1 - x_pe2
            num = x_me2 * x_me1 - (x_me2 - x_pe1) * x_me3 - x_pe1 * x_pe2
        elif variant == "chi4":
            _require_finite_nonzero((x_me1, x_me3, x_pe2), "x_-e1, x_-e3, x_e2", variant)
            den = x_me3 * (x_pe2 - x_me1)
            num = x_me2 * x_pe2 * x_me3 - (x_me2 - x_pe1) * x_me1 * x_pe2 - x_pe1 * x_me1 * x_me3
        elif variant == "chi5":
            _require_finite_nonzero((x_pe2, x_me1, x_me3), "x_e2, x_-e1, x_-e3", variant)
            return x_pe1 + x_pe2 * x_me2 * (x_me1 - x_me3) / (x_me3 * x_me1)
        else:
            raise ValueError(f"Unknown chi variant {variant!r}; use chi3, chi4 or chi5")
        if is_zero(den):
            raise SingularError(f"{variant} step has a vanishing x_e3 coefficient")
        return num / den
    except ZeroDivisionError:
        raise SingularError(f"{variant} step divides by a non-invertible element")


def chi_residual(variant: str, x_pe1, x_me1, x_pe2, x_me2, x_pe3, x_me3):
    """Left-hand side minus right-hand side of a chi relation; 0 on solutions."""
    if variant == "chi3":
        return (
            (x_pe3 - x_me2) * x_me1 + (x_me2 - x_pe1) * x_me3 + (x_pe1 - x_pe3) * x_pe2
        )
    if variant == "chi4":
        return (x_pe3 - x_me2) / x_me1 + (x_me2 - x_pe1) / x_me3 + (x_pe1 - x_pe3) / x_pe2
    if variant == "chi5":
        return (x_pe3 - x_pe1) / x_pe2 - x_me2 * (1 / x_me3 - 1 / x_me1)
    raise ValueError(f"Unknown chi variant {variant!r}; use chi3, chi4 or chi5")


def step_function(recurrence: str) -> Callable[..., Any]:
    """The step solver of a named recurrence.

    Raises:
        ValueError: For an unknown recurrence name
    """
    if recurrence == "dskp":
        return dskp_step
    if recurrence == "dkp":
        return dkp_step
    if recurrence in ("chi3", "chi4", "chi5"):
        return lambda *xs: chi_step(recurrence, *xs)
    raise ValueError(f"Unknown recurrence {recurrence!r}; choose one of {', '.join(RECURRENCES)}")


def octahedron_inputs(p: Point) -> List[Point]:
    """The five points feeding x(p), in step-argument order."""
    i, j, k = p
    return [
        (i + 1, j, k - 1),
        (i - 1, j, k - 1),
        (i, j + 1, k - 1),
        (i, j - 1, k - 1),
        (i, j, k - 2),
    ]


@dataclass
class Solution:
    """Values of a recurrence above the initial surface of a window."""

    data: InitialData
    recurrence: str
    max_level: int
    values: Dict[Point, Any] = field(default_factory=dict)
    provenance: Dict[Point, str] = field(default_factory=dict)

    def _lookup(self, p: Point):
        if p in self.values:
            return self.values[p]
        i, j, k = p
        h = self.data.heights
        if h.contains(i, j) and k == h(i, j):
            return self.data.a[(i, j)]
        return None

    def value(self, i: int, j: int, k: int):
        """x(i, j, k), the initial weight on the surface, or SINGULAR.

        Raises:
            ValueError: If the point is off the lattice or below the initial surface
            WindowTooSmallError: If the point was not computable inside the window
        """
        LatticePoint.of(i, j, k)
        found = self._lookup((i, j, k))
        if found is not None:
            return found
        h = self.data.heights
        if h.contains(i, j) and k < h(i, j):
            raise ValueError(f"({i}, {j}, {k}) lies below the initial surface")
        raise WindowTooSmallError(
            f"({i}, {j}, {k}) needs initial data outside the window or above level {self.max_level}"
        )

    def is_singular(self, i: int, j: int, k: int) -> bool:
        return self.value(i, j, k) is SINGULAR

    def level(self, k: int) -> Dict[Face, Any]:
        """Computed values at level k (initial points at height k included)."""
        result = {}
        for (i, j), hv in self.data.heights.values.items():
            if hv == k:
                result[(i, j)] = self.data.a[(i, j)]
        for (i, j, kk), v in self.values.items():
            if kk == k:
                result[(i, j)] = v
        return result

    def to_dict(self, level: Optional[int] = None) -> Dict[str, Any]:
        """JSON-ready slice: every computed value, or one level only."""
        points = sorted(p for p in self.values if level is None or p[2] == level)
        return {
            "recurrence": self.recurrence,
            "max_level": self.max_level,
            "values": [
                {
                    "i": i,
                    "j": j,
                    "k": k,
                    "x": "singular"
                    if self.values[(i, j, k)] is SINGULAR
                    else format_value(self.values[(i, j, k)]),
                }
                for i, j, k in points
            ],
        }


def evolve(data: InitialData, recurrence: str = "dskp", target_level: int = 2) -> Solution:
    """Compute every value up to target_level that the window determines.

    Values are computed level by level; a point whose octahedron reaches outside the
    window is skipped and later reported by Solution.value as WindowTooSmallError. A
    singular step stores SINGULAR and every value depending on it is SINGULAR too.

    Args:
        data: Initial data on a finite window
        recurrence: One of dskp, dkp, chi3, chi4, chi5
        target_level: Highest level to compute

    Returns:
        Solution with values and provenance
    """
    step = step_function(recurrence)
    heights = data.heights
    solution = Solution(data=data, recurrence=recurrence, max_level=target_level)
    start = min(heights.values.values()) + 1
    singular_count = 0

    for k in range(start, target_level + 1):
        for i, j in heights.points():
            if (i + j + k) % 2 or k <= heights(i, j):
                continue
            inputs = [solution._lookup(q) for q in octahedron_inputs((i, j, k))]
            if any(v is None for v in inputs):
                continue
            if any(v is SINGULAR for v in inputs):
                solution.values[(i, j, k)] = SINGULAR
                singular_count += 1
            else:
                try:
                    solution.values[(i, j, k)] = step(*inputs)
                except SingularError as e:
                    logger.debug(f"Singular step at ({i}, {j}, {k}): {e}")
                    solution.values[(i, j, k)] = SINGULAR
                    singular_count += 1
            solution.provenance[(i, j, k)] = recurrence

    logger.debug(
        f"Evolved {recurrence} to level {target_level}: "
        f"{len(solution.values)} values, {singular_count} singular"
    )
    return solution
