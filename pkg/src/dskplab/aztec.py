"""Aztec diamond specialisations: (c, d) weights, permutation forests and Devron data.

Faces of the Aztec quadrangulation of size k are indexed by (U, V) in [0, 2k]²:
c_{i,j} is the face (2i, 2j) and d_{i,j} the face (2i+1, 2j+1), with i the column
counted from the left and j the row counted from the bottom.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from sympy.combinatorics import Permutation
from sympy.core.intfunc import igcdex

from dskplab.config import config
from dskplab.dimer import ratio_function_Y, z_det
from dskplab.errors import SingularError, SizeGuardError
from dskplab.forests import Face, Quadrangulation, quadrangulate_aztec
from dskplab.lattice import SINGULAR, InitialData, aztec_heights, evolve
from dskplab.projective import format_value, random_rational
from dskplab.utils.linalg import determinant, inverse_matrix, nullspace

logger = logging.getLogger(__name__)

DEVRON_KINDS = ("dodgson", "devron", "two_periodic")


@dataclass
class AztecWeights:
    """Face weights of A_k: c is (k+1)×(k+1), d is k×k, both indexed [column][row]."""

    k: int
    c: List[List[Any]]
    d: List[List[Any]]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"Aztec diamond size must be >= 1, got {self.k}")
        if len(self.c) != self.k + 1 or any(len(col) != self.k + 1 for col in self.c):
            raise ValueError(f"c must be a {self.k + 1}x{self.k + 1} matrix")
        if len(self.d) != self.k or any(len(col) != self.k for col in self.d):
            raise ValueError(f"d must be a {self.k}x{self.k} matrix")

    @classmethod
    def from_face_weights(cls, k: int, weights: Mapping[Face, Any]) -> "AztecWeights":
        c = [[weights[(2 * i, 2 * j)] for j in range(k + 1)] for i in range(k + 1)]
        d = [[weights[(2 * i + 1, 2 * j + 1)] for j in range(k)] for i in range(k)]
        return cls(k, c, d)

    @classmethod
    def from_initial_data(cls, data: InitialData, k: int) -> "AztecWeights":
        """Weights of the diamond whose ratio function is x at its apex.

        The apex is (0, 0, k+1) for odd k and (1, 0, k+1) for even k; the initial point
        at offset (di, dj) from it becomes the face (k + dj - di, k + di + dj).

        Raises:
            WindowTooSmallError: If the diamond leaves the window
        """
        i0 = 0 if k % 2 else 1
        weights = {}
        for di in range(-k, k + 1):
            for dj in range(-k + abs(di), k - abs(di) + 1):
                weights[(k + dj - di, k + di + dj)] = data.weight(i0 + di, dj)
        return cls.from_face_weights(k, weights)

    @classmethod
    def random(
        cls,
        k: int,
        rng: random.Random,
        constant_columns: bool = False,
        constant_d: bool = False,
    ) -> "AztecWeights":
        """Generic rational weights, all distinct, optionally with degenerate d."""
        n_d = 1 if constant_d else (k if constant_columns else k * k)
        values = distinct_rationals(rng, (k + 1) ** 2 + n_d)
        c = [values[i * (k + 1) : (i + 1) * (k + 1)] for i in range(k + 1)]
        extra = values[(k + 1) ** 2 :]
        if constant_d:
            d = [[extra[0]] * k for _ in range(k)]
        elif constant_columns:
            d = [[extra[i]] * k for i in range(k)]
        else:
            d = [extra[i * k : (i + 1) * k] for i in range(k)]
        return cls(k, c, d)

    def face_weights(self) -> Dict[Face, Any]:
        weights = {}
        for i in range(self.k + 1):
            for j in range(self.k + 1):
                weights[(2 * i, 2 * j)] = self.c[i][j]
        for i in range(self.k):
            for j in range(self.k):
                weights[(2 * i + 1, 2 * j + 1)] = self.d[i][j]
        return weights

    def quadrangulation(self) -> Quadrangulation:
        return quadrangulate_aztec(self.k, self.face_weights())

    def has_constant_columns(self) -> bool:
        return all(len(set(col)) <= 1 for col in self.d)

    def column_constants(self) -> List[Any]:
        """d_0..d_{k-1} for constant columns.

        Raises:
            ValueError: If some d column is not constant
        """
        if not self.has_constant_columns():
            raise ValueError("Weights need constant d columns (d_{i,j} = d_i)")
        return [col[0] for col in self.d]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "c": [[format_value(x) for x in col] for col in self.c],
            "d": [[format_value(x) for x in col] for col in self.d],
        }


def distinct_rationals(
    rng: random.Random, count: int, avoid=(), bound: int = 20
) -> List[Any]:
    """count pairwise distinct random rationals, none of them in avoid."""
    values: List[Any] = []
    seen = set(avoid)
    while len(values) < count:
        x = random_rational(rng, bound)
        if x not in seen:
            seen.add(x)
            values.append(x)
    return values


def z_value(w: AztecWeights):
    """Z(A_k, a) up to the orientation sign, as det K."""
    q = w.quadrangulation()
    return z_det(q.dimer_graph(), q.weights)


def y_value(w: AztecWeights, rng: Optional[random.Random] = None):
    """Y(A_k, a) from Kasteleyn determinants."""
    q = w.quadrangulation()
    return ratio_function_Y(q.dimer_graph(), q.weights, rng=rng)


# Permutation spanning forests


def z_perm_forest(w: AztecWeights):
    """Z(A_k, a) up to sign for constant d columns, summed over permutation forests.

    A permutation τ of the rows removes the horizontal edge c_{τ(j),j} of every row j.
    Edges left of the removed one point towards b_r and contribute c_{i,j} - d_i, edges
    right of it point to the extra black vertex and contribute c_{i,j} - d_{i-1}.

    Raises:
        ValueError: If some d column is not constant
        SizeGuardError: If k + 1 exceeds the permutation guard
    """
    d = w.column_constants()
    n = w.k + 1
    if n > config.max_permutation_size:
        raise SizeGuardError("Permutation forest sum", n, config.max_permutation_size)
    total = 0
    for tau in itertools.permutations(range(n)):
        term = Permutation(list(tau)).signature()
        for j in range(n):
            for i in range(n):
                if i < tau[j]:
                    term = term * (w.c[i][j] - d[i])
                elif i > tau[j]:
                    term = term * (w.c[i][j] - d[i - 1])
        total = total + term
    return total


def vertical_shift(w: AztecWeights) -> AztecWeights:
    """Cyclic shift of the c rows by one: c~_{i,j} = c_{i,j+1 mod k+1}.

    Raises:
        ValueError: If some d column is not constant
    """
    w.column_constants()
    c = [col[1:] + col[:1] for col in w.c]
    return AztecWeights(w.k, c, [list(col) for col in w.d])


@dataclass
class ShiftCheck:
    """Partition functions and ratio functions before and after a column shift."""

    z: Any
    z_shifted: Any
    expected_sign: Optional[int]
    y: Any
    y_shifted: Any

    @property
    def z_holds(self) -> bool:
        if self.expected_sign is None:
            return self.z_shifted in (self.z, -self.z)
        return self.z_shifted == self.expected_sign * self.z

    @property
    def y_holds(self) -> bool:
        return self.y == self.y_shifted

    def to_dict(self) -> Dict[str, Any]:
        return {
            "Z": format_value(self.z),
            "Z_shifted": format_value(self.z_shifted),
            "expected_sign": self.expected_sign,
            "Z_invariant": self.z_holds,
            "Y": format_value(self.y),
            "Y_shifted": format_value(self.y_shifted),
            "Y_invariant": self.y_holds,
        }


def vertical_shift_check(w: AztecWeights) -> ShiftCheck:
    """Compare Z and Y before and after the vertical shift; Z changes by (-1)^k."""
    shifted = vertical_shift(w)
    return ShiftCheck(
        z=z_value(w),
        z_shifted=z_value(shifted),
        expected_sign=(-1) ** w.k,
        y=y_value(w),
        y_shifted=y_value(shifted),
    )


# Schwarzian Dodgson condensation


def dodgson_matrix(c: List[List[Any]], d) -> List[List[Any]]:
    """N_{i,j} = 1 / (c_{i,j} - d).

    Raises:
        SingularError: If some c_{i,j} equals d
    """
    rows = []
    for row in c:
        if any(x == d for x in row):
            raise SingularError("Dodgson data needs every c_{i,j} different from d")
        rows.append([1 / (x - d) for x in row])
    return rows


def inverse_entry_sum(matrix) -> Any:
    """Sum of all entries of the inverse matrix.

    Raises:
        SingularError: If the matrix is not invertible
    """
    inverse = inverse_matrix(matrix)
    total = 0
    for row in inverse:
        for x in row:
            total = total + x
    return total


def constant_row_sum(matrix) -> Optional[Any]:
    """The common row sum, or None when rows sum differently."""
    sums = {sum(row[1:], row[0]) for row in matrix}
    return sums.pop() if len(sums) == 1 else None


def cyclic_row_shift(matrix, steps: int = 1) -> List[List[Any]]:
    rows = [list(r) for r in matrix]
    steps %= len(rows)
    return rows[steps:] + rows[:steps]


@dataclass
class DodgsonResult:
    """Closed forms for constant d: Z up to sign and the ratio function."""

    z: Any
    y: Any


def dodgson(w: AztecWeights) -> DodgsonResult:
    """Z = ±∏(c_{i,j} - d)·det N and Y = d + Σ(N^-1) for weights with a single d.

    Raises:
        ValueError: If the d weights are not all equal
        SingularError: If some c equals d or N is singular
    """
    d_values = {x for col in w.d for x in col}
    if len(d_values) != 1:
        raise ValueError("Dodgson weights need every d_{i,j} equal")
    (d,) = d_values
    n_matrix = dodgson_matrix(w.c, d)
    product = 1
    for col in w.c:
        for x in col:
            product = product * (x - d)
    return DodgsonResult(z=product * determinant(n_matrix), y=d + inverse_entry_sum(n_matrix))


def dodgson_lattice_value(a: Mapping[Face, Any], d, i: int, j: int, k: int):
    """x(i, j, k) for data whose even layer is constant d.

    Uses the k×k matrix N_{i',j'} = 1 / (a_{i-i'+j', j+k-1-i'-j'} - d).

    Raises:
        SingularError: If N is not defined or singular
    """
    rows = []
    for ii in range(k):
        row = []
        for jj in range(k):
            x = a[(i - ii + jj, j + k - 1 - ii - jj)]
            if x == d:
                raise SingularError(f"Initial weight equals the even-layer constant {d}")
            row.append(1 / (x - d))
        rows.append(row)
    return d + inverse_entry_sum(rows)


def harmonic_mean_value(values: List[Any], d):
    """d + (mean of 1 / (v - d))^-1."""
    total = 0
    for v in values:
        total = total + 1 / (v - d)
    return d + len(values) / total


# C-matrix formulas for the ratio function


def _extra_column(q: Quadrangulation) -> int:
    extra = [b for b in q.black_tilde if b not in set(q.black)]
    if len(extra) != 1:
        raise ValueError("Ratio formulas need exactly one extra black vertex")
    return q.black_tilde.index(extra[0])


def y_via_Cinverse(w: AztecWeights):
    """Y = Σ_f a_f C(1)_{f,b~} (C^-1)_{b~,f} with C = (C(1)^B̃ | C(a)^B).

    Only the right column faces c_{k,j} touch the extra black vertex b~.

    Raises:
        SingularError: If det C = 0
    """
    q = w.quadrangulation()
    col = _extra_column(q)
    faces = q.face_list()
    inverse = inverse_matrix(q.block_matrix())
    extra = q.black_tilde[col]
    total = 0
    for n, f in enumerate(faces):
        sign = q.c_sign(f, extra)
        if sign:
            total = total + q.weights[f] * sign * inverse[col, n]
    return total


def kernel_formula_Y(w: AztecWeights):
    """Y from a kernel vector v of D^T, D being C without its b~ column.

    Y = Σ a_f C(1)_{f,b~} v_f / Σ C(1)_{f,b~} v_f, over the first basis vector of the
    kernel whose denominator does not vanish.

    Raises:
        SingularError: If every kernel vector has a vanishing denominator
    """
    q = w.quadrangulation()
    col = _extra_column(q)
    extra = q.black_tilde[col]
    faces = q.face_list()
    block = q.block_matrix()
    transposed = [
        [row[c] for row in block] for c in range(len(block[0])) if c != col
    ]
    basis = nullspace(transposed)
    logger.debug(f"ker D^T has dimension {len(basis)} for k={w.k}")
    for v in basis:
        num, den = 0, 0
        for n, f in enumerate(faces):
            sign = q.c_sign(f, extra)
            if sign:
                num = num + q.weights[f] * sign * v[n]
                den = den + sign * v[n]
        if den != 0:
            return num / den
    raise SingularError("Every kernel vector of D^T has a vanishing right-column sum")


# Periodic columns


def periodic_weights(
    m: int, p: int, rng: random.Random
) -> Tuple[AztecWeights, AztecWeights]:
    """(0, m)-periodic weights with every p-th d column constant, and their row shift.

    The diamond has size k = mp - 2p + 1.

    Raises:
        ValueError: If m < 2, p < 1 or k < 1
    """
    if m < 2 or p < 1:
        raise ValueError(f"Periodic columns need m >= 2 and p >= 1, got m={m}, p={p}")
    k = m * p - 2 * p + 1
    if k < 1:
        raise ValueError(f"k = mp - 2p + 1 = {k} must be >= 1")
    constant_cols = [i for i in range(k) if i % p == 0]
    generic_cols = [i for i in range(k) if i % p]
    values = distinct_rationals(
        rng, (k + 1) * m + len(constant_cols) + len(generic_cols) * m
    )
    it = iter(values)
    c_base = [[next(it) for _ in range(m)] for _ in range(k + 1)]
    d_base: Dict[int, List[Any]] = {}
    for i in range(k):
        if i % p == 0:
            d_base[i] = [next(it)] * m
        else:
            d_base[i] = [next(it) for _ in range(m)]

    def build(offset: int) -> AztecWeights:
        c = [[c_base[i][(j + offset) % m] for j in range(k + 1)] for i in range(k + 1)]
        d = [[d_base[i][(j + offset) % m] for j in range(k)] for i in range(k)]
        return AztecWeights(k, c, d)

    return build(0), build(1)


def periodic_columns_check(m: int, p: int, seed: int = 1) -> ShiftCheck:
    """Y is invariant under the periodic row shift; Z is recorded for comparison.

    For p = 1 the shift is the full vertical shift and Z changes by (-1)^k; for p > 1
    no relation is expected and z_holds only reports whether Z(ã) = ±Z(a) happened.
    """
    rng = random.Random(seed)
    w, shifted = periodic_weights(m, p, rng)
    expected = (-1) ** w.k if p == 1 else None
    check = ShiftCheck(
        z=z_value(w),
        z_shifted=z_value(shifted),
        expected_sign=expected,
        y=y_value(w),
        y_shifted=y_value(shifted),
    )
    logger.info(f"Periodic columns m={m} p={p} k={w.k}: Y invariant={check.y_holds}")
    return check


# Devron experiments


def _hermite_basis(s: int, t: int, u: int, v: int) -> Tuple[int, int, int]:
    """(h11, h12, h22) with Z(s,t) + Z(u,v) = Z(h11, h12) + Z(0, h22).

    Raises:
        ValueError: If the vectors are collinear
    """
    if s * v - t * u == 0:
        raise ValueError(f"Periods ({s},{t}) and ({u},{v}) are collinear")
    x, y, g1 = igcdex(s, u)
    h12 = x * t + y * v
    h22 = abs((u * t - s * v) // g1)
    return int(g1), int(h12 % h22), int(h22)


def _lattice_class(point: Tuple[int, int], basis: Tuple[int, int, int]) -> Tuple[int, int]:
    h11, h12, h22 = basis
    x, y = point
    steps = x // h11
    return x - steps * h11, (y - steps * h12) % h22


@dataclass
class DevronReport:
    """Outcome of a singular-data experiment."""

    kind: str
    parameters: Dict[str, Any]
    predicted_level: int
    observed_level: Optional[int]
    holds: bool
    sharp: bool
    final_values: List[Any] = field(default_factory=list)
    closed_form: Any = None
    warnings: List[str] = field(default_factory=list)

    @property
    def closed_form_matches(self) -> Optional[bool]:
        if self.closed_form is None:
            return None
        return all(x == self.closed_form for x in self.final_values)

    @property
    def passed(self) -> bool:
        return self.holds and self.closed_form_matches is not False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "parameters": self.parameters,
            "predicted_level": self.predicted_level,
            "observed_level": self.observed_level,
            "holds": self.holds,
            "sharp": self.sharp,
            "final_values": [format_value(x) for x in self.final_values],
            "closed_form": None if self.closed_form is None else format_value(self.closed_form),
            "closed_form_matches": self.closed_form_matches,
            "warnings": self.warnings,
        }


def dodgson_data(
    m: int, radius: int, rng: random.Random, harmonic_shift: Optional[int] = None
) -> Tuple[InitialData, Any, List[Any]]:
    """m-Dodgson data: constant even layer d, odd layer periodic under (m, ±m).

    With harmonic_shift = p, the odd layer is also invariant under (p+1, 1-p) and takes
    the m values a_{i,1-i}, i = 0..m-1.

    Returns:
        (initial data, d, the distinct odd-layer values)
    """
    if m < 2:
        raise ValueError(f"Dodgson data needs m >= 2, got {m}")
    if harmonic_shift is not None and harmonic_shift % m == 0:
        raise ValueError(f"The harmonic shift {harmonic_shift} must not be a multiple of m")
    count = m if harmonic_shift is not None else m * m
    values = distinct_rationals(rng, count + 1)
    d, odd = values[0], values[1:]

    def weight(i: int, j: int, k: int):
        if (i + j) % 2 == 0:
            return d
        s, t = i + j, i - j
        if harmonic_shift is not None:
            return odd[((t - harmonic_shift * (s - 1) + 1) // 2) % m]
        return odd[((s % (2 * m)) // 2) * m + (t % (2 * m)) // 2]

    heights = aztec_heights(radius)
    return InitialData.from_function(heights, weight), d, odd


def devron_data(m: int, p: int, radius: int, rng: random.Random) -> InitialData:
    """(m, p)-Devron data: periodic under (m, m), constant on diagonals i - j ∈ 2pZ."""
    if m < 2 or p < 1:
        raise ValueError(f"Devron data needs m >= 2 and p >= 1, got m={m}, p={p}")
    cache: Dict[Any, Any] = {}
    used: set = set()

    def draw(key):
        if key not in cache:
            cache[key] = distinct_rationals(rng, 1, used)[0]
            used.add(cache[key])
        return cache[key]

    def weight(i: int, j: int, k: int):
        if (i - j) % (2 * p) == 0:
            return draw(("diagonal", i - j))
        return draw(("class", i - j, (i + j) % (2 * m)))

    return InitialData.from_function(aztec_heights(radius), weight)


def two_periodic_data(
    s: int, t: int, u: int, v: int, mode: str, radius: int, rng: random.Random
) -> InitialData:
    """Data periodic under (s, t) and (u, v).

    mode "even_constant": the even layer is also invariant under (1, 1).
    mode "diagonal": the main diagonal a_{i,i} is constant.
    """
    if (s + t) % 2 or (u + v) % 2:
        raise ValueError("Periods must join points of the same parity")
    basis = _hermite_basis(s, t, u, v)
    g = gcd(s - t, u - v)
    cache: Dict[Any, Any] = {}
    used: set = set()

    def draw(key):
        if key not in cache:
            cache[key] = distinct_rationals(rng, 1, used)[0]
            used.add(cache[key])
        return cache[key]

    def weight(i: int, j: int, k: int):
        if mode == "even_constant":
            if (i + j) % 2 == 0:
                return draw(("diagonal", (i - j) % g))
            return draw(("class", _lattice_class((i, j), basis)))
        if mode == "diagonal":
            if (i - j) % g == 0:
                return draw(("diagonal",))
            return draw(("class", _lattice_class((i, j), basis)))
        raise ValueError(f"Unknown two-periodic mode {mode!r}; use even_constant or diagonal")

    return InitialData.from_function(aztec_heights(radius), weight)


def _level_constant(level: Mapping[Face, Any]) -> bool:
    return len(level) > 0 and len({repr(v) for v in level.values()}) == 1


def _diagonal_pairs(level: Mapping[Face, Any], select: Callable[[int, int], bool]):
    for (i, j), x in level.items():
        if select(i, j) and (i + 1, j + 1) in level:
            yield x, level[(i + 1, j + 1)]


def _columns_constant(level: Mapping[Face, Any], select: Callable[[int, int], bool]) -> bool:
    pairs = list(_diagonal_pairs(level, select))
    return bool(pairs) and all(x == y for x, y in pairs)


def _any_columns_constant(level: Mapping[Face, Any], period: int) -> bool:
    return any(
        _columns_constant(level, lambda i, j, r=r: (i - j - r) % period == 0)
        for r in range(period)
    )


def devron_experiment(
    kind: str,
    m: int = 2,
    p: int = 1,
    periods: Tuple[int, int, int, int] = (2, 0, 0, 2),
    mode: str = "even_constant",
    harmonic_shift: Optional[int] = None,
    seed: int = 1,
) -> DevronReport:
    """Evolve singular initial data and check where the degeneracy reappears.

    Args:
        kind: "dodgson", "devron" or "two_periodic"
        m: Period of Dodgson/Devron data
        p: Spacing of the constant diagonals of Devron data
        periods: (s, t, u, v) for two_periodic data
        mode: "even_constant" or "diagonal" for two_periodic data
        harmonic_shift: Extra symmetry of Dodgson data giving the harmonic mean value
        seed: Random seed of the generic values

    Returns:
        DevronReport; sharpness (no earlier degenerate level) is an empirical observation
    """
    if kind not in DEVRON_KINDS:
        raise ValueError(f"Unknown kind {kind!r}; use one of {', '.join(DEVRON_KINDS)}")
    rng = random.Random(seed)
    closed_form = None
    final_values: List[Any] = []

    if kind == "dodgson":
        level = m
        radius = level + 2 * m + 1
        data, d, odd = dodgson_data(m, radius, rng, harmonic_shift)
        parameters = {"m": m, "harmonic_shift": harmonic_shift}
        period = None
    elif kind == "devron":
        level = (m - 2) * p + 2
        radius = level + 2 * m + 2 * p + 1
        data = devron_data(m, p, radius, rng)
        parameters = {"m": m, "p": p}
        period, residue = 2 * p, m * p
    else:
        s, t, u, v = periods
        area = abs(s * v - t * u)
        g = gcd(s - t, u - v)
        if mode == "even_constant":
            level, period, residue = area // g, 1, 0
        else:
            level, period, residue = area // 2 - g + 2, g // 2, area // 2
        span = max(abs(s), abs(t), abs(u), abs(v))
        radius = level + 2 * span + 1
        data = two_periodic_data(s, t, u, v, mode, radius, rng)
        parameters = {"periods": [s, t, u, v], "mode": mode, "g": g, "area": area}

    if level < 2:
        raise ValueError(f"Predicted level {level} is not above the initial layers")
    solution = evolve(data, "dskp", level)
    warnings: List[str] = []
    for k in range(2, level + 1):
        if any(x is SINGULAR for x in solution.level(k).values()):
            warnings.append(f"Singular values appear at level {k}, before the prediction")

    def degenerate(k: int, exact: bool) -> bool:
        values = solution.level(k)
        if kind == "dodgson":
            return _level_constant(values)
        if exact:
            return _columns_constant(values, lambda i, j: (i - j - residue) % period == 0)
        return _any_columns_constant(values, period)

    holds = degenerate(level, exact=True)
    observed = next((k for k in range(2, level + 1) if degenerate(k, exact=False)), None)
    sharp = observed == level

    if kind == "dodgson":
        i0 = level % 2
        final_values = sorted({v for v in solution.level(level).values()}, key=repr)
        if harmonic_shift is not None:
            closed_form = harmonic_mean_value(odd, d)
        else:
            closed_form = dodgson_lattice_value(data.a, d, i0, 0, level)

    report = DevronReport(
        kind=kind,
        parameters=parameters,
        predicted_level=level,
        observed_level=observed,
        holds=holds,
        sharp=sharp,
        final_values=final_values,
        closed_form=closed_form,
        warnings=warnings,
    )
    logger.info(
        f"Devron experiment {kind} {parameters}: level {level} holds={holds} sharp={sharp}"
    )
    return report
