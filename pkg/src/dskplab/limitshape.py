"""Sensitivity of dSKP solutions to the initial value at the origin.

rho(i, j, k) is the derivative of x(i, j, k) with respect to a_{0,0} for the Aztec height
function [i + j]_2, taken at the linear solution. It satisfies the linear recurrence

    rho(p + e3) + rho(p - e3) = q (rho(p + e1) + rho(p - e1)) + (1 - q) (rho(p + e2) + rho(p - e2))

and has the closed form rho = -(1 - q)^(k-2) C_q(A, B, k-2) C_q(B, A, k-2). The float
routines renormalise each level and carry the scale in log form, so levels far beyond
the float range still give log-rates.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from dskplab.dual import Dual
from dskplab.errors import SingularError
from dskplab.lattice import (
    SINGULAR,
    InitialData,
    LatticePoint,
    Point,
    aztec_heights,
    evolve,
    linear_solution,
    multiplicative_solution,
)
from dskplab.poly import MultiPoly

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ["x", "y", "rho", "k_rho", "log_rate"]
SCAN_MODES = ("float", "exact")

# Largest level accepted by the exact scan
EXACT_SCAN_MAX_LEVEL = 30


def q_linear(a, b, c) -> Fraction:
    """q = (c² - b²) / (a² - b²) for the linear solution ia + jb + kc + d.

    Raises:
        ValueError: If a² = b²
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a * a == b * b:
        raise ValueError("q is undefined when a² = b²")
    return (c * c - b * b) / (a * a - b * b)


def q_multiplicative(a, b, c) -> Fraction:
    """q = a(c - b)(bc - 1) / (c(a - b)(ab - 1)) for the solution a^i b^j c^k d.

    For this solution the sensitivity is relative: (dx / da_00) * a_00 / x.

    Raises:
        ValueError: If the denominator vanishes
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    den = c * (a - b) * (a * b - 1)
    if den == 0:
        raise ValueError("q is undefined when c(a - b)(ab - 1) = 0")
    return a * (c - b) * (b * c - 1) / den


def cq_coefficient(q, A: int, B: int, n: int) -> Fraction:
    """Coefficient of z^A in (1 - z)^B (1 + q/(1 - q) z)^(n - B).

    Raises:
        ValueError: If q = 1 or A, B fall outside [0, n]
    """
    q = Fraction(q)
    if q == 1:
        raise ValueError("C_q needs q != 1")
    if not (0 <= A <= n and 0 <= B <= n):
        raise ValueError(f"C_q({A}, {B}, {n}) needs 0 <= A, B <= n")
    r = q / (1 - q)
    total = Fraction(0)
    for s in range(A + 1):
        total += (-1) ** s * math.comb(B, s) * math.comb(n - B, A - s) * r ** (A - s)
    return total


def rho_exact(i: int, j: int, k: int, q) -> Fraction:
    """Exact rho(i, j, k); zero outside the light cone |i| + |j| <= k.

    Raises:
        ValueError: If (i, j, k) is off the lattice or k < 0
    """
    LatticePoint.of(i, j, k)
    if k < 0:
        raise ValueError(f"rho is defined for k >= 0, got {k}")
    q = Fraction(q)
    if k == 0:
        return Fraction(1) if (i, j) == (0, 0) else Fraction(0)
    if k == 1:
        return Fraction(0)
    n = k - 2
    A, B = (n - i - j) // 2, (n + i - j) // 2
    if not (0 <= A <= n and 0 <= B <= n):
        return Fraction(0)
    return -((1 - q) ** n) * cq_coefficient(q, A, B, n) * cq_coefficient(q, B, A, n)


@dataclass
class RhoGrid:
    """One level of rho on the diamond |i| + |j| <= level; zero elsewhere."""

    level: int
    values: Dict[Tuple[int, int], Any]

    def value(self, i: int, j: int):
        return self.values.get((i, j), 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "values": [
                {"i": i, "j": j, "rho": str(v)} for (i, j), v in sorted(self.values.items())
            ],
        }


def _diamond(level: int) -> Iterable[Tuple[int, int]]:
    for i in range(-level, level + 1):
        for j in range(-level + abs(i), level - abs(i) + 1):
            if (i + j + level) % 2 == 0:
                yield i, j


def rho_grid(q, level: int) -> RhoGrid:
    """Level of rho from the closed form."""
    return RhoGrid(level, {(i, j): rho_exact(i, j, level, q) for i, j in _diamond(level)})


def rho_ladder(q, max_level: int) -> List[RhoGrid]:
    """Levels 0..max_level of rho from the closed form."""
    return [rho_grid(q, level) for level in range(max_level + 1)]


def rho_recurrence_levels(q, max_level: int) -> List[RhoGrid]:
    """Levels 0..max_level of rho by running the linear recurrence exactly."""
    q = Fraction(q)
    grids = [RhoGrid(0, {(0, 0): Fraction(1)})]
    if max_level >= 1:
        grids.append(RhoGrid(1, {p: Fraction(0) for p in _diamond(1)}))
    for level in range(2, max_level + 1):
        cur, prev = grids[level - 1], grids[level - 2]
        values = {}
        for i, j in _diamond(level):
            values[(i, j)] = (
                q * (cur.value(i + 1, j) + cur.value(i - 1, j))
                + (1 - q) * (cur.value(i, j + 1) + cur.value(i, j - 1))
                - prev.value(i, j)
            )
        grids.append(RhoGrid(level, values))
    return grids


@dataclass
class RecurrenceCheck:
    """Outcome of checking the rho recurrence on a ladder of levels."""

    q: Any
    levels: Tuple[int, int]
    checked: int = 0
    violations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": str(self.q),
            "levels": list(self.levels),
            "checked": self.checked,
            "passed": self.passed,
            "violations": self.violations,
        }


def rho_recurrence_check(grids: List[RhoGrid], q) -> RecurrenceCheck:
    """Check the linear recurrence at every point of every level but the first two.

    Args:
        grids: Consecutive levels, lowest first
        q: Parameter of the recurrence

    Raises:
        ValueError: If the levels are not consecutive
    """
    if any(b.level != a.level + 1 for a, b in zip(grids, grids[1:])):
        raise ValueError("Ladder levels must be consecutive")
    q = Fraction(q)
    check = RecurrenceCheck(q, (grids[0].level, grids[-1].level) if grids else (0, 0))
    for prev, cur, nxt in zip(grids, grids[1:], grids[2:]):
        for (i, j), value in nxt.values.items():
            expected = (
                q * (cur.value(i + 1, j) + cur.value(i - 1, j))
                + (1 - q) * (cur.value(i, j + 1) + cur.value(i, j - 1))
                - prev.value(i, j)
            )
            check.checked += 1
            if value != expected:
                check.violations.append(
                    {"i": i, "j": j, "k": nxt.level, "rho": str(value), "expected": str(expected)}
                )
    logger.debug(f"Checked the rho recurrence at {check.checked} points")
    return check


def rho_generating_coefficients(q, max_degree: int) -> Dict[Point, Fraction]:
    """Coefficients of 1 - t²/(1 + t² - t L), L = q(u + 1/u) + (1 - q)(v + 1/v).

    The t^k coefficient G_k obeys G_k = L G_{k-1} - G_{k-2} with G_0 = 1, G_1 = 0.

    Returns:
        Nonzero coefficients keyed by (i, j, k) for the monomial u^i v^j t^k
    """
    q = Fraction(q)
    L = q * (MultiPoly.variable("u") + MultiPoly.variable("u", -1)) + (1 - q) * (
        MultiPoly.variable("v") + MultiPoly.variable("v", -1)
    )
    series = [MultiPoly.constant(1), MultiPoly()]
    for _ in range(2, max_degree + 1):
        series.append(L * series[-1] - series[-2])

    coefficients: Dict[Point, Fraction] = {}
    for k, poly in enumerate(series[: max_degree + 1]):
        for mono, coeff in poly.terms.items():
            exps = dict(mono)
            coefficients[(exps.get("u", 0), exps.get("v", 0), k)] = coeff
    return coefficients


def rho_finite_difference(
    a, b, c, d=0, max_level: int = 8, multiplicative: bool = False
) -> Dict[Point, Fraction]:
    """Exact derivative of evolve(dSKP) in a_{0,0}, through dual numbers.

    Args:
        a, b, c, d: Parameters of the linear (or multiplicative) solution
        max_level: Highest level to differentiate
        multiplicative: Seed with a^i b^j c^k d and return relative derivatives

    Returns:
        rho at every point computed above the initial surface

    Raises:
        SingularError: If a dSKP step of the perturbed evolution is singular
    """
    a, b, c, d = (Fraction(x) for x in (a, b, c, d))
    func = multiplicative_solution(a, b, c, d) if multiplicative else linear_solution(a, b, c, d)
    heights = aztec_heights(2 * max_level)
    data = InitialData.from_function(heights, func)
    a00 = data.a[(0, 0)]
    data.a[(0, 0)] = Dual(a00, a00 if multiplicative else 1)
    solution = evolve(data, "dskp", max_level)

    rho: Dict[Point, Fraction] = {}
    for p, value in solution.values.items():
        if value is SINGULAR:
            raise SingularError(f"Perturbed evolution is singular at {p}")
        if isinstance(value, Dual):
            derivative, base = value.b, value.a
        else:
            derivative, base = Fraction(0), value
        rho[p] = derivative / base if multiplicative else derivative
    logger.debug(f"Differentiated {len(rho)} values up to level {max_level}")
    return rho


@dataclass
class FloatLevel:
    """Float level of rho: true values are values * exp(log_scale)."""

    k: int
    q: float
    values: np.ndarray
    log_scale: float = 0.0

    def index(self, i: int, j: int) -> Tuple[int, int]:
        centre = self.values.shape[0] // 2
        return i + centre, j + centre

    def contains(self, i: int, j: int) -> bool:
        return abs(i) + abs(j) <= self.k

    def log_abs(self, i: int, j: int) -> float:
        """log |rho(i, j, k)|; -inf where rho vanishes."""
        if not self.contains(i, j):
            return -math.inf
        v = self.values[self.index(i, j)]
        return math.log(abs(v)) + self.log_scale if v else -math.inf

    def rho(self, i: int, j: int) -> float:
        if not self.contains(i, j):
            return 0.0
        v = self.values[self.index(i, j)]
        if not v:
            return 0.0
        with np.errstate(over="ignore"):
            return float(np.sign(v) * np.exp(np.log(abs(v)) + self.log_scale))

    def scaled(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.values * np.exp(self.log_scale)


def rho_float_level(q, k: int, renormalize: bool = True) -> FloatLevel:
    """Level k of rho in floating point.

    Each step divides the two live levels by their largest magnitude and adds its log to
    the scale, so growth or decay never overflows.

    Raises:
        ValueError: If k < 0
    """
    if k < 0:
        raise ValueError(f"Level must be >= 0, got {k}")
    qf = float(q)
    size = 2 * k + 3
    centre = k + 1
    prev = np.zeros((size, size))
    cur = np.zeros((size, size))
    prev[centre, centre] = 1.0
    log_scale = 0.0
    if k == 0:
        return FloatLevel(k, qf, prev[1:-1, 1:-1].copy(), 0.0)

    for _ in range(1, k):
        nxt = np.zeros_like(cur)
        nxt[1:-1, 1:-1] = (
            qf * (cur[2:, 1:-1] + cur[:-2, 1:-1])
            + (1 - qf) * (cur[1:-1, 2:] + cur[1:-1, :-2])
            - prev[1:-1, 1:-1]
        )
        prev, cur = cur, nxt
        if renormalize:
            scale = max(np.abs(cur).max(), np.abs(prev).max())
            if scale > 0:
                cur /= scale
                prev /= scale
                log_scale += math.log(scale)
    return FloatLevel(k, qf, cur[1:-1, 1:-1].copy(), log_scale)


def lyapunov_rate(q) -> float:
    """Growth rate 2 log(sqrt(q) + sqrt(q - 1)) of rho(0, 0, k) for q > 1.

    Raises:
        ValueError: If q <= 1
    """
    qf = float(q)
    if qf <= 1:
        raise ValueError(f"The growth rate at the origin needs q > 1, got {q}")
    return 2 * math.log(math.sqrt(qf) + math.sqrt(qf - 1))


def envelope_bound(q) -> float:
    """2 / (pi sqrt(q(1 - q))), the bound on |k rho(0, 0, k)| for 0 < q < 1.

    Raises:
        ValueError: If q is not in (0, 1)
    """
    qf = float(q)
    if not 0 < qf < 1:
        raise ValueError(f"The oscillating regime needs 0 < q < 1, got {q}")
    return 2 / (math.pi * math.sqrt(qf * (1 - qf)))


def arctic_ellipse_inside(q, x: float, y: float) -> bool:
    """True strictly inside x²/(1 - q) + y²/q = 1.

    Raises:
        ValueError: If q is not in (0, 1)
    """
    qf = float(q)
    if not 0 < qf < 1:
        raise ValueError(f"The arctic ellipse exists for 0 < q < 1, got {q}")
    return x * x / (1 - qf) + y * y / qf < 1


def _snap(x: float, y: float, k: int) -> Tuple[int, int]:
    """Nearest lattice point (i, j) to (xk, yk) with i + j + k even."""
    i, j = round(x * k), round(y * k)
    if (i + j + k) % 2:
        i += 1 if x * k > i else -1
    return i, j


def _exact_log_abs(value: Fraction) -> float:
    if not value:
        return -math.inf
    return math.log(abs(value.numerator)) - math.log(value.denominator)


def scan_grid(shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    """Evenly spaced x and y values in [-1, 1] for an nx-by-ny scan."""
    nx, ny = shape
    if nx < 1 or ny < 1:
        raise ValueError(f"Grid shape must be positive, got {nx}x{ny}")
    return np.linspace(-1.0, 1.0, nx), np.linspace(-1.0, 1.0, ny)


def parse_grid(text: str) -> Tuple[int, int]:
    """Parse "NXxNY" (e.g. "101x101").

    Raises:
        ValueError: If the text is malformed
    """
    try:
        nx, ny = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"Grid must look like 101x101, got {text!r}")
    return nx, ny


def asymptotic_scan(
    q,
    k: int,
    xs: Iterable[float],
    ys: Iterable[float],
    mode: str = "float",
) -> pd.DataFrame:
    """rho(xk, yk, k) over a grid, with k rho and log|k rho| / k.

    Each (x, y) is snapped to the nearest lattice point of level k. For 0 < q < 1 the
    frame also flags the points inside the arctic ellipse.

    Args:
        q: Parameter, exact or float
        k: Level
        xs, ys: Grid coordinates
        mode: "float" (log-renormalised recurrence) or "exact" (closed form, k <= 30)

    Returns:
        DataFrame with the SCAN_COLUMNS and an "inside" column

    Raises:
        ValueError: For an unknown mode or an exact scan above level 30
    """
    if mode not in SCAN_MODES:
        raise ValueError(f"Unknown scan mode {mode!r}; use float or exact")
    if k < 1:
        raise ValueError(f"Scan level must be >= 1, got {k}")
    if mode == "exact" and k > EXACT_SCAN_MAX_LEVEL:
        raise ValueError(
            f"Exact scans stop at k = {EXACT_SCAN_MAX_LEVEL}; use the float mode for k = {k}"
        )
    has_ellipse = 0 < float(q) < 1
    level = rho_float_level(q, k) if mode == "float" else None

    rows = []
    for x in xs:
        for y in ys:
            i, j = _snap(float(x), float(y), k)
            if level is not None:
                rho = level.rho(i, j)
                log_abs = level.log_abs(i, j)
            else:
                exact = rho_exact(i, j, k, Fraction(q))
                rho = float(exact)
                log_abs = _exact_log_abs(exact)
            rows.append(
                {
                    "x": float(x),
                    "y": float(y),
                    "rho": rho,
                    "k_rho": k * rho,
                    "log_rate": (math.log(k) + log_abs) / k,
                    "inside": arctic_ellipse_inside(q, float(x), float(y))
                    if has_ellipse
                    else None,
                }
            )
    frame = pd.DataFrame(rows, columns=SCAN_COLUMNS + ["inside"])
    logger.info(f"Scanned {len(frame)} points at level {k} in {mode} mode")
    return frame


def log_rate(q, x: float, y: float, k: int) -> float:
    """log|k rho(xk, yk, k)| / k from the float recurrence."""
    level = rho_float_level(q, k)
    i, j = _snap(x, y, k)
    return (math.log(k) + level.log_abs(i, j)) / k


def origin_series(q, levels: Iterable[int]) -> Optional[pd.DataFrame]:
    """k, rho(0, 0, k) and k rho(0, 0, k) from the closed form for even levels."""
    rows = []
    for k in levels:
        if k % 2:
            continue
        value = rho_exact(0, 0, k, q)
        rows.append({"k": k, "rho": float(value), "k_rho": float(k * value)})
    return pd.DataFrame(rows, columns=["k", "rho", "k_rho"]) if rows else None
