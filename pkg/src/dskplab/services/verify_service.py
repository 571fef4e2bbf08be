"""Service running the acceptance suite of exact identity checks."""

import logging
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Any, Callable, Dict, List, Optional, Tuple

from dskplab.aztec import (
    AztecWeights,
    devron_experiment,
    harmonic_mean_value,
    kernel_formula_Y,
    periodic_columns_check,
    vertical_shift_check,
    y_value,
    y_via_Cinverse,
    z_perm_forest,
    z_value,
)
from dskplab.chi import (
    VARIANTS,
    chi_check,
    chi_monomial_counts,
    constrained_forest_count,
)
from dskplab.cwgraph import (
    CwGraph,
    build_cw_graph,
    contract_vertex,
    expand_vertex,
    iter_lattice_targets,
    kasteleyn_orientation,
    parse_graph_spec,
    spider_move,
)
from dskplab.dimer import (
    enumerate_matchings,
    orientation_sign,
    ratio_function_Y,
    symbolic_ratio,
    z_det,
)
from dskplab.forests import (
    det_C_identity,
    enumerate_tree_forest,
    quadrangulate_aztec,
    signed_polynomial,
)
from dskplab.lattice import (
    SINGULAR,
    HeightFunction,
    InitialData,
    aztec_heights,
    dskp_step,
    evolve,
    tilted_heights,
)
from dskplab.limitshape import (
    envelope_bound,
    log_rate,
    lyapunov_rate,
    rho_exact,
    rho_finite_difference,
    rho_generating_coefficients,
)
from dskplab.poly import MultiPoly
from dskplab.projective import format_value, random_rational

logger = logging.getLogger(__name__)

SUITES = ("quick", "paper")

# Seeds per randomised check, counted up from the base seed
SEED_COUNT = 5

# Printed monomial counts (numerator, denominator) of the chi-type recurrences
TABLE_COUNTS: Dict[str, Dict[int, Tuple[int, int]]] = {
    "chi2": {1: (6, 6), 2: (220, 220), 3: (49224, 49224)},
    "chi3": {1: (4, 2), 2: (30, 14), 3: (680, 300), 4: (45188, 19044)},
    "chi4": {1: (4, 2), 2: (56, 14), 3: (2656, 328)},
    "chi5": {1: (3, 1), 2: (23, 3), 3: (433, 23), 4: (19705, 433)},
}

# (matching count x edge orientations, monomials of det K) of A_1, A_2, A_3
AZTEC_COUNTS = {1: (8, 6), 2: (512, 220), 3: (262144, 49224)}

MOVE_GRAPHS = ("aztec:2", "aztec:3", "tilted:2,0,4")
SIGN_GRAPHS = (
    "aztec:1",
    "aztec:2",
    "pyramid:0,0,4",
    "pyramid:1,0,3",
    "tilted:2,0,4",
    "tilted:3,1,4",
)


@dataclass
class CheckRecord:
    """Outcome of one acceptance check."""

    criterion: int
    name: str
    passed: bool = False
    details: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "details": self.details,
            **({"error": self.error} if self.error else {}),
        }


@dataclass
class VerifyStats:
    """Statistics from a verification run."""

    suite: str
    seed: int
    checks_run: int = 0
    checks_passed: int = 0
    checks_failed: int = 0
    records: List[CheckRecord] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checks_failed == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "checks_run": self.checks_run,
            "checks_passed": self.checks_passed,
            "checks_failed": self.checks_failed,
            "checks": [r.to_dict() for r in self.records],
            "warnings": self.warnings,
        }


def _seeds(seed: int) -> List[int]:
    return list(range(seed, seed + SEED_COUNT))


def _random_data(heights: HeightFunction, rng: random.Random) -> InitialData:
    return InitialData(heights, {p: random_rational(rng) for p in heights.points()})


def _random_faces(g: CwGraph, rng: random.Random) -> CwGraph:
    return g.with_weights({f: random_rational(rng) for f in g.faces()})


def _graph(spec: str) -> CwGraph:
    heights, p = parse_graph_spec(spec)
    return build_cw_graph(heights, p)


# Individual checks; each returns (passed, details)


def one_step_formula() -> Tuple[MultiPoly, MultiPoly]:
    """Numerator and denominator of the one-step ratio in a00, a10, a-10, a01, a0-1."""
    a, b, c, d, e = (MultiPoly.variable(f) for f in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)))
    numerator = b * c * d + b * c * e - a * b * c - c * d * e - b * d * e + a * d * e
    denominator = a * e + a * d - d * e - a * b - a * c + b * c
    return numerator, denominator


def check_one_step(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    g = _graph("aztec:1")
    ratio = symbolic_ratio(g)
    numerator, denominator = one_step_formula()
    matches = ratio.numerator * denominator == ratio.denominator * numerator
    rng = random.Random(seed)
    values = {f: random_rational(rng) for f in g.faces()}
    direct = dskp_step(
        values[(1, 0)], values[(-1, 0)], values[(0, 1)], values[(0, -1)], values[(0, 0)]
    )
    numeric = ratio.evaluate(values) == direct
    details = {
        "numerator_monomials": len(ratio.numerator),
        "denominator_monomials": len(ratio.denominator),
        "matches_formula": matches,
        "matches_step": numeric,
    }
    passed = matches and numeric and len(ratio.numerator) == 6 and len(ratio.denominator) == 6
    return passed, details


def check_aztec_counts(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    sizes = (1, 2, 3) if suite == "paper" else (1, 2)
    details, passed = {}, True
    for k in sizes:
        g = _graph(f"aztec:{k}")
        configurations = len(enumerate_matchings(g)) * 2 ** len(g.white)
        monomials = len(z_det(g, mode="symbolic"))
        details[f"A{k}"] = {"configurations": configurations, "monomials": monomials}
        passed = passed and (configurations, monomials) == AZTEC_COUNTS[k]
    return passed, details


def _equivalence_targets(heights: HeightFunction, max_level: int, reach: Callable) -> list:
    return [p for p in iter_lattice_targets(heights, max_level) if reach(p)]


def check_equivalence(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    surfaces = {
        "aztec": (aztec_heights(5), lambda p: abs(p[0]) + abs(p[1]) <= 1),
        "tilted": (tilted_heights(6), lambda p: 0 <= p[0] <= 3 and abs(p[1]) <= 1),
    }
    details, passed = {}, True
    for name, (heights, reach) in surfaces.items():
        targets = _equivalence_targets(heights, 4, reach)
        compared, singular, mismatches = 0, 0, []
        for s in _seeds(seed):
            rng = random.Random(s)
            data = _random_data(heights, rng)
            solution = evolve(data, "dskp", 4)
            for p in targets:
                expected = solution.value(*p)
                if expected is SINGULAR:
                    singular += 1
                    continue
                value = ratio_function_Y(build_cw_graph(heights, p, data), rng=rng)
                compared += 1
                if value != expected:
                    mismatches.append({"seed": s, "point": list(p)})
        details[name] = {
            "targets": len(targets),
            "compared": compared,
            "singular": singular,
            "mismatches": mismatches[:5],
        }
        passed = passed and compared > 0 and not mismatches
    return passed, details


def check_orientation_sign(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    details, passed = {}, True
    for spec in SIGN_GRAPHS:
        g = _graph(spec)
        orientation = kasteleyn_orientation(g)
        signs = set()
        for s in _seeds(seed):
            rng = random.Random(s)
            signs.add(orientation_sign(g, orientation, _random_faces(g, rng).weights))
        details[spec] = sorted(signs)
        passed = passed and len(signs) == 1
    return passed, details


def _spider_site(g: CwGraph):
    for f in sorted(g.inner):
        if g.degree(f) == 4 and len(set(_neighbours(g, f))) == 4:
            return f
    raise ValueError("No inner face of degree 4 with four distinct neighbours")


def _neighbours(g: CwGraph, f) -> List[Any]:
    result = []
    for e in g.edges:
        if e.right == f:
            result.append(e.left)
        elif e.left == f:
            result.append(e.right)
    return result


def _expansion_site(g: CwGraph):
    for v in g.white + g.black:
        sectors = []
        for idx in g.rotation(v):
            face = g.outward_faces(idx, v)[1]
            if face in g.inner and face not in sectors:
                sectors.append(face)
        if len(sectors) >= 2:
            return v, sectors[0], sectors[1]
    raise ValueError("No vertex touches two distinct inner faces")


def check_local_moves(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    details, passed = {}, True
    for spec in MOVE_GRAPHS:
        base = _graph(spec)
        face = _spider_site(base)
        v, face_a, face_b = _expansion_site(base)
        results = {"spider": 0, "contraction": 0, "failures": []}
        for s in _seeds(seed):
            rng = random.Random(s)
            g = _random_faces(base, rng)
            y = ratio_function_Y(g, rng=rng)
            spider = spider_move(g, face)
            if ratio_function_Y(spider.graph, rng=rng) == y:
                results["spider"] += 1
            else:
                results["failures"].append({"seed": s, "move": "spider"})
            expanded = expand_vertex(g, v, face_a, face_b).graph
            contracted = contract_vertex(expanded, ("split", v, 0)).graph
            same = (
                ratio_function_Y(expanded, rng=rng) == y
                and ratio_function_Y(contracted, rng=rng) == y
            )
            if same:
                results["contraction"] += 1
            else:
                results["failures"].append({"seed": s, "move": "contraction"})
        details[spec] = results
        passed = passed and not results["failures"]
    return passed, details


def check_tree_forest(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    details, passed = {}, True
    for k, expected in ((1, 6), (2, 220)):
        q = quadrangulate_aztec(k)
        configs = enumerate_tree_forest(q)
        poly = signed_polynomial(configs)
        z = z_det(q.dimer_graph(), mode="symbolic")
        equal = poly == z or poly == -z
        details[f"A{k}"] = {"configurations": len(configs), "equals_det": equal}
        passed = passed and equal and len(configs) == expected
    return passed, details


def check_c_identity(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    details, passed = {}, True
    for k in (1, 2):
        held = 0
        for s in _seeds(seed):
            w = AztecWeights.random(k, random.Random(s))
            if det_C_identity(w.quadrangulation()).holds:
                held += 1
        details[f"A{k}"] = {"held": held, "samples": SEED_COUNT}
        passed = passed and held == SEED_COUNT
    return passed, details


def check_aztec_identities(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    perm_sizes = (1, 2, 3, 4) if suite == "paper" else (1, 2, 3)
    counts = {"perm_forest": 0, "vertical_shift": 0, "c_inverse": 0, "kernel": 0}
    expected = {
        "perm_forest": len(perm_sizes) * SEED_COUNT,
        "vertical_shift": 3 * SEED_COUNT,
        "c_inverse": 3 * SEED_COUNT,
        "kernel": 3 * SEED_COUNT,
    }
    for s in _seeds(seed):
        for k in perm_sizes:
            w = AztecWeights.random(k, random.Random(s), constant_columns=True)
            z = z_value(w)
            if z_perm_forest(w) in (z, -z):
                counts["perm_forest"] += 1
        for k in (1, 2, 3):
            w = AztecWeights.random(k, random.Random(s), constant_columns=True)
            shift = vertical_shift_check(w)
            if shift.z_holds and shift.y_holds:
                counts["vertical_shift"] += 1
            y = y_value(w)
            if y_via_Cinverse(w) == y:
                counts["c_inverse"] += 1
            if kernel_formula_Y(w) == y:
                counts["kernel"] += 1
    details = {name: f"{counts[name]}/{expected[name]}" for name in counts}
    return counts == expected, details


def check_devron(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    reports = {
        "dodgson_m2": devron_experiment("dodgson", m=2, seed=seed),
        "dodgson_m3": devron_experiment("dodgson", m=3, seed=seed),
        "harmonic_m2": devron_experiment("dodgson", m=2, harmonic_shift=1, seed=seed),
        "devron_m3_p2": devron_experiment("devron", m=3, p=2, seed=seed),
        "two_periodic": devron_experiment("two_periodic", periods=(2, 0, 0, 2), seed=seed),
    }
    harmonic = harmonic_mean_value([1, 3], 0)
    columns = periodic_columns_check(3, 2, seed)
    details = {name: r.to_dict() for name, r in reports.items()}
    details["harmonic_value"] = format_value(harmonic)
    details["periodic_columns"] = columns.to_dict()
    passed = (
        all(r.passed for r in reports.values())
        and harmonic == Fraction(3, 2)
        and columns.y_holds
    )
    return passed, details


def check_limit_shapes(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    details, passed = {}, True
    for q, params in ((Fraction(7, 10), (1, 9, 5)), (Fraction(6, 5), (9, -19, -5))):
        oracle = rho_finite_difference(*params, max_level=8)
        coefficients = rho_generating_coefficients(q, 8)
        compared, mismatches = 0, []
        for (i, j, k), value in oracle.items():
            if abs(i) + abs(j) > k:
                continue
            exact = rho_exact(i, j, k, q)
            compared += 1
            if exact != value or exact != coefficients.get((i, j, k), 0):
                mismatches.append([i, j, k])
        details[format_value(q)] = {"compared": compared, "mismatches": mismatches[:5]}
        passed = passed and compared > 0 and not mismatches

    rate = log_rate(Fraction(6, 5), 0.0, 0.0, 200)
    predicted = lyapunov_rate(Fraction(6, 5))
    envelope = abs(200 * rho_exact(0, 0, 200, Fraction(7, 10)))
    bound = 1.1 * envelope_bound(Fraction(7, 10))
    details["log_rate"] = {"measured": rate, "predicted": predicted}
    details["envelope"] = {"k_rho": float(envelope), "bound": bound}
    rate_ok = math.isfinite(rate) and abs(rate - predicted) <= 0.05 * predicted
    return passed and rate_ok and float(envelope) <= bound, details


def check_table_counts(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    max_k = 4 if suite == "paper" else 2
    details, passed = {}, True
    for variant, cells in TABLE_COUNTS.items():
        for k, expected in cells.items():
            if k > max_k:
                continue
            counts = chi_monomial_counts(variant, k)
            observed = (counts.numerator, counts.denominator)
            entry = {"expected": list(expected), "observed": list(observed)}
            if variant in ("chi4", "chi5") and k <= 3:
                forests = tuple(
                    constrained_forest_count(variant, k, side) for side in ("num", "den")
                )
                entry["forests"] = list(forests)
                passed = passed and forests == expected
            details[f"{variant}_k{k}"] = entry
            passed = passed and observed == expected
    return passed, details


def check_chi_limits(seed: int, suite: str) -> Tuple[bool, Dict[str, Any]]:
    details, passed = {}, True
    for variant in VARIANTS:
        for k in (1, 2):
            checks = [chi_check(variant, k, s) for s in _seeds(seed)]
            compared = [c for c in checks if c.expected is not SINGULAR and c.value is not None]
            details[f"{variant}_k{k}"] = {
                "compared": len(compared),
                "passed": sum(c.passed for c in compared),
                "warnings": [w for c in checks for w in c.warnings],
            }
            passed = passed and bool(compared) and all(c.passed for c in compared)
    return passed, details


CHECKS: Dict[str, Tuple[int, Callable[[int, str], Tuple[bool, Dict[str, Any]]]]] = {
    "one_step_formula": (1, check_one_step),
    "aztec_counts": (2, check_aztec_counts),
    "lattice_equivalence": (3, check_equivalence),
    "orientation_sign": (4, check_orientation_sign),
    "local_moves": (5, check_local_moves),
    "tree_forest_expansion": (6, check_tree_forest),
    "c_matrix_identity": (7, check_c_identity),
    "aztec_identities": (8, check_aztec_identities),
    "devron": (9, check_devron),
    "limit_shapes": (10, check_limit_shapes),
    "table_counts": (11, check_table_counts),
    "chi_limits": (12, check_chi_limits),
}


def run_check(name: str, seed: int, suite: str) -> CheckRecord:
    """Run one named check, turning exceptions into a failed record."""
    criterion, func = CHECKS[name]
    record = CheckRecord(criterion, name)
    start = time.perf_counter()
    try:
        record.passed, record.details = func(seed, suite)
    except Exception as e:
        logger.error(f"Check {name} raised: {e}")
        record.error = f"{type(e).__name__}: {e}"
    record.seconds = time.perf_counter() - start
    logger.info(f"{name}: {'passed' if record.passed else 'FAILED'} in {record.seconds:.2f}s")
    return record


def _run_packed(args: Tuple[str, int, str]) -> CheckRecord:
    return run_check(*args)


class VerifyService:
    """Service running the acceptance checks, optionally in worker processes."""

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError(f"Worker count must be >= 1, got {workers}")
        self.workers = workers

    def run(
        self, suite: str = "paper", seed: int = 1, only: Optional[List[str]] = None
    ) -> VerifyStats:
        """Run the suite.

        Args:
            suite: "quick" (k <= 2 everywhere) or "paper" (every tabulated cell, k up to 4)
            seed: Base seed; randomised checks use seed .. seed + 4
            only: Restrict to these check names

        Returns:
            VerifyStats with one record per check, in criterion order
        """
        if suite not in SUITES:
            raise ValueError(f"Unknown suite {suite!r}; use one of {', '.join(SUITES)}")
        names = list(CHECKS)
        if only:
            unknown = [n for n in only if n not in CHECKS]
            if unknown:
                raise ValueError(f"Unknown checks: {', '.join(unknown)}")
            names = [n for n in names if n in only]

        logger.info(f"Running {len(names)} checks of suite {suite} with {self.workers} worker(s)")
        jobs = [(name, seed, suite) for name in names]
        if self.workers > 1 and len(jobs) > 1:
            with Pool(min(self.workers, len(jobs))) as pool:
                records = pool.map(_run_packed, jobs)
        else:
            records = [_run_packed(job) for job in jobs]

        stats = VerifyStats(suite=suite, seed=seed, records=records)
        stats.checks_run = len(records)
        stats.checks_passed = sum(r.passed for r in records)
        stats.checks_failed = stats.checks_run - stats.checks_passed
        for r in records:
            if r.error:
                stats.warnings.append(f"{r.name}: {r.error}")
        return stats
