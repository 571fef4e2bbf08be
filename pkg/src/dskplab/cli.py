"""CLI application for dskp-lab."""

import json
import logging
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from dskplab.aztec import (
    DEVRON_KINDS,
    AztecWeights,
    cyclic_row_shift,
    devron_experiment,
    dodgson,
    dodgson_matrix,
    inverse_entry_sum,
    kernel_formula_Y,
    vertical_shift_check,
    y_value,
    y_via_Cinverse,
    z_perm_forest,
    z_value,
)
from dskplab.chi import (
    COUNT_METHODS,
    COUNT_VARIANTS,
    LIMIT_METHODS,
    SIDES,
    VARIANTS,
    chi_check,
    chi_monomial_counts,
    constrained_forest_count,
)
from dskplab.config import config
from dskplab.cwgraph import (
    GRAPH_FAMILIES,
    CwGraph,
    build_cw_graph,
    kasteleyn_orientation,
    parse_graph_spec,
    raise_by_moves,
)
from dskplab.dimer import MODES, ratio_function_Y, symbolic_ratio, z_det, z_oriented
from dskplab.errors import DskpError
from dskplab.forests import (
    det_C_identity,
    enumerate_tree_forest,
    quadrangulate_aztec,
    signed_polynomial,
)
from dskplab.lattice import (
    RECURRENCES,
    SINGULAR,
    HeightFunction,
    InitialData,
    evolve,
    linear_solution,
    multiplicative_solution,
)
from dskplab.limitshape import (
    SCAN_MODES,
    asymptotic_scan,
    parse_grid,
    q_linear,
    q_multiplicative,
    scan_grid,
)
from dskplab.projective import format_value, parse_value, random_rational
from dskplab.services.export_service import (
    ExportService,
    ExportStats,
    configurations_payload,
    polynomial_payload,
)
from dskplab.services.verify_service import CHECKS, SUITES, VerifyService

# Setup logging
logging.basicConfig(
    level=config.log_level,
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(rich_tracebacks=True)],
)
logger = logging.getLogger(__name__)

# CLI app
app = typer.Typer(
    help="dskp-lab - Exact solutions of the dSKP recurrence via dimers, trees and forests"
)

console = Console()


def _fail(message: str) -> None:
    console.print(f"[bold red]✗ Error: {message}[/bold red]")
    sys.exit(1)


def _seed(seed: Optional[int]) -> int:
    return config.default_seed if seed is None else seed


def _parse_numbers(text: str, count: int, what: str) -> List[Any]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise ValueError(f"{what} needs {count} comma-separated values, got {text!r}")
    return [parse_value(p) for p in parts]


def _parse_face(text: str) -> Tuple[int, int]:
    try:
        i, j = (int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"Face must look like I,J, got {text!r}")
    return i, j


def _initial_data(
    heights: HeightFunction, seed: int, solution: Optional[str], weights: Optional[Path]
) -> InitialData:
    """Initial data from a JSON file, an explicit solution or seeded random rationals."""
    if weights is not None:
        digest = ExportService.file_sha256(weights)
        logger.info(f"Loading initial data from {weights} (sha256 {digest[:12]})")
        # the file carries its own window
        return InitialData.from_dict(json.loads(weights.read_text()))
    if solution is not None:
        kind, _, params = solution.partition(":")
        makers = {"linear": linear_solution, "multiplicative": multiplicative_solution}
        if kind not in makers:
            raise ValueError("Solution must be linear:A,B,C,D or multiplicative:A,B,C,D")
        return InitialData.from_function(heights, makers[kind](*_parse_numbers(params, 4, kind)))
    rng = random.Random(seed)
    return InitialData(heights, {p: random_rational(rng) for p in heights.points()})


def _weighted_graph(
    spec: str, seed: int, weights: Optional[Path] = None
) -> Tuple[CwGraph, HeightFunction]:
    heights, p = parse_graph_spec(spec)
    data = _initial_data(heights, seed, None, weights)
    return build_cw_graph(data.heights, p, data), data.heights


def _display(value) -> str:
    if value is SINGULAR:
        return "singular"
    return "-" if value is None else format_value(value)


def _summary(title: str, rows: List[Tuple[str, Any]]) -> None:
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Property", style="cyan")
    table.add_column("Value", style="green", justify="right")
    for name, value in rows:
        table.add_row(name, str(value))
    console.print()
    console.print(table)
    console.print()


def _json_target(out: Optional[str], output: Optional[Path], default_name: str) -> Optional[Path]:
    """Resolve --out (the json format or a .json file name) against --output."""
    if output is not None:
        return output
    if out is None:
        return None
    if out == "json":
        return Path(default_name)
    if out.endswith(".json"):
        return Path(out)
    raise ValueError(f"Unknown output {out!r}; use json or a .json file name")


def _spec_stem(spec: str) -> str:
    return spec.replace(":", "_").replace(",", "_")


def _export(payload: Dict[str, Any], output: Optional[Path]) -> Optional[ExportStats]:
    if output is None:
        return None
    stats = ExportService().export_json(payload, output)
    console.print(
        f"[dim]Wrote {output} ({stats.file_size_bytes:,} bytes, sha256 {stats.sha256[:12]})[/dim]"
    )
    return stats


@app.command("evolve")
def evolve_cmd(
    heights_family: str = typer.Option("aztec", "--heights", help="aztec, pyramid or tilted"),
    radius: int = typer.Option(4, "--radius", help="Half-width of the square window"),
    level: int = typer.Option(3, "--level", help="Highest level to compute"),
    recurrence: str = typer.Option("dskp", "--recurrence", help=", ".join(RECURRENCES)),
    solution: Optional[str] = typer.Option(
        None, "--solution", help="Seed with linear:A,B,C,D or multiplicative:A,B,C,D"
    ),
    weights: Optional[Path] = typer.Option(
        None, "--weights", exists=True, dir_okay=False, help="Initial data JSON file"
    ),
    at: Optional[str] = typer.Option(None, "--at", help="Report x at I,J,K"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of random initial data"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Evolve initial data on a height function by a local recurrence."""
    console.print(f"[bold blue]Evolving {recurrence} up to level {level}...[/bold blue]")
    try:
        if heights_family not in GRAPH_FAMILIES:
            raise ValueError(f"Unknown height function {heights_family!r}")
        heights = GRAPH_FAMILIES[heights_family](radius)
        data = _initial_data(heights, _seed(seed), solution, weights)
        result = evolve(data, recurrence, level)
        singular = sum(v is SINGULAR for v in result.values.values())
        rows = [
            ("Recurrence", recurrence),
            ("Window", f"[{data.heights.imin}, {data.heights.imax}]^2"),
            ("Values computed", f"{len(result.values):,}"),
            ("Singular values", singular),
        ]
        if at is not None:
            i, j, k = (int(p) for p in at.split(","))
            value = result.value(i, j, k)
            rows.append((f"x({i}, {j}, {k})", _display(value)))
        _summary("Evolution", rows)
        _export({"initial": data.to_dict(), "solution": result.to_dict()}, output)
        if singular:
            console.print(f"[bold yellow]⚠ {singular} singular values[/bold yellow]")
        console.print("[bold green]✓ Evolution completed[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("graph")
def graph_cmd(
    graph: str = typer.Option("aztec:2", "--graph", help="aztec:K, pyramid:I,J,K or tilted:I,J,K"),
    raise_at: Optional[str] = typer.Option(
        None, "--raise", help="Compare a spider move at face I,J with the raised surface"
    ),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Build the crosses-and-wrenches graph of a target point."""
    console.print(f"[bold blue]Building graph {graph}...[/bold blue]")
    try:
        heights, p = parse_graph_spec(graph)
        g = build_cw_graph(heights, p)
        orientation = kasteleyn_orientation(g)
        rows = [
            ("Target", p),
            ("White / black vertices", f"{len(g.white)} / {len(g.black)}"),
            ("Edges", len(g.edges)),
            ("Inner / open faces", f"{len(g.inner)} / {len(g.open)}"),
        ]
        comparison = None
        if raise_at is not None:
            comparison = raise_by_moves(heights, p, _parse_face(raise_at))
            rows.append(("Contractions after spider move", comparison.contractions))
            rows.append(("Matches raised surface", comparison.isomorphic))
        _summary("Graph", rows)
        payload = {"target": list(p), "graph": g.to_dict(orientation)}
        if comparison is not None:
            payload["raise"] = {
                "face": list(_parse_face(raise_at)),
                "contractions": comparison.contractions,
                "isomorphic": comparison.isomorphic,
            }
        _export(payload, output)
        if comparison is not None and not comparison.isomorphic:
            _fail("spider move does not reproduce the graph of the raised surface")
        console.print("[bold green]✓ Graph built[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("z")
def z_cmd(
    graph: str = typer.Option("aztec:2", "--graph", help="aztec:K, pyramid:I,J,K or tilted:I,J,K"),
    mode: str = typer.Option("numeric", "--mode", help=" or ".join(MODES)),
    method: str = typer.Option("det", "--method", help="det or enumeration"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of random face weights"),
    weights: Optional[Path] = typer.Option(
        None, "--weights", exists=True, dir_okay=False, help="Initial data JSON file"
    ),
    out: str = typer.Option("json", "--out", help="json (z_<graph>.json) or a .json file name"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Oriented dimer partition function Z(G, a)."""
    console.print(f"[bold blue]Computing Z on {graph} ({mode})...[/bold blue]")
    try:
        if mode not in MODES:
            raise ValueError(f"Unknown mode {mode!r}; use numeric or symbolic")
        if method not in ("det", "enumeration"):
            raise ValueError(f"Unknown method {method!r}; use det or enumeration")
        output = _json_target(out, output, f"z_{_spec_stem(graph)}.json")
        g, _ = _weighted_graph(graph, _seed(seed), weights)
        if method == "det":
            z = z_det(g, g.weights, mode=mode)
        else:
            z = z_oriented(g, g.weights, mode=mode)
        if mode == "symbolic":
            payload = polynomial_payload(z, "Z", graph=graph, method=method)
            _summary("Partition function", [("Graph", graph), ("Monomials", f"{len(z):,}")])
        else:
            payload = {"graph": graph, "method": method, "Z": format_value(z)}
            _summary("Partition function", [("Graph", graph), ("Z", format_value(z))])
        _export(payload, output)
        console.print("[bold green]✓ Partition function computed[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("y")
def y_cmd(
    graph: str = typer.Option("aztec:1", "--graph", help="aztec:K, pyramid:I,J,K or tilted:I,J,K"),
    symbolic: bool = typer.Option(False, "--symbolic", help="Rational function in the faces"),
    method: str = typer.Option("det", "--method", help="det or enumeration"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of random face weights"),
    weights: Optional[Path] = typer.Option(
        None, "--weights", exists=True, dir_okay=False, help="Initial data JSON file"
    ),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Ratio function Y(G, a) = C(G, a) Z(G, 1/a) / Z(G, a)."""
    console.print(f"[bold blue]Computing Y on {graph}...[/bold blue]")
    try:
        if symbolic:
            heights, p = parse_graph_spec(graph)
            ratio = symbolic_ratio(build_cw_graph(heights, p), method)
            _summary(
                "Ratio function",
                [
                    ("Graph", graph),
                    ("Numerator monomials", f"{len(ratio.numerator):,}"),
                    ("Denominator monomials", f"{len(ratio.denominator):,}"),
                ],
            )
            payload = {
                "graph": graph,
                "numerator": polynomial_payload(ratio.numerator, "numerator"),
                "denominator": polynomial_payload(ratio.denominator, "denominator"),
            }
        else:
            g, _ = _weighted_graph(graph, _seed(seed), weights)
            value = ratio_function_Y(g, method=method, rng=random.Random(_seed(seed)))
            _summary("Ratio function", [("Graph", graph), ("Y", format_value(value))])
            payload = {"graph": graph, "method": method, "Y": format_value(value)}
        _export(payload, output)
        console.print("[bold green]✓ Ratio function computed[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("forests")
def forests_cmd(
    k: int = typer.Option(1, "--k", help="Aztec diamond size"),
    identity: bool = typer.Option(False, "--identity", help="Check the C-matrix identity"),
    limit: Optional[int] = typer.Option(
        None, "--limit", help="List at most this many configurations in the output"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the identity weights"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Enumerate complementary tree/forest pairs of the Aztec diamond."""
    console.print(f"[bold blue]Enumerating tree/forest pairs on A_{k}...[/bold blue]")
    try:
        q = quadrangulate_aztec(k)
        configs = enumerate_tree_forest(q)
        poly = signed_polynomial(configs)
        z = z_det(q.dimer_graph(), mode="symbolic")
        equal = poly == z or poly == -z
        rows = [
            ("Configurations", f"{len(configs):,}"),
            ("Monomials", f"{len(poly):,}"),
            ("Equals ±det K", equal),
        ]
        payload = configurations_payload(q, configs, limit)
        payload["polynomial"] = polynomial_payload(poly, "forest_sum", k=k)
        if identity:
            w = AztecWeights.random(k, random.Random(_seed(seed)))
            check = det_C_identity(w.quadrangulation())
            rows.append(("C-matrix identity", check.holds))
            payload["identity"] = check.to_dict()
            equal = equal and check.holds
        _summary(f"Tree/forest expansion of A_{k}", rows)
        _export(payload, output)
        if not equal:
            _fail("tree/forest expansion does not match det K")
        console.print("[bold green]✓ Tree/forest expansion matches[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("aztec")
def aztec_cmd(
    k: int = typer.Option(2, "--k", help="Aztec diamond size"),
    constant_columns: bool = typer.Option(
        True, "--constant-columns/--generic", help="d_{i,j} = d_i, needed by most identities"
    ),
    constant_d: bool = typer.Option(False, "--constant-d", help="All d equal (Dodgson form)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of random weights"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Aztec diamond identities: permutation forests, column shift and ratio formulas."""
    console.print(f"[bold blue]Checking Aztec identities on A_{k}...[/bold blue]")
    try:
        w = AztecWeights.random(
            k, random.Random(_seed(seed)), constant_columns=constant_columns, constant_d=constant_d
        )
        z = z_value(w)
        y = y_value(w)
        results: Dict[str, Any] = {"Z": format_value(z), "Y": format_value(y)}
        checks: Dict[str, bool] = {}
        if w.has_constant_columns():
            perm = z_perm_forest(w)
            checks["permutation forests = ±Z"] = perm in (z, -z)
            shift = vertical_shift_check(w)
            checks["Z(shifted) = (-1)^k Z"] = shift.z_holds
            checks["Y(shifted) = Y"] = shift.y_holds
            results["shift"] = shift.to_dict()
        checks["Y via C^-1"] = y_via_Cinverse(w) == y
        checks["Y via kernel"] = kernel_formula_Y(w) == y
        if constant_d:
            closed = dodgson(w)
            checks["Dodgson Y"] = closed.y == y
            n_matrix = dodgson_matrix(w.c, w.d[0][0])
            shifted = inverse_entry_sum(cyclic_row_shift(n_matrix))
            checks["Σ(N^-1) under row shift"] = shifted == inverse_entry_sum(n_matrix)
        _summary(f"A_{k} identities", [(name, ok) for name, ok in checks.items()])
        _export({"weights": w.to_dict(), "results": results, "checks": checks}, output)
        if not all(checks.values()):
            _fail("some Aztec identity failed")
        console.print("[bold green]✓ All Aztec identities hold[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("devron")
def devron_cmd(
    kind: str = typer.Option("dodgson", "--kind", help=", ".join(DEVRON_KINDS)),
    m: int = typer.Option(2, "--m", help="Period of the data"),
    p: int = typer.Option(1, "--p", help="Spacing of constant diagonals (devron)"),
    periods: str = typer.Option("2,0,0,2", "--periods", help="S,T,U,V (two_periodic)"),
    mode: str = typer.Option("even_constant", "--mode", help="even_constant or diagonal"),
    harmonic_shift: Optional[int] = typer.Option(
        None, "--harmonic-shift", help="Extra diagonal symmetry of Dodgson data"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the generic values"),
    out: Optional[str] = typer.Option(
        None, "--out", help="json (devron_<kind>.json) or a .json report file name"
    ),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Evolve singular initial data and locate the reappearing degeneracy."""
    console.print(f"[bold blue]Running {kind} experiment...[/bold blue]")
    try:
        output = _json_target(out, output, f"devron_{kind}.json")
        s, t, u, v = (int(x) for x in periods.split(","))
        report = devron_experiment(
            kind, m, p, (s, t, u, v), mode, harmonic_shift, _seed(seed)
        )
        rows = [
            ("Predicted level", report.predicted_level),
            ("Observed level", report.observed_level),
            ("Degenerate at prediction", report.holds),
            ("Sharp", report.sharp),
        ]
        if report.closed_form is not None:
            rows.append(("Closed form", format_value(report.closed_form)))
            rows.append(("Closed form matches", report.closed_form_matches))
        _summary(f"{kind} experiment", rows)
        _export(report.to_dict(), output)
        for warning in report.warnings:
            console.print(f"  [yellow]• {warning}[/yellow]")
        if not report.passed:
            _fail("degeneracy did not reappear as predicted")
        console.print("[bold green]✓ Degeneracy reappears as predicted[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("limitshape")
def limitshape_cmd(
    q: Optional[str] = typer.Option(None, "--q", help="Parameter q, e.g. 7/10"),
    linear: Optional[str] = typer.Option(None, "--linear", help="q from a linear solution A,B,C"),
    multiplicative: Optional[str] = typer.Option(
        None, "--multiplicative", help="q from a multiplicative solution A,B,C"
    ),
    k: int = typer.Option(200, "--k", help="Level"),
    grid: str = typer.Option("101x101", "--grid", help="Scan grid NXxNY"),
    mode: str = typer.Option("float", "--mode", help=" or ".join(SCAN_MODES)),
    out: str = typer.Option("csv", "--out", help="csv or json"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output file"),
):
    """Scan the sensitivity rho(xk, yk, k) of a linear solution to one initial weight."""
    try:
        given = [x for x in (q, linear, multiplicative) if x is not None]
        if len(given) != 1:
            raise ValueError("Give exactly one of --q, --linear, --multiplicative")
        if q is not None:
            q_value = parse_value(q)
        elif linear is not None:
            q_value = q_linear(*_parse_numbers(linear, 3, "--linear"))
        else:
            q_value = q_multiplicative(*_parse_numbers(multiplicative, 3, "--multiplicative"))
        if out not in ("csv", "json"):
            raise ValueError(f"Unknown output format {out!r}; use csv or json")
        console.print(f"[bold blue]Scanning q = {format_value(q_value)} at k = {k}...[/bold blue]")
        xs, ys = scan_grid(parse_grid(grid))
        frame = asymptotic_scan(q_value, k, xs, ys, mode)
        output = output or Path(f"limitshape_k{k}.{out}")
        service = ExportService()
        if out == "csv":
            stats = service.export_scan_csv(frame, output)
        else:
            stats = service.export_json(
                {
                    "q": format_value(q_value),
                    "k": k,
                    "mode": mode,
                    "rows": json.loads(frame.to_json(orient="records")),
                },
                output,
            )
        _summary(
            "Limit-shape scan",
            [("q", format_value(q_value)), ("Points", f"{len(frame):,}"), ("Output", output)],
        )
        for warning in stats.warnings:
            console.print(f"  [yellow]• {warning}[/yellow]")
        console.print("[bold green]✓ Scan written[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("chi")
def chi_cmd(
    variant: str = typer.Option("chi4", "--variant", help=", ".join(COUNT_VARIANTS)),
    k: int = typer.Option(1, "--k", help="Aztec diamond size"),
    counts: bool = typer.Option(False, "--counts", help="Monomial counts of N and D"),
    forests: bool = typer.Option(False, "--forests", help="Constrained forest counts"),
    emit_polys: bool = typer.Option(False, "--emit-polys", help="Include N and D in the output"),
    method: Optional[str] = typer.Option(
        None,
        "--method",
        help=f"counts: {', '.join(COUNT_METHODS)}; values: {', '.join(LIMIT_METHODS)}",
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the value check"),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="JSON output file"),
):
    """Solutions of chi3, chi4, chi5 as leading coefficients, and their monomial counts."""
    console.print(f"[bold blue]Running {variant} on A_{k}...[/bold blue]")
    try:
        payload: Dict[str, Any] = {"variant": variant, "k": k}
        rows: List[Tuple[str, Any]] = []
        ok = True
        if counts:
            result = chi_monomial_counts(variant, k, method or "auto")
            rows += [
                ("Numerator monomials", result.numerator),
                ("Denominator monomials", result.denominator),
            ]
            payload["counts"] = result.to_dict(emit_polys)
        if forests:
            forest_counts = {side: constrained_forest_count(variant, k, side) for side in SIDES}
            rows += [(f"Constrained forests ({side})", n) for side, n in forest_counts.items()]
            payload["forests"] = forest_counts
        if not counts and not forests:
            if variant not in VARIANTS:
                raise ValueError(f"Values exist for {', '.join(VARIANTS)} only")
            check = chi_check(variant, k, _seed(seed), method or "symbolic")
            rows += [
                ("Recurrence value", _display(check.expected)),
                ("Leading-coefficient value", _display(check.value)),
                ("Equal", check.passed),
            ]
            payload["check"] = check.to_dict()
            for warning in check.warnings:
                console.print(f"  [yellow]• {warning}[/yellow]")
            ok = check.passed
        _summary(f"{variant} on A_{k}", rows)
        _export(payload, output)
        if not ok:
            _fail("leading coefficient differs from the recurrence value")
        console.print(f"[bold green]✓ {variant} completed[/bold green]")
    except (DskpError, ValueError) as e:
        _fail(str(e))


@app.command("verify")
def verify_cmd(
    suite: str = typer.Option("paper", "--suite", help=" or ".join(SUITES)),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed of the randomised checks"),
    workers: int = typer.Option(1, "--workers", help="Worker processes"),
    only: Optional[List[str]] = typer.Option(
        None, "--only", help=f"Check name: {', '.join(CHECKS)}"
    ),
    output: Path = typer.Option(Path("verify_summary.json"), "--output", "-o", help="Summary JSON"),
):
    """Run the acceptance suite of exact identity checks."""
    console.print(f"[bold blue]Running verification suite {suite}...[/bold blue]")
    try:
        stats = VerifyService(workers).run(suite, _seed(seed), only)
    except (DskpError, ValueError) as e:
        _fail(str(e))
        return

    table = Table(title="Verification", show_header=True, header_style="bold magenta")
    table.add_column("#", justify="right")
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Seconds", justify="right")
    for record in stats.records:
        result = "[green]passed[/green]" if record.passed else "[red]FAILED[/red]"
        table.add_row(str(record.criterion), record.name, result, f"{record.seconds:.2f}")
    console.print()
    console.print(table)
    console.print()

    ExportService().export_json(stats.to_dict(), output)
    console.print(f"[dim]Summary written to {output}[/dim]")
    if stats.warnings:
        console.print(f"[bold yellow]⚠ {len(stats.warnings)} warnings:[/bold yellow]")
        for warning in stats.warnings[:10]:
            console.print(f"  [yellow]• {warning}[/yellow]")
        if len(stats.warnings) > 10:
            console.print(f"  [dim]... and {len(stats.warnings) - 10} more[/dim]")
    if not stats.passed:
        _fail(f"{stats.checks_failed} of {stats.checks_run} checks failed")
    console.print(f"[bold green]✓ All {stats.checks_run} checks passed[/bold green]")


if __name__ == "__main__":
    app()
