"""Command-line interface.

Subcommands: solve, reduce, intervene, rank, oracle, serve.  Human-readable
tables by default, machine-readable JSON with --json (byte-identical across
runs for identical inputs).  Exit codes: 0 success, 2 validation error,
3 solver non-convergence.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .budget import sufficient_budget
from .documents import (
    parse_game,
    parse_spec_list,
    serialize_graph,
)
from .errors import (
    DocumentError,
    GraphValidationError,
    InvalidAnchor,
    NonConvergence,
    PathExplosion,
    RegimeViolation,
    SecinvestError,
    UnknownNode,
)
from .graphs import path_loss, worst_case
from .interventions import evaluate_intervention, rank_interventions
from .oracle import grid_oracle
from .reduction import backmap, reduce_graph
from .solver import GameInstance, solve

VALIDATION_ERRORS = (
    DocumentError,
    GraphValidationError,
    InvalidAnchor,
    UnknownNode,
    RegimeViolation,
    PathExplosion,
    ValueError,
)


def _fail(exc: Exception, code: int) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _load_game(game, graph, budget) -> tuple[GameInstance, dict]:
    if game and graph:
        raise DocumentError("give either --game or --graph, not both")
    path = game or graph
    if not path:
        raise DocumentError("a --game or --graph file is required")
    with open(path) as fh:
        instance, options = parse_game(fh.read())
    if budget is not None:
        instance = GameInstance(instance.graph, budget)
    elif graph:
        raise DocumentError("--graph needs an explicit --budget")
    return instance, options


def _emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(human)


def _fmt_x(x: dict[str, float]) -> str:
    rows = [f"  {k:<14} {v:.6f}" for k, v in sorted(x.items()) if v > 0]
    return "\n".join(rows) if rows else "  (no investment)"


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Security-investment games on acyclic attack graphs."""


common_game_options = [
    click.option("--game", type=click.Path(exists=True), help="game document (graph + budget)"),
    click.option("--graph", type=click.Path(exists=True), help="bare graph document"),
    click.option("--budget", type=float, default=None, help="budget override"),
    click.option("--json", "as_json", is_flag=True, help="machine-readable output"),
]


def with_game_options(fn):
    for opt in reversed(common_game_options):
        fn = opt(fn)
    return fn


@main.command("solve")
@with_game_options
@click.option("--tolerance", type=float, default=1e-8, show_default=True)
@click.option(
    "--strategy",
    type=click.Choice(["optimal", "perimeter"]),
    default="optimal",
    show_default=True,
)
def solve_cmd(game, graph, budget, as_json, tolerance, strategy):
    """Compute the defender's equilibrium (or evaluate a perimeter strategy)."""
    try:
        instance, options = _load_game(game, graph, budget)
        tol = float(options.get("tolerance", tolerance))
        if strategy == "perimeter":
            payload, human = _perimeter_report(instance)
        else:
            res = solve(instance, tol=tol)
            payload = {
                "loss": res.loss_star,
                "x": res.x_star.as_dict(),
                "critical_paths": [list(p) for p in res.critical_paths],
                "certificate": res.certificate.as_dict(),
                "attack_probabilities": res.attack_probabilities(instance.graph),
            }
            human = (
                f"L* = {res.loss_star:.6g}\n"
                f"investments:\n{_fmt_x(res.x_star.as_dict())}\n"
                f"critical paths ({len(res.critical_paths)}):\n"
                + "\n".join("  " + " -> ".join(p) for p in res.critical_paths)
                + f"\ncertificate: gap <= {res.certificate.gap_rel:.2e} rel, "
                f"budget slack {res.certificate.budget_slack:.2e}, "
                f"{res.certificate.iterations} iterations"
            )
        _emit(payload, as_json, human)
    except NonConvergence as exc:
        _fail(exc, 3)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)


def _perimeter_report(instance: GameInstance) -> tuple[dict, str]:
    """Evaluate entry-only allocations: the published 2.25-per-entry variant
    and the full equal split of the budget."""
    g = instance.graph
    sources = sorted(v for v in g.sources if g.node(v).investable)
    if not sources:
        raise DocumentError("no investable entry nodes for a perimeter strategy")
    variants = {}
    published_share = 2.25
    if published_share * len(sources) <= instance.budget + 1e-9:
        variants["published_2.25_each"] = {s: published_share for s in sources}
    variants["equal_split"] = {s: instance.budget / len(sources) for s in sources}
    payload: dict = {"strategy": "perimeter", "variants": {}}
    lines = ["perimeter defense (entry nodes only):"]
    from .graphs import enumerate_paths

    for name, alloc in variants.items():
        wc, argmax = worst_case(g, alloc)
        per_path = {
            " -> ".join(p): path_loss(g, p, alloc) for p in enumerate_paths(g)
        }
        payload["variants"][name] = {
            "allocation": alloc,
            "worst_case_loss": wc,
            "path_losses": per_path,
        }
        lines.append(f"  {name}: worst-case loss {wc:.6g}")
        for pname, val in sorted(per_path.items(), key=lambda t: -t[1]):
            lines.append(f"    {val:.6g}  {pname}")
    optimal = solve(instance)
    payload["optimal_loss"] = optimal.loss_star
    lines.append(f"  optimal strategy for comparison: L* = {optimal.loss_star:.6g}")
    return payload, "\n".join(lines)


@main.command("reduce")
@with_game_options
@click.option("--tolerance", type=float, default=1e-8, show_default=True)
def reduce_cmd(game, graph, budget, as_json, tolerance):
    """Reduce the graph, solve the reduced game, back-map the investments."""
    try:
        instance, options = _load_game(game, graph, budget)
        reduced, trace = reduce_graph(instance.graph)
        remaining = instance.budget - trace.committed_total
        payload: dict = {
            "reduced_graph": serialize_graph(reduced),
            "trace": trace.as_dict(),
            "committed_budget": trace.committed_total,
        }
        lines = [
            f"reduced to {len(reduced)} nodes "
            f"({len(trace.original)} originally), "
            f"{trace.committed_total:.6g} of the budget committed in constants",
        ]
        for s in trace.steps:
            lines.append(f"  {s.kind}: {', '.join(s.consumed)}"
                         + (f" -> {s.produced}" if s.produced else ""))
        if remaining >= -1e-9:
            res = solve(
                GameInstance(reduced, max(remaining, 0.0)),
                tol=float(options.get("tolerance", tolerance)),
            )
            x = backmap(trace, res.x_star, instance.budget)
            payload["reduced_loss"] = res.loss_star
            payload["x"] = x.as_dict()
            lines.append(f"reduced-game L* = {res.loss_star:.6g}")
            lines.append("back-mapped investments:\n" + _fmt_x(x.as_dict()))
        else:
            lines.append("budget below the committed level: solve skipped")
        _emit(payload, as_json, "\n".join(lines))
    except NonConvergence as exc:
        _fail(exc, 3)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)


@main.command("intervene")
@with_game_options
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--tolerance", type=float, default=1e-8, show_default=True)
def intervene_cmd(game, graph, budget, as_json, spec_path, tolerance):
    """Apply one intervention spec and report before/after equilibria."""
    try:
        instance, _ = _load_game(game, graph, budget)
        with open(spec_path) as fh:
            specs = parse_spec_list(fh.read())
        if len(specs) != 1:
            raise DocumentError("intervene expects exactly one spec; use rank for lists")
        report = evaluate_intervention(instance, specs[0], tol=tolerance)
        payload = report.as_dict()
        human = (
            f"{report.verdict}: base L* = {report.base_loss:.6g} -> "
            f"modified L* = {report.modified_loss:.6g} "
            f"(delta {report.delta:+.6g})\n"
            f"modified investments:\n{_fmt_x(report.modified_x.as_dict())}"
        )
        if report.warnings:
            human += "\nwarnings: " + "; ".join(report.warnings)
        _emit(payload, as_json, human)
    except NonConvergence as exc:
        _fail(exc, 3)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)


@main.command("rank")
@with_game_options
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--tolerance", type=float, default=1e-8, show_default=True)
def rank_cmd(game, graph, budget, as_json, spec_path, tolerance):
    """Evaluate a list of intervention specs, best (lowest loss) first."""
    try:
        instance, _ = _load_game(game, graph, budget)
        with open(spec_path) as fh:
            specs = parse_spec_list(fh.read())
        reports, failures = rank_interventions(instance, specs, tol=tolerance)
        payload = {
            "ranking": [
                {"candidate": i, **r.as_dict()} for i, r in reports
            ],
            "failures": [
                {"candidate": i, "error": str(e)} for i, e in failures
            ],
        }
        lines = ["rank  cand  verdict   modified L*"]
        for pos, (i, r) in enumerate(reports, 1):
            lines.append(f"{pos:>4}  {i:>4}  {r.verdict:<8}  {r.modified_loss:.6g}")
        for i, e in failures:
            lines.append(f"   -  {i:>4}  failed    {e}")
        _emit(payload, as_json, "\n".join(lines))
    except NonConvergence as exc:
        _fail(exc, 3)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)


@main.command("oracle")
@with_game_options
@click.option("--resolution", type=float, default=1e-3, show_default=True)
def oracle_cmd(game, graph, budget, as_json, resolution):
    """Exhaustive lattice search (independent check, <= 6 investable nodes)."""
    try:
        instance, options = _load_game(game, graph, budget)
        res = grid_oracle(instance, resolution=float(options.get("resolution", resolution)))
        payload = {
            "loss": res.loss_star,
            "x": res.x_star.as_dict(),
            "oracle_bound": res.certificate.oracle_bound,
            "evaluations": res.certificate.iterations,
        }
        human = (
            f"lattice minimum {res.loss_star:.6g} "
            f"(within {res.certificate.oracle_bound:.3g} of the optimum)\n"
            f"investments:\n{_fmt_x(res.x_star.as_dict())}"
        )
        _emit(payload, as_json, human)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)
    except SecinvestError as exc:
        _fail(exc, 2)


@main.command("sufficient-budget")
@with_game_options
def sufficient_cmd(game, graph, budget, as_json):
    """Budget level beyond which the zero-investment set is stable."""
    try:
        instance, _ = _load_game(game, graph, budget if budget is not None else 0.0)
        needed = sufficient_budget(instance.graph)
        payload = {"sufficient_budget": needed}
        _emit(payload, as_json, f"sufficient budget: {needed:.6g}")
    except NonConvergence as exc:
        _fail(exc, 3)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve_cmd(port, host):
    """Start the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
