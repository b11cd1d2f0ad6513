"""HTTP service exposing the engine to scripts and the what-if UI.

Stateless JSON API over the shared document formats.  Responses carry the
same payloads the CLI emits in --json mode, plus a request echo and the
engine version.  Errors: 400 with a structured violation list for invalid
documents or graphs, 413 when the path count exceeds the cap, 422 with the
partial certificate when the solver fails to converge.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .documents import (
    list_examples,
    load_example,
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
    SecinvestError,
)
from .interventions import evaluate_intervention, rank_interventions
from .reduction import backmap, reduce_graph
from .graphs import DEFAULT_PATH_CAP
from .solver import GameInstance, solve

app = FastAPI(title="secinvest", version=__version__)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


def _error_body(code: str, message: str, locations: list[dict] | None = None) -> dict:
    return {"code": code, "message": message, "locations": locations or []}


@app.exception_handler(GraphValidationError)
async def _graph_error(_req: Request, exc: GraphValidationError):
    return JSONResponse(
        status_code=400,
        content=_error_body(
            "ValidationFailed",
            "attack graph invariants violated",
            [v.as_dict() for v in exc.violations],
        ),
    )


@app.exception_handler(DocumentError)
async def _doc_error(_req: Request, exc: DocumentError):
    return JSONResponse(
        status_code=400,
        content=_error_body("SyntaxError", str(exc), [{"where": exc.location}]),
    )


@app.exception_handler(InvalidAnchor)
async def _anchor_error(_req: Request, exc: InvalidAnchor):
    return JSONResponse(status_code=400, content=_error_body("InvalidAnchor", str(exc)))


@app.exception_handler(PathExplosion)
async def _paths_error(_req: Request, exc: PathExplosion):
    return JSONResponse(status_code=413, content=_error_body("PathExplosion", str(exc)))


@app.exception_handler(NonConvergence)
async def _solver_error(_req: Request, exc: NonConvergence):
    return JSONResponse(
        status_code=422,
        content=_error_body(
            "NonConvergence",
            str(exc),
            [{"achieved_gap": exc.gap, "tolerance": exc.tol, "iterations": exc.iterations}],
        ),
    )


@app.exception_handler(SecinvestError)
async def _engine_error(_req: Request, exc: SecinvestError):
    return JSONResponse(status_code=400, content=_error_body(exc.code, str(exc)))


def _solve_payload(instance: GameInstance, options: dict) -> dict:
    res = solve(
        instance,
        tol=float(options.get("tolerance", 1e-8)),
        path_cap=int(options.get("path_cap", DEFAULT_PATH_CAP)),
    )
    return {
        "loss": res.loss_star,
        "x": res.x_star.as_dict(),
        "critical_paths": [list(p) for p in res.critical_paths],
        "certificate": res.certificate.as_dict(),
        "attack_probabilities": res.attack_probabilities(instance.graph),
    }


@app.post("/api/solve")
async def api_solve(request: Request):
    body = await request.json()
    instance, options = parse_game(body)
    return {
        "engine": __version__,
        "request": body,
        "result": _solve_payload(instance, options),
    }


@app.post("/api/reduce")
async def api_reduce(request: Request):
    body = await request.json()
    instance, options = parse_game(body)
    reduced, trace = reduce_graph(instance.graph)
    remaining = instance.budget - trace.committed_total
    result = {
        "reduced_graph": serialize_graph(reduced),
        "trace": trace.as_dict(),
        "committed_budget": trace.committed_total,
    }
    if remaining >= -1e-9:
        res = solve(
            GameInstance(reduced, max(remaining, 0.0)),
            tol=float(options.get("tolerance", 1e-8)),
        )
        result["reduced_loss"] = res.loss_star
        result["x"] = backmap(trace, res.x_star, instance.budget).as_dict()
    return {"engine": __version__, "request": body, "result": result}


@app.post("/api/intervene")
async def api_intervene(request: Request):
    body = await request.json()
    if not isinstance(body, dict) or "game" not in body or "spec" not in body:
        raise DocumentError("body must carry 'game' and 'spec'", "body")
    instance, options = parse_game(body["game"])
    specs = parse_spec_list(body["spec"])
    if len(specs) != 1:
        raise DocumentError("intervene expects exactly one spec; use /api/rank", "spec")
    report = evaluate_intervention(
        instance, specs[0], tol=float(options.get("tolerance", 1e-8))
    )
    return {"engine": __version__, "request": body, "result": report.as_dict()}


@app.post("/api/rank")
async def api_rank(request: Request):
    body = await request.json()
    if not isinstance(body, dict) or "game" not in body or "spec" not in body:
        raise DocumentError("body must carry 'game' and 'spec'", "body")
    instance, options = parse_game(body["game"])
    specs = parse_spec_list(body["spec"])
    reports, failures = rank_interventions(
        instance, specs, tol=float(options.get("tolerance", 1e-8))
    )
    return {
        "engine": __version__,
        "request": body,
        "result": {
            "ranking": [{"candidate": i, **r.as_dict()} for i, r in reports],
            "failures": [{"candidate": i, "error": str(e)} for i, e in failures],
        },
    }


@app.get("/api/examples")
async def api_examples():
    return list_examples()


@app.get("/api/examples/{name}")
async def api_example(name: str):
    return load_example(name)
