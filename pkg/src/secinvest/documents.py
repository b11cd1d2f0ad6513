"""JSON document formats shared by the CLI, the HTTP service and the UI.

A graph document is ``{nodes: [{id, loss, p0, kappa, investable}], edges:
[[src, dst]], sources: [...], target: id}``; a game document wraps it with a
budget and optional solver options.  Both may carry a free-form ``meta``
object which round-trips untouched.  Parse errors carry a document location;
attack-graph invariant violations surface as GraphValidationError.
"""

from __future__ import annotations

import importlib.resources
import json
from typing import Any

from .errors import DocumentError
from .graphs import AttackGraph, NodeAttr, validate
from .solver import GameInstance

GAME_OPTION_KEYS = ("tolerance", "path_cap", "resolution")


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise DocumentError(f"missing field {key!r}", where)
    val = doc[key]
    if kind is float:
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise DocumentError(f"field {key!r} must be a number", where)
        return float(val)
    if not isinstance(val, kind):
        raise DocumentError(f"field {key!r} must be {kind.__name__}", where)
    return val


def parse_node(doc: Any, where: str) -> NodeAttr:
    if not isinstance(doc, dict):
        raise DocumentError("node entry must be an object", where)
    nid = _require(doc, "id", str, where)
    loss = _require(doc, "loss", float, where)
    p0 = float(doc.get("p0", 1.0))
    kappa = float(doc.get("kappa", 1.0) if doc.get("kappa") is not None else 1.0)
    investable = bool(doc.get("investable", True))
    return NodeAttr(nid, loss, p0, kappa, investable)


def parse_graph(doc: Any, where: str = "graph") -> AttackGraph:
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}"
            ) from None
    if not isinstance(doc, dict):
        raise DocumentError("graph document must be an object", where)
    nodes_doc = _require(doc, "nodes", list, where)
    if not nodes_doc:
        raise DocumentError("nodes list is empty", f"{where}.nodes")
    nodes = [parse_node(n, f"{where}.nodes[{i}]") for i, n in enumerate(nodes_doc)]
    edges_doc = _require(doc, "edges", list, where)
    edges = []
    for i, e in enumerate(edges_doc):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise DocumentError("edge must be a [src, dst] pair", f"{where}.edges[{i}]")
        edges.append((str(e[0]), str(e[1])))
    sources = [str(s) for s in _require(doc, "sources", list, where)]
    target = _require(doc, "target", str, where)
    return validate(nodes, edges, sources, target)


def parse_game(doc: Any) -> tuple[GameInstance, dict]:
    """Game document -> (instance, options).  Accepts a bare graph document
    too (budget then defaults to 0)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}"
            ) from None
    if not isinstance(doc, dict):
        raise DocumentError("game document must be an object", "game")
    if "graph" not in doc:
        return GameInstance(parse_graph(doc), 0.0), {}
    graph = parse_graph(doc["graph"])
    budget = _require(doc, "budget", float, "game")
    if budget < 0:
        raise DocumentError("budget must be >= 0", "game.budget")
    options = doc.get("options", {}) or {}
    if not isinstance(options, dict):
        raise DocumentError("options must be an object", "game.options")
    unknown = set(options) - set(GAME_OPTION_KEYS)
    if unknown:
        raise DocumentError(f"unknown options {sorted(unknown)}", "game.options")
    return GameInstance(graph, budget), options


def node_as_dict(a: NodeAttr) -> dict:
    return {
        "id": a.id,
        "loss": a.loss,
        "p0": a.p0,
        "kappa": a.kappa,
        "investable": a.investable,
    }


def serialize_graph(g: AttackGraph, meta: dict | None = None) -> dict:
    doc = {
        "nodes": [node_as_dict(g.node(v)) for v in g.node_ids],
        "edges": [list(e) for e in g.edges],
        "sources": sorted(g.sources),
        "target": g.target,
    }
    if meta:
        doc["meta"] = meta
    return doc


def serialize_game(game: GameInstance, options: dict | None = None) -> dict:
    doc = {"graph": serialize_graph(game.graph), "budget": game.budget}
    if options:
        doc["options"] = options
    return doc


def parse_spec(doc: Any, where: str = "spec") -> "InterventionSpec":
    from .interventions import KINDS, InterventionSpec

    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}"
            ) from None
    if not isinstance(doc, dict):
        raise DocumentError("intervention spec must be an object", where)
    kind = _require(doc, "kind", str, where)
    if kind not in KINDS:
        raise DocumentError(f"kind must be one of {KINDS}", f"{where}.kind")
    anchor = doc.get("anchor")
    if isinstance(anchor, list):
        if len(anchor) != 2:
            raise DocumentError("an edge anchor needs [src, dst]", f"{where}.anchor")
        anchor = (str(anchor[0]), str(anchor[1]))
    elif isinstance(anchor, str):
        pass
    else:
        raise DocumentError("anchor must be a node id or an edge pair", f"{where}.anchor")
    node = parse_node(_require(doc, "node", dict, where), f"{where}.node")
    return InterventionSpec(kind=kind, anchor=anchor, node=node)


def parse_spec_list(doc: Any) -> list["InterventionSpec"]:
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}"
            ) from None
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list):
        raise DocumentError("expected an intervention spec or a list of them", "spec")
    return [parse_spec(s, f"spec[{i}]") for i, s in enumerate(doc)]


def list_examples() -> list[str]:
    root = importlib.resources.files("secinvest.datasets")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_example(name: str) -> dict:
    root = importlib.resources.files("secinvest.datasets")
    path = root / f"{name}.json"
    if not path.is_file():
        raise DocumentError(f"no bundled example named {name!r}", "examples")
    return json.loads(path.read_text())
