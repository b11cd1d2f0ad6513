"""Network design interventions: graph transformations and their evaluation.

Four redesign actions add nodes to the attack graph: a series safeguard
spliced into an edge, a structurally redundant parallel node, a functionally
redundant hybrid pair (the attacker must traverse both redundant nodes via
zero-loss auxiliaries), and a new entry node.  Evaluation solves the game
before and after at equal budget and reports the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

from .budget import sufficient_budget
from .errors import InvalidAnchor, SecinvestError
from .graphs import AttackGraph, InvestmentProfile, NodeAttr, validate
from .solver import GameInstance, solve

KINDS = ("series", "parallel", "hybrid", "input")
NEUTRAL_BAND = 1e-6


@dataclass(frozen=True)
class InterventionSpec:
    """One candidate transformation.

    kind    series | parallel | hybrid | input
    anchor  series: the edge (u, v) to splice, or a node id whose unique
            outgoing edge is spliced; parallel/hybrid: the node to
            duplicate; input: the existing node the new entry feeds
    node    attributes of the added node
    """

    kind: str
    anchor: str | tuple[str, str]
    node: NodeAttr

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "anchor": list(self.anchor) if isinstance(self.anchor, tuple) else self.anchor,
            "node": {
                "id": self.node.id,
                "loss": self.node.loss,
                "p0": self.node.p0,
                "kappa": self.node.kappa,
                "investable": self.node.investable,
            },
        }


@dataclass(frozen=True)
class InterventionReport:
    spec: InterventionSpec
    base_loss: float
    modified_loss: float
    base_x: InvestmentProfile
    modified_x: InvestmentProfile
    verdict: str  # Improves | Worsens | Neutral
    base_probabilities: dict[str, float]
    modified_probabilities: dict[str, float]
    warnings: tuple[str, ...] = ()

    @property
    def delta(self) -> float:
        return self.modified_loss - self.base_loss

    def as_dict(self) -> dict:
        return {
            "spec": self.spec.as_dict(),
            "base_loss": self.base_loss,
            "modified_loss": self.modified_loss,
            "delta": self.delta,
            "verdict": self.verdict,
            "base_x": self.base_x.as_dict(),
            "modified_x": self.modified_x.as_dict(),
            "base_probabilities": self.base_probabilities,
            "modified_probabilities": self.modified_probabilities,
            "warnings": list(self.warnings),
        }


def _series_edge(g: AttackGraph, anchor) -> tuple[str, str]:
    if isinstance(anchor, tuple):
        u, v = anchor
        if (u, v) not in set(g.edges):
            raise InvalidAnchor(f"edge ({u}, {v}) not in graph")
        return u, v
    if anchor not in g:
        raise InvalidAnchor(f"anchor node {anchor!r} not in graph")
    succs = g.successors(anchor)
    if len(succs) != 1:
        raise InvalidAnchor(
            f"series anchor {anchor!r} has {len(succs)} outgoing edges; "
            "name the edge explicitly"
        )
    return anchor, succs[0]


def apply_intervention(g: AttackGraph, spec: InterventionSpec) -> AttackGraph:
    """Transformed copy of the graph; the input graph is never mutated.

    The result is re-validated, so an intervention that breaks a structural
    invariant raises GraphValidationError.
    """
    new = spec.node
    if new.id in g:
        raise InvalidAnchor(f"new node id {new.id!r} already exists")
    nodes = list(g.nodes())
    edges = list(g.edges)
    sources = set(g.sources)

    if spec.kind == "series":
        u, v = _series_edge(g, spec.anchor)
        edges.remove((u, v))
        nodes.append(new)
        edges += [(u, new.id), (new.id, v)]
    elif spec.kind == "parallel":
        a = _anchor_node(g, spec.anchor)
        preds, succs = g.predecessors(a), g.successors(a)
        if not preds or not succs:
            raise InvalidAnchor("parallel anchor needs predecessors and successors")
        nodes.append(new)
        edges += [(u, new.id) for u in preds] + [(new.id, w) for w in succs]
    elif spec.kind == "hybrid":
        a = _anchor_node(g, spec.anchor)
        preds, succs = g.predecessors(a), g.successors(a)
        if not preds or not succs:
            raise InvalidAnchor("hybrid anchor needs predecessors and successors")
        attr_a = g.node(a)
        aux_of_anchor = NodeAttr(f"{a}'", 0.0, attr_a.p0, attr_a.kappa, True)
        aux_of_new = NodeAttr(f"{new.id}'", 0.0, new.p0, new.kappa, True)
        for aux in (aux_of_anchor, aux_of_new):
            if aux.id in g:
                raise InvalidAnchor(f"auxiliary id {aux.id!r} already exists")
        nodes += [new, aux_of_anchor, aux_of_new]
        edges = [e for e in edges if e[0] != a]
        edges += [(u, new.id) for u in preds]
        edges += [(a, aux_of_new.id), (new.id, aux_of_anchor.id)]
        edges += [(aux_of_new.id, w) for w in succs]
        edges += [(aux_of_anchor.id, w) for w in succs]
    elif spec.kind == "input":
        a = _anchor_node(g, spec.anchor)
        if a == g.target:
            raise InvalidAnchor("a new entry node cannot feed the target directly")
        nodes.append(new)
        edges.append((new.id, a))
        sources.add(new.id)
    return validate(nodes, edges, sorted(sources), g.target)


def _anchor_node(g: AttackGraph, anchor) -> str:
    if isinstance(anchor, tuple):
        raise InvalidAnchor("this intervention kind anchors on a node, not an edge")
    if anchor not in g:
        raise InvalidAnchor(f"anchor node {anchor!r} not in graph")
    return anchor


def evaluate_intervention(
    game: GameInstance,
    spec: InterventionSpec,
    tol: float = 1e-8,
    check_sufficiency: bool = True,
) -> InterventionReport:
    """Solve base and modified games at equal budget and compare.

    The verdict is Neutral within a relative band of 1e-6; a warning is
    attached when either game's budget is below its sufficient level.
    """
    modified = apply_intervention(game.graph, spec)
    base_res = solve(game, tol=tol)
    mod_res = solve(GameInstance(modified, game.budget), tol=tol)
    warnings = []
    if check_sufficiency:
        for label, graph in (("base", game.graph), ("modified", modified)):
            try:
                need = sufficient_budget(graph)
            except SecinvestError:
                continue
            if game.budget < need - 1e-9:
                warnings.append(
                    f"{label} budget {game.budget:.6g} below sufficient {need:.6g}"
                )
    delta = mod_res.loss_star - base_res.loss_star
    if abs(delta) <= NEUTRAL_BAND * max(abs(base_res.loss_star), 1e-300):
        verdict = "Neutral"
    elif delta < 0:
        verdict = "Improves"
    else:
        verdict = "Worsens"
    return InterventionReport(
        spec=spec,
        base_loss=base_res.loss_star,
        modified_loss=mod_res.loss_star,
        base_x=base_res.x_star,
        modified_x=mod_res.x_star,
        verdict=verdict,
        base_probabilities=base_res.attack_probabilities(game.graph),
        modified_probabilities=mod_res.attack_probabilities(modified),
        warnings=tuple(warnings),
    )


def rank_interventions(
    game: GameInstance,
    specs: list[InterventionSpec],
    tol: float = 1e-8,
    check_sufficiency: bool = False,
) -> tuple[list[tuple[int, InterventionReport]], list[tuple[int, Exception]]]:
    """Evaluate every candidate; rank successes by modified loss, ascending.

    Ties break by candidate position.  Failures are returned alongside so a
    bad candidate cannot hide the others.
    """
    if not specs:
        raise ValueError("candidate list is empty")
    reports: list[tuple[int, InterventionReport]] = []
    failures: list[tuple[int, Exception]] = []
    for i, spec in enumerate(specs):
        try:
            reports.append(
                (i, evaluate_intervention(game, spec, tol, check_sufficiency))
            )
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            failures.append((i, exc))
    reports.sort(key=lambda t: (t[1].modified_loss, t[0]))
    return reports, failures
