"""Attack-graph data model, validation, reachability and expected-loss evaluation.

A node models one asset: compromising it costs the defender its stand-alone
loss, weighted by the probability that the attacker got this far.  Investing
x on a node drives its compromise probability down exponentially,
``p(x) = p0 * exp(-kappa * x)``.  The attacker walks one source-to-target
path; the loss of a path is the sum of each visited node's stand-alone loss
times the cumulative compromise probability of the path prefix up to and
including that node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import GraphValidationError, PathExplosion, UnknownNode, Violation

DEFAULT_PATH_CAP = 10**6


@dataclass(frozen=True)
class NodeAttr:
    """Security attributes of one asset.

    loss        stand-alone loss if compromised (>= 0, dimensionless units)
    p0          default compromise probability with zero investment, in (0, 1]
    kappa       sensitivity: exponential decay rate per unit investment (>= 1)
    investable  False for the target and any asset the defender cannot touch
    """

    id: str
    loss: float
    p0: float = 1.0
    kappa: float = 1.0
    investable: bool = True

    def prob(self, x: float) -> float:
        """Compromise probability under investment x."""
        return self.p0 * math.exp(-self.kappa * x)


class AttackGraph:
    """Validated immutable DAG with a nonempty source set and a unique target.

    Construct through :func:`validate`; the constructor assumes structurally
    sound input and only freezes it.
    """

    def __init__(
        self,
        nodes: Iterable[NodeAttr],
        edges: Iterable[tuple[str, str]],
        sources: Iterable[str],
        target: str,
    ):
        self._nodes: dict[str, NodeAttr] = {n.id: n for n in nodes}
        self._edges: tuple[tuple[str, str], ...] = tuple(edges)
        self.sources: frozenset[str] = frozenset(sources)
        self.target: str = target
        self._succ: dict[str, tuple[str, ...]] = {v: () for v in self._nodes}
        self._pred: dict[str, tuple[str, ...]] = {v: () for v in self._nodes}
        succ: dict[str, list[str]] = {v: [] for v in self._nodes}
        pred: dict[str, list[str]] = {v: [] for v in self._nodes}
        for a, b in self._edges:
            succ[a].append(b)
            pred[b].append(a)
        for v in self._nodes:
            self._succ[v] = tuple(sorted(succ[v]))
            self._pred[v] = tuple(sorted(pred[v]))

    # -- basic access ------------------------------------------------------

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(self._nodes)

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self._edges

    def node(self, v: str) -> NodeAttr:
        try:
            return self._nodes[v]
        except KeyError:
            raise UnknownNode(f"node {v!r} not in graph") from None

    def __contains__(self, v: str) -> bool:
        return v in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def nodes(self) -> tuple[NodeAttr, ...]:
        return tuple(self._nodes.values())

    def successors(self, v: str) -> tuple[str, ...]:
        self.node(v)
        return self._succ[v]

    def predecessors(self, v: str) -> tuple[str, ...]:
        self.node(v)
        return self._pred[v]

    def investable_ids(self) -> tuple[str, ...]:
        return tuple(v for v, a in self._nodes.items() if a.investable)

    def topological_order(self) -> tuple[str, ...]:
        return _topological_order(self._nodes, self._succ, self._pred)

    def replace_attrs(self, new_attrs: Mapping[str, NodeAttr]) -> "AttackGraph":
        """Copy of the graph with some node attributes swapped (same topology)."""
        nodes = [new_attrs.get(v, a) for v, a in self._nodes.items()]
        return AttackGraph(nodes, self._edges, self.sources, self.target)


def _topological_order(nodes, succ, pred) -> tuple[str, ...]:
    indeg = {v: len(pred[v]) for v in nodes}
    frontier = sorted(v for v in nodes if indeg[v] == 0)
    order: list[str] = []
    while frontier:
        v = frontier.pop(0)
        order.append(v)
        changed = False
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                frontier.append(w)
                changed = True
        if changed:
            frontier.sort()
    return tuple(order)


def validate(
    nodes: Iterable[NodeAttr],
    edges: Iterable[tuple[str, str]],
    sources: Iterable[str],
    target: str,
) -> AttackGraph:
    """Check every attack-graph invariant; return the frozen graph or raise.

    All violations are collected and raised together as
    :class:`GraphValidationError`.
    """
    nodes = list(nodes)
    edges = [tuple(e) for e in edges]
    sources = list(sources)
    bad: list[Violation] = []

    ids = [n.id for n in nodes]
    by_id = {n.id: n for n in nodes}
    if len(ids) != len(set(ids)):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        bad.append(Violation("DuplicateNode", f"duplicate node ids {dupes}", ",".join(dupes)))
    if not nodes:
        bad.append(Violation("EmptyGraph", "graph has no nodes"))
        raise GraphValidationError(bad)

    for a, b in edges:
        for v in (a, b):
            if v not in by_id:
                bad.append(Violation("UnknownNode", f"edge ({a}, {b}) references unknown node {v!r}", v))
    if target not in by_id:
        bad.append(Violation("UnknownNode", f"target {target!r} not among nodes", target))
    for s in sources:
        if s not in by_id:
            bad.append(Violation("UnknownNode", f"source {s!r} not among nodes", s))
    if bad:
        raise GraphValidationError(bad)

    # Attribute ranges: loss >= 0, 0 < p0 <= 1, kappa >= 1.
    for n in nodes:
        if not (n.loss >= 0.0) or not math.isfinite(n.loss):
            bad.append(Violation("AttributeOutOfRange", f"loss must be >= 0, got {n.loss}", n.id))
        if not (0.0 < n.p0 <= 1.0):
            bad.append(Violation("AttributeOutOfRange", f"p0 must be in (0, 1], got {n.p0}", n.id))
        if n.investable and not (n.kappa >= 1.0):
            bad.append(Violation("AttributeOutOfRange", f"kappa must be >= 1, got {n.kappa}", n.id))
    tgt = by_id[target]
    if tgt.loss <= 0.0:
        bad.append(Violation("AttributeOutOfRange", "target loss must be > 0", target))
    if tgt.investable:
        bad.append(Violation("InvestableTarget", "the target node cannot be investable", target))

    succ: dict[str, list[str]] = {v: [] for v in by_id}
    pred: dict[str, list[str]] = {v: [] for v in by_id}
    seen_edges = set()
    for a, b in edges:
        if (a, b) in seen_edges:
            continue
        seen_edges.add((a, b))
        succ[a].append(b)
        pred[b].append(a)

    order = _topological_order(by_id, succ, pred)
    if len(order) != len(by_id):
        in_cycle = sorted(set(by_id) - set(order))
        bad.append(Violation("CycleDetected", f"cycle through {in_cycle}", ",".join(in_cycle)))
        raise GraphValidationError(bad)

    sinks = sorted(v for v in by_id if not succ[v])
    if len(sinks) > 1:
        bad.append(Violation("MultipleTargets", f"multiple sink nodes {sinks}; exactly one target allowed",
                             ",".join(sinks)))
    elif sinks and sinks[0] != target:
        bad.append(Violation("MultipleTargets", f"declared target {target!r} is not the sink {sinks[0]!r}", target))
    if succ.get(target):
        bad.append(Violation("MultipleTargets", "target must have out-degree 0", target))

    src_set = set(sources)
    if not src_set:
        bad.append(Violation("UnreachableTarget", "source set is empty"))
    for s in src_set:
        if pred.get(s):
            bad.append(Violation("DanglingNode", f"declared source {s!r} has incoming edges", s))
    for v in by_id:
        if not pred[v] and v not in src_set and v != target:
            bad.append(Violation("DanglingNode", f"node {v!r} has in-degree 0 but is not a declared source", v))

    # Reachability: every node must sit on at least one source-to-target path.
    fwd = _reach(src_set, succ)
    back = _reach({target}, pred)
    if target not in fwd:
        bad.append(Violation("UnreachableTarget", "no source reaches the target", target))
    else:
        for v in by_id:
            if v not in fwd or v not in back:
                bad.append(Violation("DanglingNode", f"node {v!r} lies on no source-to-target path", v))

    if bad:
        raise GraphValidationError(bad)
    return AttackGraph(nodes, edges, sorted(src_set), target)


def _reach(start: set[str], adjacency: Mapping[str, list[str]]) -> set[str]:
    seen = set(start)
    stack = list(start)
    while stack:
        v = stack.pop()
        for w in adjacency.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def pre_set(g: AttackGraph, v: str) -> frozenset[str]:
    """All nodes from which v can be reached, including v itself."""
    g.node(v)
    return frozenset(_reach({v}, {u: list(g.predecessors(u)) for u in g.node_ids}))


def post_set(g: AttackGraph, v: str) -> frozenset[str]:
    """All nodes reachable from v, including v itself."""
    g.node(v)
    return frozenset(_reach({v}, {u: list(g.successors(u)) for u in g.node_ids}))


def count_paths(g: AttackGraph) -> int:
    """Number of source-to-target paths, without enumerating them."""
    counts = {g.target: 1}
    for v in reversed(g.topological_order()):
        if v not in counts:
            counts[v] = sum(counts.get(w, 0) for w in g.successors(v))
    return sum(counts.get(s, 0) for s in g.sources)


def enumerate_paths(g: AttackGraph, cap: int = DEFAULT_PATH_CAP) -> list[tuple[str, ...]]:
    """Every source-to-target path exactly once, lexicographic by node sequence.

    Raises :class:`PathExplosion` if the path count exceeds ``cap``; callers
    are expected to reduce the graph first.
    """
    n = count_paths(g)
    if n > cap:
        raise PathExplosion(n, cap)
    paths: list[tuple[str, ...]] = []
    stack: list[str] = []

    def walk(v: str) -> None:
        stack.append(v)
        if v == g.target:
            paths.append(tuple(stack))
        else:
            for w in g.successors(v):
                walk(w)
        stack.pop()

    for s in sorted(g.sources):
        walk(s)
    return paths


class InvestmentProfile(Mapping[str, float]):
    """Nonnegative per-node investments; zero is implied for absent nodes.

    Entries on non-investable nodes must be zero.  Immutable mapping.
    """

    def __init__(self, values: Mapping[str, float] | None = None):
        vals = {k: float(v) for k, v in (values or {}).items() if v != 0.0}
        for k, v in vals.items():
            if v < 0.0 or not math.isfinite(v):
                raise ValueError(f"investment on {k!r} must be finite and >= 0, got {v}")
        self._values = vals

    @classmethod
    def zero(cls) -> "InvestmentProfile":
        return cls({})

    def check_against(self, g: AttackGraph) -> "InvestmentProfile":
        for k, v in self._values.items():
            attr = g.node(k)
            if not attr.investable and v != 0.0:
                raise ValueError(f"node {k!r} is not investable but has investment {v}")
        return self

    def total(self) -> float:
        return sum(self._values.values())

    def __getitem__(self, k: str) -> float:
        return self._values.get(k, 0.0)

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def get(self, k: str, default: float = 0.0) -> float:
        return self._values.get(k, default)

    def as_dict(self) -> dict[str, float]:
        return dict(self._values)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v:.6g}" for k, v in sorted(self._values.items()))
        return f"InvestmentProfile({{{inner}}})"


def path_loss(g: AttackGraph, path: Iterable[str], x: Mapping[str, float]) -> float:
    """Expected loss of one attack path under investment profile x.

    Each node's stand-alone loss is weighted by the product of the compromise
    probabilities of all its path predecessors and of the node itself.
    """
    total = 0.0
    prob = 1.0
    for v in path:
        attr = g.node(v)
        prob *= attr.prob(x.get(v, 0.0) if hasattr(x, "get") else x[v])
        total += attr.loss * prob
    return total


def worst_case(
    g: AttackGraph,
    x: Mapping[str, float],
    tie_tol: float = 1e-9,
    cap: int = DEFAULT_PATH_CAP,
) -> tuple[float, list[tuple[str, ...]]]:
    """Attacker best response: the maximal path loss and every path attaining it.

    Ties are judged with absolute tolerance ``tie_tol``.
    """
    paths = enumerate_paths(g, cap)
    losses = [path_loss(g, p, x) for p in paths]
    best = max(losses)
    argmax = [p for p, l in zip(paths, losses) if l >= best - tie_tol]
    return best, argmax
