"""Series/parallel/input-node reduction calculus with investment back-mapping.

Under a sufficient budget, the optimal investment on every node except each
block's outermost one is a budget-independent closed form.  The engine walks
the graph from the target upward: it folds zero-investment nodes into their
predecessors, commits the closed-form investments of inner chain nodes and
parallel branches (turning them into constant, non-investable nodes whose
default probability absorbs the committed decay), prunes parallel branches
that receive nothing while remembering the expected-loss floor their
untouched paths impose on the surviving branches, and finally folds
equal-loss input stars into a single equivalent entry node.  Every step
stores what back-mapping needs to rebuild the original-graph investments.

A step is applied only when the surrounding structure (constant downstream,
unique predecessors) makes its closed form exact, so the reduced game keeps
the original's optimal loss; structures the calculus cannot fold are left in
place.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import (
    DegenerateDenominator,
    DegenerateKappa,
    InfeasibleBackmap,
    UnequalInputLosses,
)
from .graphs import AttackGraph, InvestmentProfile, NodeAttr

_MAX_ROUNDS = 10_000


# ---------------------------------------------------------------------------
# trace records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionStep:
    """One applied reduction with the data needed to back-map investments.

    kind       SeriesZeroMerge | SeriesReduce | ParallelZeroPrune |
               ParallelReduce | InputZeroTest | InputReduce
    consumed   node ids removed from (or frozen in) the working graph
    produced   fresh equivalent node id, or None
    data       per-kind closure: committed investments, equalization
               parameters, floors; plain floats/strings for serialization
    """

    kind: str
    consumed: tuple[str, ...]
    produced: str | None
    data: dict

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "consumed": list(self.consumed),
            "produced": self.produced,
            "data": self.data,
        }


@dataclass
class ReductionTrace:
    steps: list[ReductionStep]
    original: AttackGraph
    reduced: AttackGraph

    @property
    def committed_total(self) -> float:
        """Budget already embedded in the reduced graph's constant nodes."""
        return sum(
            v for s in self.steps for v in s.data.get("commits", {}).values()
        )

    @property
    def input_layer_minimum(self) -> float:
        """Extra entry-layer budget needed before every entry share is >= 0."""
        return max(
            (s.data.get("layer_minimum", 0.0) for s in self.steps), default=0.0
        )

    def as_dict(self) -> dict:
        return {
            "steps": [s.as_dict() for s in self.steps],
            "committed_total": self.committed_total,
        }


# ---------------------------------------------------------------------------
# closed forms shared by the standalone reduction rules and the engine
# ---------------------------------------------------------------------------

def _merged_attr(up: NodeAttr, down: NodeAttr, new_id: str | None = None) -> NodeAttr:
    """Equivalent node for a pair whose downstream member gets zero investment.

    The merged node's own expected-loss term and onward transmission both
    reproduce the pair's at x_down = 0.
    """
    return NodeAttr(
        id=new_id or f"{up.id}+{down.id}",
        loss=up.loss / down.p0 + down.loss,
        p0=up.p0 * down.p0,
        kappa=up.kappa,
        investable=up.investable,
    )


def _eval_chain_pattern(elems, below, invested):
    """KKT evaluation of one invested-pattern on a terminal chain.

    ``elems``: (loss, p0, kappa) head to tail; ``below``: constant expected
    loss entered after the tail; ``invested[i]``: hypothesis that element i
    receives investment (index 0, the head, always does).  Returns
    (comparable value, per-element commitments with None for the head) or
    None when the hypothesis is inconsistent (some commitment <= 0 or
    non-ascending sensitivities).
    """
    eff: list[list] = []  # [loss, p0, kappa, first_index]
    for i, (loss, p0, kappa) in enumerate(elems):
        if invested[i]:
            eff.append([loss, p0, kappa, i])
        else:
            if not eff:
                return None
            eff[-1][0] = eff[-1][0] / p0 + loss
            eff[-1][1] *= p0
    for a, b in zip(eff, eff[1:]):
        if b[2] <= a[2]:
            return None
    s = len(eff)
    xs_eff: list[float] = []
    for j in range(1, s):
        l_up, _, k_up, _ = eff[j - 1]
        l_dn, p_dn, k_dn, _ = eff[j]
        d_below = k_dn * l_dn / (eff[j + 1][2] - k_dn) if j + 1 < s else below
        arg = (k_dn - k_up) * p_dn * (l_dn + d_below) / (k_up * l_up)
        if arg <= 1.0:
            return None
        xs_eff.append(math.log(arg) / k_dn)
    d1 = eff[0][2] * eff[0][0] / (eff[1][2] - eff[0][2]) if s > 1 else below
    # block value at a common total budget: exp(-k_head * T) factors out
    value = eff[0][1] * (eff[0][0] + d1) * math.exp(eff[0][2] * sum(xs_eff))
    xs: list[float | None] = [0.0] * len(elems)
    xs[0] = None
    for j in range(1, s):
        xs[eff[j][3]] = xs_eff[j - 1]
    return value, xs


def _solve_chain_block(elems, below):
    """Optimal per-node investments of a terminal chain under sufficient budget.

    Returns one entry per element: None for the head (it absorbs the budget
    remainder), a nonnegative budget-independent commitment for the rest.
    Every sign-consistent KKT pattern is evaluated and the cheapest kept;
    chains are short, so this is exact and fast.
    """
    n = len(elems)
    if n == 1:
        return [None]
    best, best_val = None, math.inf
    for pattern in itertools.product((True, False), repeat=n - 1):
        res = _eval_chain_pattern(elems, below, [True, *pattern])
        if res is None:
            continue
        value, xs = res
        if value < best_val * (1.0 - 1e-13):
            best_val, best = value, xs
    assert best is not None  # the all-zero pattern is always consistent
    return best


# ---------------------------------------------------------------------------
# standalone reduction rules (attribute-list closed forms)
# ---------------------------------------------------------------------------

def series_zero_test(
    up: NodeAttr,
    down: NodeAttr,
    end_of_chain: bool = True,
    downstream_loss: float = 0.0,
    next_kappa: float | None = None,
) -> bool:
    """True iff the downstream node of a chain pair receives zero investment.

    At the chain end, ``downstream_loss`` (the constant expected loss entered
    after the pair) folds into the downstream node.  Mid-chain, ``next_kappa``
    is the sensitivity of the invested node just below the pair.
    """
    if up.kappa >= down.kappa:
        return True
    if end_of_chain:
        rhs = ((down.kappa - up.kappa) / up.kappa) * down.p0 * (
            down.loss + downstream_loss
        )
    else:
        if next_kappa is None:
            raise ValueError("mid-chain test needs the next invested node's kappa")
        if next_kappa <= down.kappa:
            raise ValueError("mid-chain test expects ascending kappas downstream")
        rhs = (
            ((down.kappa - up.kappa) / up.kappa)
            * (next_kappa / (next_kappa - down.kappa))
            * down.p0
            * down.loss
        )
    return up.loss >= rhs


def series_merge_zeros(
    chain: list[NodeAttr], downstream_loss: float = 0.0
) -> tuple[list[NodeAttr], list[ReductionStep]]:
    """Fold every zero-investment node of a chain into its predecessor.

    Returns the surviving chain (every member would receive nonzero
    investment under a sufficient budget) and the merge steps, working from
    the last node backwards.
    """
    elems = [(n.loss, n.p0, n.kappa) for n in chain]
    solved = _solve_chain_block(elems, downstream_loss)
    nodes = list(chain)
    steps: list[ReductionStep] = []
    for i in range(len(nodes) - 1, 0, -1):
        if solved[i] == 0.0:
            merged = _merged_attr(nodes[i - 1], nodes[i])
            steps.append(
                ReductionStep(
                    "SeriesZeroMerge",
                    (nodes[i - 1].id, nodes[i].id),
                    merged.id,
                    {"commits": {nodes[i].id: 0.0}},
                )
            )
            nodes[i - 1 : i + 1] = [merged]
    return nodes, steps


def series_reduce(
    chain: list[NodeAttr], downstream_loss: float = 0.0
) -> tuple[NodeAttr, ReductionStep]:
    """Replace an all-invested chain by its single equivalent node.

    The equivalent node keeps the first node's sensitivity; its loss is the
    right-fold of the two-node closed form with ``downstream_loss`` folded
    into the last node.  Raises DegenerateKappa when consecutive
    sensitivities do not strictly increase (the zero-merge rule applies
    there instead).
    """
    if len(chain) < 2:
        raise ValueError("series reduction needs at least two nodes")
    for a, b in zip(chain, chain[1:]):
        if b.kappa <= a.kappa:
            raise DegenerateKappa(
                f"kappa must strictly increase along an invested chain "
                f"({a.id}: {a.kappa} -> {b.id}: {b.kappa})"
            )
    commits: dict[str, float] = {}
    value = downstream_loss  # expected loss entered below the current node
    for up, down in zip(chain[-2::-1], chain[:0:-1]):
        entered = down.p0 * (down.loss + value)
        arg = (down.kappa - up.kappa) * entered / (up.kappa * up.loss)
        if arg <= 1.0:
            raise DegenerateKappa(
                f"node {down.id} would receive a nonpositive investment; "
                "run the zero-merge first"
            )
        x = math.log(arg) / down.kappa
        commits[down.id] = x
        value = entered * math.exp(-down.kappa * x)
    head = chain[0]
    # The pair at the head is now (head, folded tail of value ``value``); the
    # equivalent loss carries the committed tail budget so that investing the
    # chain's TOTAL budget T on the node reproduces the chain's optimum.
    eq = NodeAttr(
        id="+".join(n.id for n in chain),
        loss=(head.loss + value) * math.exp(head.kappa * sum(commits.values())),
        p0=head.p0,
        kappa=head.kappa,
        investable=True,
    )
    step = ReductionStep(
        "SeriesReduce",
        tuple(n.id for n in chain),
        eq.id,
        {"commits": commits, "head": head.id},
    )
    return eq, step


def parallel_zero_prune(
    root: NodeAttr,
    branches: list[NodeAttr],
    terminal_loss: float,
) -> tuple[list[NodeAttr], list[ReductionStep]]:
    """Repeatedly drop the lowest-effective-loss branch that gets zero investment.

    ``terminal_loss`` is the constant expected loss entered after each
    branch.  Pruning stops when only one branch remains or the zero
    condition fails for the current minimum.
    """
    entered = {b.id: b.p0 * (b.loss + terminal_loss) for b in branches}
    active = sorted(branches, key=lambda b: (entered[b.id], b.id))
    steps: list[ReductionStep] = []
    while len(active) > 1:
        k_par = sum(1.0 / b.kappa for b in active)
        a_min = entered[active[0].id]
        if root.kappa * k_par < 1.0:
            g = root.kappa * k_par * root.loss / (1.0 - root.kappa * k_par)
            if a_min > g:
                break
        pruned = active.pop(0)
        steps.append(
            ReductionStep(
                "ParallelZeroPrune",
                (pruned.id,),
                None,
                {"commits": {pruned.id: 0.0}, "floor": entered[pruned.id]},
            )
        )
    return active, steps


def parallel_reduce(
    root: NodeAttr,
    branches: list[NodeAttr],
    terminal_loss: float,
) -> tuple[NodeAttr, ReductionStep]:
    """Equivalent node for a fan whose branches all receive investment.

    Keeps the root's sensitivity; branch investments equalize the entered
    losses at G = k_i k_par L_i / (1 - k_i k_par), which requires
    k_i * k_par < 1.
    """
    k_par = sum(1.0 / b.kappa for b in branches)
    prod = root.kappa * k_par
    if prod >= 1.0 - 1e-15:
        raise DegenerateDenominator(
            f"kappa_root * kappa_par = {prod:.6g} must be < 1 for an invested fan"
        )
    g = prod * root.loss / (1.0 - prod)
    commits: dict[str, float] = {}
    for b in branches:
        entered = b.p0 * (b.loss + terminal_loss)
        x = math.log(entered / g) / b.kappa
        if x <= 0.0:
            raise DegenerateDenominator(
                f"branch {b.id} would receive {x:.3g} <= 0; prune it first"
            )
        commits[b.id] = x
    eq = NodeAttr(
        id="+".join([root.id] + [b.id for b in branches]),
        loss=(root.loss + g) * math.exp(root.kappa * sum(commits.values())),
        p0=root.p0,
        kappa=root.kappa,
        investable=True,
    )
    step = ReductionStep(
        "ParallelReduce",
        tuple([root.id] + [b.id for b in branches]),
        eq.id,
        {"commits": commits, "equalized_value": g, "root": root.id},
    )
    return eq, step


def input_zero_test(
    inputs: list[NodeAttr],
    hub: NodeAttr,
    downstream_loss: float = 0.0,
    variant: str = "derivative",
) -> bool:
    """True iff the shared successor of an input star receives zero investment.

    ``variant`` selects the predicate.  "derivative" is the first-order
    criterion (the star's loss derivative at zero hub investment is
    nonnegative), the one consistent with the closed forms and the lattice
    oracle.  Two alternative threshold forms circulate for this test and
    disagree with it; they are kept callable ("threshold_with_target",
    "threshold_own_loss") so the comparison stays executable knowledge.
    """
    loss = inputs[0].loss
    k_par = sum(1.0 / n.kappa for n in inputs)
    prod = hub.kappa * k_par
    if variant == "derivative":
        return prod <= 1.0 or loss >= (prod - 1.0) * hub.p0 * (
            hub.loss + downstream_loss
        )
    if variant == "threshold_with_target":
        return prod <= 1.0 or loss >= (1.0 - prod) * (hub.loss + downstream_loss)
    if variant == "threshold_own_loss":
        return prod <= 1.0 or loss <= (prod - 1.0) * hub.loss
    raise ValueError(f"unknown variant {variant!r}")


def _input_fold_params(inputs: list[NodeAttr]) -> tuple[float, float, float]:
    """(kappa_par, tau, layer minimum) of an equalized entry layer."""
    k_par = sum(1.0 / n.kappa for n in inputs)
    tau = math.exp(sum(math.log(n.p0) / n.kappa for n in inputs) / k_par)
    layer_min = max(0.0, max(k_par * math.log(tau / n.p0) for n in inputs))
    return k_par, tau, layer_min


def input_reduce(
    inputs: list[NodeAttr],
    hub: NodeAttr,
    downstream_loss: float = 0.0,
) -> tuple[NodeAttr, ReductionStep]:
    """Equivalent single entry node for an equal-loss input star, hub invested."""
    losses = [n.loss for n in inputs]
    if max(losses) - min(losses) > 1e-9 * max(1.0, max(losses)):
        raise UnequalInputLosses(f"input losses differ: {losses}")
    loss = losses[0]
    k_par, tau, layer_min = _input_fold_params(inputs)
    prod = hub.kappa * k_par
    if abs(prod - 1.0) < 1e-15:
        raise DegenerateDenominator("kappa_t * kappa_par = 1")
    if input_zero_test(inputs, hub, downstream_loss):
        raise DegenerateDenominator("hub receives zero investment; fold it instead")
    hub_total = hub.p0 * (hub.loss + downstream_loss)
    x_t = math.log((prod - 1.0) * hub_total / loss) / hub.kappa
    # Total-budget form: investing the star's whole budget T (hub included)
    # on the node reproduces the star's optimum.
    eq = NodeAttr(
        id="+".join([n.id for n in inputs] + [hub.id]),
        loss=loss * (prod / (prod - 1.0)) * ((prod - 1.0) * hub_total / loss) ** (1.0 / prod),
        p0=tau,
        kappa=1.0 / k_par,
        investable=True,
    )
    step = ReductionStep(
        "InputReduce",
        tuple([n.id for n in inputs] + [hub.id]),
        eq.id,
        {
            "commits": {hub.id: x_t},
            "hub": hub.id,
            "inputs": [n.id for n in inputs],
            "input_kappa": {n.id: n.kappa for n in inputs},
            "input_p0": {n.id: n.p0 for n in inputs},
            "kappa_par": k_par,
            "tau": tau,
            "layer_minimum": layer_min,
        },
    )
    return eq, step


# ---------------------------------------------------------------------------
# graph-level reduction engine
# ---------------------------------------------------------------------------

class _Work:
    """Mutable working copy of the graph during reduction."""

    def __init__(self, g: AttackGraph):
        self.attrs: dict[str, NodeAttr] = {v: g.node(v) for v in g.node_ids}
        self.succ: dict[str, set[str]] = {v: set(g.successors(v)) for v in g.node_ids}
        self.pred: dict[str, set[str]] = {v: set(g.predecessors(v)) for v in g.node_ids}
        self.target = g.target

    def sources(self) -> list[str]:
        return sorted(v for v in self.attrs if not self.pred[v])

    def remove(self, v: str) -> None:
        for u in self.pred.pop(v):
            self.succ[u].discard(v)
        for w in self.succ.pop(v):
            self.pred[w].discard(v)
        del self.attrs[v]

    def add(self, attr: NodeAttr, preds: set[str], succs: set[str]) -> None:
        self.attrs[attr.id] = attr
        self.pred[attr.id] = set(preds)
        self.succ[attr.id] = set(succs)
        for u in preds:
            self.succ[u].add(attr.id)
        for w in succs:
            self.pred[w].add(attr.id)

    def fresh(self, base: str) -> str:
        nid = base
        while nid in self.attrs:
            nid += "'"
        return nid

    def merge_pair(self, up: str, down: str) -> str:
        """Replace (up -> down) by the zero-merge equivalent node."""
        new_id = self.fresh(f"{up}+{down}")
        merged = _merged_attr(self.attrs[up], self.attrs[down], new_id)
        preds = set(self.pred[up])
        succs = set(self.succ[down])
        self.remove(up)
        self.remove(down)
        self.add(merged, preds, succs)
        return new_id

    def commit(self, v: str, amount: float) -> None:
        """Freeze a node at its committed investment; it becomes constant."""
        a = self.attrs[v]
        self.attrs[v] = NodeAttr(
            a.id, a.loss, a.p0 * math.exp(-a.kappa * amount), a.kappa, False
        )

    def resolved_values(self) -> dict[str, float]:
        """Entered expected loss W(v) for every constant node whose downstream
        is constant too."""
        values: dict[str, float] = {}
        for v in reversed(_topo(self.attrs, self.succ, self.pred)):
            a = self.attrs[v]
            if a.investable:
                continue
            if all(w in values for w in self.succ[v]):
                below = max((values[w] for w in self.succ[v]), default=0.0)
                values[v] = a.p0 * (a.loss + below)
        return values

    def to_graph(self) -> AttackGraph:
        edges = sorted((a, b) for a in sorted(self.succ) for b in sorted(self.succ[a]))
        return AttackGraph(
            [self.attrs[v] for v in sorted(self.attrs)],
            edges,
            self.sources(),
            self.target,
        )


def _topo(attrs, succ, pred):
    indeg = {v: len(pred[v]) for v in attrs}
    frontier = sorted(v for v in attrs if indeg[v] == 0)
    out = []
    while frontier:
        v = frontier.pop(0)
        out.append(v)
        newly = False
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                frontier.append(w)
                newly = True
        if newly:
            frontier.sort()
    return out


@dataclass
class _Lineage:
    """A maximal chain of investable nodes whose downstream is constant.

    ``chain`` runs head -> bottom.  If ``layer`` is nonempty, the bottom
    chain node is a fan root whose branches (each with resolved successors)
    form the layer; ``layer_floors`` are entered values of the root's direct
    resolved successors, paths the defender cannot lower.  ``star_inputs``
    names an equal-loss all-source input star feeding the head; the
    equalized entry layer then acts as the block's outermost element.

    A lineage is *anchored* when its outermost element provably absorbs the
    budget remainder (the head is a source, or a star sits on top); only
    anchored blocks may commit interior closed forms.
    """

    chain: list[str]
    below: float = 0.0
    layer: list[str] = field(default_factory=list)
    layer_floors: list[float] = field(default_factory=list)
    star_inputs: list[str] = field(default_factory=list)
    anchored: bool = False


def _find_lineages(wk: _Work, values: dict[str, float]) -> list[_Lineage]:
    out: list[_Lineage] = []
    for v in sorted(wk.attrs):
        a = wk.attrs[v]
        if not a.investable or not wk.succ[v]:
            continue
        if all(w in values for w in wk.succ[v]):
            lin = _Lineage(chain=[v], below=max(values[w] for w in wk.succ[v]))
            _extend_upward(wk, lin)
            out.append(lin)
            continue
        # fan root: every unresolved successor is a one-node branch whose
        # own successors are resolved and whose only predecessor is v
        branches: list[str] = []
        floors: list[float] = []
        ok = True
        for w in sorted(wk.succ[v]):
            if w in values:
                floors.append(values[w])
                continue
            wa = wk.attrs[w]
            if (
                wa.investable
                and wk.pred[w] == {v}
                and wk.succ[w]
                and all(u in values for u in wk.succ[w])
            ):
                branches.append(w)
            else:
                ok = False
                break
        if ok and branches and len(branches) + len(floors) >= 2:
            lin = _Lineage(chain=[v], layer=branches, layer_floors=floors)
            _extend_upward(wk, lin)
            out.append(lin)
    out.sort(key=lambda l: (not l.anchored, not l.layer, -len(l.chain), l.chain[0]))
    return out


def _extend_upward(wk: _Work, lin: _Lineage) -> None:
    head = lin.chain[0]
    while True:
        preds = wk.pred[head]
        if len(preds) == 1:
            (u,) = preds
            if wk.attrs[u].investable and wk.succ[u] == {head}:
                lin.chain.insert(0, u)
                head = u
                continue
        break
    preds = sorted(wk.pred[head])
    if not preds:
        lin.anchored = True
        return
    if len(preds) >= 2 and all(
        not wk.pred[p] and wk.succ[p] == {head} and wk.attrs[p].investable
        for p in preds
    ):
        losses = [wk.attrs[p].loss for p in preds]
        if max(losses) - min(losses) <= 1e-9 * max(1.0, max(losses)):
            lin.star_inputs = preds
            lin.anchored = True


@dataclass
class _BlockSolution:
    commits: dict[str, float | None]   # chain id -> commitment (None = head)
    zeros: list[str]                   # chain ids receiving zero investment
    layer_commits: dict[str, float]    # branch id -> commitment
    layer_pruned: list[str]            # branch ids pruned (floor remembered)
    layer_value: float                 # constant entered value below the root


def _resolve_layer(
    k_up: float,
    l_up: float,
    branch_attrs: list[NodeAttr],
    branch_below: dict[str, float],
    floors: list[float],
) -> tuple[dict[str, float], list[str], float]:
    """Peel and commit a parallel layer against its invested upstream node.

    Returns (commitments, pruned ids, constant entered value below the
    root).  Floors are entered values of alternatives the defender cannot
    lower; surviving commitments never push below the highest floor.
    """
    entered = {b.id: b.p0 * (b.loss + branch_below[b.id]) for b in branch_attrs}
    active = sorted(branch_attrs, key=lambda b: (entered[b.id], b.id))
    pruned: list[str] = []
    floor = max(floors, default=0.0)
    while len(active) > 1:
        k_par = sum(1.0 / b.kappa for b in active)
        a_min = entered[active[0].id]
        if k_up * k_par < 1.0:
            g = k_up * k_par * l_up / (1.0 - k_up * k_par)
            if a_min > max(g, floor):
                break
        dropped = active.pop(0)
        pruned.append(dropped.id)
        floor = max(floor, entered[dropped.id])
    if len(active) == 1:
        b = active[0]
        a_b = entered[b.id]
        interior = 0.0
        if b.kappa > k_up and (b.kappa - k_up) * a_b > k_up * l_up:
            interior = math.log((b.kappa - k_up) * a_b / (k_up * l_up)) / b.kappa
        cap = math.log(a_b / floor) / b.kappa if floor > 0.0 else math.inf
        x = min(interior, max(cap, 0.0))
        return {b.id: x}, pruned, max(a_b * math.exp(-b.kappa * x), floor)
    k_par = sum(1.0 / b.kappa for b in active)
    g = k_up * k_par * l_up / (1.0 - k_up * k_par)
    g_commit = max(g, floor)
    commits = {b.id: math.log(entered[b.id] / g_commit) / b.kappa for b in active}
    return commits, pruned, g_commit


def _solve_block(wk: _Work, lin: _Lineage, values: dict[str, float]) -> _BlockSolution:
    """Exact zero pattern and commitments for one anchored lineage block.

    The chain (with the star's equalized entry layer prepended when
    present) is evaluated under every sign-consistent KKT pattern; the
    cheapest consistent pattern is the optimum.  A parallel layer at the
    bottom is resolved against the lowest invested element within each
    pattern.
    """
    chain_attrs = [wk.attrs[v] for v in lin.chain]
    elems = [(a.loss, a.p0, a.kappa) for a in chain_attrs]
    patternable = len(elems)
    if lin.star_inputs:
        inputs = [wk.attrs[p] for p in lin.star_inputs]
        k_par_in, tau, _ = _input_fold_params(inputs)
        elems = [(inputs[0].loss, tau, 1.0 / k_par_in)] + elems
    else:
        patternable -= 1  # plain head absorbs the remainder, always invested
    branch_attrs = [wk.attrs[b] for b in lin.layer]
    branch_below = {b: max(values[w] for w in wk.succ[b]) for b in lin.layer}
    best: _BlockSolution | None = None
    best_val = math.inf
    for pattern in itertools.product((True, False), repeat=patternable):
        invested = [True, *pattern]
        eff: list[list] = []
        for i, (loss, p0, kappa) in enumerate(elems):
            if invested[i]:
                eff.append([loss, p0, kappa, i])
            else:
                eff[-1][0] = eff[-1][0] / p0 + loss
                eff[-1][1] *= p0
        if any(b[2] <= a[2] for a, b in zip(eff, eff[1:])):
            continue
        if lin.layer:
            layer_commits, layer_pruned, below = _resolve_layer(
                eff[-1][2], eff[-1][0], branch_attrs, branch_below, lin.layer_floors
            )
        else:
            layer_commits, layer_pruned, below = {}, [], lin.below
        res = _eval_chain_pattern(elems, below, invested)
        if res is None:
            continue
        value, xs = res
        value *= math.exp(eff[0][2] * sum(layer_commits.values()))
        if value < best_val * (1.0 - 1e-13):
            best_val = value
            offset = 1 if lin.star_inputs else 0
            chain_x = xs[offset:]
            best = _BlockSolution(
                commits={v: x for v, x in zip(lin.chain, chain_x)},
                zeros=[v for v, x in zip(lin.chain, chain_x) if x == 0.0],
                layer_commits=layer_commits,
                layer_pruned=layer_pruned,
                layer_value=below,
            )
    assert best is not None
    return best


def reduce_graph(
    g: AttackGraph, aggressive: bool = False
) -> tuple[AttackGraph, ReductionTrace]:
    """Reduce an attack graph to an equivalent smaller form (sufficient budget).

    Fixpoint of series, parallel and input-star folds, each applied only
    where its closed form is exact.  ``aggressive`` additionally freezes
    every interior chain investment and folds two-node chains (used by the
    sufficient-budget calculator); the default policy mirrors the published
    algorithm: zero merges, parallel resolution, chains of three or more
    invested nodes, and the input star.

    Solve the reduced game at ``budget - trace.committed_total`` and feed
    the result through :func:`backmap` to recover original investments.
    """
    wk = _Work(g)
    steps: list[ReductionStep] = []
    for _ in range(_MAX_ROUNDS):
        if not _reduce_round(wk, steps, aggressive):
            break
    reduced = wk.to_graph()
    return reduced, ReductionTrace(steps, g, reduced)


def _reduce_round(wk: _Work, steps: list[ReductionStep], aggressive: bool) -> bool:
    if _dominance_pass(wk, steps):
        return True
    values = wk.resolved_values()
    for lin in _find_lineages(wk, values):
        if len(lin.chain) == 1 and not lin.layer and not lin.star_inputs:
            continue
        if not all(v in wk.attrs for v in lin.chain + lin.layer):
            continue
        if lin.anchored:
            sol = _solve_block(wk, lin, values)
            if _apply_block(wk, steps, lin, sol, aggressive):
                return True
        else:
            if _tail_zero_cascade(wk, steps, lin):
                return True
    return False


def _dominance_pass(wk: _Work, steps: list[ReductionStep]) -> bool:
    """Zero-merge any chain pair where the upstream sensitivity dominates.

    Exact anywhere in the graph: moving budget from the downstream node to
    the upstream one weakly lowers every path loss when
    kappa_up >= kappa_down.
    """
    for v in sorted(wk.attrs):
        a = wk.attrs.get(v)
        if a is None or not a.investable or len(wk.succ[v]) != 1:
            continue
        (w,) = wk.succ[v]
        b = wk.attrs[w]
        if not b.investable or wk.pred[w] != {v} or w == wk.target:
            continue
        if a.kappa >= b.kappa:
            new_id = wk.merge_pair(v, w)
            steps.append(
                ReductionStep("SeriesZeroMerge", (v, w), new_id, {"commits": {w: 0.0}})
            )
            return True
    return False


def _tail_zero_cascade(wk: _Work, steps: list[ReductionStep], lin: _Lineage) -> bool:
    """End-of-chain zero merges for blocks without a budget-absorbing anchor.

    The end-pair test is exact pointwise (independent of how much the rest
    of the graph invests), so it is safe even when the block's head might
    receive nothing.
    """
    if lin.layer:
        return False
    changed = False
    order = list(lin.chain)
    below = lin.below
    while len(order) >= 2:
        up_id, dn_id = order[-2], order[-1]
        up, dn = wk.attrs[up_id], wk.attrs[dn_id]
        if not series_zero_test(up, dn, end_of_chain=True, downstream_loss=below):
            break
        new_id = wk.merge_pair(up_id, dn_id)
        steps.append(
            ReductionStep(
                "SeriesZeroMerge", (up_id, dn_id), new_id, {"commits": {dn_id: 0.0}}
            )
        )
        order[-2:] = [new_id]
        changed = True
    return changed


def _freeze(wk: _Work, steps: list[ReductionStep], node: str, amount: float) -> None:
    """Commit a node's budget-independent investment; it becomes constant."""
    wk.commit(node, amount)
    steps.append(
        ReductionStep(
            "SeriesReduce", (node,), None, {"commits": {node: amount}, "head": None}
        )
    )


def _apply_block(
    wk: _Work,
    steps: list[ReductionStep],
    lin: _Lineage,
    sol: _BlockSolution,
    aggressive: bool,
) -> bool:
    changed = False
    if lin.layer:
        for b in sol.layer_pruned:
            entered = wk.attrs[b].p0 * (
                wk.attrs[b].loss + max(wk.resolved_values()[w] for w in wk.succ[b])
            )
            orphans = _prune_branch(wk, b)
            steps.append(
                ReductionStep(
                    "ParallelZeroPrune",
                    (b, *orphans),
                    None,
                    {"commits": {b: 0.0}, "floor": entered},
                )
            )
            changed = True
        if sol.layer_commits:
            for b, x in sorted(sol.layer_commits.items()):
                wk.commit(b, x)
            steps.append(
                ReductionStep(
                    "ParallelReduce",
                    tuple(sorted(sol.layer_commits)),
                    None,
                    {
                        "commits": dict(sorted(sol.layer_commits.items())),
                        "equalized_value": sol.layer_value,
                    },
                )
            )
            changed = True
    if lin.star_inputs:
        # Star block: every chain node carries a budget-independent
        # commitment (zero included) and freezes in place; a top-invested
        # node is absorbed into the equivalent entry node instead.
        inputs = [wk.attrs[p] for p in lin.star_inputs]
        k_par, tau, layer_min = _input_fold_params(inputs)
        common = {
            "inputs": list(lin.star_inputs),
            "input_kappa": {m.id: m.kappa for m in inputs},
            "input_p0": {m.id: m.p0 for m in inputs},
            "kappa_par": k_par,
            "tau": tau,
            "layer_minimum": layer_min,
        }
        top = lin.chain[0]
        for v in lin.chain[1:]:
            if v in sol.zeros:
                wk.commit(v, 0.0)
                steps.append(
                    ReductionStep(
                        "SeriesZeroMerge", (v,), None, {"commits": {v: 0.0}}
                    )
                )
            else:
                _freeze(wk, steps, v, sol.commits[v])
        if top not in sol.zeros:
            x_t = sol.commits[top]
            a = wk.attrs[top]
            hub_trans = a.p0 * math.exp(-a.kappa * x_t)
            new_id = wk.fresh("+".join(list(lin.star_inputs) + [top]))
            eq = NodeAttr(
                new_id,
                inputs[0].loss / hub_trans + a.loss,
                tau * hub_trans,
                1.0 / k_par,
                True,
            )
            succs = set(wk.succ[top])
            for p in lin.star_inputs:
                wk.remove(p)
            wk.remove(top)
            wk.add(eq, set(), succs)
            steps.append(
                ReductionStep(
                    "InputReduce",
                    tuple(list(lin.star_inputs) + [top]),
                    new_id,
                    {**common, "commits": {top: x_t}, "hub": top},
                )
            )
        else:
            wk.commit(top, 0.0)
            steps.append(
                ReductionStep("InputZeroTest", (top,), None, {"commits": {top: 0.0}})
            )
            new_id = wk.fresh("+".join(lin.star_inputs))
            eq = NodeAttr(new_id, inputs[0].loss, tau, 1.0 / k_par, True)
            for p in lin.star_inputs:
                wk.remove(p)
            wk.add(eq, set(), {top})
            steps.append(
                ReductionStep(
                    "InputReduce",
                    tuple(lin.star_inputs),
                    new_id,
                    {**common, "commits": {}, "hub": None},
                )
            )
        return True

    # plain chain: zeros merge into the invested element above
    order = list(lin.chain)
    alias = {v: v for v in lin.chain}
    for z in list(sol.zeros):
        cur = next(c for c in order if alias[c] == z)
        pos = order.index(cur)
        if pos == 0:
            continue  # defensive: a plain head never appears in zeros
        up = order[pos - 1]
        new_id = wk.merge_pair(up, cur)
        steps.append(
            ReductionStep("SeriesZeroMerge", (up, cur), new_id, {"commits": {cur: 0.0}})
        )
        alias[new_id] = alias[up]
        order[pos - 1 : pos + 1] = [new_id]
        changed = True
    surviving = [v for v in order if v in wk.attrs and wk.attrs[v].investable]

    if len(surviving) >= (2 if aggressive else 3):
        commit_map = {v: sol.commits[alias[v]] for v in surviving[1:]}
        attrs = [wk.attrs[v] for v in surviving]
        own = attrs[0].loss
        trans = 1.0
        for a in attrs[1:]:
            t = a.p0 * math.exp(-a.kappa * commit_map[a.id])
            own = own / t + a.loss
            trans *= t
        new_id = wk.fresh("+".join(surviving))
        eq = NodeAttr(new_id, own, attrs[0].p0 * trans, attrs[0].kappa, True)
        preds = set(wk.pred[surviving[0]])
        succs = set(wk.succ[surviving[-1]])
        for v in surviving:
            wk.remove(v)
        wk.add(eq, preds, succs)
        steps.append(
            ReductionStep(
                "SeriesReduce",
                tuple(surviving),
                new_id,
                {"commits": commit_map, "head": surviving[0]},
            )
        )
        changed = True
    return changed


def _prune_branch(wk: _Work, b: str) -> list[str]:
    """Remove a zero-investment branch plus any now-unreachable constants."""
    succs = list(wk.succ[b])
    wk.remove(b)
    orphans: list[str] = []
    queue = [w for w in succs if not wk.pred[w] and w != wk.target]
    while queue:
        w = queue.pop()
        orphans.append(w)
        nxt = list(wk.succ[w])
        wk.remove(w)
        queue.extend(u for u in nxt if not wk.pred[u] and u != wk.target)
    return orphans


# ---------------------------------------------------------------------------
# back-mapping and the insufficient-budget chain rule
# ---------------------------------------------------------------------------

def backmap(
    trace: ReductionTrace, x_reduced: InvestmentProfile, budget: float
) -> InvestmentProfile:
    """Rebuild original-graph investments from a reduced-game equilibrium.

    Replays the trace in reverse: committed interior investments are
    restored verbatim, equivalent-node investments are split per the stored
    equalization parameters, and each block's outermost node absorbs the
    remainder.  Raises InfeasibleBackmap when a remainder is negative (the
    budget was not actually sufficient).
    """
    if budget < trace.committed_total - 1e-9:
        raise InfeasibleBackmap(
            f"budget {budget:.6g} cannot cover the committed "
            f"{trace.committed_total:.6g}; it was not sufficient"
        )
    x: dict[str, float] = dict(x_reduced.as_dict())
    for step in reversed(trace.steps):
        kind = step.kind
        if kind == "SeriesZeroMerge":
            if len(step.consumed) == 1:  # frozen in place, nothing merged
                x.setdefault(step.consumed[0], 0.0)
                continue
            up, down = step.consumed
            amount = x.pop(step.produced, 0.0)
            x[up] = x.get(up, 0.0) + amount
            x.setdefault(down, 0.0)
        elif kind == "SeriesReduce":
            # the equivalent node carries only the head's (budget-dependent)
            # share; interior commitments were deducted from the game budget
            for v, c in step.data["commits"].items():
                x[v] = x.get(v, 0.0) + c
            if step.produced is not None:
                amount = x.pop(step.produced, 0.0)
                head = step.data["head"]
                x[head] = x.get(head, 0.0) + amount
        elif kind in ("ParallelZeroPrune", "InputZeroTest"):
            for v in step.consumed:
                x.setdefault(v, 0.0)
        elif kind == "ParallelReduce":
            for v, c in step.data["commits"].items():
                x[v] = x.get(v, 0.0) + c
        elif kind == "InputReduce":
            amount = x.pop(step.produced, 0.0)
            for v, c in step.data["commits"].items():
                x[v] = x.get(v, 0.0) + c
            tau = step.data["tau"]
            k_par = step.data["kappa_par"]
            for v in step.data["inputs"]:
                k = step.data["input_kappa"][v]
                p0 = step.data["input_p0"][v]
                share = (math.log(p0 / tau) + amount / k_par) / k
                if share < -1e-9:
                    raise InfeasibleBackmap(f"entry node {v} share {share:.3e} < 0")
                x[v] = x.get(v, 0.0) + max(share, 0.0)
    out = {
        v: max(0.0, val)
        for v, val in x.items()
        if v in trace.original.node_ids and trace.original.node(v).investable
    }
    profile = InvestmentProfile(out)
    if profile.total() > budget + 1e-9:
        raise InfeasibleBackmap(
            f"back-mapped total {profile.total():.6g} exceeds budget {budget:.6g}"
        )
    return profile


def series_insufficient_allocate(
    chain: list[NodeAttr], budget: float, downstream_loss: float = 0.0
) -> InvestmentProfile:
    """Allocate a possibly-insufficient budget over a single series chain.

    Nodes closer to the end of the chain receive their closed-form optimal
    investments first; funding moves upstream until the budget runs out, the
    node at the boundary receives the remainder, and everything above it
    gets zero.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    solved = _solve_chain_block(
        [(n.loss, n.p0, n.kappa) for n in chain], downstream_loss
    )
    remaining = budget
    x: dict[str, float] = {}
    for attr, opt in zip(reversed(chain), reversed(solved)):
        if opt is None:
            x[attr.id] = remaining
            remaining = 0.0
        else:
            take = min(opt, remaining)
            x[attr.id] = take
            remaining -= take
    return InvestmentProfile({k: v for k, v in x.items() if v > 0})
