"""Sufficient-budget calculator.

A budget is sufficient when every non-entry node's zero/nonzero investment
status stays fixed for all larger budgets.  For graphs the reduction
calculus fully collapses, the threshold is the sum of the budget-independent
interior commitments plus the entry layer's equalization minimum.  For
anything else we fall back to a doubling search on the solver, watching the
zero pattern stabilize; that bound is conservative and heuristic.
"""

from __future__ import annotations

from .graphs import AttackGraph
from .reduction import reduce_graph
from .solver import GameInstance, solve

ZERO_THRESHOLD = 1e-6


def sufficient_budget(g: AttackGraph) -> float:
    """Smallest budget above which the optimal zero-investment set is stable.

    Exact (closed form) when the graph is fully reducible; otherwise a
    conservative upper bound from a doubling search on the solver (an
    investment below 1e-6 counts as zero).
    """
    reduced, trace = reduce_graph(g, aggressive=True)
    investable = [v for v in reduced.node_ids if reduced.node(v).investable]
    if len(investable) <= 1:
        return trace.committed_total + trace.input_layer_minimum
    return _doubling_search(g)


def _doubling_search(g: AttackGraph) -> float:
    budget = 1.0
    pattern = _zero_pattern(g, budget)
    for _ in range(40):
        nxt = _zero_pattern(g, 2.0 * budget)
        if nxt == pattern:
            return budget
        pattern = nxt
        budget *= 2.0
    return budget


def _zero_pattern(g: AttackGraph, budget: float) -> frozenset[str]:
    # the 1e-6 zero threshold needs far less accuracy than the default tol
    res = solve(GameInstance(g, budget))
    return frozenset(v for v in g.node_ids if res.x_star[v] > ZERO_THRESHOLD)


def is_sufficient(game: GameInstance) -> bool:
    """Whether the game's budget meets the sufficient threshold (inclusive)."""
    return game.budget >= sufficient_budget(game.graph) - 1e-9
