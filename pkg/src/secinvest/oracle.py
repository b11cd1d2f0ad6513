"""Exhaustive lattice oracle for small games.

Independent check on the smooth solver and on every closed form: evaluates
the exact worst-case path loss (by direct path enumeration, no gradients, no
smoothing) on a lattice over the budget simplex and returns the lattice
minimizer.  Refinement shrinks the lattice around the incumbent until the
step reaches the requested resolution; convexity of the objective keeps the
minimizer inside the refined boxes.  The reported bound is the Lipschitz
constant (max kappa times the no-investment worst case) times resolution
times the number of investable nodes.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import TooManyInvestableNodes
from .graphs import AttackGraph, InvestmentProfile, enumerate_paths, worst_case
from .solver import Certificate, EquilibriumResult, GameInstance

MAX_ORACLE_NODES = 6


def _batch_worst_case(g: AttackGraph, paths, invest: list[str], X: np.ndarray) -> np.ndarray:
    """Exact worst-case loss for every row of X (investments over `invest`)."""
    col = {v: i for i, v in enumerate(invest)}
    out = np.full(X.shape[0], -np.inf)
    for p in paths:
        s = np.zeros(X.shape[0])
        loss = np.zeros(X.shape[0])
        prefix = 1.0
        for v in p:
            attr = g.node(v)
            prefix *= attr.p0
            if attr.investable and v in col:
                s = s + attr.kappa * X[:, col[v]]
            loss = loss + attr.loss * prefix * np.exp(-s)
        out = np.maximum(out, loss)
    return out


def _lattice(center: np.ndarray, half_width: float, step: float, budget: float) -> np.ndarray:
    """Grid points of the box [center +- half_width]^n clipped to {x>=0, sum<=B}."""
    axes = []
    for c in center:
        lo = max(0.0, c - half_width)
        hi = min(budget, c + half_width)
        k0 = math.floor(lo / step)
        k1 = math.ceil(hi / step)
        axes.append(np.arange(k0, k1 + 1) * step)
    pts = np.array(list(itertools.product(*axes)))
    pts = pts[(pts >= -1e-15).all(axis=1)]
    pts = pts[pts.sum(axis=1) <= budget + 1e-12]
    return np.clip(pts, 0.0, None)


def grid_oracle(game: GameInstance, resolution: float = 1e-3) -> EquilibriumResult:
    """Lattice minimizer of the worst-case loss, within (Lipschitz * resolution * n).

    Only defined for games with at most six investable nodes; the lattice is
    exponential in that count.
    """
    g = game.graph
    budget = float(game.budget)
    invest = [v for v in g.node_ids if g.node(v).investable]
    if len(invest) > MAX_ORACLE_NODES:
        raise TooManyInvestableNodes(
            f"{len(invest)} investable nodes exceed the oracle limit of {MAX_ORACLE_NODES}"
        )
    paths = enumerate_paths(g)
    if budget == 0.0 or not invest:
        x = InvestmentProfile.zero()
        loss, crit = worst_case(g, x)
        cert = Certificate(0.0, budget, 0.0, 0.0, 0, method="grid", oracle_bound=0.0)
        return EquilibriumResult(x, loss, crit, cert)

    n = len(invest)
    f0 = float(_batch_worst_case(g, paths, invest, np.zeros((1, n)))[0])
    lipschitz = max(g.node(v).kappa for v in invest) * f0

    step = budget / 6.0
    center = np.full(n, budget / (2 * n))
    half = budget
    best_x = center.copy()
    best_f = math.inf
    evaluations = 0
    while True:
        step = max(step, resolution)
        pts = _lattice(center, half, step, budget)
        vals = _batch_worst_case(g, paths, invest, pts)
        evaluations += len(pts)
        i = int(np.argmin(vals))
        if vals[i] < best_f:
            best_f = float(vals[i])
            best_x = pts[i]
        if step <= resolution:
            break
        center = best_x
        half = 1.5 * step
        step = step / 3.0

    profile = InvestmentProfile({v: float(best_x[i]) for i, v in enumerate(invest) if best_x[i] > 0})
    loss, crit = worst_case(g, profile)
    cert = Certificate(
        spread=0.0,
        budget_slack=budget - float(best_x.sum()),
        first_order_residual=lipschitz * resolution * n,
        gap_rel=(lipschitz * resolution * n) / loss if loss > 0 else 0.0,
        iterations=evaluations,
        method="grid",
        oracle_bound=lipschitz * resolution * n,
    )
    return EquilibriumResult(profile, loss, crit, cert)
