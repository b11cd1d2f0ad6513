"""Closed-form equilibrium losses for design interventions on the base network.

The minimal base network is entry -> middle -> target with uniform default
probability p.  Each function below transcribes one published display
formula directly (no reuse of the solver or the reduction engine), together
with the parameter regime in which the formula is the true equilibrium loss.
These are the oracles the solver is tested against.

Notation: l1/k1 entry node, l2/k2 middle node, lg target loss, p uniform
default probability, b budget; l3/k3 describe the added node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RegimeViolation


@dataclass(frozen=True)
class BaseParams:
    l1: float
    l2: float
    lg: float
    k1: float
    k2: float
    p: float = 1.0
    budget: float = 1.0


def _require(ok: bool, condition: str, collect: list[str] | None):
    if not ok:
        if collect is None:
            raise RegimeViolation(condition)
        collect.append(condition)


def _base_interior_x2(pp: BaseParams) -> float:
    """Budget-independent investment on the middle node of the base network."""
    a2 = pp.l2 * pp.p**2 + pp.lg * pp.p**3
    return math.log((pp.k2 - pp.k1) * a2 / (pp.k1 * pp.l1 * pp.p)) / pp.k2


def base_regime(pp: BaseParams, collect: list[str] | None = None) -> None:
    _require(pp.k2 > pp.k1, "base needs k2 > k1", collect)
    if pp.k2 > pp.k1:
        a2 = pp.l2 * pp.p**2 + pp.lg * pp.p**3
        _require(
            pp.k1 * pp.l1 * pp.p < (pp.k2 - pp.k1) * a2,
            "base needs an interior middle investment (zero-merge fires otherwise)",
            collect,
        )
        _require(
            pp.budget >= _base_interior_x2(pp),
            "budget below the base network's sufficient level",
            collect,
        )


def base_loss(pp: BaseParams) -> float:
    """Equilibrium loss of the untouched base network, both nodes invested."""
    base_regime(pp)
    inner = (pp.k1 / (pp.k2 - pp.k1)) * (
        pp.l1 * pp.p / (pp.l2 * pp.p**2 + pp.lg * pp.p**3)
    )
    return (
        (pp.l1 * pp.k2 * pp.p / (pp.k2 - pp.k1))
        * inner ** (-pp.k1 / pp.k2)
        * math.exp(-pp.k1 * pp.budget)
    )


def series_post_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """Added node after the middle one; all three internal nodes invested."""
    p = pp.p
    a3 = l3 * p**3 + pp.lg * p**4
    _require(k3 > pp.k2 > pp.k1, "series-post needs k3 > k2 > k1", None)
    _require(
        pp.k2 * pp.l2 * p**2 < (k3 - pp.k2) * a3,
        "series-post needs interior investment on the added node",
        None,
    )
    _require(
        pp.k1 * pp.l1 * p
        < (pp.k2 - pp.k1) * (k3 / (k3 - pp.k2)) * pp.l2 * p**2,
        "series-post needs interior investment on the middle node",
        None,
    )
    x3 = math.log((k3 - pp.k2) * a3 / (pp.k2 * pp.l2 * p**2)) / k3
    x2 = (
        math.log(
            (pp.k2 - pp.k1)
            * (k3 / (k3 - pp.k2))
            * pp.l2
            * p**2
            / (pp.k1 * pp.l1 * p)
        )
        / pp.k2
    )
    _require(pp.budget >= x2 + x3, "budget below the sufficient level", None)
    f1 = (pp.k1 / k3) * ((k3 - pp.k2) / (pp.k2 - pp.k1)) * (
        pp.l1 * p / (pp.l2 * p**2)
    )
    f2 = (pp.k2 / (k3 - pp.k2)) * (pp.l2 * p**2 / a3)
    return (
        (pp.l1 * pp.k2 * p / (pp.k2 - pp.k1))
        * f1 ** (-pp.k1 / pp.k2)
        * f2 ** (-pp.k1 / k3)
        * math.exp(-pp.k1 * pp.budget)
    )


def series_pre_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """Added node between entry and middle; all three internal nodes invested."""
    p = pp.p
    a2 = pp.l2 * p**3 + pp.lg * p**4
    _require(pp.k2 > k3 > pp.k1, "series-pre needs k2 > k3 > k1", None)
    _require(
        k3 * l3 * p**2 < (pp.k2 - k3) * a2,
        "series-pre needs interior investment on the middle node",
        None,
    )
    _require(
        pp.k1 * pp.l1 * p < (k3 - pp.k1) * (pp.k2 / (pp.k2 - k3)) * l3 * p**2,
        "series-pre needs interior investment on the added node",
        None,
    )
    x2 = math.log((pp.k2 - k3) * a2 / (k3 * l3 * p**2)) / pp.k2
    x3 = (
        math.log(
            (k3 - pp.k1) * (pp.k2 / (pp.k2 - k3)) * l3 * p**2 / (pp.k1 * pp.l1 * p)
        )
        / k3
    )
    _require(pp.budget >= x2 + x3, "budget below the sufficient level", None)
    f1 = (pp.k1 / pp.k2) * ((pp.k2 - k3) / (k3 - pp.k1)) * (pp.l1 * p / (l3 * p**2))
    f2 = (k3 / (pp.k2 - k3)) * (l3 * p**2 / a2)
    return (
        (pp.l1 * k3 * p / (k3 - pp.k1))
        * f1 ** (-pp.k1 / k3)
        * f2 ** (-pp.k1 / pp.k2)
        * math.exp(-pp.k1 * pp.budget)
    )


def parallel_scenario1_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """Structural redundancy; the lower-loss branch receives no investment.

    The invested branch is pushed exactly to the untouched branch's level and
    the entry node absorbs the rest.
    """
    p = pp.p
    lo, hi = (l3, pp.l2) if l3 <= pp.l2 else (pp.l2, l3)
    k_hi = pp.k2 if l3 <= pp.l2 else k3
    a_lo = lo * p**2 + pp.lg * p**3
    a_hi = hi * p**2 + pp.lg * p**3
    k_par = 1.0 / pp.k2 + 1.0 / k3
    g_full = (
        pp.k1 * k_par * pp.l1 * p / (1.0 - pp.k1 * k_par)
        if pp.k1 * k_par < 1.0
        else math.inf
    )
    _require(
        pp.k1 * k_par >= 1.0 or a_lo <= g_full,
        "scenario 1 needs the lower branch at zero investment",
        None,
    )
    cap = math.log(a_hi / a_lo) / k_hi
    _require(
        k_hi > pp.k1 and (k_hi - pp.k1) * a_hi > pp.k1 * pp.l1 * p
        and math.log((k_hi - pp.k1) * a_hi / (pp.k1 * pp.l1 * p)) / k_hi >= cap,
        "scenario 1 needs the invested branch pinned at the untouched branch's level",
        None,
    )
    _require(pp.budget >= cap, "budget below the sufficient level", None)
    return (
        (pp.l1 * p + lo * p**2 + pp.lg * p**3)
        * ((lo + pp.lg * p) / (hi + pp.lg * p)) ** (-pp.k1 / k_hi)
        * math.exp(-pp.k1 * pp.budget)
    )


def parallel_scenario2_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """Structural redundancy; both branches invested (equalized)."""
    p = pp.p
    k_par = 1.0 / pp.k2 + 1.0 / k3
    prod = pp.k1 * k_par
    _require(prod < 1.0, "scenario 2 needs k1 * k_par < 1", None)
    g = prod * pp.l1 * p / (1.0 - prod)
    a2 = pp.l2 * p**2 + pp.lg * p**3
    a3 = l3 * p**2 + pp.lg * p**3
    _require(min(a2, a3) > g, "scenario 2 needs both branches invested", None)
    x2 = math.log(a2 / g) / pp.k2
    x3 = math.log(a3 / g) / k3
    _require(pp.budget >= x2 + x3, "budget below the sufficient level", None)
    f2 = (prod / (1.0 - prod)) * (pp.l1 * p / a2)
    f3 = (prod / (1.0 - prod)) * (pp.l1 * p / a3)
    return (
        (pp.l1 * p / (1.0 - prod))
        * f2 ** (-pp.k1 / pp.k2)
        * f3 ** (-pp.k1 / k3)
        * math.exp(-pp.k1 * pp.budget)
    )


def parallel_limit_loss(pp: BaseParams) -> float:
    """Limit of the parallel addition as the added sensitivity grows unbounded.

    Valid while the budget stays at or below the base network's interior
    middle investment, so everything funds the middle node.
    """
    _require(pp.k2 > pp.k1, "needs k2 > k1", None)
    a2 = pp.l2 * pp.p**2 + pp.lg * pp.p**3
    _require(
        pp.k1 * pp.l1 * pp.p < (pp.k2 - pp.k1) * a2,
        "needs an interior middle investment",
        None,
    )
    _require(
        pp.budget <= _base_interior_x2(pp),
        "limit form assumes the budget fully funds the middle node",
        None,
    )
    return pp.l1 * pp.p + a2 * math.exp(-pp.k2 * pp.budget)


def hybrid_scenario1_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """Functional redundancy, scenario 1: no internal node receives investment.

    Requires equal stand-alone losses on the two redundant nodes; the
    target's probability gains an extra factor p from the auxiliary hop.
    """
    _require(
        abs(l3 - pp.l2) <= 1e-9 * max(1.0, abs(pp.l2)),
        "hybrid analysis assumes equal redundant losses",
        None,
    )
    p = pp.p
    k_par = 1.0 / pp.k2 + 1.0 / k3
    rhs = (1.0 / (pp.k1 * k_par) - 1.0) * pp.l2 * p + (
        2.0 / (pp.k1 * k_par) - 1.0
    ) * pp.lg * p**3
    _require(
        pp.l1 >= rhs,
        "scenario 1 needs zero investment on both redundant nodes",
        None,
    )
    return (pp.l1 * p + pp.l2 * p**2 + pp.lg * p**4) * math.exp(-pp.k1 * pp.budget)


def input_zero_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """New entry node; the shared successor receives zero investment."""
    _require(
        abs(l3 - pp.l1) <= 1e-9 * max(1.0, abs(pp.l1)),
        "input analysis assumes equal entry losses",
        None,
    )
    p = pp.p
    k_inp = 1.0 / pp.k1 + 1.0 / k3
    prod = pp.k2 * k_inp
    hub_total = pp.l2 * p + pp.lg * p**2  # successor's probability-weighted loss
    _require(
        prod <= 1.0 or pp.l1 >= (prod - 1.0) * hub_total,
        "case A needs zero investment on the shared successor",
        None,
    )
    return (pp.l1 * p + pp.l2 * p**2 + pp.lg * p**3) * math.exp(-pp.budget / k_inp)


def input_invested_loss(pp: BaseParams, l3: float, k3: float) -> float:
    """New entry node; the shared successor keeps a nonzero investment."""
    _require(
        abs(l3 - pp.l1) <= 1e-9 * max(1.0, abs(pp.l1)),
        "input analysis assumes equal entry losses",
        None,
    )
    p = pp.p
    k_inp = 1.0 / pp.k1 + 1.0 / k3
    prod = pp.k2 * k_inp
    hub_total = pp.l2 * p + pp.lg * p**2  # successor's probability-weighted loss
    _require(prod > 1.0, "case B needs k2 * k_inp > 1", None)
    _require(
        pp.l1 < (prod - 1.0) * hub_total,
        "case B needs nonzero investment on the shared successor",
        None,
    )
    x2 = math.log((prod - 1.0) * hub_total / pp.l1) / pp.k2
    _require(pp.budget >= x2, "budget below the sufficient level", None)
    return (
        pp.l1
        * p
        * (prod / (prod - 1.0))
        * ((prod - 1.0) * hub_total / pp.l1) ** (1.0 / prod)
        * math.exp(-pp.budget / k_inp)
    )


_FORMS = {
    "base": lambda pp, l3, k3: base_loss(pp),
    "series_post": series_post_loss,
    "series_pre": series_pre_loss,
    "parallel_s1": parallel_scenario1_loss,
    "parallel_s2": parallel_scenario2_loss,
    "parallel_limit": lambda pp, l3, k3: parallel_limit_loss(pp),
    "hybrid_s1": hybrid_scenario1_loss,
    "input_zero": input_zero_loss,
    "input_invested": input_invested_loss,
}


def closed_form_losses(
    pp: BaseParams,
    l3: float | None = None,
    k3: float | None = None,
    forms: list[str] | None = None,
) -> dict[str, float]:
    """Evaluate the named closed forms (or every applicable one).

    With ``forms`` given, a regime violation raises RegimeViolation naming
    the failed condition; without it, out-of-regime forms are skipped.
    """
    chosen = forms if forms is not None else list(_FORMS)
    out: dict[str, float] = {}
    for name in chosen:
        if name not in _FORMS:
            raise KeyError(f"unknown closed form {name!r}")
        try:
            out[name] = _FORMS[name](pp, l3, k3)
        except RegimeViolation:
            if forms is not None:
                raise
        except TypeError:
            if forms is not None:
                raise RegimeViolation(f"{name} needs the added node's parameters")
    return out
