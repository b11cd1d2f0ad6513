import math
import random

import pytest

from secinvest import (
    GameInstance,
    NodeAttr,
    RegimeViolation,
    apply_intervention,
    solve,
    validate,
)
from secinvest.formulas import (
    BaseParams,
    base_loss,
    closed_form_losses,
    hybrid_scenario1_loss,
    input_invested_loss,
    input_zero_loss,
    parallel_limit_loss,
    parallel_scenario1_loss,
    parallel_scenario2_loss,
    series_post_loss,
    series_pre_loss,
)
from secinvest.interventions import InterventionSpec


def base_graph(pp: BaseParams):
    nodes = [
        NodeAttr("v1", pp.l1, pp.p, pp.k1),
        NodeAttr("v2", pp.l2, pp.p, pp.k2),
        NodeAttr("vg", pp.lg, pp.p, 1.0, False),
    ]
    return validate(nodes, [("v1", "v2"), ("v2", "vg")], ["v1"], "vg")


def default_params(budget=1.0):
    return BaseParams(l1=1.0, l2=1.0, lg=6.0, k1=1.0, k2=2.0, p=1.0, budget=budget)


class TestBaseFormula:
    def test_published_value(self):
        # 2 sqrt(7) / e for the canonical attributes at budget 1
        assert base_loss(default_params()) == pytest.approx(
            2.0 * math.sqrt(7.0) * math.exp(-1.0)
        )

    def test_matches_solver(self):
        pp = default_params(budget=1.7)
        res = solve(GameInstance(base_graph(pp), pp.budget))
        assert res.loss_star == pytest.approx(base_loss(pp), rel=1e-7)

    def test_zero_budget_out_of_regime(self):
        # the closed form extrapolates an interior solution; at zero budget
        # the true loss is the raw sum, which the formula does not reproduce
        with pytest.raises(RegimeViolation):
            base_loss(default_params(budget=0.0))

    def test_kappa_order_required(self):
        with pytest.raises(RegimeViolation):
            base_loss(BaseParams(1.0, 1.0, 6.0, k1=2.0, k2=1.0, budget=1.0))


class TestHybridScenario1:
    def test_published_value(self):
        # (L1 p + L p^2 + Lg p^4) e^{-k1 B} = 8/e for unit attributes
        pp = BaseParams(l1=1.0, l2=1.0, lg=6.0, k1=1.0, k2=1.0, p=1.0, budget=1.0)
        val = hybrid_scenario1_loss(pp, l3=1.0, k3=1.0)
        assert val == pytest.approx(8.0 * math.exp(-1.0))

    def test_p4_weight_on_target(self):
        pp = BaseParams(l1=1.0, l2=1.0, lg=6.0, k1=1.0, k2=1.0, p=0.8, budget=0.5)
        val = hybrid_scenario1_loss(pp, l3=1.0, k3=1.0)
        expected = (1 * 0.8 + 1 * 0.8**2 + 6 * 0.8**4) * math.exp(-0.5)
        assert val == pytest.approx(expected)


def build_transformed(pp: BaseParams, form: str, l3: float, k3: float):
    """The modified base network each closed form describes."""
    g = base_graph(pp)
    if form == "base":
        return g
    node = NodeAttr("v3", l3, pp.p, k3)
    if form == "series_post":
        return apply_intervention(g, InterventionSpec("series", ("v2", "vg"), node))
    if form == "series_pre":
        return apply_intervention(g, InterventionSpec("series", ("v1", "v2"), node))
    if form in ("parallel_s1", "parallel_s2"):
        return apply_intervention(g, InterventionSpec("parallel", "v2", node))
    if form == "hybrid_s1":
        return apply_intervention(g, InterventionSpec("hybrid", "v2", node))
    if form in ("input_zero", "input_invested"):
        return apply_intervention(g, InterventionSpec("input", "v2", node))
    raise KeyError(form)


FORM_FNS = {
    "base": lambda pp, l3, k3: base_loss(pp),
    "series_post": series_post_loss,
    "series_pre": series_pre_loss,
    "parallel_s1": parallel_scenario1_loss,
    "parallel_s2": parallel_scenario2_loss,
    "hybrid_s1": hybrid_scenario1_loss,
    "input_zero": input_zero_loss,
    "input_invested": input_invested_loss,
}


def draw_params(rng):
    k1 = rng.uniform(1.0, 2.5)
    k2 = k1 + rng.uniform(0.2, 2.5)
    return BaseParams(
        l1=rng.uniform(0.2, 5.0),
        l2=rng.uniform(0.2, 5.0),
        lg=rng.uniform(1.0, 10.0),
        k1=k1,
        k2=k2,
        p=rng.uniform(0.4, 1.0),
        budget=rng.uniform(0.5, 4.0),
    )


def check_form_against_solver(rng, form, samples):
    fn = FORM_FNS[form]
    hits = 0
    attempts = 0
    while hits < samples and attempts < 4000:
        attempts += 1
        pp = draw_params(rng)
        if form == "series_post":
            l3, k3 = rng.uniform(0.1, 4.0), pp.k2 + rng.uniform(0.3, 3.0)
        elif form == "series_pre":
            l3, k3 = rng.uniform(0.1, 4.0), rng.uniform(pp.k1 + 0.1, pp.k2 - 0.1) if pp.k2 - pp.k1 > 0.2 else (None, None)
            if k3 is None:
                continue
        elif form == "hybrid_s1":
            l3, k3 = pp.l2, rng.uniform(1.0, 6.0)
        elif form.startswith("input"):
            l3, k3 = pp.l1, rng.uniform(1.0, 6.0)
        else:
            l3, k3 = rng.uniform(0.1, 6.0), rng.uniform(1.0, 8.0)
        try:
            expected = fn(pp, l3, k3)
        except RegimeViolation:
            continue
        g = build_transformed(pp, form, l3, k3)
        res = solve(GameInstance(g, pp.budget))
        assert res.loss_star == pytest.approx(expected, rel=1e-6), (form, pp, l3, k3)
        hits += 1
    assert hits == samples, f"{form}: only {hits} in-regime draws out of {attempts}"


@pytest.mark.parametrize("form", sorted(FORM_FNS))
def test_forms_match_solver_smoke(form):
    check_form_against_solver(random.Random(hash(form) % 2**32), form, samples=6)


class TestParallelLimit:
    def test_equals_low_budget_base(self):
        # with budget at or below the base's interior middle investment the
        # limit formula is the base game's exact optimum
        pp = default_params(budget=0.5)
        g = base_graph(pp)
        res = solve(GameInstance(g, pp.budget))
        assert res.loss_star == pytest.approx(parallel_limit_loss(pp), rel=1e-8)

    def test_out_of_regime_beyond_sufficient(self):
        with pytest.raises(RegimeViolation):
            parallel_limit_loss(default_params(budget=3.0))

    def test_matches_huge_kappa_parallel(self):
        pp = default_params(budget=0.6)
        node = NodeAttr("v3", 1.0, pp.p, 1e8)
        g = apply_intervention(
            base_graph(pp), InterventionSpec("parallel", "v2", node)
        )
        res = solve(GameInstance(g, pp.budget), tol=1e-9)
        assert res.loss_star == pytest.approx(parallel_limit_loss(pp), rel=1e-6)


class TestClosedFormMap:
    def test_applicable_forms_only(self):
        out = closed_form_losses(default_params(), l3=1.0, k3=4.0)
        assert "base" in out
        assert all(isinstance(v, float) for v in out.values())

    def test_explicit_request_raises_out_of_regime(self):
        with pytest.raises(RegimeViolation):
            closed_form_losses(
                default_params(budget=0.0), l3=1.0, k3=4.0, forms=["base"]
            )

    def test_unknown_form_rejected(self):
        with pytest.raises(KeyError):
            closed_form_losses(default_params(), forms=["nope"])
