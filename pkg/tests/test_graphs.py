import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secinvest import (
    GraphValidationError,
    InvestmentProfile,
    NodeAttr,
    PathExplosion,
    count_paths,
    enumerate_paths,
    path_loss,
    post_set,
    pre_set,
    validate,
    worst_case,
)
from conftest import chain_graph


def two_node():
    return chain_graph([("v1", 1.0, 1.0, 1.0), ("vg", 2.0, 1.0, 1.0)])


class TestValidate:
    def test_minimal_legal_graph(self):
        g = two_node()
        assert set(g.node_ids) == {"v1", "vg"}
        assert g.sources == {"v1"}
        assert g.target == "vg"

    def test_cycle_detected(self):
        nodes = [NodeAttr("v1", 1.0), NodeAttr("vg", 2.0, investable=False)]
        with pytest.raises(GraphValidationError) as exc:
            validate(nodes, [("v1", "vg"), ("vg", "v1")], ["v1"], "vg")
        assert any(v.code == "CycleDetected" for v in exc.value.violations)

    def test_multiple_sinks_rejected(self):
        nodes = [
            NodeAttr("v1", 1.0),
            NodeAttr("v2", 1.0),
            NodeAttr("vg", 2.0, investable=False),
        ]
        with pytest.raises(GraphValidationError) as exc:
            validate(nodes, [("v1", "v2"), ("v1", "vg")], ["v1"], "vg")
        assert any(v.code in {"MultipleTargets", "DanglingNode"} for v in exc.value.violations)

    def test_dangling_node_rejected(self):
        nodes = [
            NodeAttr("v1", 1.0),
            NodeAttr("stray", 1.0),
            NodeAttr("vg", 2.0, investable=False),
        ]
        with pytest.raises(GraphValidationError) as exc:
            validate(nodes, [("v1", "vg"), ("stray", "vg")], ["v1"], "vg")
        assert any(v.code == "DanglingNode" for v in exc.value.violations)

    @pytest.mark.parametrize(
        "attr",
        [
            NodeAttr("v1", -1.0),
            NodeAttr("v1", 1.0, p0=0.0),
            NodeAttr("v1", 1.0, p0=1.2),
            NodeAttr("v1", 1.0, kappa=0.5),
        ],
    )
    def test_attribute_out_of_range(self, attr):
        nodes = [attr, NodeAttr("vg", 2.0, investable=False)]
        with pytest.raises(GraphValidationError) as exc:
            validate(nodes, [("v1", "vg")], ["v1"], "vg")
        assert any(v.code == "AttributeOutOfRange" for v in exc.value.violations)

    def test_investable_target_rejected(self):
        nodes = [NodeAttr("v1", 1.0), NodeAttr("vg", 2.0, investable=True)]
        with pytest.raises(GraphValidationError) as exc:
            validate(nodes, [("v1", "vg")], ["v1"], "vg")
        assert any(v.code == "InvestableTarget" for v in exc.value.violations)

    def test_zero_loss_target_rejected(self):
        nodes = [NodeAttr("v1", 1.0), NodeAttr("vg", 0.0, investable=False)]
        with pytest.raises(GraphValidationError) as exc:
            validate(nodes, [("v1", "vg")], ["v1"], "vg")
        assert any(v.code == "AttributeOutOfRange" for v in exc.value.violations)


class TestReachability:
    def test_pre_set_chain(self):
        g = chain_graph([("v1", 1, 1, 1), ("v2", 1, 1, 1), ("vg", 1, 1, 1)])
        assert pre_set(g, "v2") == {"v1", "v2"}
        assert pre_set(g, "v1") == {"v1"}

    def test_post_set_chain(self):
        g = chain_graph([("v1", 1, 1, 1), ("v2", 1, 1, 1), ("vg", 1, 1, 1)])
        assert post_set(g, "v2") == {"v2", "vg"}
        assert post_set(g, "vg") == {"vg"}

    def test_diamond_sets(self, diamond):
        assert pre_set(diamond, "vg") == {"v1", "v2", "v3", "vg"}
        assert post_set(diamond, "v1") == {"v1", "v2", "v3", "vg"}

    def test_pre_post_duality(self, diamond):
        for u in diamond.node_ids:
            for v in diamond.node_ids:
                assert (u in pre_set(diamond, v)) == (v in post_set(diamond, u))


class TestPaths:
    def test_chain_single_path(self):
        g = chain_graph([("v1", 1, 1, 1), ("v2", 1, 1, 1), ("vg", 1, 1, 1)])
        assert enumerate_paths(g) == [("v1", "v2", "vg")]

    def test_diamond_two_paths(self, diamond):
        assert enumerate_paths(diamond) == [("v1", "v2", "vg"), ("v1", "v3", "vg")]

    def test_path_count_matches_enumeration(self, diamond):
        assert count_paths(diamond) == len(enumerate_paths(diamond))

    def test_scada_has_four_paths(self):
        from conftest import scada_graph

        g = scada_graph()
        paths = enumerate_paths(g)
        assert len(paths) == 4  # two entry hosts times two final branches
        assert count_paths(g) == 4

    def test_explosion_guard(self, diamond):
        with pytest.raises(PathExplosion):
            enumerate_paths(diamond, cap=1)


class TestPathLoss:
    def test_zero_investment(self):
        g = two_node()
        assert path_loss(g, ("v1", "vg"), {}) == pytest.approx(3.0)

    def test_log_two_investment(self):
        g = two_node()
        x = {"v1": math.log(2.0)}
        assert path_loss(g, ("v1", "vg"), x) == pytest.approx(1.5)

    def test_three_node_sum(self, base_network):
        assert path_loss(base_network, ("v1", "v2", "vg"), {}) == pytest.approx(8.0)

    def test_p0_weights(self):
        g = chain_graph([("v1", 1.0, 0.5, 1.0), ("vg", 4.0, 0.5, 1.0)])
        # 1*0.5 + 4*0.25
        assert path_loss(g, ("v1", "vg"), {}) == pytest.approx(1.5)


class TestWorstCase:
    def test_strict_dominance(self, diamond):
        loss, argmax = worst_case(diamond, {})
        assert loss == pytest.approx(1 + 5 + 2)
        assert argmax == [("v1", "v2", "vg")]

    def test_symmetric_tie(self):
        nodes = [
            NodeAttr("v1", 1.0),
            NodeAttr("v2", 3.0),
            NodeAttr("v3", 3.0),
            NodeAttr("vg", 2.0, investable=False),
        ]
        edges = [("v1", "v2"), ("v1", "v3"), ("v2", "vg"), ("v3", "vg")]
        g = validate(nodes, edges, ["v1"], "vg")
        _, argmax = worst_case(g, {})
        assert len(argmax) == 2

    def test_dominates_each_path(self, diamond):
        x = InvestmentProfile({"v1": 0.3, "v2": 0.2})
        wc, _ = worst_case(diamond, x)
        for p in enumerate_paths(diamond):
            assert wc >= path_loss(diamond, p, x) - 1e-12


class TestProperties:
    @given(
        x1=st.floats(0, 5),
        x2=st.floats(0, 5),
        bump=st.floats(0.01, 2),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_nonincreasing(self, x1, x2, bump):
        g = chain_graph([("v1", 1.0, 1.0, 1.0), ("v2", 1.0, 1.0, 2.0), ("vg", 6.0, 1.0, 1.0)])
        p = ("v1", "v2", "vg")
        before = path_loss(g, p, {"v1": x1, "v2": x2})
        after = path_loss(g, p, {"v1": x1 + bump, "v2": x2})
        assert after <= before + 1e-12
        after2 = path_loss(g, p, {"v1": x1, "v2": x2 + bump})
        assert after2 <= before + 1e-12

    @given(c=st.floats(0.01, 100), x1=st.floats(0, 3), x2=st.floats(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_loss_scaling_is_linear(self, c, x1, x2):
        g1 = chain_graph([("v1", 1.0, 0.9, 1.0), ("v2", 2.0, 0.8, 2.0), ("vg", 6.0, 1.0, 1.0)])
        g2 = chain_graph([("v1", c, 0.9, 1.0), ("v2", 2 * c, 0.8, 2.0), ("vg", 6 * c, 1.0, 1.0)])
        x = {"v1": x1, "v2": x2}
        w1, _ = worst_case(g1, x)
        w2, _ = worst_case(g2, x)
        assert w2 == pytest.approx(c * w1, rel=1e-12)

    def test_kappa_zero_investment_reproduces_p0_weights(self):
        g = chain_graph([("v1", 1.0, 0.3, 2.0), ("v2", 2.0, 0.5, 3.0), ("vg", 6.0, 0.9, 1.0)])
        expected = 1 * 0.3 + 2 * 0.3 * 0.5 + 6 * 0.3 * 0.5 * 0.9
        assert path_loss(g, ("v1", "v2", "vg"), {}) == pytest.approx(expected)


class TestInvestmentProfile:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            InvestmentProfile({"v1": -0.1})

    def test_rejects_noninvestable(self, base_network):
        with pytest.raises(ValueError):
            InvestmentProfile({"vg": 1.0}).check_against(base_network)

    def test_zero_default(self):
        x = InvestmentProfile({"a": 2.0})
        assert x["b"] == 0.0
        assert x.total() == 2.0
