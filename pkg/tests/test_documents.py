import json
import random

import pytest

from secinvest import DocumentError, GraphValidationError
from secinvest.documents import (
    list_examples,
    load_example,
    parse_game,
    parse_graph,
    parse_spec_list,
    serialize_graph,
)
from conftest import random_sp_graph, scada_graph


class TestParse:
    def test_scada_example_parses(self):
        doc = load_example("scada")
        game, options = parse_game(doc)
        assert len(game.graph) == 9
        assert game.budget == 5.0

    def test_bare_graph_document(self):
        doc = serialize_graph(scada_graph())
        g = parse_graph(doc)
        assert len(g) == 9

    def test_empty_nodes_rejected(self):
        with pytest.raises(DocumentError) as exc:
            parse_graph({"nodes": [], "edges": [], "sources": [], "target": "g"})
        assert "nodes" in str(exc.value)

    def test_syntax_error_carries_location(self):
        with pytest.raises(DocumentError) as exc:
            parse_graph("{not json")
        assert "line" in exc.value.location

    def test_missing_field_named(self):
        with pytest.raises(DocumentError) as exc:
            parse_graph({"nodes": [{"id": "a"}], "edges": [], "sources": [], "target": "a"})
        assert "loss" in str(exc.value)

    def test_validation_errors_propagate(self):
        doc = {
            "nodes": [
                {"id": "a", "loss": 1.0},
                {"id": "g", "loss": 2.0, "investable": False},
            ],
            "edges": [["a", "g"], ["g", "a"]],
            "sources": ["a"],
            "target": "g",
        }
        with pytest.raises(GraphValidationError):
            parse_graph(doc)

    def test_negative_budget_rejected(self):
        doc = {"graph": serialize_graph(scada_graph()), "budget": -1}
        with pytest.raises(DocumentError):
            parse_game(doc)

    def test_unknown_option_rejected(self):
        doc = {
            "graph": serialize_graph(scada_graph()),
            "budget": 1,
            "options": {"bogus": 1},
        }
        with pytest.raises(DocumentError):
            parse_game(doc)


class TestRoundTrip:
    def test_fixtures_round_trip(self):
        for name in list_examples():
            game, _ = parse_game(load_example(name))
            doc = serialize_graph(game.graph)
            again = parse_graph(doc)
            assert serialize_graph(again) == doc

    def test_random_graphs_round_trip(self):
        for seed in range(100):
            g = random_sp_graph(random.Random(seed))
            doc = serialize_graph(g)
            again = parse_graph(json.dumps(doc))
            assert serialize_graph(again) == doc

    def test_round_trip_preserves_numbers_exactly(self):
        g = scada_graph()
        again = parse_graph(json.dumps(serialize_graph(g)))
        for v in g.node_ids:
            assert again.node(v).loss == g.node(v).loss
            assert again.node(v).p0 == g.node(v).p0
            assert again.node(v).kappa == g.node(v).kappa


class TestSpecDocuments:
    def test_parse_single(self):
        specs = parse_spec_list(
            {"kind": "parallel", "anchor": "v2", "node": {"id": "v3", "loss": 1.0}}
        )
        assert len(specs) == 1
        assert specs[0].kind == "parallel"

    def test_parse_edge_anchor(self):
        (s,) = parse_spec_list(
            {"kind": "series", "anchor": ["v2", "vg"], "node": {"id": "v3", "loss": 0.0}}
        )
        assert s.anchor == ("v2", "vg")

    def test_bad_kind_rejected(self):
        with pytest.raises(DocumentError):
            parse_spec_list({"kind": "magic", "anchor": "v2", "node": {"id": "x", "loss": 1}})


class TestExamples:
    def test_bundled_names(self):
        names = list_examples()
        assert "scada" in names

    def test_unknown_example(self):
        with pytest.raises(DocumentError):
            load_example("nope")
