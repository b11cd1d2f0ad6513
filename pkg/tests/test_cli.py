import json

import pytest
from click.testing import CliRunner

from secinvest.cli import main
from secinvest.documents import load_example

SCADA = "src/secinvest/datasets/scada.json"


@pytest.fixture
def runner():
    return CliRunner()


def write_game(tmp_path, doc, name="game.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


class TestSolveCommand:
    def test_scada_human(self, runner):
        result = runner.invoke(main, ["solve", "--game", SCADA])
        assert result.exit_code == 0
        assert "L* = 586.66" in result.output

    def test_scada_json_deterministic(self, runner):
        r1 = runner.invoke(main, ["solve", "--game", SCADA, "--json"])
        r2 = runner.invoke(main, ["solve", "--game", SCADA, "--json"])
        assert r1.exit_code == 0
        assert r1.output == r2.output
        payload = json.loads(r1.output)
        assert payload["loss"] == pytest.approx(586.67, rel=5e-3)
        assert payload["x"]["v5"] == pytest.approx(2.0447, abs=1e-2)

    def test_budget_override(self, runner):
        result = runner.invoke(main, ["solve", "--game", SCADA, "--budget", "0", "--json"])
        assert result.exit_code == 0
        assert json.loads(result.output)["x"] == {}

    def test_perimeter_strategy(self, runner):
        result = runner.invoke(main, ["solve", "--game", SCADA, "--strategy", "perimeter", "--json"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        published = payload["variants"]["published_2.25_each"]
        # worst case and the engineering-workstation path the published
        # figure corresponds to
        assert published["worst_case_loss"] == pytest.approx(22479.6, rel=1e-3)
        v7_path = published["path_losses"]["v1 -> v3 -> v5 -> v6 -> v7 -> vg"]
        assert v7_path == pytest.approx(2.09e4, rel=1e-2)
        assert "equal_split" in payload["variants"]

    def test_validation_error_exit_code(self, runner, tmp_path):
        doc = {
            "graph": {
                "nodes": [
                    {"id": "a", "loss": 1.0},
                    {"id": "g", "loss": 2.0, "investable": False},
                ],
                "edges": [["a", "g"], ["g", "a"]],
                "sources": ["a"],
                "target": "g",
            },
            "budget": 1.0,
        }
        result = runner.invoke(main, ["solve", "--game", write_game(tmp_path, doc)])
        assert result.exit_code == 2
        assert "CycleDetected" in result.output


class TestReduceCommand:
    def test_scada_reduce(self, runner):
        result = runner.invoke(main, ["reduce", "--game", SCADA, "--json"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert len(payload["reduced_graph"]["nodes"]) == 3
        assert payload["reduced_loss"] == pytest.approx(586.67, rel=1e-3)
        assert payload["x"]["v8"] == pytest.approx(0.0174, abs=1e-2)

    def test_human_output_names_steps(self, runner):
        result = runner.invoke(main, ["reduce", "--game", SCADA])
        assert result.exit_code == 0
        assert "reduced to 3 nodes" in result.output
        assert "InputReduce" in result.output


class TestInterveneCommand:
    def test_parallel_spec(self, runner, tmp_path):
        doc = load_example("scada")
        game_path = write_game(tmp_path, doc)
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({
            "kind": "parallel",
            "anchor": "v5",
            "node": {"id": "new", "loss": 1000.0, "p0": 0.1, "kappa": 3.0},
        }))
        result = runner.invoke(main, [
            "intervene", "--game", game_path, "--spec", str(spec_path), "--json",
        ])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["verdict"] in ("Improves", "Worsens", "Neutral")
        assert payload["base_loss"] == pytest.approx(586.67, rel=5e-3)


class TestRankCommand:
    def test_orders_by_modified_loss(self, runner, tmp_path):
        game_path = write_game(tmp_path, load_example("scada"))
        spec_path = tmp_path / "specs.json"
        spec_path.write_text(json.dumps([
            {"kind": "input", "anchor": "v5",
             "node": {"id": "n1", "loss": 10000.0, "p0": 0.2, "kappa": 1.0}},
            {"kind": "series", "anchor": ["v8", "vg"],
             "node": {"id": "n2", "loss": 0.0, "p0": 0.5, "kappa": 8.0}},
        ]))
        result = runner.invoke(main, [
            "rank", "--game", game_path, "--spec", str(spec_path), "--json",
        ])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        losses = [r["modified_loss"] for r in payload["ranking"]]
        assert losses == sorted(losses)


class TestOracleCommand:
    def test_small_game(self, runner, tmp_path):
        doc = {
            "graph": {
                "nodes": [
                    {"id": "a", "loss": 1.0},
                    {"id": "b", "loss": 1.0, "kappa": 2.0},
                    {"id": "g", "loss": 6.0, "investable": False},
                ],
                "edges": [["a", "b"], ["b", "g"]],
                "sources": ["a"],
                "target": "g",
            },
            "budget": 1.0,
        }
        result = runner.invoke(main, [
            "oracle", "--game", write_game(tmp_path, doc), "--json",
        ])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["loss"] == pytest.approx(2.0 * 7 ** 0.5 / 2.718281828, rel=1e-2)

    def test_too_many_nodes(self, runner):
        result = runner.invoke(main, ["oracle", "--game", SCADA])
        assert result.exit_code == 2
