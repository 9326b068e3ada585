import json

import numpy as np
import pytest

from conftest import random_connected_graph
from graphcurv import GraphFormatError, generate, parse_graph, serialize_graph
from graphcurv.cli import run

EDGES = "a b 1.0\n"
MEASURES = "a 1\nb 1\n"


# -- parsing ---------------------------------------------------------------------


def test_parse_edge_list_single_edge():
    g = parse_graph(EDGES, MEASURES)
    assert g.vertices == ("a", "b")
    assert g.weight("a", "b") == 1.0 and g.weight("b", "a") == 1.0
    assert g.measure("a") == 1.0


def test_parse_edge_list_comments_and_blanks():
    g = parse_graph("# heading\n\na b 2.5  # trailing\n", "a 1\nb 2\n")
    assert g.weight("a", "b") == 2.5
    assert g.measure("b") == 2.0


def test_parse_duplicate_symmetric_edge_rejected():
    with pytest.raises(GraphFormatError, match="conflicting symmetric"):
        parse_graph("a b 1\nb a 2\n", MEASURES)


def test_parse_missing_measure_names_vertex():
    with pytest.raises(GraphFormatError, match="'c'"):
        parse_graph("a b 1\nb c 1\n", MEASURES)


def test_parse_edge_list_requires_measures():
    with pytest.raises(GraphFormatError, match="measure file"):
        parse_graph(EDGES)


def test_parse_bad_lines_carry_line_numbers():
    with pytest.raises(GraphFormatError, match="line 2"):
        parse_graph("a b 1\na b\n", MEASURES)
    with pytest.raises(GraphFormatError, match="line 1"):
        parse_graph("a b pi\n", MEASURES)


def test_parse_invalid_values_rejected_by_validation():
    with pytest.raises(GraphFormatError, match="nonpositive weight"):
        parse_graph("a b -1\n", MEASURES)
    with pytest.raises(GraphFormatError, match="nonpositive measure"):
        parse_graph("a b 1\n", "a 1\nb 0\n")


def test_parse_json_document():
    doc = {
        "format_version": 1,
        "vertices": [{"id": "a", "measure": 1.0}, {"id": "b", "measure": 2.0}],
        "edges": [{"u": "a", "v": "b", "weight": 0.5}],
    }
    g = parse_graph(json.dumps(doc))
    assert g.weight("a", "b") == 0.5 and g.measure("b") == 2.0


def test_parse_json_errors_carry_field():
    with pytest.raises(GraphFormatError, match="format_version"):
        parse_graph('{"format_version": 99, "vertices": [], "edges": []}')
    with pytest.raises(GraphFormatError, match="vertices\\[0\\]"):
        parse_graph('{"format_version": 1, "vertices": [{"id": "a"}], "edges": []}')
    with pytest.raises(GraphFormatError, match="edges\\[0\\]"):
        parse_graph(
            '{"format_version": 1, "vertices": [{"id": "a", "measure": 1}],'
            ' "edges": [{"u": "a"}]}'
        )
    with pytest.raises(GraphFormatError, match="JSON parse error"):
        parse_graph("{not json")


def test_parse_json_undeclared_endpoint_rejected():
    doc = {
        "format_version": 1,
        "vertices": [{"id": "a", "measure": 1.0}],
        "edges": [{"u": "a", "v": "zz", "weight": 1.0}],
    }
    with pytest.raises(GraphFormatError, match="undeclared endpoint"):
        parse_graph(json.dumps(doc))


@pytest.mark.parametrize(
    "family,size,profile",
    [("path", 5, "unit"), ("cycle", 6, "normalizing"), ("complete", 4, "unit"),
     ("star", 3, "normalizing"), ("hypercube", 3, "unit"), ("weighted_tree", 9, "unit")],
)
def test_round_trip_generated_graphs(family, size, profile):
    g = generate(family, size, profile, seed=5)
    assert parse_graph(serialize_graph(g)) == g


def test_round_trip_random_graphs():
    rng = np.random.default_rng(60)
    for _ in range(10):
        g = random_connected_graph(rng, int(rng.integers(2, 25)))
        assert parse_graph(serialize_graph(g)) == g


# -- CLI ----------------------------------------------------------------------------


@pytest.fixture()
def edge_graph(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(serialize_graph(generate("complete", 2)), encoding="utf-8")
    return str(path)


def _last_json(capsys):
    out = capsys.readouterr().out
    return json.loads(out)


def test_cli_curvature(edge_graph, capsys):
    code = run(["curvature", "--graph", edge_graph, "--dimension", "inf"])
    report = _last_json(capsys)
    assert code == 0
    assert report["command"] == "curvature"
    assert report["profile"]["global_curvature"] == pytest.approx(2.0, abs=1e-8)
    assert report["profile"]["per_vertex"][0]["dimension"] == "inf"


def test_cli_cd_check_exit_codes(edge_graph, capsys):
    assert run(["cd-check", "--graph", edge_graph, "--K", "2", "--dimension", "inf",
                "--vertex", "v0"]) == 0
    capsys.readouterr()
    code = run(["cd-check", "--graph", edge_graph, "--K", "2.1", "--dimension", "inf",
                "--vertex", "v0"])
    report = _last_json(capsys)
    assert code == 1
    assert report["holds"] is False
    assert report["smallest_eigenvalue"] == pytest.approx(-0.05, abs=1e-12)


def test_cli_verify_estimates_passes(edge_graph, capsys):
    code = run(["verify-estimates", "--graph", edge_graph, "--paper-K", "-2",
                "--dimension", "inf", "--t", "0.1,1,10"])
    report = _last_json(capsys)
    assert code == 0
    assert report["summary"]["passed"] is True
    assert report["summary"]["num_failures"] == 0


def test_cli_verify_estimates_detects_violation(edge_graph, capsys):
    code = run(["verify-estimates", "--graph", edge_graph, "--paper-K", "-2.5",
                "--dimension", "inf", "--t", "0.01,0.1,1"])
    report = _last_json(capsys)
    assert code == 1
    assert report["summary"]["first_counterexample"]["verdicts"]["iii"] is False


def test_cli_sign_flags_mutually_exclusive(edge_graph):
    with pytest.raises(SystemExit) as exc:
        run(["cd-check", "--graph", edge_graph, "--K", "1", "--paper-K", "-1",
             "--vertex", "v0"])
    assert exc.value.code == 2


def test_cli_validate_reports_violations(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "format_version": 1,
        "vertices": [{"id": "a", "measure": 0.0}, {"id": "b", "measure": 1.0}],
        "edges": [{"u": "a", "v": "b", "weight": 1.0}],
    }), encoding="utf-8")
    code = run(["validate", "--graph", str(bad)])
    report = _last_json(capsys)
    assert code == 1
    assert any("measure" in v for v in report["violations"])


def test_cli_validate_ok(edge_graph, capsys):
    assert run(["validate", "--graph", edge_graph]) == 0
    assert _last_json(capsys)["violations"] == []


def test_cli_input_error_exit_2(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert run(["curvature", "--graph", missing]) == 2
    report = _last_json(capsys)
    assert "error" in report
    # verdict failures and input errors must use distinct exit codes
    bad = tmp_path / "dup.txt"
    bad.write_text("a b 1\nb a 2\n", encoding="utf-8")
    meas = tmp_path / "m.txt"
    meas.write_text("a 1\nb 1\n", encoding="utf-8")
    capsys.readouterr()
    assert run(["curvature", "--graph", str(bad), "--measures", str(meas)]) == 2


def test_cli_unknown_vertex_exit_2(edge_graph, capsys):
    assert run(["cd-check", "--graph", edge_graph, "--K", "1", "--vertex", "zz"]) == 2


def test_cli_generate_roundtrip(capsys):
    assert run(["generate", "--family", "hypercube", "--size", "2",
                "--measure-profile", "normalizing"]) == 0
    doc = _last_json(capsys)
    g = parse_graph(json.dumps(doc))
    assert g.num_vertices == 4
    assert all(g.measure(v) == 2.0 for v in g.vertices)


def test_cli_heat_dirichlet_mass(edge_graph, capsys):
    code = run(["heat", "--graph", edge_graph, "--t", "1", "--dirichlet", "v0"])
    report = _last_json(capsys)
    assert code == 0
    assert report["results"][0]["mass"]["v0"] == pytest.approx(np.exp(-1.0), abs=1e-12)


def test_cli_cutoff_and_precondition(edge_graph, tmp_path, capsys):
    assert run(["cutoff", "--graph", edge_graph, "--target", "v0", "--epsilon", "1"]) == 0
    report = _last_json(capsys)
    assert report["max_gamma"] == 0.0 and report["bound_holds"] is True
    star = tmp_path / "star.json"
    star.write_text(serialize_graph(generate("star", 5)), encoding="utf-8")
    capsys.readouterr()
    code = run(["cutoff", "--graph", str(star), "--target", "c", "--epsilon", "1"])
    report = _last_json(capsys)
    assert code == 1 and "error" in report


def test_cli_green_ec_finiteness_taylor(edge_graph, capsys):
    assert run(["green-check", "--graph", edge_graph, "--samples", "5"]) == 0
    capsys.readouterr()
    assert run(["ec-check", "--graph", edge_graph]) == 0
    capsys.readouterr()
    assert run(["finiteness", "--graph", edge_graph, "--K", "2", "--epsilons", "0.5,2"]) == 0
    capsys.readouterr()
    assert run(["taylor-check", "--graph", edge_graph, "--vertex", "v0"]) == 0


def test_cli_reports_deterministic_with_seed(edge_graph, capsys):
    args = ["verify-estimates", "--graph", edge_graph, "--paper-K", "-2",
            "--dimension", "4", "--t", "0.5", "--seed", "7"]
    run(args)
    first = capsys.readouterr().out
    run(args)
    second = capsys.readouterr().out
    assert first == second
