import json

import pytest
from click.testing import CliRunner

from imlab import __version__
from imlab.im_lab import im_lab_cli
from imlab.submodules.graph_core import make_graph, save_graph


def invoke(*args):
    return CliRunner().invoke(im_lab_cli, [str(arg) for arg in args])


def report_of(result):
    assert result.exit_code in (0, 1), result.output
    return json.loads(result.stdout)


@pytest.fixture
def graph_file(tmp_path):
    def write(graph, name="graph.json"):
        path = tmp_path / name
        path.write_bytes(save_graph(graph))
        return str(path)
    return write


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_gen_bipartite(tmp_path):
    out = tmp_path / "bip.json"
    report = report_of(invoke("gen", "--construction", "bipartite-gap", "--m", 2, "--out", out,
                              "--no-timestamp", "--quiet"))
    assert report["results"]["n"] == 78
    assert report["results"]["edges"] == 280
    assert report["results"]["budget"] == 4
    assert (tmp_path / "bip.meta.json").exists()
    assert json.loads(out.read_text(encoding="utf-8"))["n"] == 78


def test_gen_bad_example(tmp_path):
    out = tmp_path / "bad.json"
    report = report_of(invoke("gen", "--construction", "bad-example", "--d", 20, "--w", 100, "--out", out,
                              "--no-timestamp", "--quiet"))
    assert report["results"]["n"] == 79
    assert report["results"]["budget"] == 31


def test_gen_random_is_reproducible(tmp_path):
    digests = []
    for name in ("a.json", "b.json"):
        report = report_of(invoke("gen", "--construction", "random", "--n", 6, "--seed", 42,
                                  "--out", tmp_path / name, "--no-timestamp", "--quiet"))
        digests.append(report["graph_digest"])
    assert digests[0] == digests[1]
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_gen_missing_parameters_are_usage_errors(tmp_path):
    result = invoke("gen", "--construction", "bad-example", "--d", 20, "--out", tmp_path / "bad.json")
    assert result.exit_code == 2
    assert not (tmp_path / "bad.json").exists()
    result = invoke("gen", "--construction", "random", "--n", 4, "--p-low", 0.9, "--p-high", 0.1,
                    "--out", tmp_path / "r.json")
    assert result.exit_code == 2


def test_spread_exact(graph_file):
    path = graph_file(make_graph(2, [(0, 1, 0.5)]))
    report = report_of(invoke("spread", "--graph", path, "--seeds", "0", "--mode", "exact", "--no-timestamp",
                              "--quiet"))
    assert report["results"]["spread"]["value"] == pytest.approx(1.5)
    assert report["results"]["spread"]["exact"]
    report = report_of(invoke("spread", "--graph", path, "--seeds", "0", "--t", 2, "--mode", "exact",
                              "--no-timestamp", "--quiet"))
    assert report["results"]["spread"]["value"] == pytest.approx(1.75)
    report = report_of(invoke("spread", "--graph", path, "--mode", "exact", "--no-timestamp", "--quiet"))
    assert report["results"]["spread"]["value"] == 0.0


def test_reports_are_byte_identical_without_timestamp(graph_file):
    path = graph_file(make_graph(4, [(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)]))
    args = ("spread", "--graph", path, "--seeds", "0", "--mode", "mc", "--replicates", 3000, "--seed", 9,
            "--no-timestamp", "--quiet")
    first = invoke(*args)
    second = invoke(*args)
    pooled = invoke(*args, "--workers", 2)
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    assert pooled.stdout == first.stdout


def test_spread_invalid_seeds(graph_file):
    path = graph_file(make_graph(2, [(0, 1, 0.5)]))
    assert invoke("spread", "--graph", path, "--seeds", "0,7", "--quiet").exit_code == 2
    assert invoke("spread", "--graph", path, "--seeds", "zero", "--quiet").exit_code == 2


def test_invalid_graph_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 2, "edges": [{"src": 0, "dst": 5, "p": 0.5}]}', encoding="utf-8")
    result = invoke("spread", "--graph", path, "--seeds", "0")
    assert result.exit_code == 2
    assert "ERROR" in result.output


def test_opt_nonadaptive_and_adaptive(graph_file):
    path = graph_file(make_graph(3, [], [3, 2, 1]))
    report = report_of(invoke("opt", "--graph", path, "--k", 2, "--no-timestamp", "--quiet"))
    assert report["results"]["objective"] == "OPT_N"
    assert report["results"]["opt"]["value"] == pytest.approx(5.0)
    assert sorted(report["results"]["opt"]["witness"]) == [0, 1]
    report = report_of(invoke("opt", "--graph", path, "--k", 2, "--adaptive", "--no-timestamp", "--quiet"))
    assert report["results"]["objective"] == "OPT_A"
    assert report["results"]["opt"]["value"] == pytest.approx(5.0)


def test_opt_guard_exit_code(graph_file):
    path = graph_file(make_graph(4, [(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)]))
    result = invoke("opt", "--graph", path, "--k", 1, "--exact-edge-limit", 0)
    assert result.exit_code == 3
    assert "ERROR" in result.output


def test_greedy_nonadaptive(graph_file):
    path = graph_file(make_graph(3, [], [5, 2, 1]))
    report = report_of(invoke("greedy", "--graph", path, "--k", 2, "--mode", "exact", "--no-timestamp", "--quiet"))
    assert report["results"]["greedy"]["seeds"] == [0, 1]
    assert report["results"]["spread"]["value"] == pytest.approx(7.0)


def test_greedy_budget_out_of_range(graph_file):
    path = graph_file(make_graph(3, []))
    assert invoke("greedy", "--graph", path, "--k", 4, "--quiet").exit_code == 2


def test_gap_exact(graph_file):
    path = graph_file(make_graph(3, [(0, 1, 0.5)]))
    report = report_of(invoke("gap", "--graph", path, "--k", 1, "--mode", "exact", "--no-timestamp", "--quiet"))
    assert report["results"]["ratio"] == pytest.approx(1.0)
    assert report["results"]["ratio_at_most_4"]
    assert report["verdicts"][0]["status"] == "pass"


def test_gap_needs_two_policies(graph_file):
    path = graph_file(make_graph(3, [(0, 1, 0.5)]))
    assert invoke("gap", "--graph", path, "--k", 1, "--policy", "greedy-adaptive").exit_code == 2


def test_gap_needs_a_budget(graph_file):
    path = graph_file(make_graph(3, [(0, 1, 0.5)]))
    assert invoke("gap", "--graph", path, "--quiet").exit_code == 2


def test_gap_bipartite_policy_beats_greedy(tmp_path):
    graph = tmp_path / "bip.json"
    assert invoke("gen", "--construction", "bipartite-gap", "--m", 2, "--out", graph, "--quiet").exit_code == 0
    result = invoke("gap", "--graph", graph, "--policy", "bipartite", "--policy", "greedy-nonadaptive",
                    "--mode", "mc", "--replicates", 2000, "--seed", 3, "--no-timestamp", "--quiet")
    report = report_of(result)
    assert result.exit_code == 0
    assert report["config"]["k"] == 4
    assert report["results"]["ratio"] > 1.0
    assert "note" in report["results"]


def test_gap_construction_policy_on_wrong_graph(graph_file):
    path = graph_file(make_graph(3, [(0, 1, 0.5)]))
    result = invoke("gap", "--graph", path, "--k", 1, "--policy", "bipartite", "--policy", "greedy-nonadaptive")
    assert result.exit_code == 2


def test_verify_small_corpus(tmp_path):
    xlsx = tmp_path / "verdicts.xlsx"
    args = ("verify", "--suite", "aggregation", "--instances", 3, "--max-n", 4, "--seed", 1, "--no-timestamp",
            "--quiet")
    first = invoke(*args, "--xlsx", xlsx)
    report = report_of(first)
    assert first.exit_code == 0
    assert report["results"]["passed"]
    assert len(report["results"]["corpus"]) == 3
    assert xlsx.exists()
    second = invoke(*args, "--workers", 2)
    assert second.stdout == first.stdout


def test_verify_corpus_guard():
    assert invoke("verify", "--instances", 10001, "--quiet").exit_code == 3


def test_bad_example_small_instance_fails_limit_check(tmp_path):
    out = tmp_path / "report.json"
    result = invoke("bad-example", "--d", 2, "--w", 1, "--mode", "exact", "--replicates", 500,
                    "--no-timestamp", "--quiet", "--out", out)
    assert result.exit_code == 1
    report = json.loads(out.read_text(encoding="utf-8"))
    verdicts = {verdict["check"]: verdict["status"] for verdict in report["verdicts"]}
    assert verdicts["ratio_near_limit"] == "fail"
    assert report["results"]["budget"] == 3


def test_gap_exact_on_zero_weights(graph_file):
    path = graph_file(make_graph(2, [(0, 1, 0.5)], [0, 0]))
    result = invoke("gap", "--graph", path, "--k", 1, "--mode", "exact", "--no-timestamp", "--quiet")
    report = report_of(result)
    assert result.exit_code == 0
    assert report["results"]["ratio"] is None
    assert report["results"]["ratio_at_most_4"]
    assert "note" in report["results"]
    assert report["verdicts"][0]["status"] == "pass"


def test_gap_policies_on_zero_weights(graph_file):
    path = graph_file(make_graph(2, [(0, 1, 0.5)], [0, 0]))
    result = invoke("gap", "--graph", path, "--k", 1, "--policy", "greedy-adaptive", "--policy",
                    "greedy-nonadaptive", "--mode", "mc", "--replicates", 500, "--seed", 1, "--no-timestamp",
                    "--quiet")
    report = report_of(result)
    assert result.exit_code == 0
    assert report["results"]["ratio"] is None
    assert report["verdicts"][0]["status"] == "pass"


def test_gen_help_describes_the_bipartite_sizes():
    option = next(param for param in im_lab_cli.commands["gen"].params if param.name == "m")
    assert "m^3 right nodes" in option.help
    assert "m^4" not in option.help
