import time

import pytest

from imlab.submodules.constructions import bad_example_closed_forms, gen_bad_example
from imlab.submodules.exact_enumeration import MultitreeEvaluator
from imlab.submodules.experiments import bad_example_command, gap_command
from imlab.submodules.graph_core import make_graph, save_graph
from imlab.submodules.spread import EXACT, MONTE_CARLO, EstimatorConfig


def statuses(report):
    return {verdict["check"]: verdict["status"] for verdict in report.verdicts}


def test_bad_example_greedy_spread_against_the_closed_form():
    cfg = EstimatorConfig(mode=MONTE_CARLO, replicates=2000, base_seed=11)
    report = bad_example_command(30, 200.0, cfg, 0.05, True)
    results = report.results
    checks = statuses(report)
    assert checks["greedy_selects_v1_first_then_v2"] == "pass"
    assert checks["greedy_v2_count_within_1"] == "pass"
    assert checks["greedy_spread_matches_closed_form"] == "pass"
    closed = bad_example_closed_forms(30, 200.0)
    assert results["greedy_closed_form"] == pytest.approx(closed.greedy_closed_form)
    assert results["integrality_gap"] == pytest.approx(
        closed.greedy_value_for_count(results["greedy_v2_picks"]) - closed.greedy_closed_form)
    graph = gen_bad_example(30, 200.0).graph
    exact_value = MultitreeEvaluator(graph).expected_utility(results["greedy"]["seeds"])
    assert exact_value == pytest.approx(closed.greedy_value_for_count(results["greedy_v2_picks"]), rel=1e-9)


def test_bad_example_with_sixty_v2_nodes_finishes_quickly():
    cfg = EstimatorConfig(mode=MONTE_CARLO, replicates=2000, base_seed=3)
    start = time.perf_counter()
    report = bad_example_command(60, 200.0, cfg, 0.05, True)
    elapsed = time.perf_counter() - start
    checks = statuses(report)
    assert elapsed < 60.0
    assert checks["greedy_selects_v1_first_then_v2"] == "pass"
    assert checks["greedy_v2_count_within_1"] == "pass"
    assert report.results["greedy_marginals"].startswith("exact")


def test_gap_command_on_zero_weights(tmp_path):
    path = tmp_path / "zero.json"
    path.write_bytes(save_graph(make_graph(3, [(0, 1, 0.5), (1, 2, 0.5)], [0, 0, 0])))
    report = gap_command(str(path), 1, [], None, EstimatorConfig(mode=EXACT), False, True)
    assert report.results["ratio"] is None
    assert report.results["ratio_at_most_4"]
    assert statuses(report) == {"ratio_within_1_and_4": "pass"}
