import math

import pytest

from imlab.submodules.constructions import (BAD_EXAMPLE, V3_EDGE_PROBABILITY, ConstructionMetadata,
                                            ConstructionParams, bad_example_budget, bad_example_closed_forms,
                                            gen_bad_example, gen_bipartite_gap, gen_g_of_w, gen_random)
from imlab.submodules.errors import ConstructionTooLarge, WrongConstruction
from imlab.submodules.graph_core import graph_digest, make_graph


def test_bipartite_gap_m2():
    construction = gen_bipartite_gap(2)
    graph = construction.graph
    assert graph.n == 78
    assert graph.num_edges == 280
    assert construction.budget.k == 4
    assert {edge.prob for edge in graph.edges} == {0.5}
    left = construction.metadata.node_range("left")
    right = construction.metadata.node_range("right")
    assert len(left) == 70 and len(right) == 8
    assert all(len(graph.out_adjacency[node]) == 4 for node in left)
    assert all(len(graph.out_adjacency[node]) == 0 for node in right)
    assert construction.metadata.layout["subsets"][0] == [70, 71, 72, 73]


def test_bipartite_gap_bounds():
    with pytest.raises(ValueError):
        gen_bipartite_gap(1)
    with pytest.raises(ConstructionTooLarge):
        gen_bipartite_gap(3)


def test_bad_example_d2():
    construction = gen_bad_example(2, 1.0)
    graph = construction.graph
    assert graph.n == 7
    assert graph.num_edges == 6
    assert construction.budget.k == 3
    assert bad_example_budget(2)[1] == pytest.approx(2 * (math.e + 3) / (math.e + 1))
    v1, v2 = construction.metadata.node_range("v1"), construction.metadata.node_range("v2")
    for edge in graph.edges:
        if edge.src in v1:
            assert edge.prob == 0.5
        else:
            assert edge.src in v2
            assert edge.prob == pytest.approx(0.73106, abs=1e-5)


def test_bad_example_d20_layout():
    construction = gen_bad_example(20, 100.0)
    metadata = construction.metadata
    assert construction.graph.n == 79
    assert metadata.budget == 31
    assert metadata.layout == {"v1": [0, 19], "v2": [19, 39], "v3": [39, 79]}
    assert all(construction.graph.weights[node] == 100.0 for node in metadata.node_range("v3"))
    v2_first = metadata.node_range("v2")[0]
    children = [construction.graph.edges[index].dst for index in construction.graph.out_adjacency[v2_first]]
    assert children == [39, 40]


def test_bad_example_parameter_checks():
    with pytest.raises(ValueError):
        gen_bad_example(1, 10.0)
    with pytest.raises(ValueError):
        gen_bad_example(5, 0.5)
    with pytest.raises(ConstructionTooLarge):
        gen_bad_example(1000, 10.0, max_nodes=100)


def test_closed_form_marginals():
    closed = bad_example_closed_forms(20, 100.0)
    assert closed.m1(0.0) - closed.m2(0.0) == pytest.approx(1.0)
    assert closed.m3(0.0) == pytest.approx(100.0)
    assert closed.gain_per_v2 == pytest.approx(1.0 + 200.0 * V3_EDGE_PROBABILITY)
    assert closed.p(1) == pytest.approx(0.05)


def test_closed_form_limit():
    closed = bad_example_closed_forms(10 ** 7, 1e7)
    assert closed.greedy_closed_form / (closed.d * closed.w) == pytest.approx(1.2122, abs=1e-4)
    assert closed.limit_greedy_per_dw == pytest.approx(2 * (math.e ** 2 + 1) / (math.e + 1) ** 2)


def test_adaptive_reference_value():
    closed = bad_example_closed_forms(100, 1000.0)
    assert closed.budget == 154
    assert closed.adaptive_reference_value >= closed.opt_adaptive_lower(0.05)
    assert closed.adaptive_reference_value <= closed.d + 2 * closed.d * closed.w
    assert abs(closed.reference_ratio - closed.limit_ratio) <= 0.02
    assert set(closed.to_dict()) >= {"greedy_closed_form", "adaptive_reference_value", "limit_ratio"}


def test_g_of_w():
    construction = gen_g_of_w(make_graph(1, []), 1.0)
    graph = construction.graph
    assert graph.n == 2
    assert [(edge.src, edge.dst, edge.prob) for edge in graph.edges] == [(0, 1, 1.0)]

    base = make_graph(3, [(0, 1, 0.5), (2, 1, 0.25)])
    wrapped = gen_g_of_w(base, 10.0).graph
    assert wrapped.weights == (1.0, 1.0, 1.0, 10.0, 10.0, 10.0)
    assert {(edge.src, edge.dst, edge.prob) for edge in wrapped.edges} == {
        (0, 3, 1.0), (1, 4, 1.0), (2, 5, 1.0), (3, 4, 0.5), (5, 4, 0.25)}
    with pytest.raises(WrongConstruction):
        gen_g_of_w(make_graph(2, [], [1, 2]), 10.0)


def test_random_graphs():
    assert gen_random(4, 0.0, 0.1, 0.9, 3).num_edges == 0
    assert gen_random(3, 1.0, 0.1, 0.9, 3).num_edges == 6
    assert graph_digest(gen_random(5, 0.4, 0.1, 0.9, 7)) == graph_digest(gen_random(5, 0.4, 0.1, 0.9, 7))
    leveled = gen_random(5, 1.0, 0.0, 1.0, 2, prob_levels=(0.25, 0.75))
    assert {edge.prob for edge in leveled.edges} <= {0.25, 0.75}
    weighted = gen_random(6, 0.5, 0.1, 0.9, 2, max_weight=3)
    assert all(weight in (1.0, 2.0, 3.0) for weight in weighted.weights)
    with pytest.raises(ValueError):
        gen_random(3, 0.5, 0.9, 0.1, 0)


def test_construction_params():
    params = ConstructionParams(BAD_EXAMPLE, {"d": 2, "w": 1})
    assert params.derived_budget.k == 3
    assert params.build().graph.n == 7
    assert ConstructionParams("random", {"n": 3, "p_edge": 1.0, "p_low": 0.5, "p_high": 0.5,
                                         "seed": 0}).derived_budget is None
    with pytest.raises(WrongConstruction):
        ConstructionParams("g-of-w", {"w": 2}).build()
    with pytest.raises(WrongConstruction):
        ConstructionParams("tree", {}).build()


def test_metadata_round_trip():
    metadata = gen_bad_example(3, 5.0).metadata
    assert ConstructionMetadata.from_dict(metadata.to_dict()) == metadata
    with pytest.raises(WrongConstruction):
        ConstructionMetadata.from_dict({"params": {}})
