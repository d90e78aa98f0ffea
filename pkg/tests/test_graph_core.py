import json

import pytest

from imlab.submodules.errors import GraphValidationError, InvalidBudget, NonIntegerWeight, ParseError
from imlab.submodules.graph_core import (Budget, Edge, InfluenceGraph, expand_chains, graph_digest, load_graph,
                                         make_graph, mask_nodes, save_graph, seed_mask, validate)


def _codes(graph):
    return [violation.code for violation in validate(graph)]


def test_minimal_graph_is_valid():
    graph = make_graph(2, [(0, 1, 0.5)])
    assert graph.n == 2
    assert graph.num_edges == 1
    assert graph.weights == (1.0, 1.0)


@pytest.mark.parametrize("edges, code", [
    ([(0, 0, 0.5)], "SelfLoop"),
    ([(0, 1, 1.2)], "ProbOutOfRange"),
    ([(0, 1, -0.1)], "ProbOutOfRange"),
    ([(0, 1, 0.5), (0, 1, 0.7)], "DuplicateEdge"),
    ([(0, 5, 0.5)], "NodeOutOfRange"),
])
def test_make_graph_rejects_broken_edges(edges, code):
    with pytest.raises(GraphValidationError) as info:
        make_graph(2, edges)
    assert code in info.value.codes


def test_validate_reports_every_violation():
    graph = InfluenceGraph(n=2, weights=(1.0, -1.0, 1.0),
                           edges=(Edge(1, 0, 0.5), Edge(0, 1, 0.5), Edge(1, 1, 2.0)))
    codes = _codes(graph)
    assert "WeightCountMismatch" in codes
    assert "NegativeWeight" in codes
    assert "UnsortedEdges" in codes
    assert "SelfLoop" in codes
    assert "ProbOutOfRange" in codes


def test_load_graph_rejects_probability_above_one():
    data = json.dumps({"n": 2, "edges": [{"src": 0, "dst": 1, "p": 2.0}]}).encode()
    with pytest.raises(GraphValidationError) as info:
        load_graph(data)
    assert info.value.codes == ["ProbOutOfRange"]


def test_load_graph_unsorted_edges_strict_and_lenient():
    data = json.dumps({"n": 3, "edges": [{"src": 1, "dst": 2, "p": 0.5},
                                         {"src": 0, "dst": 1, "p": 0.25}]}).encode()
    with pytest.raises(GraphValidationError) as info:
        load_graph(data)
    assert info.value.codes == ["UnsortedEdges"]
    graph = load_graph(data, lenient=True)
    assert [(edge.src, edge.dst) for edge in graph.edges] == [(0, 1), (1, 2)]


@pytest.mark.parametrize("data", [b"{not json", b"[1, 2]", b'{"n": -1}', b'{"n": 2, "edges": [{"src": 0}]}',
                                  b'{"n": 2, "weights": ["a", 1]}'])
def test_load_graph_parse_errors(data):
    with pytest.raises(ParseError):
        load_graph(data)


def test_canonical_serialization_is_stable():
    graph = make_graph(3, [(1, 2, 0.1), (0, 1, 0.3)], [1, 2.5, 1])
    data = save_graph(graph)
    again = load_graph(data)
    assert again == graph
    assert save_graph(again) == data
    assert graph_digest(again) == graph_digest(graph)
    assert "weights" not in json.loads(save_graph(make_graph(2, [])).decode())


def test_expand_chains_single_heavy_node():
    expanded, heads = expand_chains(make_graph(1, [], [3]))
    assert heads == [0]
    assert expanded.n == 3
    assert [(edge.src, edge.dst, edge.prob) for edge in expanded.edges] == [(0, 1, 1.0), (1, 2, 1.0)]


def test_expand_chains_two_nodes():
    expanded, heads = expand_chains(make_graph(2, [(0, 1, 0.5)], [1, 2]))
    assert heads == [0, 1]
    assert expanded.n == 3
    assert {(edge.src, edge.dst, edge.prob) for edge in expanded.edges} == {(0, 1, 0.5), (1, 2, 1.0)}


def test_expand_chains_unit_weights_is_identity():
    graph = make_graph(3, [(0, 1, 0.5), (2, 0, 0.25)])
    expanded, heads = expand_chains(graph)
    assert expanded == graph
    assert heads == [0, 1, 2]


def test_expand_chains_needs_integer_weights():
    with pytest.raises(NonIntegerWeight):
        expand_chains(make_graph(2, [], [1, 1.5]))


@pytest.mark.parametrize("k", [0, 4, True, 1.0])
def test_budget_bounds(k):
    with pytest.raises(InvalidBudget):
        Budget.for_graph(k, make_graph(3, []))


def test_masks_and_closures(diamond):
    assert mask_nodes(seed_mask([3, 0, 2])) == [0, 2, 3]
    assert mask_nodes(diamond.descendants[1]) == [1, 3]
    assert mask_nodes(diamond.ancestors[3]) == [0, 1, 2, 3]
    assert diamond.block_masks[0] == 0b0011
    assert diamond.total_weight() == 4.0
