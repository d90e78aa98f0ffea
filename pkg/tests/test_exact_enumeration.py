import itertools
import math

import pytest

from imlab.submodules.constructions import gen_bad_example
from imlab.submodules.errors import TooLargeForExact, WrongConstruction
from imlab.submodules.exact_enumeration import ExactEvaluator, MultitreeEvaluator, effective_probabilities
from imlab.submodules.graph_core import make_graph
from imlab.submodules.realization import PartialRealization, Realization, reachable_utility


def _brute_force_spread(graph, seeds):
    """Averages f(S, phi) over all 2^|E| realizations."""
    total = []
    for states in itertools.product((False, True), repeat=graph.num_edges):
        probability = 1.0
        live = 0
        for index, (edge, is_live) in enumerate(zip(graph.edges, states)):
            probability *= edge.prob if is_live else 1.0 - edge.prob
            if is_live:
                live |= 1 << index
        total.append(probability * reachable_utility(graph, seeds, Realization(live, graph.num_edges)))
    return math.fsum(total)


def test_effective_probabilities(two_node):
    assert effective_probabilities(two_node) == (0.5,)
    assert effective_probabilities(two_node, {0: 2}) == pytest.approx((0.75,))
    assert effective_probabilities(two_node, {0: 3}) == pytest.approx((0.875,))
    observed_live = PartialRealization(frozenset({0}), 0b1)
    observed_blocked = PartialRealization(frozenset({0}), 0)
    assert effective_probabilities(two_node, None, observed_live) == (1.0,)
    assert effective_probabilities(two_node, None, observed_blocked) == (0.0,)
    assert effective_probabilities(two_node, {0: 2}, observed_blocked) == pytest.approx((0.5,))


def test_expected_utility_two_node(two_node):
    evaluator = ExactEvaluator(two_node)
    assert evaluator.expected_utility([]) == 0.0
    assert evaluator.expected_utility([0]) == pytest.approx(1.5)
    assert evaluator.expected_utility([0, 1]) == pytest.approx(2.0)
    assert evaluator.expected_utility([0], {0: 2}) == pytest.approx(1.75)
    assert evaluator.expected_utility([0], {0: 3}) == pytest.approx(1.875)


def test_reach_probability_diamond(diamond):
    evaluator = ExactEvaluator(diamond)
    # Each two-hop path is live with 1/4; node 3 is reached unless both fail
    assert evaluator.reach_probability(3, [0], [0.5] * 4) == pytest.approx(1.0 - 0.75 ** 2)
    assert evaluator.reach_probability(0, [3], [0.5] * 4) == 0.0


def test_matches_brute_force_on_weighted_graph():
    graph = make_graph(5, [(0, 1, 0.3), (0, 2, 0.6), (1, 3, 0.5), (2, 3, 0.9), (3, 4, 0.4), (4, 1, 0.2)],
                       [1, 2, 1, 3, 0.5])
    evaluator = ExactEvaluator(graph)
    for seeds in ([0], [2], [1, 4], [0, 3]):
        assert evaluator.expected_utility(seeds) == pytest.approx(_brute_force_spread(graph, seeds), abs=1e-12)


def test_marginal_counts_only_descendants(diamond):
    evaluator = ExactEvaluator(diamond)
    assert evaluator.marginal([0], 3) == pytest.approx(1.0 - 0.4375)
    assert evaluator.marginal([], 0) == pytest.approx(evaluator.expected_utility([0]))


def test_guard_refuses_large_enumerations(diamond):
    with pytest.raises(TooLargeForExact):
        ExactEvaluator(diamond, exact_edge_limit=0).expected_utility([0])


def _star(leaves, probability=0.5):
    return make_graph(leaves + 1, [(0, leaf, probability) for leaf in range(1, leaves + 1)])


@pytest.mark.parametrize("leaves", [22, 23, 30])
def test_guard_counts_relevant_edges(leaves):
    evaluator = ExactEvaluator(_star(leaves), exact_edge_limit=22)
    assert evaluator.relevant_edge_count([0]) == leaves
    if leaves <= 22:
        assert evaluator.expected_utility([0]) == pytest.approx(1.0 + 0.5 * leaves)
    else:
        with pytest.raises(TooLargeForExact):
            evaluator.expected_utility([0])
        with pytest.raises(TooLargeForExact):
            evaluator.marginal([], 0)
    # A leaf reaches no edge at all
    assert evaluator.expected_utility([1]) == 1.0


def test_decided_and_unreachable_edges_are_not_relevant():
    graph = make_graph(5, [(0, 1, 1.0), (1, 2, 0.5), (3, 4, 0.5)])
    evaluator = ExactEvaluator(graph, exact_edge_limit=1)
    assert evaluator.relevant_edge_count([0]) == 1
    assert evaluator.relevant_edge_count([0, 3]) == 2
    assert evaluator.relevant_edge_count([0], (1.0, 0.0, 0.5)) == 0
    assert evaluator.expected_utility([0]) == pytest.approx(2.5)
    with pytest.raises(TooLargeForExact):
        evaluator.expected_utility([0, 3])


def test_observed_edges_do_not_count_against_the_guard():
    graph = _star(30)
    everything_observed = PartialRealization(frozenset({0}), 0)
    evaluator = ExactEvaluator(graph, exact_edge_limit=0)
    assert evaluator.expected_utility([0], None, everything_observed) == 1.0


def test_multitree_evaluator_matches_enumeration():
    graph = gen_bad_example(3, 5.0).graph
    assert graph.is_multitree
    fast = MultitreeEvaluator(graph)
    slow = ExactEvaluator(graph)
    for seeds in ([], [0], [0, 1], [2, 5], [0, 2, 3]):
        assert fast.expected_utility(seeds) == pytest.approx(slow.expected_utility(seeds), rel=1e-12, abs=1e-12)
    gains = fast.marginals([0], [1, 2, 5])
    for node, gain in gains.items():
        assert gain == pytest.approx(slow.marginal([0], node), rel=1e-9, abs=1e-12)


def test_multitree_evaluator_beyond_the_enumeration_guard():
    fast = MultitreeEvaluator(_star(30))
    assert fast.expected_utility([0]) == pytest.approx(16.0)
    assert fast.marginals([], [0, 1]) == pytest.approx({0: 16.0, 1: 1.0})


def test_multitree_evaluator_rejects_two_paths(diamond):
    assert not diamond.is_multitree
    with pytest.raises(WrongConstruction):
        MultitreeEvaluator(diamond)
