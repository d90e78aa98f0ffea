import numpy
import pytest

from imlab.submodules.adaptive_execution import FixedSetPolicy, run_adaptive
from imlab.submodules.constructions import gen_bad_example, gen_bipartite_gap, gen_random
from imlab.submodules.decision_tree import materialize_tree
from imlab.submodules.errors import TooLargeForExact, WrongConstruction
from imlab.submodules.graph_core import Budget, make_graph
from imlab.submodules.policies import (AdaptiveGreedyPolicy, argmax_lowest_id, bad_example_reference_policy,
                                       bipartite_gap_policy, build_policy, greedy_adaptive_step,
                                       greedy_nonadaptive, greedy_nonadaptive_multitree)
from imlab.submodules.realization import PartialRealization, Realization, bits_to_int
from imlab.submodules.spread import MONTE_CARLO, EstimatorConfig


def test_ties_go_to_the_lowest_id():
    assert argmax_lowest_id({3: 1.0 + 1e-12, 1: 1.0, 2: 0.5}) == 1
    assert argmax_lowest_id({0: 1.0, 1: 2.0}) == 1
    assert argmax_lowest_id({5: 0.0, 4: 0.0}) == 4


def test_greedy_on_isolated_weighted_nodes(exact_cfg):
    graph = make_graph(3, [], [5, 2, 1])
    result = greedy_nonadaptive(graph, 2, exact_cfg)
    assert result.seeds == [0, 1]
    assert [step.marginal.value for step in result.steps] == [5.0, 2.0]
    assert result.exact


def test_greedy_prefers_the_node_with_reach(exact_cfg):
    graph = make_graph(3, [(0, 1, 1.0)])
    result = greedy_nonadaptive(graph, 1, exact_cfg)
    assert result.seeds == [0]
    assert result.steps[0].marginal.value == 2.0


def test_greedy_with_monte_carlo_marginals():
    graph = make_graph(3, [], [5, 2, 1])
    result = greedy_nonadaptive(graph, 2, EstimatorConfig(mode=MONTE_CARLO, replicates=200))
    assert result.seeds == [0, 1]
    assert not result.exact


def test_greedy_auto_mode_falls_back_to_monte_carlo(diamond):
    result = greedy_nonadaptive(diamond, 2, EstimatorConfig(exact_edge_limit=0, replicates=2000))
    assert result.seeds[0] == 0
    assert not result.exact


def test_greedy_on_the_bad_example_takes_v1_then_v2():
    construction = gen_bad_example(20, 100.0)
    result = greedy_nonadaptive_multitree(construction.graph, construction.budget.k)
    v1 = construction.metadata.node_range("v1")
    v2 = construction.metadata.node_range("v2")
    assert len(result.seeds) == 31
    assert result.exact
    assert result.seeds[:19] == list(v1)
    assert all(node in v2 for node in result.seeds[19:])


def test_multitree_greedy_matches_enumeration_greedy(exact_cfg):
    construction = gen_bad_example(3, 5.0)
    k = construction.budget.k
    enumerated = greedy_nonadaptive(construction.graph, k, exact_cfg)
    vectorized = greedy_nonadaptive_multitree(construction.graph, k)
    assert vectorized.seeds == enumerated.seeds
    for fast, slow in zip(vectorized.steps, enumerated.steps):
        assert fast.marginal.value == pytest.approx(slow.marginal.value, rel=1e-9)


def test_exact_greedy_on_the_bad_example_hits_the_guard(exact_cfg):
    construction = gen_bad_example(20, 100.0)
    with pytest.raises(TooLargeForExact):
        greedy_nonadaptive(construction.graph, construction.budget.k, exact_cfg)


def test_multitree_greedy_needs_a_multitree(diamond):
    with pytest.raises(WrongConstruction):
        greedy_nonadaptive_multitree(diamond, 1)


def test_adaptive_step_on_empty_feedback_matches_greedy(diamond, exact_cfg):
    first = greedy_nonadaptive(diamond, 1, exact_cfg).seeds[0]
    assert greedy_adaptive_step(diamond, PartialRealization.empty(), exact_cfg) == first


def test_adaptive_greedy_single_node(exact_cfg):
    graph = make_graph(1, [])
    selected, _ = run_adaptive(graph, AdaptiveGreedyPolicy(Budget(1), exact_cfg), Realization(0, 0))
    assert selected == [0]


def test_adaptive_step_prefers_a_fresh_twin(exact_cfg):
    graph = make_graph(3, [(0, 2, 0.5), (1, 2, 0.5)])
    blocked = PartialRealization.empty().extend(graph, 0, 0)
    assert greedy_adaptive_step(graph, blocked, exact_cfg) == 1


def test_adaptive_greedy_reacts_to_feedback(exact_cfg):
    graph = make_graph(3, [(0, 1, 0.5), (0, 2, 0.5)], [3, 2, 2])
    tree = materialize_tree(graph, AdaptiveGreedyPolicy(Budget(2), exact_cfg))
    assert tree.root.action == 0
    # Children are keyed by the observed block: bit 0 is edge 0 -> 1, bit 1 is edge 0 -> 2
    actions = {key: child.action for key, child in tree.root.children.items()}
    assert actions[0b01] == 2
    assert actions[0b10] == 1


def test_bipartite_policy_skips_reached_right_nodes():
    construction = gen_bipartite_gap(2)
    graph, metadata = construction.graph, construction.metadata
    policy = bipartite_gap_policy(graph, metadata)
    assert policy.budget.k == 4
    assert policy.select(graph, PartialRealization.empty()) == 0
    # Node 70 reached: the first free subset is (71, 72, 73, 74), left id C(7, 3) = 35
    reached_70 = PartialRealization.empty().extend(graph, 0, 0b0001)
    assert policy.select(graph, reached_70) == 35
    nothing_reached = PartialRealization.empty().extend(graph, 0, 0)
    assert policy.select(graph, nothing_reached) == 1


def test_bad_example_reference_policy():
    construction = gen_bad_example(2, 1.0)
    graph = construction.graph
    policy = bad_example_reference_policy(graph, construction.metadata)
    blocked = Realization(0, graph.num_edges)
    live = Realization((1 << graph.num_edges) - 1, graph.num_edges)
    assert run_adaptive(graph, policy, blocked)[0] == [1, 2, 3]
    assert run_adaptive(graph, policy, live)[0] == [1, 2]


def test_reference_policy_batch_selection_matches_its_runs():
    construction = gen_bad_example(4, 2.0)
    graph = construction.graph
    policy = bad_example_reference_policy(graph, construction.metadata)
    rng = numpy.random.default_rng(7)
    live = rng.random((40, graph.num_edges)) < graph.probabilities
    masks = policy.select_batch(graph, live)
    for row, mask in zip(live, masks):
        selected, _ = run_adaptive(graph, policy, Realization(bits_to_int(row), graph.num_edges))
        assert sorted(selected) == numpy.flatnonzero(mask).tolist()


def test_construction_policies_check_their_graph():
    bipartite = gen_bipartite_gap(2)
    bad = gen_bad_example(2, 1.0)
    with pytest.raises(WrongConstruction):
        bipartite_gap_policy(bad.graph, bad.metadata)
    with pytest.raises(WrongConstruction):
        bad_example_reference_policy(gen_random(5, 0.5, 0.1, 0.9, 1), bad.metadata)
    with pytest.raises(WrongConstruction):
        bad_example_reference_policy(bipartite.graph, bipartite.metadata)


def test_build_policy(diamond, exact_cfg):
    policy = build_policy("greedy-nonadaptive", diamond, 2, exact_cfg)
    assert isinstance(policy, FixedSetPolicy)
    assert policy.seeds == tuple(greedy_nonadaptive(diamond, 2, exact_cfg).seeds)
    assert isinstance(build_policy("greedy-adaptive", diamond, 2, exact_cfg), AdaptiveGreedyPolicy)
    with pytest.raises(WrongConstruction):
        build_policy("bipartite", diamond, 2, exact_cfg)
    with pytest.raises(WrongConstruction):
        build_policy("best", diamond, 2, exact_cfg)
