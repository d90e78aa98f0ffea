from dataclasses import replace

import pytest

from imlab.submodules.adaptive_execution import FixedSetPolicy
from imlab.submodules.constructions import bad_example_closed_forms, gen_bad_example
from imlab.submodules.errors import InvalidSeedSet, TooLargeForExact
from imlab.submodules.graph_core import Budget, make_graph
from imlab.submodules.policies import bad_example_reference_policy
from imlab.submodules.realization import PartialRealization
from imlab.submodules.spread import (EXACT, MONTE_CARLO, EstimatorConfig, SpreadEstimate, aggregate_spread_set,
                                     conditional_aggregate_spread, conditional_spread_exact, marginal_adaptive,
                                     marginal_nonadaptive, policy_spread, simulate_policy, simulate_policy_batch,
                                     spread_exact, spread_mc)


def test_spread_exact_two_node(two_node):
    assert spread_exact(make_graph(2, [(0, 1, 1.0)]), [0]).value == 2.0
    estimate = spread_exact(two_node, [0])
    assert estimate.value == pytest.approx(1.5)
    assert estimate.exact and estimate.stderr == 0.0 and estimate.replicates == 0
    assert spread_exact(two_node, [0, 1]).value == pytest.approx(2.0)
    assert spread_exact(two_node, []).value == 0.0


def test_spread_mc_two_node(two_node, mc_cfg):
    estimate = spread_mc(two_node, [0], mc_cfg)
    assert not estimate.exact
    assert estimate.replicates == mc_cfg.replicates
    assert abs(estimate.value - 1.5) <= 4 * estimate.stderr
    empty = spread_mc(two_node, [], mc_cfg)
    assert empty.value == 0.0 and empty.stderr == 0.0


def test_spread_mc_certain_edges(path3, mc_cfg):
    estimate = spread_mc(path3, [0], mc_cfg)
    assert estimate.value == 3.0
    assert estimate.stderr == 0.0


def test_spread_mc_is_reproducible(two_node, mc_cfg):
    assert spread_mc(two_node, [0], mc_cfg) == spread_mc(two_node, [0], mc_cfg)
    other = spread_mc(two_node, [0], mc_cfg.with_stream("other"))
    assert other != spread_mc(two_node, [0], mc_cfg)


def test_spread_mc_does_not_depend_on_workers(two_node):
    cfg = EstimatorConfig(mode=MONTE_CARLO, replicates=4096, base_seed=5, chunk_size=512)
    single = spread_mc(two_node, [0], cfg)
    pooled = spread_mc(two_node, [0], replace(cfg, workers=2))
    assert single == pooled


def test_aggregate_spread(two_node, exact_cfg):
    assert aggregate_spread_set(two_node, [0], 1, exact_cfg).value == pytest.approx(1.5)
    assert aggregate_spread_set(two_node, [0], 2, exact_cfg).value == pytest.approx(1.75)
    three = aggregate_spread_set(two_node, [0], 3, exact_cfg).value
    assert three == pytest.approx(1.875)
    assert three <= 3 * 1.5


def test_aggregate_spread_mc_agrees_with_exact(diamond, exact_cfg, mc_cfg):
    exact = aggregate_spread_set(diamond, [0], 2, exact_cfg).value
    estimate = aggregate_spread_set(diamond, [0], 2, mc_cfg)
    assert abs(estimate.value - exact) <= 4 * estimate.stderr


def test_conditional_spread(two_node, exact_cfg):
    live = PartialRealization(frozenset({0}), 0b1)
    blocked = PartialRealization(frozenset({0}), 0)
    assert conditional_spread_exact(two_node, [0], PartialRealization.empty()).value == pytest.approx(1.5)
    assert conditional_spread_exact(two_node, [0], live).value == 2.0
    assert conditional_spread_exact(two_node, [0], blocked).value == 1.0
    # The extra copy of a blocked observation is still free
    assert conditional_aggregate_spread(two_node, [0], blocked, 2, exact_cfg).value == pytest.approx(1.5)


def test_conditional_spread_mc_respects_feedback(two_node, mc_cfg):
    live = PartialRealization(frozenset({0}), 0b1)
    estimate = conditional_aggregate_spread(two_node, [0], live, 1, mc_cfg)
    assert estimate.value == 2.0 and estimate.stderr == 0.0


def test_marginal_nonadaptive(path3, exact_cfg):
    isolated = make_graph(2, [])
    assert marginal_nonadaptive(isolated, 1, [0], 1, exact_cfg).value == 1.0
    assert marginal_nonadaptive(path3, 2, [0], 1, exact_cfg).value == 0.0
    cherry = make_graph(3, [(0, 1, 0.5), (0, 2, 0.5)])
    assert marginal_nonadaptive(cherry, 0, [], 2, exact_cfg).value == pytest.approx(2.5)


def test_marginal_adaptive(diamond, exact_cfg):
    empty = PartialRealization.empty()
    for node in range(diamond.n):
        for t in (1, 2):
            assert marginal_adaptive(diamond, node, empty, t, exact_cfg).value == pytest.approx(
                marginal_nonadaptive(diamond, node, [], t, exact_cfg).value)


def test_marginal_adaptive_of_reached_node_is_zero(exact_cfg):
    graph = make_graph(3, [(0, 1, 1.0), (1, 2, 0.5)])
    psi = PartialRealization.empty().extend(graph, 0, 0b01)
    assert marginal_adaptive(graph, 1, psi, 1, exact_cfg).value == 0.0


def test_marginal_mc_uses_common_random_numbers(diamond, exact_cfg, mc_cfg):
    exact = marginal_nonadaptive(diamond, 3, [0], 1, exact_cfg).value
    estimate = marginal_nonadaptive(diamond, 3, [0], 1, mc_cfg)
    assert abs(estimate.value - exact) <= 4 * estimate.stderr


def test_invalid_inputs(two_node, exact_cfg):
    with pytest.raises(InvalidSeedSet):
        spread_exact(two_node, [2])
    with pytest.raises(InvalidSeedSet):
        marginal_nonadaptive(two_node, 0, [0], 1, exact_cfg)
    with pytest.raises(ValueError):
        aggregate_spread_set(two_node, [0], 0, exact_cfg)


@pytest.mark.parametrize("kwargs", [{"mode": "fast"}, {"mode": MONTE_CARLO, "replicates": 0}, {"workers": 0},
                                    {"chunk_size": 0}, {"base_seed": -1}, {"base_seed": 2 ** 64}])
def test_estimator_config_validation(kwargs):
    with pytest.raises(ValueError):
        EstimatorConfig(**kwargs)


def test_spread_estimate_validation():
    with pytest.raises(ValueError):
        SpreadEstimate(1.0, True, stderr=0.1)
    with pytest.raises(ValueError):
        SpreadEstimate(1.0, False, stderr=-1.0)


def test_exact_mode_propagates_guard(diamond):
    with pytest.raises(TooLargeForExact):
        aggregate_spread_set(diamond, [0], 1, EstimatorConfig(mode=EXACT, exact_edge_limit=0))
    fallback = aggregate_spread_set(diamond, [0], 1, EstimatorConfig(exact_edge_limit=0, replicates=500))
    assert not fallback.exact


@pytest.mark.parametrize("leaves, exact", [(22, True), (23, False)])
def test_auto_mode_switches_at_the_guard(leaves, exact):
    star = make_graph(leaves + 1, [(0, leaf, 0.5) for leaf in range(1, leaves + 1)])
    estimate = aggregate_spread_set(star, [0], 1, EstimatorConfig(replicates=4000, base_seed=5))
    assert estimate.exact == exact
    assert abs(estimate.value - (1.0 + 0.5 * leaves)) <= max(4.0 * estimate.stderr, 1e-9)
    if not exact:
        with pytest.raises(TooLargeForExact):
            spread_exact(star, [0])


def test_batch_simulation_of_the_reference_policy():
    construction = gen_bad_example(20, 100.0)
    policy = bad_example_reference_policy(construction.graph, construction.metadata)
    cfg = EstimatorConfig(mode=MONTE_CARLO, replicates=20000, base_seed=3)
    estimate = simulate_policy_batch(construction.graph, policy, cfg)
    reference = bad_example_closed_forms(20, 100.0).adaptive_reference_value
    assert estimate.replicates == 20000
    assert abs(estimate.value - reference) <= 4.0 * estimate.stderr
    assert policy_spread(construction.graph, policy, 1, cfg) == estimate
    assert simulate_policy_batch(construction.graph, policy, replace(cfg, workers=2)) == estimate


def test_fixed_set_policy_spread(diamond, exact_cfg):
    policy = FixedSetPolicy([0, 2], Budget(2))
    assert policy_spread(diamond, policy, 1, exact_cfg).value == pytest.approx(spread_exact(diamond, [0, 2]).value)
    assert policy_spread(diamond, policy, 3, exact_cfg).value >= policy_spread(diamond, policy, 1, exact_cfg).value


def test_simulated_policy_agrees_with_exact(diamond, exact_cfg):
    policy = FixedSetPolicy([1], Budget(1))
    cfg = EstimatorConfig(mode=MONTE_CARLO, replicates=4000, base_seed=3, stream_tag="policy")
    exact = policy_spread(diamond, policy, 2, exact_cfg).value
    estimate, traces = simulate_policy(diamond, policy, 2, cfg, keep_traces=True)
    assert abs(estimate.value - exact) <= 4 * estimate.stderr
    assert len(traces) == cfg.replicates
    assert all(trace["seeds"] == [1] for trace in traces)
