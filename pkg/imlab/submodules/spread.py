#!/usr/bin/env python3
#
# Copyright 2020 PSB
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""spread.py

This module contains the exact and Monte Carlo computation of all spread
quantities: sigma(S), the aggregate spread sigma^t(S), conditional spreads given a
partial realization, the non-adaptive and adaptive marginal gains, and the
(aggregate) spread of a policy.

Every function takes an EstimatorConfig. Its mode decides the estimator:
* 'exact' ~ exact expectation, TooLargeForExact beyond the guard
* 'monte_carlo' ~ mean over derived-seed replicates with its standard error
* 'auto' ~ exact when possible, Monte Carlo otherwise
"""

# IMPORTS
# External modules
import math
import numpy
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
# Internal modules
from .adaptive_execution import BatchPolicy, Policy, checked_select, run_adaptive
from .errors import InvalidSeedSet, TooLargeForExact
from .exact_enumeration import ExactEvaluator
from .graph_core import InfluenceGraph
from .helper_general import chunked, parallel_map
from .monte_carlo import AggregateTask, ReplicateStatistics, propagate, run_aggregate_task, sample_live_copies
from .realization import (PartialRealization, RealizationDistribution, aggregate_utility, derive_seed,
                          feedback_outcomes, reachable_utility, sample_realization)


# CONSTANT SECTION
EXACT = "exact"
MONTE_CARLO = "monte_carlo"
AUTO = "auto"
MODES = (EXACT, MONTE_CARLO, AUTO)
# Maximal number of visited decision-tree nodes for an exact policy spread
MAX_POLICY_TREE_NODES = 2_000_000


# CLASSES SECTION
@dataclass(frozen=True)
class SpreadEstimate:
    """A spread value with its exactness flag, standard error and replicate count."""
    value: float
    exact: bool
    stderr: float = 0.0
    replicates: int = 0

    def __post_init__(self) -> None:
        if self.stderr < 0.0:
            raise ValueError("A standard error cannot be negative")
        if self.exact and (self.stderr != 0.0 or self.replicates != 0):
            raise ValueError("An exact estimate has stderr 0 and 0 replicates")

    @classmethod
    def of_exact(cls, value: float) -> "SpreadEstimate":
        return cls(value, True)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class EstimatorConfig:
    """How spread quantities are estimated.

    Arguments
    ----------
    * mode: str = 'auto' ~ 'exact', 'monte_carlo' or 'auto'.
    * replicates: int = 10000 ~ Monte Carlo replicates R.
    * base_seed: int = 0 ~ 64-bit base seed of all derived random streams.
    * exact_edge_limit: int = 22 ~ Exactness guard: most undecided edges the seeds may reach.
    * workers: int = 1 ~ Worker processes for Monte Carlo chunks.
    * chunk_size: int = 1024 ~ Replicates per Monte Carlo chunk; part of the stream layout.
    * stream_tag: str = 'spread' ~ Name of the random stream; equal tags give common random numbers.
    """
    mode: str = AUTO
    replicates: int = 10000
    base_seed: int = 0
    exact_edge_limit: int = 22
    workers: int = 1
    chunk_size: int = 1024
    stream_tag: str = "spread"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"Unknown estimation mode '{self.mode}', use one of {', '.join(MODES)}")
        if self.mode == MONTE_CARLO and self.replicates < 1:
            raise ValueError("Monte Carlo estimation needs at least one replicate")
        if self.replicates < 0 or self.workers < 1 or self.chunk_size < 1 or self.exact_edge_limit < 0:
            raise ValueError("replicates, workers, chunk_size and exact_edge_limit must be non-negative "
                             "(workers and chunk_size positive)")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ValueError("The base seed must be an unsigned 64-bit integer")

    def with_stream(self, stream_tag: str) -> "EstimatorConfig":
        return replace(self, stream_tag=stream_tag)

    def to_dict(self) -> Dict[str, Any]:
        """The settings that determine the results; the worker count is left out."""
        settings = asdict(self)
        del settings["workers"]
        return settings


# PUBLIC FUNCTIONS SECTION
def spread_exact(graph: InfluenceGraph, seeds: Iterable[int], cfg: Optional[EstimatorConfig] = None,
                 evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """sigma(S), exactly.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * seeds: Iterable[int] ~ The seed set S.
    * cfg: Optional[EstimatorConfig] = None ~ Only its exact_edge_limit is used.
    * evaluator: Optional[ExactEvaluator] = None ~ A reusable exact engine for this graph.
    """
    return aggregate_spread_set(graph, seeds, 1, replace(cfg or EstimatorConfig(), mode=EXACT), evaluator)


def spread_mc(graph: InfluenceGraph, seeds: Iterable[int], cfg: EstimatorConfig) -> SpreadEstimate:
    """sigma(S) as the mean of f(S, phi_i) over cfg.replicates derived-seed realizations."""
    return aggregate_spread_set(graph, seeds, 1, replace(cfg, mode=MONTE_CARLO))


def aggregate_spread_set(graph: InfluenceGraph, seeds: Iterable[int], t: int, cfg: EstimatorConfig,
                         evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """sigma^t(S) = E[f^t(S, Phi^1..Phi^t)]; t = 1 gives sigma(S).

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * seeds: Iterable[int] ~ The seed set S.
    * t: int ~ Number of independent realization copies of the seeds' out-edges (t >= 1).
    * cfg: EstimatorConfig ~ Estimation settings.
    * evaluator: Optional[ExactEvaluator] = None ~ A reusable exact engine for this graph.
    """
    seed_list = _checked_seeds(graph, seeds)
    _check_copies(t)
    if not seed_list:
        return SpreadEstimate.of_exact(0.0)
    return _estimate(graph, seed_list, t, cfg, evaluator=evaluator)


def conditional_spread_exact(graph: InfluenceGraph, seeds: Iterable[int], psi: PartialRealization,
                             cfg: Optional[EstimatorConfig] = None,
                             evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """E[f(S, Phi) | Phi ~ psi], exactly: the out-edges of dom(psi) are fixed to the observed states."""
    return conditional_aggregate_spread(graph, seeds, psi, 1, replace(cfg or EstimatorConfig(), mode=EXACT),
                                        evaluator)


def conditional_aggregate_spread(graph: InfluenceGraph, seeds: Iterable[int], psi: PartialRealization, t: int,
                                 cfg: EstimatorConfig,
                                 evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """E[f^t(S, Phi^1..Phi^t) | Phi^1 ~ psi]."""
    seed_list = _checked_seeds(graph, seeds)
    _check_copies(t)
    if not seed_list:
        return SpreadEstimate.of_exact(0.0)
    return _estimate(graph, seed_list, t, cfg, psi=psi, evaluator=evaluator)


def marginal_nonadaptive(graph: InfluenceGraph, node: int, seeds: Iterable[int], t: int, cfg: EstimatorConfig,
                         evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """Delta_{f^t}(u | S) = E[f^t(S + u) - f^t(S)], coupled on the same sampled copies.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * node: int ~ The candidate u, not in S.
    * seeds: Iterable[int] ~ The seed set S.
    * t: int ~ Number of realization copies.
    * cfg: EstimatorConfig ~ Estimation settings; equal stream tags give common random numbers.
    * evaluator: Optional[ExactEvaluator] = None ~ A reusable exact engine for this graph.
    """
    seed_list = _checked_seeds(graph, seeds)
    _check_copies(t)
    _check_candidate(graph, node, seed_list)
    return _estimate(graph, seed_list, t, cfg, extra_node=node, evaluator=evaluator)


def marginal_adaptive(graph: InfluenceGraph, node: int, psi: PartialRealization, t: int, cfg: EstimatorConfig,
                      evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """Delta_{f^t}(u | psi) = E[f^t(dom psi + u) - f^t(dom psi) | Phi^1 ~ psi]."""
    seed_list = sorted(psi.domain)
    _check_copies(t)
    _check_candidate(graph, node, seed_list)
    return _estimate(graph, seed_list, t, cfg, psi=psi, extra_node=node, evaluator=evaluator)


def policy_spread(graph: InfluenceGraph, policy: Policy, t: int, cfg: EstimatorConfig,
                  evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """sigma^t(pi): pi runs against Phi^1 only, then f^t scores its seeds with t copies.

    In exact mode all feedback outcomes of the policy are enumerated; in Monte Carlo
    mode every replicate is an independent run_adaptive() execution, or one row of
    simulate_policy_batch() for a BatchPolicy with t = 1.
    """
    _check_copies(t)
    if cfg.mode in (EXACT, AUTO):
        try:
            return SpreadEstimate.of_exact(exact_policy_value(graph, policy, t, cfg, evaluator))
        except TooLargeForExact:
            if cfg.mode == EXACT:
                raise
    if t == 1 and isinstance(policy, BatchPolicy):
        return simulate_policy_batch(graph, policy, cfg)
    estimate, _ = simulate_policy(graph, policy, t, cfg)
    return estimate


def exact_policy_value(graph: InfluenceGraph, policy: Policy, t: int, cfg: EstimatorConfig,
                       evaluator: Optional[ExactEvaluator] = None) -> float:
    """Sum over all leaves of the policy's decision tree of p_leaf * E[f^t(dom psi) | Phi^1 ~ psi]."""
    evaluator = evaluator or ExactEvaluator(graph, cfg.exact_edge_limit)
    terms: List[float] = []
    stack: List[Tuple[PartialRealization, float]] = [(PartialRealization.empty(), 1.0)]
    visited = 0
    while stack:
        psi, probability = stack.pop()
        visited += 1
        if visited > MAX_POLICY_TREE_NODES:
            raise TooLargeForExact(f"The policy's decision tree has more than {MAX_POLICY_TREE_NODES} nodes")
        node = checked_select(graph, policy, psi)
        if node is None:
            domain = sorted(psi.domain)
            value = evaluator.expected_utility(domain, {seed: t for seed in domain}, psi)
            terms.append(probability * value)
            continue
        for block_live, outcome_probability in feedback_outcomes(graph, node):
            stack.append((psi.extend(graph, node, block_live), probability * outcome_probability))
    return math.fsum(terms)


def simulate_policy(graph: InfluenceGraph, policy: Policy, t: int, cfg: EstimatorConfig,
                    keep_traces: bool = False) -> Tuple[SpreadEstimate, List[Dict[str, Any]]]:
    """Monte Carlo sigma^t(pi) over cfg.replicates hidden realizations, optionally with per-run traces.

    Replicate i uses the hidden realization derive_seed(base_seed, tag + ':hidden', i) and the extra
    copies derive_seed(base_seed, tag + ':copy', i, j).
    """
    if cfg.replicates < 1:
        raise ValueError("Simulating a policy needs at least one replicate")
    batches = chunked(range(cfg.replicates), cfg.chunk_size)
    arguments = [(graph, policy, t, cfg.base_seed, cfg.stream_tag, batch[0], len(batch), keep_traces)
                 for batch in batches]
    results = parallel_map(_simulate_batch, arguments, cfg.workers)
    statistics = ReplicateStatistics(0, 0.0, 0.0)
    traces: List[Dict[str, Any]] = []
    for batch_statistics, batch_traces in results:
        statistics = statistics.merge(batch_statistics)
        traces.extend(batch_traces)
    return SpreadEstimate(statistics.mean, False, statistics.stderr, statistics.count), traces


def simulate_policy_batch(graph: InfluenceGraph, policy: BatchPolicy, cfg: EstimatorConfig) -> SpreadEstimate:
    """Monte Carlo sigma(pi) of a vectorized policy over cfg.replicates hidden realizations.

    Chunk c draws its hidden realizations from derive_seed(base_seed, tag + ':hidden-batch', c).
    """
    if cfg.replicates < 1:
        raise ValueError("Simulating a policy needs at least one replicate")
    arguments = [(graph, policy, cfg.base_seed, cfg.stream_tag, index,
                  min(cfg.chunk_size, cfg.replicates - index * cfg.chunk_size))
                 for index in range(math.ceil(cfg.replicates / cfg.chunk_size))]
    statistics = ReplicateStatistics(0, 0.0, 0.0)
    for chunk_statistics in parallel_map(_simulate_batch_chunk, arguments, cfg.workers):
        statistics = statistics.merge(chunk_statistics)
    return SpreadEstimate(statistics.mean, False, statistics.stderr, statistics.count)


# INTERNAL FUNCTIONS SECTION
def _estimate(graph: InfluenceGraph, seeds: List[int], t: int, cfg: EstimatorConfig,
              psi: Optional[PartialRealization] = None, extra_node: Optional[int] = None,
              evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    if cfg.mode in (EXACT, AUTO):
        engine = evaluator or ExactEvaluator(graph, cfg.exact_edge_limit)
        try:
            if extra_node is None:
                value = engine.expected_utility(seeds, {seed: t for seed in seeds}, psi)
            else:
                # Exact marginals are non-negative; clip rounding noise of the difference
                value = max(0.0, engine.marginal(seeds, extra_node, t, psi))
            return SpreadEstimate.of_exact(value)
        except TooLargeForExact:
            if cfg.mode == EXACT:
                raise

    task = AggregateTask(graph=graph, base_seed=cfg.base_seed, stream_tag=cfg.stream_tag, t=t,
                         seeds=tuple(seeds), extra_node=extra_node, psi=psi)
    statistics = run_aggregate_task(task, cfg.replicates, cfg.chunk_size, cfg.workers)
    return SpreadEstimate(statistics.mean, False, statistics.stderr, statistics.count)


def _simulate_batch(argument: Tuple[InfluenceGraph, Policy, int, int, str, int, int, bool]
                    ) -> Tuple[ReplicateStatistics, List[Dict[str, Any]]]:
    graph, policy, t, base_seed, stream_tag, first, count, keep_traces = argument
    distribution = RealizationDistribution(graph)
    values: List[float] = []
    traces: List[Dict[str, Any]] = []
    for replicate in range(first, first + count):
        hidden = sample_realization(distribution, derive_seed(base_seed, stream_tag + ":hidden", replicate))
        selected, psi = run_adaptive(graph, policy, hidden)
        if t == 1:
            value = reachable_utility(graph, selected, hidden)
        else:
            copies = [hidden] + [sample_realization(distribution, derive_seed(base_seed, stream_tag + ":copy",
                                                                              replicate, copy_index))
                                 for copy_index in range(1, t)]
            value = aggregate_utility(graph, selected, copies)
        values.append(value)
        if keep_traces:
            traces.append({"replicate": replicate, "seeds": selected, "feedback": hex(psi.live), "value": value})
    return ReplicateStatistics.from_values(numpy.array(values, dtype=numpy.float64)), traces


def _checked_seeds(graph: InfluenceGraph, seeds: Iterable[int]) -> List[int]:
    seed_list = sorted(set(seeds))
    for seed in seed_list:
        if not 0 <= seed < graph.n:
            raise InvalidSeedSet(f"Seed {seed} is not a node id in [0, {graph.n})")
    return seed_list


def _check_candidate(graph: InfluenceGraph, node: int, seeds: Sequence[int]) -> None:
    if not 0 <= node < graph.n:
        raise InvalidSeedSet(f"Candidate {node} is not a node id in [0, {graph.n})")
    if node in seeds:
        raise InvalidSeedSet(f"Candidate {node} is already a seed")


def _check_copies(t: int) -> None:
    if t < 1:
        raise ValueError(f"The number of realization copies t must be at least 1, got {t}")


def _simulate_batch_chunk(argument: Tuple[InfluenceGraph, BatchPolicy, int, str, int, int]) -> ReplicateStatistics:
    graph, policy, base_seed, stream_tag, chunk_index, size = argument
    rng = numpy.random.default_rng(derive_seed(base_seed, stream_tag + ":hidden-batch", chunk_index))
    live = sample_live_copies(graph, rng, size, 1)[0]
    reached = propagate(graph, live, policy.select_batch(graph, live))
    return ReplicateStatistics.from_values((reached * graph.weight_array[numpy.newaxis, :]).sum(axis=1))
