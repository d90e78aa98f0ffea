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
"""policies.py

This module contains the seeding policies of im-lab: the non-adaptive and the
adaptive greedy algorithm, the construction-specific policies of the
bipartite-gap and bad-example graphs, and a registry which builds a policy from
its command-line name.

All argmax decisions treat values within a relative TIE_TOLERANCE of the maximum
as ties and pick the lowest node id among them.
"""

# IMPORTS
# External modules
import itertools
import numpy
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple
# Internal modules
from .adaptive_execution import BatchPolicy, FixedSetPolicy, Policy
from .constructions import BAD_EXAMPLE, BIPARTITE_GAP, ConstructionMetadata
from .errors import TooLargeForExact, WrongConstruction
from .exact_enumeration import ExactEvaluator, MultitreeEvaluator
from .graph_core import Budget, InfluenceGraph
from .helper_general import print_status
from .realization import PartialRealization
from .spread import AUTO, EXACT, MONTE_CARLO, EstimatorConfig, SpreadEstimate, marginal_adaptive, marginal_nonadaptive


# CONSTANT SECTION
# Relative tolerance under which two marginal gains count as tied
TIE_TOLERANCE = 1e-9
GREEDY_NONADAPTIVE = "greedy-nonadaptive"
GREEDY_ADAPTIVE = "greedy-adaptive"
BIPARTITE = "bipartite"
BAD_EXAMPLE_REFERENCE = "bad-example-reference"
POLICY_NAMES = (GREEDY_NONADAPTIVE, GREEDY_ADAPTIVE, BIPARTITE, BAD_EXAMPLE_REFERENCE)


# CLASSES SECTION
@dataclass(frozen=True)
class GreedyStep:
    node: int
    marginal: SpreadEstimate

    def to_dict(self) -> Dict[str, Any]:
        return {"node": self.node, "marginal": self.marginal.to_dict()}


@dataclass(frozen=True)
class GreedyResult:
    """The seeds of a non-adaptive greedy run in selection order, with the winning marginal of every step."""
    steps: Tuple[GreedyStep, ...]

    @property
    def seeds(self) -> List[int]:
        return [step.node for step in self.steps]

    @property
    def exact(self) -> bool:
        return all(step.marginal.exact for step in self.steps)

    def to_dict(self) -> Dict[str, Any]:
        return {"seeds": self.seeds, "exact": self.exact, "steps": [step.to_dict() for step in self.steps]}


class AdaptiveGreedyPolicy(Policy):
    """The adaptive greedy algorithm: seeds the argmax of the adaptive marginal gain given psi.

    Decisions are cached per canonical psi, so materializing the tree and evaluating
    the policy share their marginal computations.
    """
    name = GREEDY_ADAPTIVE

    def __init__(self, budget: Budget, cfg: EstimatorConfig, evaluator: Optional[ExactEvaluator] = None) -> None:
        super().__init__(budget)
        self.cfg = cfg
        self._evaluator = evaluator
        self._decisions: Dict[Tuple[Tuple[int, ...], int], Optional[int]] = {}

    def __getstate__(self) -> Dict[str, Any]:
        state = dict(self.__dict__)
        state["_evaluator"] = None
        state["_decisions"] = {}
        return state

    def select(self, graph: InfluenceGraph, psi: PartialRealization) -> Optional[int]:
        if psi.depth >= self.budget.k or psi.depth >= graph.n:
            return None
        key = psi.canonical_key()
        if key not in self._decisions:
            if self._evaluator is None or self._evaluator.graph is not graph:
                self._evaluator = ExactEvaluator(graph, self.cfg.exact_edge_limit)
            self._decisions[key] = greedy_adaptive_step(graph, psi, self.cfg, self._evaluator)
        return self._decisions[key]


class BipartiteGapPolicy(Policy):
    """Seeds the lowest left node whose whole right-neighborhood is still unreached; stops when none is left."""
    name = BIPARTITE

    def __init__(self, metadata: ConstructionMetadata) -> None:
        super().__init__(Budget(int(metadata.budget)))
        self.left = metadata.node_range("left")
        self.right = metadata.node_range("right")
        self.subset_size = int(metadata.params["m"]) ** 2
        self.left_of_subset = {tuple(subset): left for left, subset in enumerate(metadata.layout["subsets"])}

    def select(self, graph: InfluenceGraph, psi: PartialRealization) -> Optional[int]:
        if psi.depth >= self.budget.k:
            return None
        activated = psi.activated(graph)
        free = [node for node in self.right if node not in activated]
        # Left ids follow the lexicographic subset order, so the first free subset is the lowest id
        for subset in itertools.combinations(free, self.subset_size):
            left = self.left_of_subset[subset]
            if left not in psi.domain:
                return left
        return None


class BadExampleReferencePolicy(BatchPolicy):
    """Seeds all of V2 in id order, then the lowest V3 nodes which are neither seeded nor reached."""
    name = BAD_EXAMPLE_REFERENCE

    def __init__(self, metadata: ConstructionMetadata) -> None:
        super().__init__(Budget(int(metadata.budget)))
        self.v2 = metadata.node_range("v2")
        self.v3 = metadata.node_range("v3")

    def select(self, graph: InfluenceGraph, psi: PartialRealization) -> Optional[int]:
        if psi.depth >= self.budget.k:
            return None
        for node in self.v2:
            if node not in psi.domain:
                return node
        activated = psi.activated(graph)
        for node in self.v3:
            if node not in activated and node not in psi.domain:
                return node
        return None

    def select_batch(self, graph: InfluenceGraph, live: numpy.ndarray) -> numpy.ndarray:
        """The seeds of every row of a boolean (rows x |E|) matrix of hidden edge states, as a (rows x n) mask.

        The same choices as select(): all of V2, then the lowest V3 nodes left unreached by the V2 out-edges.
        """
        rows = live.shape[0]
        seeds = numpy.zeros((rows, graph.n), dtype=numpy.bool_)
        v2 = numpy.arange(self.v2.start, self.v2.stop)
        v3 = numpy.arange(self.v3.start, self.v3.stop)
        seeds[:, v2[:self.budget.k]] = True
        remaining = self.budget.k - len(v2)
        if remaining <= 0:
            return seeds
        reached = numpy.zeros((rows, graph.n), dtype=numpy.bool_)
        for node in v2:
            for index in graph.out_adjacency[node]:
                reached[:, graph.edges[index].dst] |= live[:, index]
        unreached = ~reached[:, v3]
        seeds[:, v3] = unreached & (numpy.cumsum(unreached, axis=1) <= remaining)
        return seeds


# PUBLIC FUNCTIONS SECTION
def argmax_lowest_id(values: Dict[int, float]) -> int:
    """The lowest node id whose value lies within the relative tie tolerance of the maximum."""
    best = max(values.values())
    threshold = best - TIE_TOLERANCE * max(1.0, abs(best))
    return min(node for node, value in values.items() if value >= threshold)


def greedy_nonadaptive(graph: InfluenceGraph, k: int, cfg: EstimatorConfig,
                       evaluator: Optional[ExactEvaluator] = None) -> GreedyResult:
    """The non-adaptive greedy algorithm: k times, seed the argmax of Delta_f(u | S).

    Under Monte Carlo estimation all candidates of step i share the stream tag
    '<tag>:greedy:<i>' (common random numbers). In auto mode a step that exceeds the
    exactness guard switches this and all later steps to Monte Carlo.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * k: int ~ The budget, 1 <= k <= n.
    * cfg: EstimatorConfig ~ Estimation settings.
    * evaluator: Optional[ExactEvaluator] = None ~ A reusable exact engine for this graph.
    """
    budget = Budget.for_graph(k, graph)
    evaluator = evaluator or ExactEvaluator(graph, cfg.exact_edge_limit)
    seeds: List[int] = []
    steps: List[GreedyStep] = []
    for step in range(budget.k):
        step_cfg = cfg.with_stream(f"{cfg.stream_tag}:greedy:{step}")
        candidates = [node for node in range(graph.n) if node not in seeds]
        estimates, cfg = _step_estimates(
            candidates, lambda node, c: marginal_nonadaptive(graph, node, seeds, 1, c, evaluator), step_cfg, cfg)
        chosen = argmax_lowest_id({node: estimate.value for node, estimate in estimates.items()})
        seeds.append(chosen)
        steps.append(GreedyStep(chosen, estimates[chosen]))
        print_status("INFO", f"Greedy step {step + 1}/{budget.k}: node {chosen} "
                             f"(marginal gain {estimates[chosen].value:.6g})")
    return GreedyResult(tuple(steps))


def greedy_nonadaptive_multitree(graph: InfluenceGraph, k: int,
                                 evaluator: Optional[MultitreeEvaluator] = None) -> GreedyResult:
    """Non-adaptive greedy with exact marginal gains on a multitree.

    All candidates of a step are evaluated in one vectorized batch by MultitreeEvaluator;
    the argmax and its ties follow greedy_nonadaptive(). Raises WrongConstruction if the
    graph has two distinct directed paths between some pair of nodes.
    """
    budget = Budget.for_graph(k, graph)
    evaluator = evaluator or MultitreeEvaluator(graph)
    seeds: List[int] = []
    steps: List[GreedyStep] = []
    for step in range(budget.k):
        chosen_set = set(seeds)
        candidates = [node for node in range(graph.n) if node not in chosen_set]
        gains = evaluator.marginals(seeds, candidates)
        chosen = argmax_lowest_id(gains)
        seeds.append(chosen)
        steps.append(GreedyStep(chosen, SpreadEstimate.of_exact(gains[chosen])))
        print_status("INFO", f"Greedy step {step + 1}/{budget.k}: node {chosen} "
                             f"(marginal gain {gains[chosen]:.6g})")
    return GreedyResult(tuple(steps))


def greedy_adaptive_step(graph: InfluenceGraph, psi: PartialRealization, cfg: EstimatorConfig,
                         evaluator: Optional[ExactEvaluator] = None) -> int:
    """The adaptive greedy choice: argmax over u not in dom(psi) of Delta_f(u | psi).

    Under Monte Carlo estimation the candidates share a stream tag derived from psi.
    """
    candidates = [node for node in range(graph.n) if node not in psi.domain]
    if not candidates:
        raise ValueError("Every node is already a seed")
    evaluator = evaluator or ExactEvaluator(graph, cfg.exact_edge_limit)
    domain, live = psi.canonical_key()
    step_cfg = cfg.with_stream(f"{cfg.stream_tag}:adaptive:{','.join(map(str, domain))}:{live:x}")
    estimates, _ = _step_estimates(
        candidates, lambda node, c: marginal_adaptive(graph, node, psi, 1, c, evaluator), step_cfg, cfg)
    return argmax_lowest_id({node: estimate.value for node, estimate in estimates.items()})


def bipartite_gap_policy(graph: InfluenceGraph, metadata: ConstructionMetadata) -> BipartiteGapPolicy:
    """The adaptive policy of the bipartite-gap construction; raises WrongConstruction on other graphs."""
    _check_construction(graph, metadata, BIPARTITE_GAP)
    return BipartiteGapPolicy(metadata)


def bad_example_reference_policy(graph: InfluenceGraph, metadata: ConstructionMetadata) -> BadExampleReferencePolicy:
    """The adaptive reference policy of the bad-example construction; raises WrongConstruction on other graphs."""
    _check_construction(graph, metadata, BAD_EXAMPLE)
    return BadExampleReferencePolicy(metadata)


def build_policy(name: str, graph: InfluenceGraph, k: int, cfg: EstimatorConfig,
                 metadata: Optional[ConstructionMetadata] = None) -> Policy:
    """Builds a policy by its command-line name.

    Arguments
    ----------
    * name: str ~ One of POLICY_NAMES.
    * graph: InfluenceGraph ~ The graph the policy will run on.
    * k: int ~ The budget (ignored by the construction policies, which carry their own).
    * cfg: EstimatorConfig ~ Estimation settings of the greedy policies.
    * metadata: Optional[ConstructionMetadata] = None ~ Needed by the construction policies.
    """
    if name == GREEDY_NONADAPTIVE:
        budget = Budget.for_graph(k, graph)
        return FixedSetPolicy(greedy_nonadaptive(graph, k, cfg).seeds, budget)
    if name == GREEDY_ADAPTIVE:
        return AdaptiveGreedyPolicy(Budget.for_graph(k, graph), cfg)
    if name in (BIPARTITE, BAD_EXAMPLE_REFERENCE):
        if metadata is None:
            raise WrongConstruction(f"Policy '{name}' needs the construction metadata of the graph")
        if name == BIPARTITE:
            return bipartite_gap_policy(graph, metadata)
        return bad_example_reference_policy(graph, metadata)
    raise WrongConstruction(f"Unknown policy '{name}', use one of {', '.join(POLICY_NAMES)}")


# INTERNAL FUNCTIONS SECTION
def _step_estimates(candidates: Iterable[int], estimate: Callable[[int, EstimatorConfig], SpreadEstimate],
                    step_cfg: EstimatorConfig, cfg: EstimatorConfig
                    ) -> Tuple[Dict[int, SpreadEstimate], EstimatorConfig]:
    """Estimates all candidates with one estimator; returns the estimates and the config for later steps."""
    candidates = list(candidates)
    if step_cfg.mode == AUTO:
        try:
            return {node: estimate(node, replace(step_cfg, mode=EXACT)) for node in candidates}, cfg
        except TooLargeForExact:
            print_status("WARNING", "Exact marginal gains exceed the exactness guard, switching to Monte Carlo")
            step_cfg = replace(step_cfg, mode=MONTE_CARLO)
            cfg = replace(cfg, mode=MONTE_CARLO)
    return {node: estimate(node, step_cfg) for node in candidates}, cfg


def _check_construction(graph: InfluenceGraph, metadata: ConstructionMetadata, construction: str) -> None:
    if metadata.construction != construction:
        raise WrongConstruction(f"This policy needs a {construction} graph, got '{metadata.construction}'")
    try:
        last_node = max(stop for stop in (group[1] for group in metadata.layout.values()
                                          if isinstance(group, list) and len(group) == 2
                                          and all(isinstance(x, int) for x in group)))
    except ValueError as error:
        raise WrongConstruction("The construction metadata has no node layout") from error
    if last_node != graph.n or metadata.budget is None:
        raise WrongConstruction(f"The {construction} metadata does not match the graph with {graph.n} nodes")
