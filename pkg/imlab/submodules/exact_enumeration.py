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
"""exact_enumeration.py

This module contains the exact expectation engine behind every 'exact' spread
quantity of im-lab.

All compositions of realizations that im-lab evaluates (f, f^t, their versions
conditioned on a partial realization, and the mixed unions of the hybrid
evaluators) are again product distributions over the edges: an out-edge block
formed as the union of c independent copies of an edge with probability p is
live with probability 1-(1-p)^c, and a copy fixed by psi contributes its observed
state. The engine therefore works on one vector of *effective* edge
probabilities.

The expected weighted reach is the sum over target nodes v of w_v * P[v reached].
P[v reached] is obtained by a frontier enumeration restricted to the ancestors of
v which the seeds can reach: reached nodes are processed in id order and only
the still undecided edges towards unreached ancestors of v are branched on, so
every relevant edge is enumerated at most once per branch. The states
(processed nodes, reached nodes) are memoized.

The relevant edges of a query are the undecided out-edges (0 < p < 1) of the
nodes which the seeds reach over positive-probability edges. A query with more
than exact_edge_limit of them raises TooLargeForExact before anything is
enumerated.

MultitreeEvaluator covers graphs with at most one directed path between any
two nodes without enumeration: there the in-neighbors of a node are reached
independently, so reach probabilities follow level by level from a product
formula.
"""

# IMPORTS
# External modules
import math
import numpy
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
# Internal modules
from .errors import TooLargeForExact, WrongConstruction
from .graph_core import InfluenceGraph, mask_nodes, seed_mask
from .realization import PartialRealization


# CONSTANT SECTION
# Maximal number of undecided edges on one enumeration branch (bounds the recursion depth)
MAX_BRANCH_EDGES = 300
# Number of cached per-target reach probabilities (and of distinct probability vectors)
# after which the caches are flushed
MAX_CACHED_PROBABILITIES = 250_000
MAX_CACHED_VECTORS = 10_000
# Seed sets evaluated per vectorized batch of the multitree evaluator
MULTITREE_ROW_BLOCK = 256


# PUBLIC FUNCTIONS SECTION
def effective_probabilities(graph: InfluenceGraph,
                            union_sizes: Optional[Dict[int, int]] = None,
                            psi: Optional[PartialRealization] = None) -> Tuple[float, ...]:
    """Returns the live probability of every edge under the described composition.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * union_sizes: Optional[Dict[int, int]] = None ~ Node v's block is the union of
      union_sizes[v] independent copies (1 if absent); copy 1 is the conditioned one.
    * psi: Optional[PartialRealization] = None ~ Observed states of copy 1 for dom(psi).
    """
    union_sizes = union_sizes or {}
    probabilities = [edge.prob for edge in graph.edges]
    for node, size in union_sizes.items():
        if size == 1:
            continue
        for index in graph.out_adjacency[node]:
            probabilities[index] = 1.0 - (1.0 - graph.edges[index].prob) ** size
    if psi is not None:
        for node in psi.domain:
            free_copies = union_sizes.get(node, 1) - 1
            for index in graph.out_adjacency[node]:
                if (psi.live >> index) & 1:
                    probabilities[index] = 1.0
                else:
                    probabilities[index] = 1.0 - (1.0 - graph.edges[index].prob) ** free_copies
    return tuple(probabilities)


# CLASSES SECTION
class ExactEvaluator:
    """Exact expected weighted reach on one graph, with a cache of per-target reach probabilities.

    One evaluator should be kept for a whole computation (a greedy run, a policy
    evaluation) so that reach probabilities shared between calls are computed once.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The evaluated graph.
    * exact_edge_limit: int = 22 ~ A query whose seeds reach more than exact_edge_limit
      relevant edges (see relevant_edge_count()) raises TooLargeForExact.
    """

    def __init__(self, graph: InfluenceGraph, exact_edge_limit: int = 22) -> None:
        self.graph = graph
        self.exact_edge_limit = exact_edge_limit
        self._probability_ids: Dict[Tuple[float, ...], int] = {}
        self._reach_cache: Dict[Tuple[int, int, int], float] = {}

    def __getstate__(self) -> Dict[str, object]:
        # Caches stay in the process which filled them
        state = dict(self.__dict__)
        state["_probability_ids"] = {}
        state["_reach_cache"] = {}
        return state

    def expected_utility(self,
                         seeds: Iterable[int],
                         union_sizes: Optional[Dict[int, int]] = None,
                         psi: Optional[PartialRealization] = None,
                         targets: Optional[int] = None) -> float:
        """E[f(S, composed realization)], optionally summed over a subset of target nodes.

        Arguments
        ----------
        * seeds: Iterable[int] ~ The seed set S.
        * union_sizes: Optional[Dict[int, int]] = None ~ See effective_probabilities().
        * psi: Optional[PartialRealization] = None ~ Conditioning partial realization.
        * targets: Optional[int] = None ~ Bitmask of the counted nodes (all if None).
        """
        probabilities = effective_probabilities(self.graph, union_sizes, psi)
        return self.expected_utility_for(seed_mask(seeds), probabilities, targets)

    def expected_utility_for(self, seeds: int, probabilities: Tuple[float, ...],
                             targets: Optional[int] = None) -> float:
        """Same as expected_utility() for a seed bitmask and a ready effective probability vector."""
        if len(self._probability_ids) >= MAX_CACHED_VECTORS and probabilities not in self._probability_ids:
            self._probability_ids.clear()
            self._reach_cache.clear()
        probability_id = self._probability_ids.setdefault(probabilities, len(self._probability_ids))
        forward = self._forward_closure(seeds, probabilities)
        self._check_relevant_edges(forward, probabilities)
        counted = forward if targets is None else forward & targets
        terms: List[float] = []
        for target in mask_nodes(counted):
            weight = self.graph.weights[target]
            if weight == 0.0:
                continue
            terms.append(weight * self._cached_reach_probability(target, seeds, forward, probabilities, probability_id))
        return math.fsum(terms)

    def marginal(self, seeds: Iterable[int], node: int, t: int = 1,
                 psi: Optional[PartialRealization] = None) -> float:
        """Delta_{f^t}(node | S) (conditioned on psi if given): coupled difference of expectations.

        Only descendants of node can change their reach probability, so only they are summed.
        """
        seed_list = list(seeds)
        base_sizes = {seed: t for seed in seed_list}
        extended_sizes = dict(base_sizes)
        extended_sizes[node] = t
        targets = self.graph.descendants[node]
        with_node = self.expected_utility(seed_list + [node], extended_sizes, psi, targets)
        without_node = self.expected_utility(seed_list, base_sizes, psi, targets)
        return with_node - without_node

    def reach_probability(self, target: int, seeds: Iterable[int],
                          probabilities: Sequence[float]) -> float:
        """P[target reachable from the seeds] under independent edges with the given probabilities."""
        probability_tuple = tuple(probabilities)
        seeds_bits = seed_mask(seeds)
        forward = self._forward_closure(seeds_bits, probability_tuple)
        self._check_relevant_edges(forward, probability_tuple)
        if not (forward >> target) & 1:
            return 0.0
        return self._reach_probability(target, seeds_bits, forward, probability_tuple)

    def relevant_edge_count(self, seeds: Iterable[int], probabilities: Optional[Sequence[float]] = None) -> int:
        """Number of undecided edges (0 < p < 1) leaving the nodes which the seeds can reach.

        probabilities defaults to the graph's edge probabilities.
        """
        if probabilities is None:
            probabilities = tuple(edge.prob for edge in self.graph.edges)
        return self._relevant_edges(self._forward_closure(seed_mask(seeds), probabilities), probabilities)

    # Internal methods
    def _relevant_edges(self, forward: int, probabilities: Sequence[float]) -> int:
        count = 0
        for node in mask_nodes(forward):
            for index in self.graph.out_adjacency[node]:
                if 0.0 < probabilities[index] < 1.0:
                    count += 1
        return count

    def _check_relevant_edges(self, forward: int, probabilities: Sequence[float]) -> None:
        count = self._relevant_edges(forward, probabilities)
        if count > self.exact_edge_limit:
            raise TooLargeForExact(f"The seeds reach {count} undecided edges, more than the exactness guard "
                                   f"of {self.exact_edge_limit}; use Monte Carlo or raise --exact-edge-limit")

    def _forward_closure(self, seeds: int, probabilities: Sequence[float]) -> int:
        graph = self.graph
        reached = seeds
        stack = mask_nodes(seeds)
        while stack:
            node = stack.pop()
            for index in graph.out_adjacency[node]:
                if probabilities[index] > 0.0:
                    dst = graph.edges[index].dst
                    if not (reached >> dst) & 1:
                        reached |= 1 << dst
                        stack.append(dst)
        return reached

    def _cached_reach_probability(self, target: int, seeds: int, forward: int,
                                  probabilities: Tuple[float, ...], probability_id: int) -> float:
        key = (target, seeds & self.graph.ancestors[target], probability_id)
        cached = self._reach_cache.get(key)
        if cached is not None:
            return cached
        if len(self._reach_cache) >= MAX_CACHED_PROBABILITIES:
            self._reach_cache.clear()
        value = self._reach_probability(target, seeds, forward, probabilities)
        self._reach_cache[key] = value
        return value

    def _reach_probability(self, target: int, seeds: int, forward: int,
                           probabilities: Sequence[float]) -> float:
        graph = self.graph
        target_bit = 1 << target
        if seeds & target_bit:
            return 1.0
        region = graph.ancestors[target] & forward
        start = seeds & region
        if not start:
            return 0.0

        # Out-edges inside the region with positive probability, per node
        adjacency: Dict[int, List[Tuple[int, float]]] = {}
        undecided_edges = 0
        for node in mask_nodes(region):
            local: List[Tuple[int, float]] = []
            for index in graph.out_adjacency[node]:
                dst = graph.edges[index].dst
                probability = probabilities[index]
                if (region >> dst) & 1 and probability > 0.0:
                    local.append((dst, probability))
                    if probability < 1.0:
                        undecided_edges += 1
            adjacency[node] = local
        if undecided_edges > MAX_BRANCH_EDGES:
            raise TooLargeForExact(
                f"Node {target} depends on {undecided_edges} undecided edges (more than {MAX_BRANCH_EDGES})")

        memo: Dict[Tuple[int, int], float] = {}

        def value(processed: int, reached: int) -> float:
            key = (processed, reached)
            known = memo.get(key)
            if known is not None:
                return known
            # Process reached nodes in id order until one has an undecided edge
            while True:
                pending = reached & ~processed
                if not pending:
                    result = 0.0
                    break
                node = (pending & -pending).bit_length() - 1
                processed |= 1 << node
                undecided: List[Tuple[int, float]] = []
                for dst, probability in adjacency[node]:
                    if (reached >> dst) & 1:
                        continue
                    if probability >= 1.0:
                        reached |= 1 << dst
                    else:
                        undecided.append((dst, probability))
                if reached & target_bit:
                    result = 1.0
                    break
                if undecided:
                    result = branch(processed, reached, undecided, 0)
                    break
            memo[key] = result
            return result

        def branch(processed: int, reached: int, undecided: List[Tuple[int, float]], position: int) -> float:
            if position == len(undecided):
                return value(processed, reached)
            dst, probability = undecided[position]
            if dst == target:
                live_value = 1.0
            else:
                live_value = branch(processed, reached | (1 << dst), undecided, position + 1)
            blocked_value = branch(processed, reached, undecided, position + 1)
            return probability * live_value + (1.0 - probability) * blocked_value

        return value(0, start)


class MultitreeEvaluator:
    """Exact expected weighted reach on a multitree, vectorized over many seed sets.

    For an unseeded node v, P[v reached] = 1 - prod_{(u, v)} (1 - P[u reached] * p_uv),
    which is exact because the ancestor sets of v's in-neighbors are disjoint. The
    probabilities are computed level by level along InfluenceGraph.topological_levels,
    so the cost per seed set is linear in the number of edges and no guard applies.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The evaluated graph; WrongConstruction if it is no multitree.
    """

    def __init__(self, graph: InfluenceGraph) -> None:
        if not graph.is_multitree:
            raise WrongConstruction("The multitree evaluator needs a graph with at most one directed path "
                                    "between any two nodes")
        self.graph = graph
        levels = numpy.array(graph.topological_levels, dtype=numpy.int64)
        self._levels: List[Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray, numpy.ndarray]] = []
        if graph.num_edges == 0:
            return
        edge_levels = levels[graph.destinations]
        for level in range(1, int(levels.max()) + 1):
            indices = numpy.flatnonzero(edge_levels == level)
            indices = indices[numpy.argsort(graph.destinations[indices], kind="stable")]
            targets, starts = numpy.unique(graph.destinations[indices], return_index=True)
            self._levels.append((graph.sources[indices], graph.probabilities[indices], starts, targets))

    def values(self, seed_rows: numpy.ndarray) -> numpy.ndarray:
        """sigma(S) for every row S of a boolean (rows x n) seed matrix."""
        reached = seed_rows.astype(numpy.float64)
        for sources, probabilities, starts, targets in self._levels:
            blocked = 1.0 - reached[:, sources] * probabilities[numpy.newaxis, :]
            unreached = numpy.multiply.reduceat(blocked, starts, axis=1)
            reached[:, targets] = numpy.where(seed_rows[:, targets], 1.0, 1.0 - unreached)
        return reached @ self.graph.weight_array

    def expected_utility(self, seeds: Iterable[int]) -> float:
        rows = numpy.zeros((1, self.graph.n), dtype=numpy.bool_)
        rows[0, list(seeds)] = True
        return float(self.values(rows)[0])

    def marginals(self, seeds: Sequence[int], candidates: Sequence[int]) -> Dict[int, float]:
        """Delta_f(u | S) of every candidate u, clipped at 0, from one batch of seed sets."""
        rows = numpy.zeros((len(candidates) + 1, self.graph.n), dtype=numpy.bool_)
        rows[:, list(seeds)] = True
        rows[numpy.arange(1, len(candidates) + 1), list(candidates)] = True
        values = numpy.concatenate([self.values(rows[start:start + MULTITREE_ROW_BLOCK])
                                    for start in range(0, rows.shape[0], MULTITREE_ROW_BLOCK)])
        return {node: max(0.0, float(values[row + 1] - values[0])) for row, node in enumerate(candidates)}
