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
"""optimal.py

Exact optima of small instances: OPT_N by exhaustive search over seed sets and
OPT_A by a dynamic program over the reachable partial realizations.
"""

# IMPORTS
# External modules
import itertools
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple
# Internal modules
from .decision_tree import DecisionTree, TreePolicy, materialize_tree
from .errors import TooLargeForExact
from .exact_enumeration import ExactEvaluator
from .graph_core import Budget, InfluenceGraph
from .helper_general import print_status
from .policies import argmax_lowest_id
from .realization import PartialRealization, feedback_outcomes
from .spread import EstimatorConfig


# CONSTANT SECTION
# Maximal number of memoized partial realizations of the adaptive dynamic program
MAX_OPT_STATES = 2_000_000
# Maximal number of candidate seed sets of the exhaustive non-adaptive search
MAX_SUBSETS = 2_000_000


# CLASSES SECTION
@dataclass(frozen=True)
class OptResult:
    """An exact optimum with its witness: a seed set (non-adaptive) or a decision tree (adaptive)."""
    value: float
    exact: bool
    witness_set: Optional[Tuple[int, ...]] = None
    witness_tree: Optional[DecisionTree] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"value": self.value, "exact": self.exact}
        if self.witness_set is not None:
            result["witness"] = list(self.witness_set)
        if self.witness_tree is not None:
            result["witness_tree"] = self.witness_tree.to_dict()
        return result


# PUBLIC FUNCTIONS SECTION
def opt_nonadaptive(graph: InfluenceGraph, k: int, cfg: Optional[EstimatorConfig] = None,
                    evaluator: Optional[ExactEvaluator] = None) -> OptResult:
    """OPT_N(G, k): the maximal exact spread over all seed sets of size k.

    Spread is monotone, so sets of size k attain the maximum over sizes <= k. The witness
    is the lexicographically first set within the tie tolerance of the maximum.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * k: int ~ The budget, 1 <= k <= n.
    * cfg: Optional[EstimatorConfig] = None ~ Only its exact_edge_limit is used.
    * evaluator: Optional[ExactEvaluator] = None ~ A reusable exact engine for this graph.
    """
    budget = Budget.for_graph(k, graph)
    subset_count = math.comb(graph.n, budget.k)
    if subset_count > MAX_SUBSETS:
        raise TooLargeForExact(f"OPT_N needs {subset_count} seed sets, more than the limit of {MAX_SUBSETS}")
    evaluator = evaluator or ExactEvaluator(graph, (cfg or EstimatorConfig()).exact_edge_limit)
    subsets = list(itertools.combinations(range(graph.n), budget.k))
    values = {index: evaluator.expected_utility(subset) for index, subset in enumerate(subsets)}
    best = argmax_lowest_id(values)
    return OptResult(values[best], True, witness_set=subsets[best])


def opt_adaptive(graph: InfluenceGraph, k: int, cfg: Optional[EstimatorConfig] = None,
                 evaluator: Optional[ExactEvaluator] = None, with_tree: bool = True) -> OptResult:
    """OPT_A(G, k) by the dynamic program V(psi, r) = max_u E[V(psi + (u, feedback), r - 1)],
    V(psi, 0) = E[f(dom psi) | Phi ~ psi].

    States are memoized on the canonical partial realization; the witness is the decision
    tree of the optimal actions (ties by lowest node id).

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * k: int ~ The budget, 1 <= k <= n.
    * cfg: Optional[EstimatorConfig] = None ~ Only its exact_edge_limit is used.
    * evaluator: Optional[ExactEvaluator] = None ~ A reusable exact engine for this graph.
    * with_tree: bool = True ~ If False, no witness tree is materialized.
    """
    budget = Budget.for_graph(k, graph)
    evaluator = evaluator or ExactEvaluator(graph, (cfg or EstimatorConfig()).exact_edge_limit)
    outcomes = [feedback_outcomes(graph, node) for node in range(graph.n)]
    memo: Dict[Tuple[Tuple[int, ...], int], Tuple[float, Optional[int]]] = {}

    def solve(psi: PartialRealization) -> float:
        key = psi.canonical_key()
        if key in memo:
            return memo[key][0]
        if psi.depth >= budget.k:
            value, action = evaluator.expected_utility(key[0], None, psi), None
        else:
            action_values: Dict[int, float] = {}
            for node in range(graph.n):
                if node in psi.domain:
                    continue
                action_values[node] = math.fsum(probability * solve(psi.extend(graph, node, block_live))
                                                for block_live, probability in outcomes[node])
            action = argmax_lowest_id(action_values)
            value = action_values[action]
        memo[key] = (value, action)
        if len(memo) > MAX_OPT_STATES:
            raise TooLargeForExact(f"OPT_A needs more than {MAX_OPT_STATES} partial realization states")
        return value

    value = solve(PartialRealization.empty())
    print_status("INFO", f"OPT_A dynamic program finished with {len(memo)} states")
    tree = None
    if with_tree:
        actions = {key: action for key, (_, action) in memo.items() if action is not None}
        tree = materialize_tree(graph, TreePolicy(actions, budget), budget.k)
    return OptResult(value, True, witness_tree=tree)


def top_weight_sum(graph: InfluenceGraph, k: int) -> float:
    """Sum of the k largest weights, the optimum of an edgeless graph."""
    return math.fsum(sorted(graph.weights, reverse=True)[:k])


def opt_pair(graph: InfluenceGraph, k: int, cfg: Optional[EstimatorConfig] = None) -> Tuple[OptResult, OptResult]:
    """OPT_N and OPT_A sharing one exact engine."""
    evaluator = ExactEvaluator(graph, (cfg or EstimatorConfig()).exact_edge_limit)
    return opt_nonadaptive(graph, k, cfg, evaluator), opt_adaptive(graph, k, cfg, evaluator)
