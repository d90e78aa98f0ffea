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
"""decision_tree.py

This module contains the explicit decision tree of an adaptive policy, the
policy which replays such a tree, the random-walk non-adaptive policy W(pi)
derived from a tree, and the marginal-gain sums over the tree's nodes.

A tree node s holds the feedback psi_s under which it is reached, its reaching
probability p_s and the policy's action there; its children are keyed by the
observed out-edge block of that action.
"""

# IMPORTS
# External modules
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Tuple
# Internal modules
from .adaptive_execution import Policy, checked_select
from .errors import TreeTooLarge
from .exact_enumeration import ExactEvaluator
from .graph_core import Budget, InfluenceGraph
from .realization import PartialRealization, feedback_outcomes
from .spread import (EXACT, EstimatorConfig, SpreadEstimate, aggregate_spread_set, marginal_adaptive,
                     marginal_nonadaptive)


# CONSTANT SECTION
# Maximal number of nodes of a materialized decision tree
MAX_TREE_NODES = 2_000_000
# Allowed deviation of a random-walk policy's total probability from 1
PROBABILITY_TOLERANCE = 1e-12


# CLASSES SECTION
@dataclass
class TreeNode:
    """One node of a decision tree (see module docstring)."""
    psi: PartialRealization
    probability: float
    action: Optional[int] = None
    children: Dict[int, "TreeNode"] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.action is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain": sorted(self.psi.domain),
            "feedback": hex(self.psi.live),
            "p": self.probability,
            "action": self.action,
            "children": [self.children[key].to_dict() for key in sorted(self.children)],
        }


@dataclass
class DecisionTree:
    """The decision tree T(pi) of a policy with budget k; the root holds the empty feedback."""
    root: TreeNode
    k: int

    def nodes(self) -> Iterator[TreeNode]:
        """All nodes in depth-first pre-order, children ordered by their feedback bits."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            for key in sorted(node.children, reverse=True):
                stack.append(node.children[key])

    def leaves(self) -> List[TreeNode]:
        return [node for node in self.nodes() if node.is_leaf]

    def internal_nodes(self) -> List[TreeNode]:
        return [node for node in self.nodes() if not node.is_leaf]

    @property
    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "root": self.root.to_dict()}


class TreePolicy(Policy):
    """Replays a fixed action table keyed by canonical partial realizations; stops on unknown feedback."""
    name = "tree"

    def __init__(self, actions: Dict[Tuple[Tuple[int, ...], int], int], budget: Budget) -> None:
        super().__init__(budget)
        self.actions = dict(actions)

    @classmethod
    def from_tree(cls, tree: DecisionTree) -> "TreePolicy":
        actions = {node.psi.canonical_key(): node.action for node in tree.internal_nodes()}
        return cls(actions, Budget(tree.k))

    def select(self, graph: InfluenceGraph, psi: PartialRealization) -> Optional[int]:
        return self.actions.get(psi.canonical_key())


@dataclass(frozen=True)
class RandomSeedSetPolicy:
    """The random non-adaptive policy which commits to seeds with probability p (one entry per set)."""
    entries: Tuple[Tuple[Tuple[int, ...], float], ...]

    def __post_init__(self) -> None:
        total = math.fsum(probability for _, probability in self.entries)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"The probabilities of a random seed-set policy sum to {total}, not 1")

    def to_dict(self) -> Dict[str, Any]:
        return {"entries": [{"seeds": list(seeds), "p": probability} for seeds, probability in self.entries]}


# PUBLIC FUNCTIONS SECTION
def materialize_tree(graph: InfluenceGraph, policy: Policy, k: Optional[int] = None,
                     max_nodes: int = MAX_TREE_NODES) -> DecisionTree:
    """Builds the explicit decision tree of the policy with exact reaching probabilities.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * policy: Policy ~ The policy; its budget and no-repeat rules are enforced.
    * k: Optional[int] = None ~ Depth limit, the policy's budget if not given.
    * max_nodes: int = MAX_TREE_NODES ~ TreeTooLarge is raised beyond this node count.
    """
    depth_limit = policy.budget.k if k is None else min(k, policy.budget.k)
    root = TreeNode(PartialRealization.empty(), 1.0)
    stack = [root]
    size = 1
    while stack:
        node = stack.pop()
        if node.psi.depth >= depth_limit:
            continue
        action = checked_select(graph, policy, node.psi)
        if action is None:
            continue
        node.action = action
        for block_live, outcome_probability in feedback_outcomes(graph, action):
            child = TreeNode(node.psi.extend(graph, action, block_live), node.probability * outcome_probability)
            node.children[child.psi.live & graph.block_masks[action]] = child
            stack.append(child)
            size += 1
            if size > max_nodes:
                raise TreeTooLarge(f"The decision tree of policy '{policy.name}' has more than {max_nodes} nodes")
    return DecisionTree(root, depth_limit)


def random_walk_policy(tree: DecisionTree) -> RandomSeedSetPolicy:
    """W(pi): picks leaf l with probability p_l and seeds dom(psi_l); equal seed sets are merged."""
    merged: Dict[Tuple[int, ...], List[float]] = {}
    for leaf in tree.leaves():
        merged.setdefault(tuple(sorted(leaf.psi.domain)), []).append(leaf.probability)
    return RandomSeedSetPolicy(tuple((seeds, math.fsum(probabilities))
                                     for seeds, probabilities in sorted(merged.items())))


def random_walk_spread(graph: InfluenceGraph, policy: RandomSeedSetPolicy, t: int, cfg: EstimatorConfig,
                       evaluator: Optional[ExactEvaluator] = None) -> SpreadEstimate:
    """sigma^t(W(pi)) = sum over entries of p * sigma^t(seeds)."""
    estimates = [(probability, aggregate_spread_set(graph, seeds, t, cfg, evaluator))
                 for seeds, probability in policy.entries]
    value = math.fsum(probability * estimate.value for probability, estimate in estimates)
    if all(estimate.exact for _, estimate in estimates):
        return SpreadEstimate.of_exact(value)
    stderr = math.sqrt(math.fsum((probability * estimate.stderr) ** 2 for probability, estimate in estimates))
    return SpreadEstimate(value, False, stderr, max(estimate.replicates for _, estimate in estimates))


def tree_marginal_sums(graph: InfluenceGraph, tree: DecisionTree, t: int,
                       cfg: Optional[EstimatorConfig] = None,
                       evaluator: Optional[ExactEvaluator] = None) -> Tuple[float, float]:
    """Exact sums over the internal tree nodes s of p_s * Delta_{f^t}(pi(psi_s) | psi_s) and of
    p_s * Delta_{f^t}(pi(psi_s) | dom psi_s).

    The first sum equals sigma^t(pi), the second sigma^t(W(pi)) (telescoping along every root-leaf path).
    """
    exact_cfg = EstimatorConfig(mode=EXACT, exact_edge_limit=(cfg or EstimatorConfig()).exact_edge_limit)
    evaluator = evaluator or ExactEvaluator(graph, exact_cfg.exact_edge_limit)
    adaptive_terms: List[float] = []
    nonadaptive_terms: List[float] = []
    for node in tree.internal_nodes():
        adaptive = marginal_adaptive(graph, node.action, node.psi, t, exact_cfg, evaluator)
        nonadaptive = marginal_nonadaptive(graph, node.action, sorted(node.psi.domain), t, exact_cfg, evaluator)
        adaptive_terms.append(node.probability * adaptive.value)
        nonadaptive_terms.append(node.probability * nonadaptive.value)
    return math.fsum(adaptive_terms), math.fsum(nonadaptive_terms)
