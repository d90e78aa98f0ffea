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
"""adaptive_execution.py

This module contains the Policy base class and the execution of a policy
against a hidden realization with myopic feedback: after every selected seed,
only the states of that seed's out-edges are revealed.
"""

# IMPORTS
# External modules
import numpy
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple
# Internal modules
from .errors import InvalidSeedSet, PolicyRepeatsSeed, PolicyViolatesBudget
from .graph_core import Budget, InfluenceGraph
from .realization import PartialRealization, Realization


# CLASSES SECTION
class Policy(ABC):
    """An adaptive seeding policy: maps the feedback psi seen so far to the next seed or None (stop).

    Arguments
    ----------
    * budget: Budget ~ The maximal number of seeds along any execution.
    """
    name = "policy"

    def __init__(self, budget: Budget) -> None:
        self.budget = budget

    @abstractmethod
    def select(self, graph: InfluenceGraph, psi: PartialRealization) -> Optional[int]:
        """Returns the next seed for the feedback psi, or None to stop."""


class BatchPolicy(Policy):
    """A policy whose runs against many hidden realizations can be computed at once."""

    @abstractmethod
    def select_batch(self, graph: InfluenceGraph, live: numpy.ndarray) -> numpy.ndarray:
        """Per row of a boolean (rows x |E|) hidden edge-state matrix, the (rows x n) mask of selected seeds."""


class FixedSetPolicy(Policy):
    """The non-adaptive policy which always selects the given seeds in the given order."""
    name = "fixed-set"

    def __init__(self, seeds: Sequence[int], budget: Optional[Budget] = None) -> None:
        super().__init__(budget if budget is not None else Budget(max(1, len(seeds))))
        self.seeds = tuple(seeds)

    def select(self, graph: InfluenceGraph, psi: PartialRealization) -> Optional[int]:
        for seed in self.seeds:
            if seed not in psi.domain:
                return seed
        return None


# PUBLIC FUNCTIONS SECTION
def checked_select(graph: InfluenceGraph, policy: Policy, psi: PartialRealization) -> Optional[int]:
    """Asks the policy for its next seed and enforces the budget and no-repeat rules.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * policy: Policy ~ The asked policy.
    * psi: PartialRealization ~ The feedback observed so far.
    """
    node = policy.select(graph, psi)
    if node is None:
        return None
    if not 0 <= node < graph.n:
        raise InvalidSeedSet(f"Policy '{policy.name}' selected node {node}, which is not in [0, {graph.n})")
    if node in psi.domain:
        raise PolicyRepeatsSeed(f"Policy '{policy.name}' selected node {node} a second time")
    if psi.depth >= policy.budget.k:
        raise PolicyViolatesBudget(
            f"Policy '{policy.name}' selected a seed beyond its budget of k={policy.budget.k}")
    return node


def run_adaptive(graph: InfluenceGraph, policy: Policy, hidden_phi: Realization) -> Tuple[List[int], PartialRealization]:
    """Executes the policy against the hidden realization.

    Returns the seeds in selection order, V(pi, phi), and the accumulated feedback psi.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * policy: Policy ~ The executed policy.
    * hidden_phi: Realization ~ The realization whose out-edge blocks are revealed seed by seed.
    """
    psi = PartialRealization.empty()
    selected: List[int] = []
    while True:
        node = checked_select(graph, policy, psi)
        if node is None:
            break
        selected.append(node)
        psi = psi.extend(graph, node, hidden_phi.live)
    return selected, psi
