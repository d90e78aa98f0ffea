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
"""realization.py

This module contains live-edge realizations, partial realizations (the myopic
feedback of the selected seeds), their sampling and composition, and the
reachability utility f together with its aggregate variant f^t.

Realizations are Python integers used as bitmasks over the canonical edge order
of the owning graph (bit i set = edge i live).
"""

# IMPORTS
# External modules
import hashlib
import itertools
import math
import numpy
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union
# Internal modules
from .errors import SelectorArityMismatch
from .graph_core import InfluenceGraph, mask_nodes


# TYPES SECTION
SeedLike = Union[int, numpy.random.SeedSequence]


# CLASSES SECTION
@dataclass(frozen=True)
class Realization:
    """A full live-edge realization phi of a graph with num_edges edges."""
    live: int
    num_edges: int

    def is_live(self, edge_index: int) -> bool:
        return bool((self.live >> edge_index) & 1)


@dataclass(frozen=True)
class PartialRealization:
    """The feedback psi of the seeds in domain; bits outside their out-edge blocks are zero."""
    domain: FrozenSet[int]
    live: int

    @classmethod
    def empty(cls) -> "PartialRealization":
        return cls(frozenset(), 0)

    @property
    def depth(self) -> int:
        return len(self.domain)

    def extend(self, graph: InfluenceGraph, node: int, block_live: int) -> "PartialRealization":
        """Returns psi extended by the observed out-edge states of node."""
        return PartialRealization(self.domain | {node}, self.live | (block_live & graph.block_masks[node]))

    def canonical_key(self) -> Tuple[Tuple[int, ...], int]:
        return tuple(sorted(self.domain)), self.live

    def activated(self, graph: InfluenceGraph) -> FrozenSet[int]:
        """The out-neighbors of the domain reached through live observed edges."""
        return frozenset(graph.edges[index].dst for index in mask_nodes(self.live))

    def to_dict(self) -> Dict[str, object]:
        return {"domain": sorted(self.domain), "feedback": hex(self.live)}


@dataclass(frozen=True)
class RealizationDistribution:
    """The product distribution in which every edge is live independently with its probability."""
    graph: InfluenceGraph

    def sample(self, rng_seed: SeedLike) -> Realization:
        return sample_realization(self, rng_seed)


@dataclass(frozen=True)
class ComposedRealization:
    """Per node, the set of realization copies (0-based) whose union supplies its out-edge block.

    Arguments
    ----------
    * selectors: Tuple[FrozenSet[int], ...] ~ One non-empty copy-index set per node.
    * t: int ~ The number of realizations the composition expects.
    """
    selectors: Tuple[FrozenSet[int], ...]
    t: int

    @classmethod
    def aggregate(cls, graph: InfluenceGraph, seeds: Iterable[int], t: int) -> "ComposedRealization":
        """Seeds take the union of all t copies, every other node copy 0 (f^t)."""
        return cls.from_union_sizes(graph, {node: t for node in seeds}, t)

    @classmethod
    def from_union_sizes(cls, graph: InfluenceGraph, union_sizes: Dict[int, int], t: int) -> "ComposedRealization":
        """Node v takes the union of copies 0..union_sizes[v]-1 (copy 0 alone if absent)."""
        selectors = tuple(frozenset(range(union_sizes.get(node, 1))) for node in range(graph.n))
        return cls(selectors, t)

    def union_sizes(self) -> Tuple[int, ...]:
        return tuple(len(selector) for selector in self.selectors)


# PUBLIC FUNCTIONS SECTION
def derive_seed(base_seed: int, stream_tag: str, *indices: int) -> numpy.random.SeedSequence:
    """Returns the seed sequence of sample `indices` in stream `stream_tag` of base_seed.

    The derivation only depends on its arguments, so the samples of a batch are
    identical no matter how they are distributed over workers.
    """
    tag_digest = hashlib.sha256(stream_tag.encode("utf-8")).digest()
    tag_word = int.from_bytes(tag_digest[:8], "little")
    return numpy.random.SeedSequence([base_seed & 0xFFFFFFFFFFFFFFFF, tag_word] + [int(i) for i in indices])


def bits_to_int(live: numpy.ndarray) -> int:
    """Packs a boolean vector (entry i = edge i) into an integer bitmask."""
    if live.size == 0:
        return 0
    packed = numpy.packbits(live.astype(numpy.bool_), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def sample_realization(dist: RealizationDistribution, rng_seed: SeedLike) -> Realization:
    """Samples every edge independently with its probability; deterministic in (graph, rng_seed)."""
    graph = dist.graph
    rng = numpy.random.default_rng(rng_seed)
    live = rng.random(graph.num_edges) < graph.probabilities
    return Realization(bits_to_int(live), graph.num_edges)


def restrict(graph: InfluenceGraph, phi: Realization, nodes: Iterable[int]) -> PartialRealization:
    """Returns phi's feedback for the given nodes (phi_S)."""
    domain = frozenset(nodes)
    return PartialRealization(domain, phi.live & domain_mask(graph, domain))


def consistent(graph: InfluenceGraph, phi: Realization, psi: PartialRealization) -> bool:
    """True iff phi agrees with psi on every out-edge of dom(psi)."""
    return (phi.live & domain_mask(graph, psi.domain)) == psi.live


def domain_mask(graph: InfluenceGraph, nodes: Iterable[int]) -> int:
    """Bitmask of all out-edges of the given nodes."""
    mask = 0
    for node in nodes:
        mask |= graph.block_masks[node]
    return mask


def compose(graph: InfluenceGraph, selectors: ComposedRealization, phis: Sequence[Realization]) -> Realization:
    """Builds the realization whose block at node v is the union of the selected copies' blocks.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The owning graph.
    * selectors: ComposedRealization ~ One copy-index set per node.
    * phis: Sequence[Realization] ~ Exactly selectors.t realizations.
    """
    if len(phis) != selectors.t or len(selectors.selectors) != graph.n:
        raise SelectorArityMismatch(
            f"Composition expects t={selectors.t} realizations over {len(selectors.selectors)} nodes, "
            f"got {len(phis)} realizations for a graph with {graph.n} nodes")
    # Group the nodes by selector so that every distinct union is formed once
    group_masks: Dict[FrozenSet[int], int] = {}
    for node, selector in enumerate(selectors.selectors):
        if not selector or min(selector) < 0 or max(selector) >= selectors.t:
            raise SelectorArityMismatch(f"Node {node} has selector {sorted(selector)} outside [0, {selectors.t})")
        group_masks[selector] = group_masks.get(selector, 0) | graph.block_masks[node]

    live = 0
    for selector, block_mask in group_masks.items():
        union = 0
        for copy_index in selector:
            union |= phis[copy_index].live
        live |= union & block_mask
    return Realization(live, graph.num_edges)


def reachable_set(graph: InfluenceGraph, seeds: Iterable[int], live: int) -> int:
    """Returns the bitmask of all nodes reachable from the seeds over live edges (seeds included)."""
    reached = 0
    frontier: List[int] = []
    for seed in seeds:
        if not (reached >> seed) & 1:
            reached |= 1 << seed
            frontier.append(seed)
    edges = graph.edges
    out_adjacency = graph.out_adjacency
    while frontier:
        next_frontier: List[int] = []
        for node in frontier:
            for index in out_adjacency[node]:
                if (live >> index) & 1:
                    dst = edges[index].dst
                    if not (reached >> dst) & 1:
                        reached |= 1 << dst
                        next_frontier.append(dst)
        frontier = next_frontier
    return reached


def weighted_mass(graph: InfluenceGraph, node_mask: int) -> float:
    """Sum of the weights of the nodes in the mask."""
    return math.fsum(graph.weights[node] for node in mask_nodes(node_mask))


def reachable_utility(graph: InfluenceGraph, seeds: Iterable[int], phi: Realization) -> float:
    """f(S, phi): weighted mass of all nodes reachable from S in phi's live-edge graph."""
    return weighted_mass(graph, reachable_set(graph, seeds, phi.live))


def aggregate_utility(graph: InfluenceGraph, seeds: Iterable[int], phis: Sequence[Realization]) -> float:
    """f^t(S, phi^1..phi^t): seeds use the union of all t blocks, other nodes phi^1."""
    seed_list = list(seeds)
    composed = compose(graph, ComposedRealization.aggregate(graph, seed_list, len(phis)), phis)
    return reachable_utility(graph, seed_list, composed)


def feedback_outcomes(graph: InfluenceGraph, node: int) -> List[Tuple[int, float]]:
    """All possible observations of node's out-edge block with positive probability.

    Returns (block bitmask, probability) pairs; edges with p = 1 are always live and
    edges with p = 0 always blocked, so they do not multiply the outcome count.
    """
    certain = 0
    uncertain: List[Tuple[int, float]] = []
    for index in graph.out_adjacency[node]:
        prob = graph.edges[index].prob
        if prob >= 1.0:
            certain |= 1 << index
        elif prob > 0.0:
            uncertain.append((index, prob))

    outcomes: List[Tuple[int, float]] = []
    for states in itertools.product((False, True), repeat=len(uncertain)):
        bits = certain
        probability = 1.0
        for (index, prob), is_live in zip(uncertain, states):
            if is_live:
                bits |= 1 << index
                probability *= prob
            else:
                probability *= 1.0 - prob
        outcomes.append((bits, probability))
    return outcomes
