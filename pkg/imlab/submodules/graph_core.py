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
"""graph_core.py

This module contains the immutable influence graph data model of im-lab,
its validation, the chain expansion of integer node weights and the
canonical JSON serialization of graphs.

An influence graph has n nodes with ids 0..n-1, a non-negative weight per node
and directed edges with an activation probability each. The edges are kept
sorted by (src, dst) so that edge index i is the same on every platform; the
realization bitmasks of realization.py are indexed by it.
"""

# IMPORTS
# External modules
import hashlib
import json
import math
import numpy
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
# Internal modules
from .errors import GraphValidationError, GraphViolation, InvalidBudget, NonIntegerWeight, ParseError


# CLASSES SECTION
@dataclass(frozen=True)
class Edge:
    """A directed edge src -> dst which transmits activation with probability prob."""
    src: int
    dst: int
    prob: float


@dataclass(frozen=True)
class InfluenceGraph:
    """Directed node-weighted graph with per-edge activation probabilities.

    Instances are immutable; all derived index structures are computed lazily once
    and cached on the instance, so a graph can be shared freely between workers.
    Use make_graph() or load_graph() to obtain a validated graph.

    Arguments
    ----------
    * n: int ~ The number of nodes.
    * weights: Tuple[float, ...] ~ One non-negative weight per node.
    * edges: Tuple[Edge, ...] ~ The edges, sorted by (src, dst).
    """
    n: int
    weights: Tuple[float, ...]
    edges: Tuple[Edge, ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def out_adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Per node, the indices of its out-edges (contiguous for sorted edges)."""
        adjacency: List[List[int]] = [[] for _ in range(self.n)]
        for index, edge in enumerate(self.edges):
            adjacency[edge.src].append(index)
        return tuple(tuple(indices) for indices in adjacency)

    @cached_property
    def in_adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        adjacency: List[List[int]] = [[] for _ in range(self.n)]
        for index, edge in enumerate(self.edges):
            adjacency[edge.dst].append(index)
        return tuple(tuple(indices) for indices in adjacency)

    @cached_property
    def block_masks(self) -> Tuple[int, ...]:
        """Per node, the bitmask of its out-edge block."""
        masks: List[int] = []
        for indices in self.out_adjacency:
            mask = 0
            for index in indices:
                mask |= 1 << index
            masks.append(mask)
        return tuple(masks)

    @cached_property
    def sources(self) -> numpy.ndarray:
        return numpy.array([edge.src for edge in self.edges], dtype=numpy.int64)

    @cached_property
    def destinations(self) -> numpy.ndarray:
        return numpy.array([edge.dst for edge in self.edges], dtype=numpy.int64)

    @cached_property
    def probabilities(self) -> numpy.ndarray:
        return numpy.array([edge.prob for edge in self.edges], dtype=numpy.float64)

    @cached_property
    def weight_array(self) -> numpy.ndarray:
        return numpy.array(self.weights, dtype=numpy.float64)

    @cached_property
    def ancestors(self) -> Tuple[int, ...]:
        """Per node v, the bitmask of all nodes with a directed path to v (v included)."""
        return tuple(self._closure(v, self.in_adjacency, use_src=True) for v in range(self.n))

    @cached_property
    def descendants(self) -> Tuple[int, ...]:
        """Per node v, the bitmask of all nodes reachable from v over any edge (v included)."""
        return tuple(self._closure(v, self.out_adjacency, use_src=False) for v in range(self.n))

    @cached_property
    def is_multitree(self) -> bool:
        """True if the graph is acyclic with at most one directed path between any two nodes.

        Equivalently, the ancestor sets of the in-neighbors of every node are pairwise disjoint.
        """
        ancestors = self.ancestors
        for node in range(self.n):
            seen = 0
            for index in self.in_adjacency[node]:
                parent_ancestors = ancestors[self.edges[index].src]
                if (parent_ancestors >> node) & 1 or seen & parent_ancestors:
                    return False
                seen |= parent_ancestors
        return True

    @cached_property
    def topological_levels(self) -> Tuple[int, ...]:
        """Per node of an acyclic graph, the length of the longest directed path ending in it."""
        levels = [0] * self.n
        pending = [len(indices) for indices in self.in_adjacency]
        ready = [node for node in range(self.n) if pending[node] == 0]
        visited = 0
        while ready:
            node = ready.pop()
            visited += 1
            for index in self.out_adjacency[node]:
                dst = self.edges[index].dst
                levels[dst] = max(levels[dst], levels[node] + 1)
                pending[dst] -= 1
                if pending[dst] == 0:
                    ready.append(dst)
        if visited != self.n:
            raise ValueError("The graph has a directed cycle")
        return tuple(levels)

    def _closure(self, start: int, adjacency: Tuple[Tuple[int, ...], ...], use_src: bool) -> int:
        seen = 1 << start
        stack = [start]
        while stack:
            node = stack.pop()
            for index in adjacency[node]:
                edge = self.edges[index]
                other = edge.src if use_src else edge.dst
                if not (seen >> other) & 1:
                    seen |= 1 << other
                    stack.append(other)
        return seen

    def total_weight(self, nodes: Optional[Iterable[int]] = None) -> float:
        """Returns the summed weight of the given nodes (of all nodes if None)."""
        if nodes is None:
            return math.fsum(self.weights)
        return math.fsum(self.weights[node] for node in nodes)

    def has_unit_weights(self) -> bool:
        return all(weight == 1.0 for weight in self.weights)


@dataclass(frozen=True)
class Budget:
    """The number k of seeds a policy may select, 1 <= k <= n."""
    k: int

    @classmethod
    def for_graph(cls, k: int, graph: InfluenceGraph) -> "Budget":
        if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= graph.n:
            raise InvalidBudget(f"Budget k={k} must be an integer with 1 <= k <= n={graph.n}")
        return cls(k)


# PUBLIC FUNCTIONS SECTION
def validate(graph: InfluenceGraph) -> List[GraphViolation]:
    """Checks every invariant of the given graph and returns all violations (empty list = valid).

    Arguments
    ----------
    * graph: InfluenceGraph ~ The checked graph, which may come from an unchecked source.
    """
    violations: List[GraphViolation] = []

    if len(graph.weights) != graph.n:
        violations.append(GraphViolation(
            "WeightCountMismatch", f"{len(graph.weights)} weights given for {graph.n} nodes"))
    for node, weight in enumerate(graph.weights):
        if not (weight >= 0.0) or math.isinf(weight):
            violations.append(GraphViolation("NegativeWeight", f"node {node} has weight {weight}"))

    seen_pairs = set()
    previous: Optional[Tuple[int, int]] = None
    for index, edge in enumerate(graph.edges):
        pair = (edge.src, edge.dst)
        if not (0 <= edge.src < graph.n and 0 <= edge.dst < graph.n):
            violations.append(GraphViolation(
                "NodeOutOfRange", f"edge {index} ({edge.src},{edge.dst}) leaves [0, {graph.n})"))
        if edge.src == edge.dst:
            violations.append(GraphViolation("SelfLoop", f"edge {index} ({edge.src},{edge.dst})"))
        if not (0.0 <= edge.prob <= 1.0):
            violations.append(GraphViolation(
                "ProbOutOfRange", f"edge {index} ({edge.src},{edge.dst}) has p={edge.prob}"))
        if pair in seen_pairs:
            violations.append(GraphViolation("DuplicateEdge", f"edge ({edge.src},{edge.dst}) appears twice"))
        elif previous is not None and pair < previous:
            violations.append(GraphViolation(
                "UnsortedEdges", f"edge {index} ({edge.src},{edge.dst}) follows {previous}"))
        seen_pairs.add(pair)
        previous = pair

    return violations


def check_graph(graph: InfluenceGraph) -> InfluenceGraph:
    """Returns the graph unchanged if it is valid, raises GraphValidationError otherwise."""
    violations = validate(graph)
    if violations:
        raise GraphValidationError(violations)
    return graph


def make_graph(n: int,
               edges: Iterable[Tuple[int, int, float]],
               weights: Optional[Sequence[float]] = None,
               sort: bool = True) -> InfluenceGraph:
    """Builds and validates an influence graph.

    Arguments
    ----------
    * n: int ~ Node count.
    * edges: Iterable[Tuple[int, int, float]] ~ (src, dst, prob) triples.
    * weights: Optional[Sequence[float]] = None ~ Node weights, all 1.0 if not given.
    * sort: bool = True ~ If True, the edges are brought into canonical (src, dst) order.
    """
    edge_list = [Edge(int(src), int(dst), float(prob)) for (src, dst, prob) in edges]
    if sort:
        edge_list.sort(key=lambda edge: (edge.src, edge.dst))
    weight_tuple = tuple(float(w) for w in weights) if weights is not None else tuple([1.0] * n)
    return check_graph(InfluenceGraph(n=n, weights=weight_tuple, edges=tuple(edge_list)))


def expand_chains(graph: InfluenceGraph) -> Tuple[InfluenceGraph, List[int]]:
    """Replaces every node of integer weight w by a head plus a chain of w-1 probability-1 edges.

    The returned graph has unit weights. Node v's head gets the id heads[v]; its chain nodes
    follow directly after it. All original edges connect head nodes.

    Arguments
    ----------
    * graph: InfluenceGraph ~ A graph whose weights are all positive integers.
    """
    heads: List[int] = []
    next_id = 0
    for node, weight in enumerate(graph.weights):
        if not (weight >= 1.0 and float(weight).is_integer()):
            raise NonIntegerWeight(f"Node {node} has weight {weight}, but chain expansion needs positive integers")
        heads.append(next_id)
        next_id += int(weight)

    expanded_edges: List[Tuple[int, int, float]] = []
    for node, weight in enumerate(graph.weights):
        head = heads[node]
        for offset in range(int(weight) - 1):
            expanded_edges.append((head + offset, head + offset + 1, 1.0))
    for edge in graph.edges:
        expanded_edges.append((heads[edge.src], heads[edge.dst], edge.prob))

    return make_graph(next_id, expanded_edges), heads


def graph_to_dict(graph: InfluenceGraph) -> Dict[str, Any]:
    """Returns the canonical JSON document of the graph; weights are omitted if all are 1.0."""
    document: Dict[str, Any] = {"n": graph.n}
    if not graph.has_unit_weights():
        document["weights"] = list(graph.weights)
    document["edges"] = [{"src": edge.src, "dst": edge.dst, "p": edge.prob} for edge in graph.edges]
    return document


def save_graph(graph: InfluenceGraph) -> bytes:
    """Serializes the graph into its canonical JSON bytes (floats keep their exact bits)."""
    return (json.dumps(graph_to_dict(graph), indent=2) + "\n").encode("utf-8")


def graph_digest(graph: InfluenceGraph) -> str:
    """SHA-256 hex digest of the canonical serialization."""
    return hashlib.sha256(save_graph(graph)).hexdigest()


def load_graph(data: bytes, lenient: bool = False) -> InfluenceGraph:
    """Parses and validates graph JSON bytes.

    Arguments
    ----------
    * data: bytes ~ The JSON document {"n": ..., "weights": [...], "edges": [{"src", "dst", "p"}...]}.
    * lenient: bool = False ~ If True, unsorted edge lists are re-sorted instead of rejected.
    """
    try:
        document = json.loads(data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as error:
        raise ParseError(f"Graph file is not valid JSON: {error}") from error

    if not isinstance(document, dict):
        raise ParseError("Graph JSON must be an object")
    n = document.get("n")
    if not _is_int(n) or n < 0:
        raise ParseError(f"Field 'n' must be a non-negative integer, got {n!r}")

    raw_weights = document.get("weights")
    if raw_weights is None:
        weights = tuple([1.0] * n)
    else:
        if not isinstance(raw_weights, list) or not all(_is_number(w) for w in raw_weights):
            raise ParseError("Field 'weights' must be a list of numbers")
        weights = tuple(float(w) for w in raw_weights)

    raw_edges = document.get("edges", [])
    if not isinstance(raw_edges, list):
        raise ParseError("Field 'edges' must be a list")
    edges: List[Edge] = []
    for position, raw_edge in enumerate(raw_edges):
        if not isinstance(raw_edge, dict):
            raise ParseError(f"Edge entry {position} must be an object")
        src, dst, prob = raw_edge.get("src"), raw_edge.get("dst"), raw_edge.get("p")
        if not (_is_int(src) and _is_int(dst) and _is_number(prob)):
            raise ParseError(f"Edge entry {position} needs integer 'src'/'dst' and numeric 'p'")
        edges.append(Edge(src, dst, float(prob)))

    if lenient:
        edges.sort(key=lambda edge: (edge.src, edge.dst))
    return check_graph(InfluenceGraph(n=n, weights=weights, edges=tuple(edges)))


def seed_mask(nodes: Iterable[int]) -> int:
    """Returns the bitmask with one bit per given node."""
    mask = 0
    for node in nodes:
        mask |= 1 << node
    return mask


def mask_nodes(mask: int) -> List[int]:
    """Returns the sorted node ids of the set bits of the given mask."""
    nodes: List[int] = []
    while mask:
        low = mask & -mask
        nodes.append(low.bit_length() - 1)
        mask ^= low
    return nodes


# INTERNAL FUNCTIONS SECTION
def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return (isinstance(value, (int, float)) and not isinstance(value, bool))
