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
"""constructions.py

Deterministic generators of the graph families used by the experiments,
together with their budgets, layout metadata and closed-form reference values:

* bipartite-gap(m) ~ C(m^3, m^2) left nodes, one per m^2-subset of the m^3 right
  nodes, each linked to its subset with probability 1/m; budget m^2.
* bad-example(d, w) ~ layers V1 (d-1 nodes), V2 (d nodes), V3 (2d nodes of
  weight w); V1 is complete to V2 with probability 1/d and the j-th V2 node
  feeds V3 nodes 2j and 2j+1 with probability e/(e+1).
* g-of-w(base, w) ~ an edgeless copy G1 of the base graph's nodes, each linked
  with probability 1 to its twin in G2, a copy of the base graph with weight w.
* random ~ a seeded directed Erdos-Renyi skeleton for tests and the corpus.
"""

# IMPORTS
# External modules
import itertools
import math
import numpy
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
# Internal modules
from .errors import ConstructionTooLarge, WrongConstruction
from .graph_core import Budget, InfluenceGraph, make_graph


# CONSTANT SECTION
# Maximal number of nodes of a generated construction
MAX_CONSTRUCTION_NODES = 1_000_000
BIPARTITE_GAP = "bipartite-gap"
BAD_EXAMPLE = "bad-example"
G_OF_W = "g-of-w"
RANDOM = "random"
CONSTRUCTIONS = (BIPARTITE_GAP, BAD_EXAMPLE, G_OF_W, RANDOM)
# e/(e+1), the V2 -> V3 edge probability of the bad example
V3_EDGE_PROBABILITY = math.e / (math.e + 1.0)


# CLASSES SECTION
@dataclass(frozen=True)
class ConstructionMetadata:
    """The JSON sidecar of a generated graph.

    layout holds construction-specific node groups: half-open id ranges such as
    {"v1": [0, 19]} or, for bipartite-gap, the list of right-node subsets per left node.
    """
    construction: str
    params: Dict[str, Any]
    budget: Optional[int] = None
    budget_real: Optional[float] = None
    layout: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, dictionary: Dict[str, Any]) -> "ConstructionMetadata":
        try:
            return cls(construction=dictionary["construction"], params=dict(dictionary.get("params", {})),
                       budget=dictionary.get("budget"), budget_real=dictionary.get("budget_real"),
                       layout=dict(dictionary.get("layout", {})))
        except (KeyError, TypeError, AttributeError) as error:
            raise WrongConstruction(f"Invalid construction metadata: {error}") from error

    def node_range(self, group: str) -> range:
        start, stop = self.layout[group]
        return range(start, stop)


@dataclass(frozen=True)
class Construction:
    graph: InfluenceGraph
    budget: Optional[Budget]
    metadata: ConstructionMetadata


@dataclass(frozen=True)
class ConstructionParams:
    """A construction kind with its parameters, e.g. ConstructionParams('bad-example', {'d': 20, 'w': 100})."""
    kind: str
    values: Dict[str, Any]

    def build(self, base: Optional[InfluenceGraph] = None) -> Construction:
        if self.kind == BIPARTITE_GAP:
            return gen_bipartite_gap(int(self.values["m"]))
        if self.kind == BAD_EXAMPLE:
            return gen_bad_example(int(self.values["d"]), float(self.values["w"]))
        if self.kind == G_OF_W:
            if base is None:
                raise WrongConstruction("The g-of-w construction needs a base graph")
            return gen_g_of_w(base, float(self.values["w"]))
        if self.kind == RANDOM:
            graph = gen_random(int(self.values["n"]), float(self.values["p_edge"]), float(self.values["p_low"]),
                               float(self.values["p_high"]), int(self.values["seed"]),
                               max_weight=int(self.values.get("max_weight", 1)))
            return Construction(graph, None, ConstructionMetadata(RANDOM, dict(self.values)))
        raise WrongConstruction(f"Unknown construction '{self.kind}', use one of {', '.join(CONSTRUCTIONS)}")

    @property
    def derived_budget(self) -> Optional[Budget]:
        if self.kind == BIPARTITE_GAP:
            return Budget(int(self.values["m"]) ** 2)
        if self.kind == BAD_EXAMPLE:
            return Budget(bad_example_budget(int(self.values["d"]))[0])
        return None


@dataclass(frozen=True)
class BadExampleClosedForms:
    """Closed-form reference values of the bad-example construction for given d and w.

    p(j) is the probability that a fixed V2 node is reached from j seeded V1 nodes.
    """
    d: int
    w: float

    @property
    def gain_per_v2(self) -> float:
        """Expected value of one active V2 node: itself plus its two V3 children, 1 + 2ew/(e+1)."""
        return 1.0 + 2.0 * V3_EDGE_PROBABILITY * self.w

    def p(self, j: float) -> float:
        return 1.0 - (1.0 - 1.0 / self.d) ** j

    def m1(self, p_j: float) -> float:
        """Greedy's marginal gain of one more V1 node."""
        return 1.0 + (1.0 - p_j) * self.gain_per_v2

    def m2(self, p_j: float) -> float:
        """Greedy's marginal gain of one more V2 node."""
        return (1.0 - p_j) * self.gain_per_v2

    def m3(self, p_j: float) -> float:
        """Greedy's marginal gain of one more V3 node."""
        return (p_j / (math.e + 1.0) + (1.0 - p_j)) * self.w

    def greedy_value_for_count(self, v2_count: float) -> float:
        """Expected spread of all of V1 plus v2_count seeded V2 nodes."""
        reached = self.p(self.d - 1)
        return (self.d - 1) + (v2_count + reached * (self.d - v2_count)) * self.gain_per_v2

    @property
    def greedy_closed_form(self) -> float:
        """Greedy's expected spread with the real-valued count 2d/(e+1) + 1 of V2 picks."""
        return self.greedy_value_for_count(2.0 * self.d / (math.e + 1.0) + 1.0)

    def opt_adaptive_lower(self, epsilon: float) -> float:
        return (1.0 - epsilon) * 2.0 * self.d * self.w

    @property
    def budget(self) -> int:
        return bad_example_budget(self.d)[0]

    @property
    def adaptive_reference_value(self) -> float:
        """Exact spread of seeding all of V2, then up to k-d unreached V3 nodes.

        The number U of unreached V3 nodes is Binomial(2d, 1/(e+1)); the value is
        d + w * (2d - E[max(U - (k - d), 0)]).
        """
        remaining = self.budget - self.d
        trials = 2 * self.d
        q = 1.0 / (math.e + 1.0)
        shortfall = math.fsum(_binomial_pmf(trials, q, unreached) * (unreached - remaining)
                              for unreached in range(remaining + 1, trials + 1))
        return self.d + self.w * (trials - shortfall)

    @property
    def reference_ratio(self) -> float:
        return self.greedy_closed_form / self.adaptive_reference_value

    @property
    def limit_greedy_per_dw(self) -> float:
        """The d, w -> infinity limit of greedy_closed_form / (d w): 2(e^2+1)/(e+1)^2."""
        return 2.0 * (math.e ** 2 + 1.0) / (math.e + 1.0) ** 2

    @property
    def limit_ratio(self) -> float:
        """The limit of greedy over the adaptive optimum: (e^2+1)/(e+1)^2."""
        return (math.e ** 2 + 1.0) / (math.e + 1.0) ** 2

    def to_dict(self) -> Dict[str, Any]:
        p_last = self.p(self.d - 1)
        return {
            "d": self.d,
            "w": self.w,
            "budget": self.budget,
            "budget_real": bad_example_budget(self.d)[1],
            "m1_at_p_last": self.m1(p_last),
            "m2_at_p_last": self.m2(p_last),
            "m3_at_p_last": self.m3(p_last),
            "greedy_closed_form": self.greedy_closed_form,
            "adaptive_reference_value": self.adaptive_reference_value,
            "reference_ratio": self.reference_ratio,
            "limit_greedy_per_dw": self.limit_greedy_per_dw,
            "limit_ratio": self.limit_ratio,
        }


# PUBLIC FUNCTIONS SECTION
def gen_bipartite_gap(m: int, max_nodes: int = MAX_CONSTRUCTION_NODES) -> Construction:
    """Generates the bipartite lower-bound construction for the adaptivity gap.

    Left node i is linked to the i-th m^2-subset of the right nodes in lexicographic order.

    Arguments
    ----------
    * m: int ~ Construction parameter, at least 2.
    * max_nodes: int = MAX_CONSTRUCTION_NODES ~ ConstructionTooLarge is raised beyond this node count.
    """
    if m < 2:
        raise ValueError(f"The bipartite-gap construction needs m >= 2, got {m}")
    right_count = m ** 3
    subset_size = m ** 2
    left_count = math.comb(right_count, subset_size)
    if left_count + right_count > max_nodes:
        raise ConstructionTooLarge(f"bipartite-gap with m={m} has {left_count + right_count} nodes, "
                                   f"more than the limit of {max_nodes}")
    right = list(range(left_count, left_count + right_count))
    subsets = [list(subset) for subset in itertools.combinations(right, subset_size)]
    edges = [(left, right_node, 1.0 / m) for left, subset in enumerate(subsets) for right_node in subset]
    graph = make_graph(left_count + right_count, edges)
    metadata = ConstructionMetadata(
        BIPARTITE_GAP, {"m": m}, subset_size, float(subset_size),
        {"left": [0, left_count], "right": [left_count, left_count + right_count], "subsets": subsets})
    return Construction(graph, Budget(subset_size), metadata)


def bad_example_budget(d: int) -> Tuple[int, float]:
    """The budget (e+3)/(e+1) * d rounded half up, and its real value."""
    real = (math.e + 3.0) / (math.e + 1.0) * d
    return math.floor(real + 0.5), real


def gen_bad_example(d: int, w: float, max_nodes: int = MAX_CONSTRUCTION_NODES) -> Construction:
    """Generates the layered graph on which non-adaptive greedy falls short of the adaptive optimum.

    Node ids: V1 = [0, d-1), V2 = [d-1, 2d-1), V3 = [2d-1, 4d-1).

    Arguments
    ----------
    * d: int ~ Layer size parameter, at least 2.
    * w: float ~ Weight of every V3 node, at least 1.
    * max_nodes: int = MAX_CONSTRUCTION_NODES ~ ConstructionTooLarge is raised beyond this node count.
    """
    if d < 2:
        raise ValueError(f"The bad-example construction needs d >= 2, got {d}")
    if w < 1:
        raise ValueError(f"The bad-example construction needs w >= 1, got {w}")
    n = 4 * d - 1
    if n > max_nodes:
        raise ConstructionTooLarge(f"bad-example with d={d} has {n} nodes, more than the limit of {max_nodes}")
    v2_start = d - 1
    v3_start = 2 * d - 1
    edges: List[Tuple[int, int, float]] = [(v1, v2_start + j, 1.0 / d) for v1 in range(d - 1) for j in range(d)]
    for j in range(d):
        edges.append((v2_start + j, v3_start + 2 * j, V3_EDGE_PROBABILITY))
        edges.append((v2_start + j, v3_start + 2 * j + 1, V3_EDGE_PROBABILITY))
    weights = [1.0] * v3_start + [float(w)] * (2 * d)
    k, real = bad_example_budget(d)
    metadata = ConstructionMetadata(BAD_EXAMPLE, {"d": d, "w": w}, k, real,
                                    {"v1": [0, v2_start], "v2": [v2_start, v3_start], "v3": [v3_start, n]})
    return Construction(make_graph(n, edges, weights), Budget(k), metadata)


def bad_example_closed_forms(d: int, w: float) -> BadExampleClosedForms:
    if d < 2:
        raise ValueError(f"The bad-example construction needs d >= 2, got {d}")
    return BadExampleClosedForms(d, float(w))


def gen_g_of_w(base: InfluenceGraph, w: float) -> Construction:
    """Wraps a unit-weight base graph into G(w): G1 = [0, n) edgeless with weight 1, G2 = [n, 2n) with weight w.

    Arguments
    ----------
    * base: InfluenceGraph ~ The base graph; all weights must be 1.
    * w: float ~ The weight of every G2 node, at least 1.
    """
    if not base.has_unit_weights():
        raise WrongConstruction("The g-of-w construction needs a base graph with unit weights")
    if w < 1:
        raise ValueError(f"The g-of-w construction needs w >= 1, got {w}")
    n = base.n
    edges = [(node, n + node, 1.0) for node in range(n)]
    edges.extend((n + edge.src, n + edge.dst, edge.prob) for edge in base.edges)
    graph = make_graph(2 * n, edges, [1.0] * n + [float(w)] * n)
    metadata = ConstructionMetadata(G_OF_W, {"w": w, "base_n": n}, None, None, {"g1": [0, n], "g2": [n, 2 * n]})
    return Construction(graph, None, metadata)


def gen_random(n: int, p_edge: float, p_low: float, p_high: float, seed: int, *,
               prob_levels: Optional[Sequence[float]] = None, max_weight: int = 1) -> InfluenceGraph:
    """Generates a directed Erdos-Renyi graph; the same arguments always give the same graph.

    Arguments
    ----------
    * n: int ~ Number of nodes.
    * p_edge: float ~ Presence probability of every ordered pair (u, v), u != v.
    * p_low: float ~ Lower bound of the uniform edge probabilities.
    * p_high: float ~ Upper bound of the uniform edge probabilities.
    * seed: int ~ Seed of numpy's default generator.
    * prob_levels: Optional[Sequence[float]] = None ~ If given, edge probabilities are drawn from these levels instead.
    * max_weight: int = 1 ~ Node weights are drawn uniformly from 1..max_weight.
    """
    if n < 1:
        raise ValueError(f"A random graph needs at least one node, got n={n}")
    if not (0.0 <= p_edge <= 1.0 and 0.0 <= p_low <= p_high <= 1.0):
        raise ValueError("Random graphs need 0 <= p_edge <= 1 and 0 <= p_low <= p_high <= 1")
    rng = numpy.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    present = rng.random(len(pairs)) < p_edge
    if prob_levels is not None:
        levels = numpy.asarray(prob_levels, dtype=numpy.float64)
        probabilities = levels[rng.integers(0, len(levels), size=len(pairs))]
    else:
        probabilities = rng.uniform(p_low, p_high, size=len(pairs))
    weights = None
    if max_weight > 1:
        weights = [float(weight) for weight in rng.integers(1, max_weight + 1, size=n)]
    edges = [(u, v, float(probability))
             for (u, v), keep, probability in zip(pairs, present, probabilities) if keep]
    return make_graph(n, edges, weights)


# INTERNAL FUNCTIONS SECTION
def _binomial_pmf(trials: int, q: float, successes: int) -> float:
    log_pmf = (math.lgamma(trials + 1) - math.lgamma(successes + 1) - math.lgamma(trials - successes + 1)
               + successes * math.log(q) + (trials - successes) * math.log1p(-q))
    return math.exp(log_pmf)
