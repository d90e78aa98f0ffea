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
"""monte_carlo.py

This module contains the vectorized Monte Carlo engine of im-lab.

Replicates are simulated in chunks of a fixed size. Chunk c draws its t
realization copies from the stream derive_seed(base_seed, stream_tag, c), so the
replicate values only depend on (base_seed, stream_tag, chunk_size, replicates)
and never on how the chunks are spread over worker processes. The per-chunk
statistics are merged in chunk order with the pairwise update of Chan et al.
"""

# IMPORTS
# External modules
import math
import numpy
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
# Internal modules
from .graph_core import InfluenceGraph
from .helper_general import parallel_map
from .realization import PartialRealization, derive_seed


# CLASSES SECTION
@dataclass(frozen=True)
class ReplicateStatistics:
    """Count, mean and sum of squared deviations of a set of replicate values."""
    count: int
    mean: float
    m2: float

    @classmethod
    def from_values(cls, values: numpy.ndarray) -> "ReplicateStatistics":
        if values.size == 0:
            return cls(0, 0.0, 0.0)
        mean = float(values.mean())
        return cls(int(values.size), mean, float(((values - mean) ** 2).sum()))

    def merge(self, other: "ReplicateStatistics") -> "ReplicateStatistics":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return ReplicateStatistics(count, mean, m2)

    @property
    def stderr(self) -> float:
        """Unbiased sample standard deviation divided by sqrt(count); 0 for fewer than 2 values."""
        if self.count < 2:
            return 0.0
        return math.sqrt(max(self.m2, 0.0) / (self.count - 1)) / math.sqrt(self.count)


@dataclass(frozen=True)
class AggregateTask:
    """Picklable description of a Monte Carlo quantity over t realization copies.

    The replicate value is f^t(seeds) or, if extra_node is set, the coupled difference
    f^t(seeds + {extra_node}) - f^t(seeds) on the same sampled copies. If psi is set,
    copy 1 is overwritten on the out-edges of dom(psi) with the observed states.
    """
    graph: InfluenceGraph
    base_seed: int
    stream_tag: str
    t: int
    seeds: Tuple[int, ...]
    extra_node: Optional[int] = None
    psi: Optional[PartialRealization] = None


# PUBLIC FUNCTIONS SECTION
def run_aggregate_task(task: AggregateTask, replicates: int, chunk_size: int, workers: int = 1) -> ReplicateStatistics:
    """Simulates the task's quantity for the given number of replicates.

    Arguments
    ----------
    * task: AggregateTask ~ What to simulate.
    * replicates: int ~ Number of replicates R.
    * chunk_size: int ~ Replicates per chunk (fixes the stream layout).
    * workers: int = 1 ~ Worker processes for the chunks.
    """
    chunk_arguments = [(task, index, min(chunk_size, replicates - index * chunk_size))
                       for index in range(math.ceil(replicates / chunk_size))]
    chunk_statistics = parallel_map(_run_chunk, chunk_arguments, workers)
    merged = ReplicateStatistics(0, 0.0, 0.0)
    for statistics in chunk_statistics:
        merged = merged.merge(statistics)
    return merged


def sample_live_copies(graph: InfluenceGraph, rng: numpy.random.Generator, size: int, t: int) -> List[numpy.ndarray]:
    """Draws t boolean (size x |E|) matrices of independent edge states, copy by copy."""
    return [rng.random((size, graph.num_edges)) < graph.probabilities for _ in range(t)]


def aggregate_values(graph: InfluenceGraph, copies: Sequence[numpy.ndarray], seeds: Sequence[int]) -> numpy.ndarray:
    """Per replicate row, f^t(seeds, copies): seed blocks take the union of all copies, the rest copy 1."""
    size = copies[0].shape[0]
    live = copies[0]
    if len(copies) > 1 and len(seeds) > 0:
        union = numpy.logical_or.reduce(numpy.stack(copies), axis=0)
        seed_edges = numpy.isin(graph.sources, numpy.asarray(seeds, dtype=numpy.int64))
        live = numpy.where(seed_edges[numpy.newaxis, :], union, copies[0])
    reached = numpy.zeros((size, graph.n), dtype=numpy.bool_)
    if len(seeds) > 0:
        reached[:, list(seeds)] = True
    reached = propagate(graph, live, reached)
    return (reached * graph.weight_array[numpy.newaxis, :]).sum(axis=1)


def propagate(graph: InfluenceGraph, live: numpy.ndarray, reached: numpy.ndarray) -> numpy.ndarray:
    """Frontier propagation of all replicate rows at once over their live edges.

    Arguments
    ----------
    * graph: InfluenceGraph ~ The graph.
    * live: numpy.ndarray ~ Boolean (rows x |E|) edge states.
    * reached: numpy.ndarray ~ Boolean (rows x n) initially active nodes; updated in place.
    """
    if graph.num_edges == 0:
        return reached
    order = numpy.argsort(graph.destinations, kind="stable")
    sorted_destinations = graph.destinations[order]
    targets, starts = numpy.unique(sorted_destinations, return_index=True)
    sorted_sources = graph.sources[order]
    sorted_live = live[:, order]

    frontier = reached.copy()
    while frontier.any():
        transmitted = frontier[:, sorted_sources] & sorted_live
        hits = numpy.logical_or.reduceat(transmitted, starts, axis=1)
        newly = hits & ~reached[:, targets]
        if not newly.any():
            break
        frontier = numpy.zeros_like(reached)
        frontier[:, targets] = newly
        reached[:, targets] |= newly
    return reached


# INTERNAL FUNCTIONS SECTION
def _run_chunk(argument: Tuple[AggregateTask, int, int]) -> ReplicateStatistics:
    task, chunk_index, size = argument
    graph = task.graph
    rng = numpy.random.default_rng(derive_seed(task.base_seed, task.stream_tag, chunk_index))
    copies = sample_live_copies(graph, rng, size, task.t)
    if task.psi is not None and task.psi.domain:
        observed = [index for node in sorted(task.psi.domain) for index in graph.out_adjacency[node]]
        if observed:
            states = numpy.array([(task.psi.live >> index) & 1 for index in observed], dtype=numpy.bool_)
            copies[0][:, observed] = states[numpy.newaxis, :]

    values = aggregate_values(graph, copies, task.seeds)
    if task.extra_node is not None:
        values = aggregate_values(graph, copies, task.seeds + (task.extra_node,)) - values
    return ReplicateStatistics.from_values(values)
