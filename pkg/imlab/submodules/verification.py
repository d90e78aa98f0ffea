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
"""verification.py

This module contains the exact verification suites of im-lab. Every suite runs
over a seeded corpus of tiny random graphs and checks its inequalities and
identities with exact arithmetic:

* aggregation ~ sigma^t(S) <= t * sigma(S) for t in {2, 3} and every |S| <= 3
* hybrid ~ Delta_{f^3}(u | psi) <= 2 Delta_{f^2}(u | dom psi) and both hybrid
  intermediates, for every reachable psi of depth <= 2 and every candidate u
* telescoping ~ sigma^t(pi) and sigma^t(W(pi)) equal the marginal-gain sums over
  the adaptive greedy tree, t in {1, 2, 3}
* gap ~ 1 <= OPT_A / OPT_N <= 4 and sigma(pi) <= sigma^3(pi) <= 2 sigma^2(W(pi)) <= 4 sigma(W(pi))
* greedy-ratio ~ both greedy algorithms reach (1 - (1 - 1/k)^k) OPT_N
* g-of-w ~ adaptive greedy on G(w) seeds only G1 nodes and reaches w * Greedy_N + k
* live-edge ~ per-realization monotonicity and submodularity (graphs with few edges)
* chain ~ weighted spread equals the spread of the chain-expanded graph

Each (suite, check, instance) gives one Verdict with the smallest margin over all
checked cases; a margin below -TOLERANCE * scale is a failure.
"""

# IMPORTS
# External modules
import itertools
import numpy
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
# Internal modules
from .adaptive_execution import Policy
from .constructions import gen_g_of_w, gen_random
from .decision_tree import (DecisionTree, TreePolicy, materialize_tree, random_walk_policy, random_walk_spread,
                            tree_marginal_sums)
from .errors import CorpusTooLarge, ImLabError
from .exact_enumeration import ExactEvaluator
from .graph_core import Budget, InfluenceGraph, expand_chains, graph_digest, mask_nodes
from .helper_general import parallel_map, print_status, safe_ratio
from .optimal import OptResult, opt_adaptive, opt_nonadaptive
from .policies import AdaptiveGreedyPolicy, GreedyResult, greedy_nonadaptive
from .realization import ComposedRealization, PartialRealization, derive_seed, feedback_outcomes, reachable_set
from .spread import EXACT, EstimatorConfig, exact_policy_value


# CONSTANT SECTION
AGGREGATION = "aggregation"
HYBRID = "hybrid"
TELESCOPING = "telescoping"
GAP = "gap"
GREEDY_RATIO = "greedy-ratio"
G_OF_W = "g-of-w"
LIVE_EDGE = "live-edge"
CHAIN = "chain"
ALL = "all"
SUITES = (AGGREGATION, HYBRID, TELESCOPING, GAP, GREEDY_RATIO, G_OF_W, LIVE_EDGE, CHAIN)
PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
# Relative tolerance of all exact comparisons
TOLERANCE = 1e-9
# Maximal number of corpus instances
MAX_CORPUS_INSTANCES = 10_000
# Maximal node count of a corpus graph
MAX_CORPUS_N = 6
CORPUS_P_EDGES = (0.3, 0.6, 1.0)
CORPUS_PROB_LEVELS = (0.25, 0.5, 0.75, 1.0)
CORPUS_BUDGETS = (1, 2, 3)
# The live-edge suite enumerates all 2^|E| realizations up to this edge count
LIVE_EDGE_MAX_EDGES = 10
CHAIN_INSTANCES = 50
CHAIN_MAX_WEIGHT = 3
G_OF_W_WEIGHT = 10.0


# CLASSES SECTION
@dataclass(frozen=True)
class CorpusInstance:
    index: int
    graph: InfluenceGraph
    k: int
    p_edge: float
    probabilities: str

    def to_dict(self) -> Dict[str, Any]:
        return {"index": self.index, "n": self.graph.n, "edges": self.graph.num_edges, "k": self.k,
                "p_edge": self.p_edge, "probabilities": self.probabilities, "digest": graph_digest(self.graph)}


@dataclass(frozen=True)
class Verdict:
    """Outcome of one check on one instance: the worst margin over its cases, the case count and
    an optional observed quantity (such as a ratio)."""
    suite: str
    check: str
    instance: int
    status: str
    margin: Optional[float]
    cases: int
    detail: str = ""
    observed: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class VerificationResult:
    corpus: List[CorpusInstance]
    verdicts: List[Verdict]

    @property
    def passed(self) -> bool:
        return all(verdict.status != FAIL for verdict in self.verdicts)

    def summary(self) -> List[Dict[str, Any]]:
        """One entry per (suite, check) with status counts, the smallest margin and the observed range."""
        groups: Dict[Tuple[str, str], List[Verdict]] = {}
        for verdict in self.verdicts:
            groups.setdefault((verdict.suite, verdict.check), []).append(verdict)
        entries = []
        for (suite, check), verdicts in groups.items():
            margins = [verdict.margin for verdict in verdicts if verdict.margin is not None]
            observed = [verdict.observed for verdict in verdicts if verdict.observed is not None]
            entries.append({
                "suite": suite,
                "check": check,
                "passed": sum(1 for verdict in verdicts if verdict.status == PASS),
                "failed": sum(1 for verdict in verdicts if verdict.status == FAIL),
                "skipped": sum(1 for verdict in verdicts if verdict.status == SKIPPED),
                "cases": sum(verdict.cases for verdict in verdicts),
                "min_margin": min(margins) if margins else None,
                "min_observed": min(observed) if observed else None,
                "max_observed": max(observed) if observed else None,
            })
        return entries


class CheckAccumulator:
    """Collects the cases of one check on one instance and turns them into a Verdict."""

    def __init__(self, suite: str, check: str, instance: int) -> None:
        self.suite = suite
        self.check = check
        self.instance = instance
        self.cases = 0
        self.failed = False
        self.min_margin: Optional[float] = None
        self.worst = ""
        self.observed: Optional[float] = None

    def at_most(self, lhs: float, rhs: float, detail: str = "") -> None:
        """Records the case lhs <= rhs."""
        self._record(rhs - lhs, _slack(lhs, rhs), detail)

    def equal(self, lhs: float, rhs: float, detail: str = "") -> None:
        self._record(-abs(lhs - rhs), _slack(lhs, rhs), detail)

    def holds(self, condition: bool, detail: str = "") -> None:
        self.cases += 1
        if not condition:
            self.failed = True
            self.worst = detail

    def observe(self, value: Optional[float]) -> None:
        self.observed = value

    def verdict(self) -> Verdict:
        if self.cases == 0:
            status = SKIPPED
        else:
            status = FAIL if self.failed else PASS
        return Verdict(self.suite, self.check, self.instance, status, self.min_margin, self.cases, self.worst,
                       self.observed)

    def _record(self, margin: float, slack: float, detail: str) -> None:
        self.cases += 1
        if margin < -slack:
            self.failed = True
        if self.min_margin is None or margin < self.min_margin:
            self.min_margin = margin
            self.worst = detail


class InstanceContext:
    """Exact quantities of one corpus instance, computed once and shared by the suites."""

    def __init__(self, instance: CorpusInstance, exact_edge_limit: int) -> None:
        self.instance = instance
        self.graph = instance.graph
        self.k = instance.k
        self.cfg = EstimatorConfig(mode=EXACT, exact_edge_limit=exact_edge_limit)
        self.evaluator = ExactEvaluator(self.graph, exact_edge_limit)

    @cached_property
    def opt_n(self) -> OptResult:
        return opt_nonadaptive(self.graph, self.k, self.cfg, self.evaluator)

    @cached_property
    def opt_a(self) -> OptResult:
        return opt_adaptive(self.graph, self.k, self.cfg, self.evaluator)

    @cached_property
    def greedy(self) -> GreedyResult:
        return greedy_nonadaptive(self.graph, self.k, self.cfg, self.evaluator)

    @cached_property
    def adaptive_greedy_tree(self) -> DecisionTree:
        policy = AdaptiveGreedyPolicy(Budget(self.k), self.cfg, self.evaluator)
        return materialize_tree(self.graph, policy)

    def spread(self, seeds: Sequence[int], t: int = 1) -> float:
        return self.evaluator.expected_utility(seeds, {seed: t for seed in seeds})

    def policy_value(self, policy: Policy, t: int) -> float:
        return exact_policy_value(self.graph, policy, t, self.cfg, self.evaluator)

    def tree_value(self, tree: DecisionTree, t: int) -> float:
        return self.policy_value(TreePolicy.from_tree(tree), t)

    def walk_value(self, tree: DecisionTree, t: int) -> float:
        return random_walk_spread(self.graph, random_walk_policy(tree), t, self.cfg, self.evaluator).value


# PUBLIC FUNCTIONS SECTION
def expand_suites(suite: str) -> List[str]:
    if suite == ALL:
        return list(SUITES)
    if suite not in SUITES:
        raise ValueError(f"Unknown suite '{suite}', use one of {', '.join(SUITES + (ALL,))}")
    return [suite]


def generate_corpus(instances: int = 200, seed: int = 0, max_n: int = 5) -> List[CorpusInstance]:
    """The seeded corpus of tiny random graphs.

    Instance i draws n from 3..max_n, p_edge from {0.3, 0.6, 1.0}, edge probabilities from the
    grid {0.25, 0.5, 0.75, 1} or uniformly from [0, 1], and k from {1, 2, 3} (at most n).

    Arguments
    ----------
    * instances: int = 200 ~ Number of graphs.
    * seed: int = 0 ~ Base seed of the corpus stream.
    * max_n: int = 5 ~ Largest node count.
    """
    if instances > MAX_CORPUS_INSTANCES:
        raise CorpusTooLarge(f"{instances} corpus instances requested, the limit is {MAX_CORPUS_INSTANCES}")
    if max_n > MAX_CORPUS_N:
        raise CorpusTooLarge(f"Corpus graphs with up to {max_n} nodes requested, the limit is {MAX_CORPUS_N}")
    if instances < 1 or max_n < 3:
        raise ValueError("The corpus needs at least one instance and max_n >= 3")
    rng = numpy.random.default_rng(derive_seed(seed, "corpus"))
    sizes = list(range(3, max_n + 1))
    corpus = []
    for index in range(instances):
        n = int(rng.choice(sizes))
        p_edge = float(rng.choice(CORPUS_P_EDGES))
        on_grid = bool(rng.integers(0, 2) == 0)
        k = min(int(rng.choice(CORPUS_BUDGETS)), n)
        graph_seed = int(rng.integers(0, 2 ** 63))
        graph = gen_random(n, p_edge, 0.0, 1.0, graph_seed, prob_levels=CORPUS_PROB_LEVELS if on_grid else None)
        corpus.append(CorpusInstance(index, graph, k, p_edge, "grid" if on_grid else "uniform"))
    return corpus


def generate_chain_corpus(instances: int = CHAIN_INSTANCES, seed: int = 0) -> List[CorpusInstance]:
    """Seeded tiny random graphs with integer weights 1..CHAIN_MAX_WEIGHT for the chain suite."""
    rng = numpy.random.default_rng(derive_seed(seed, "chain-corpus"))
    corpus = []
    for index in range(instances):
        n = int(rng.integers(3, 6))
        p_edge = float(rng.choice(CORPUS_P_EDGES))
        graph = gen_random(n, p_edge, 0.0, 1.0, int(rng.integers(0, 2 ** 63)), max_weight=CHAIN_MAX_WEIGHT)
        corpus.append(CorpusInstance(index, graph, 1, p_edge, "uniform"))
    return corpus


def reachable_partial_realizations(graph: InfluenceGraph, max_depth: int) -> Iterator[PartialRealization]:
    """Every partial realization with at most max_depth seeds and positive probability."""
    outcomes = [feedback_outcomes(graph, node) for node in range(graph.n)]
    for depth in range(max_depth + 1):
        for domain in itertools.combinations(range(graph.n), depth):
            for blocks in itertools.product(*(outcomes[node] for node in domain)):
                live = 0
                for block_live, _ in blocks:
                    live |= block_live
                yield PartialRealization(frozenset(domain), live)


def hybrid_intermediates(graph: InfluenceGraph, node: int, psi: PartialRealization,
                         evaluator: ExactEvaluator) -> Tuple[float, float, float]:
    """The two hybrid intermediate differences for candidate node given psi, and Delta_{f^2}(node | dom psi).

    With S = dom(psi), S-blocks as the union of three copies and copy 1 conditioned on psi:
    the first difference adds node with the union of two copies, the second grows node's union
    from two to three copies. Their sum is Delta_{f^3}(node | psi).
    """
    seeds = sorted(psi.domain)
    targets = graph.descendants[node]
    base = _composed_value(graph, seeds, {seed: 3 for seed in seeds}, psi, evaluator, targets)
    with_two = _composed_value(graph, seeds + [node], {**{seed: 3 for seed in seeds}, node: 2}, psi, evaluator,
                               targets)
    with_three = _composed_value(graph, seeds + [node], {**{seed: 3 for seed in seeds}, node: 3}, psi, evaluator,
                                 targets)
    return with_two - base, with_three - with_two, evaluator.marginal(seeds, node, 2)


def run_verification(suite: str, instances: int = 200, seed: int = 0, max_n: int = 5, workers: int = 1,
                     exact_edge_limit: int = 22) -> VerificationResult:
    """Runs the suite (or all suites) over the corpus; verdicts are ordered by suite, instance and check.

    Arguments
    ----------
    * suite: str ~ One of SUITES or 'all'.
    * instances: int = 200 ~ Corpus size.
    * seed: int = 0 ~ Corpus seed.
    * max_n: int = 5 ~ Largest corpus node count.
    * workers: int = 1 ~ Worker processes over the instances.
    * exact_edge_limit: int = 22 ~ Exactness guard of the engine.
    """
    suites = expand_suites(suite)
    corpus_suites = [name for name in suites if name != CHAIN]
    corpus = generate_corpus(instances, seed, max_n)
    verdicts: List[Verdict] = []
    if corpus_suites:
        arguments = [(instance, tuple(corpus_suites), exact_edge_limit) for instance in corpus]
        for instance_verdicts in parallel_map(_verify_instance, arguments, workers):
            verdicts.extend(instance_verdicts)
    if CHAIN in suites:
        chain_corpus = generate_chain_corpus(CHAIN_INSTANCES, seed)
        arguments = [(instance, exact_edge_limit) for instance in chain_corpus]
        for instance_verdicts in parallel_map(_verify_chain_instance, arguments, workers):
            verdicts.extend(instance_verdicts)
    order = {name: position for position, name in enumerate(SUITES)}
    verdicts.sort(key=lambda verdict: (order[verdict.suite], verdict.instance))
    result = VerificationResult(corpus, verdicts)
    failures = sum(1 for verdict in verdicts if verdict.status == FAIL)
    print_status("INFO" if failures == 0 else "WARNING",
                 f"Verification of {', '.join(suites)}: {len(verdicts)} verdicts, {failures} failed")
    return result


def verify_instance(instance: CorpusInstance, suites: Sequence[str], exact_edge_limit: int = 22) -> List[Verdict]:
    """The verdicts of the given corpus suites on one instance; a guard refusal gives a skipped 'guard' verdict."""
    context = InstanceContext(instance, exact_edge_limit)
    checkers = {
        AGGREGATION: _check_aggregation,
        HYBRID: _check_hybrid,
        TELESCOPING: _check_telescoping,
        GAP: _check_gap,
        GREEDY_RATIO: _check_greedy_ratio,
        G_OF_W: _check_g_of_w,
        LIVE_EDGE: _check_live_edge,
    }
    verdicts: List[Verdict] = []
    for suite in suites:
        try:
            verdicts.extend(checkers[suite](context))
        except ImLabError as error:
            verdicts.append(Verdict(suite, "guard", instance.index, SKIPPED, None, 0, str(error)))
    return verdicts


# INTERNAL FUNCTIONS SECTION
def _slack(lhs: float, rhs: float) -> float:
    return TOLERANCE * max(1.0, abs(lhs), abs(rhs))


def _composed_value(graph: InfluenceGraph, seeds: List[int], union_sizes: Dict[int, int],
                    psi: PartialRealization, evaluator: ExactEvaluator, targets: int) -> float:
    composed = ComposedRealization.from_union_sizes(graph, union_sizes, 3)
    sizes = {node: size for node, size in enumerate(composed.union_sizes()) if size > 1}
    return evaluator.expected_utility(seeds, sizes, psi, targets)


def _verify_instance(argument: Tuple[CorpusInstance, Tuple[str, ...], int]) -> List[Verdict]:
    instance, suites, exact_edge_limit = argument
    verdicts = verify_instance(instance, suites, exact_edge_limit)
    print_status("INFO", f"Verified instance {instance.index} (n={instance.graph.n}, "
                         f"|E|={instance.graph.num_edges}, k={instance.k})")
    return verdicts


def _check_aggregation(context: InstanceContext) -> List[Verdict]:
    index = context.instance.index
    bound = CheckAccumulator(AGGREGATION, "sigma_t_at_most_t_sigma", index)
    monotone = CheckAccumulator(AGGREGATION, "sigma_t_nondecreasing_in_t", index)
    for size in range(1, min(3, context.graph.n) + 1):
        for seeds in itertools.combinations(range(context.graph.n), size):
            single = context.spread(seeds, 1)
            previous = single
            for t in (2, 3):
                value = context.spread(seeds, t)
                bound.at_most(value, t * single, f"S={list(seeds)} t={t}")
                monotone.at_most(previous, value, f"S={list(seeds)} t={t}")
                previous = value
    return [bound.verdict(), monotone.verdict()]


def _check_hybrid(context: InstanceContext) -> List[Verdict]:
    graph = context.graph
    evaluator = context.evaluator
    index = context.instance.index
    main = CheckAccumulator(HYBRID, "delta_f3_at_most_2_delta_f2", index)
    first = CheckAccumulator(HYBRID, "first_intermediate_at_most_delta_f2", index)
    second = CheckAccumulator(HYBRID, "second_intermediate_at_most_delta_f2", index)
    split = CheckAccumulator(HYBRID, "intermediates_sum_to_delta_f3", index)
    for psi in reachable_partial_realizations(graph, 2):
        seeds = sorted(psi.domain)
        for node in range(graph.n):
            if node in psi.domain:
                continue
            detail = f"dom={seeds} feedback={psi.live:#x} u={node}"
            first_part, second_part, delta_two = hybrid_intermediates(graph, node, psi, evaluator)
            delta_three = evaluator.marginal(seeds, node, 3, psi)
            main.at_most(delta_three, 2.0 * delta_two, detail)
            first.at_most(first_part, delta_two, detail)
            second.at_most(second_part, delta_two, detail)
            split.equal(first_part + second_part, delta_three, detail)
    return [main.verdict(), first.verdict(), second.verdict(), split.verdict()]


def _check_telescoping(context: InstanceContext) -> List[Verdict]:
    index = context.instance.index
    tree = context.adaptive_greedy_tree
    adaptive = CheckAccumulator(TELESCOPING, "policy_spread_equals_adaptive_marginal_sum", index)
    walk = CheckAccumulator(TELESCOPING, "walk_spread_equals_nonadaptive_marginal_sum", index)
    for t in (1, 2, 3):
        adaptive_sum, nonadaptive_sum = tree_marginal_sums(context.graph, tree, t, context.cfg, context.evaluator)
        adaptive.equal(context.tree_value(tree, t), adaptive_sum, f"t={t}")
        walk.equal(context.walk_value(tree, t), nonadaptive_sum, f"t={t}")
    return [adaptive.verdict(), walk.verdict()]


def _check_gap(context: InstanceContext) -> List[Verdict]:
    index = context.instance.index
    opt_n = context.opt_n
    opt_a = context.opt_a
    lower = CheckAccumulator(GAP, "opt_a_at_least_opt_n", index)
    upper = CheckAccumulator(GAP, "opt_a_at_most_4_opt_n", index)
    witnesses = CheckAccumulator(GAP, "witnesses_reproduce_optima", index)
    lower.at_most(opt_n.value, opt_a.value)
    upper.at_most(opt_a.value, 4.0 * opt_n.value)
    upper.observe(safe_ratio(opt_a.value, opt_n.value))
    witnesses.equal(context.spread(opt_n.witness_set), opt_n.value, "OPT_N witness")
    witnesses.equal(context.tree_value(opt_a.witness_tree, 1), opt_a.value, "OPT_A witness tree")

    hybrid = CheckAccumulator(GAP, "sigma_at_most_sigma_3", index)
    adaptive_to_walk = CheckAccumulator(GAP, "sigma_3_at_most_2_walk_sigma_2", index)
    walk = CheckAccumulator(GAP, "2_walk_sigma_2_at_most_4_walk_sigma", index)
    total = CheckAccumulator(GAP, "sigma_at_most_4_walk_sigma", index)
    for name, tree in (("opt-adaptive", opt_a.witness_tree), ("greedy-adaptive", context.adaptive_greedy_tree)):
        sigma = context.tree_value(tree, 1)
        sigma_three = context.tree_value(tree, 3)
        walk_one = context.walk_value(tree, 1)
        walk_two = context.walk_value(tree, 2)
        hybrid.at_most(sigma, sigma_three, name)
        adaptive_to_walk.at_most(sigma_three, 2.0 * walk_two, name)
        walk.at_most(2.0 * walk_two, 4.0 * walk_one, name)
        total.at_most(sigma, 4.0 * walk_one, name)
    return [lower.verdict(), upper.verdict(), witnesses.verdict(), hybrid.verdict(), adaptive_to_walk.verdict(),
            walk.verdict(), total.verdict()]


def _check_greedy_ratio(context: InstanceContext) -> List[Verdict]:
    index = context.instance.index
    k = context.k
    factor = 1.0 - (1.0 - 1.0 / k) ** k
    opt_n = context.opt_n.value
    opt_a = context.opt_a.value
    greedy_value = context.spread(context.greedy.seeds)
    adaptive_value = context.tree_value(context.adaptive_greedy_tree, 1)
    verdicts = []
    for name, value in (("greedy_nonadaptive", greedy_value), ("greedy_adaptive", adaptive_value)):
        against_n = CheckAccumulator(GREEDY_RATIO, f"{name}_vs_opt_n", index)
        against_n.at_most(factor * opt_n, value)
        against_n.observe(safe_ratio(value, opt_n))
        against_a = CheckAccumulator(GREEDY_RATIO, f"{name}_vs_quarter_opt_a", index)
        against_a.at_most(0.25 * factor * opt_a, value)
        against_a.observe(safe_ratio(value, opt_a))
        verdicts.extend([against_n.verdict(), against_a.verdict()])
    return verdicts


def _check_g_of_w(context: InstanceContext) -> List[Verdict]:
    index = context.instance.index
    n = context.graph.n
    wrapped = gen_g_of_w(context.graph, G_OF_W_WEIGHT).graph
    wrapped_evaluator = ExactEvaluator(wrapped, context.cfg.exact_edge_limit)
    policy = AdaptiveGreedyPolicy(Budget(context.k), context.cfg, wrapped_evaluator)
    tree = materialize_tree(wrapped, policy)
    only_g1 = CheckAccumulator(G_OF_W, "adaptive_greedy_selects_only_g1", index)
    for node in tree.internal_nodes():
        only_g1.holds(node.action < n, f"selected G2 node {node.action}")
    value = CheckAccumulator(G_OF_W, "adaptive_greedy_value_is_w_greedy_plus_k", index)
    wrapped_value = exact_policy_value(wrapped, TreePolicy.from_tree(tree), 1, context.cfg, wrapped_evaluator)
    value.equal(wrapped_value, G_OF_W_WEIGHT * context.spread(context.greedy.seeds) + context.k)
    return [only_g1.verdict(), value.verdict()]


def _check_live_edge(context: InstanceContext) -> List[Verdict]:
    graph = context.graph
    index = context.instance.index
    monotone = CheckAccumulator(LIVE_EDGE, "reach_monotone_per_realization", index)
    submodular = CheckAccumulator(LIVE_EDGE, "reach_submodular_per_realization", index)
    if graph.num_edges > LIVE_EDGE_MAX_EDGES:
        return [monotone.verdict(), submodular.verdict()]

    realizations = 2 ** graph.num_edges
    single = numpy.zeros((realizations, graph.n, graph.n), dtype=numpy.bool_)
    for live in range(realizations):
        for node in range(graph.n):
            single[live, node, mask_nodes(reachable_set(graph, [node], live))] = True
    values = numpy.zeros((realizations, 2 ** graph.n), dtype=numpy.float64)
    for subset in range(1, 2 ** graph.n):
        values[:, subset] = single[:, mask_nodes(subset), :].any(axis=1) @ graph.weight_array

    for subset in range(2 ** graph.n):
        outside = [node for node in range(graph.n) if not (subset >> node) & 1]
        for node in outside:
            gain = values[:, subset | (1 << node)] - values[:, subset]
            monotone.at_most(0.0, float(gain.min()), f"S={mask_nodes(subset)} v={node}")
            for other in outside:
                if other == node:
                    continue
                larger = subset | (1 << other)
                larger_gain = values[:, larger | (1 << node)] - values[:, larger]
                submodular.at_most(float((larger_gain - gain).max()), 0.0,
                                   f"S={mask_nodes(subset)} w={other} v={node}")
    return [monotone.verdict(), submodular.verdict()]


def _verify_chain_instance(argument: Tuple[CorpusInstance, int]) -> List[Verdict]:
    instance, exact_edge_limit = argument
    graph = instance.graph
    expanded, heads = expand_chains(graph)
    evaluator = ExactEvaluator(graph, exact_edge_limit)
    expanded_evaluator = ExactEvaluator(expanded, exact_edge_limit)
    equal = CheckAccumulator(CHAIN, "weighted_spread_equals_chain_spread", instance.index)
    for size in (1, 2):
        for seeds in itertools.combinations(range(graph.n), size):
            expanded_seeds = [heads[seed] for seed in seeds]
            equal.equal(evaluator.expected_utility(seeds), expanded_evaluator.expected_utility(expanded_seeds),
                        f"S={list(seeds)}")
    return [equal.verdict()]
