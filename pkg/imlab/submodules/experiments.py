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
"""experiments.py

This module contains the work behind every im-lab command. Each function
validates its inputs, computes, and returns an ExperimentReport; nothing is
written before the computation succeeded.
"""

# IMPORTS
# External modules
import json
import math
import os
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple
# Internal modules
from .constructions import (BAD_EXAMPLE, BIPARTITE_GAP, G_OF_W, RANDOM, Construction, ConstructionMetadata,
                            bad_example_closed_forms, gen_bad_example, gen_bipartite_gap, gen_g_of_w, gen_random)
from .decision_tree import TreePolicy, materialize_tree
from .errors import ParseError, TooLargeForExact
from .exact_enumeration import ExactEvaluator
from .graph_core import Budget, InfluenceGraph, graph_digest, load_graph, save_graph
from .helper_general import json_load, json_write, parse_node_list, print_status, safe_ratio, write_atomically
from .optimal import opt_adaptive, opt_nonadaptive, opt_pair
from .policies import (AdaptiveGreedyPolicy, bad_example_reference_policy, build_policy, greedy_nonadaptive,
                       greedy_nonadaptive_multitree)
from .reports import ExperimentReport, export_verdicts_xlsx, new_report, verdict_entry
from .spread import (EXACT, MONTE_CARLO, EstimatorConfig, SpreadEstimate, aggregate_spread_set, exact_policy_value,
                     policy_spread, simulate_policy, simulate_policy_batch)
from .verification import run_verification


# CONSTANT SECTION
# Command-line name of the Monte Carlo mode
MC = "mc"
# Number of standard errors within which a Monte Carlo estimate must match its reference
STDERR_FACTOR = 4.0
# Allowed distance of the finite-d bad-example ratio from its limit
BAD_EXAMPLE_RATIO_TOLERANCE = 0.02
BIPARTITE_NOTE = ("The asymptotic e/(e-1) adaptivity gap of the bipartite construction needs m >= 3, "
                  "which exceeds the construction guard; m = 2 only shows a gap above 1.")
ZERO_SPREAD_NOTE = "The denominator spread is 0 (all reachable weights are 0), so the ratio is undefined."
INTEGRALITY_NOTE = ("The closed form counts 2d/(e+1) + 1 V2 picks, which is not an integer; "
                    "greedy_closed_form_for_trace evaluates it at greedy's actual V2 count.")


# PUBLIC FUNCTIONS SECTION
def estimator_config(mode: str, replicates: int, seed: int, workers: int, exact_edge_limit: int = 22,
                     chunk_size: int = 1024, stream_tag: str = "spread") -> EstimatorConfig:
    """Maps the command-line estimation flags onto an EstimatorConfig ('mc' means Monte Carlo)."""
    return EstimatorConfig(mode=MONTE_CARLO if mode == MC else mode, replicates=replicates, base_seed=seed,
                           exact_edge_limit=exact_edge_limit, workers=workers, chunk_size=chunk_size,
                           stream_tag=stream_tag)


def read_graph(path: str, lenient: bool = False) -> InfluenceGraph:
    with open(path, "rb") as f:
        return load_graph(f.read(), lenient)


def read_metadata(path: str) -> ConstructionMetadata:
    try:
        return ConstructionMetadata.from_dict(json_load(path))
    except json.JSONDecodeError as error:
        raise ParseError(f"Metadata file {path} is not valid JSON: {error}") from error


def metadata_path_for(graph_path: str) -> str:
    """The default sidecar path: 'graph.json' -> 'graph.meta.json'."""
    return os.path.splitext(graph_path)[0] + ".meta.json"


def gen_command(construction: str, out: str, metadata_out: Optional[str], params: Dict[str, Any],
                base_path: Optional[str], lenient: bool, no_timestamp: bool) -> ExperimentReport:
    """Generates a construction and writes the graph JSON plus its metadata sidecar.

    Arguments
    ----------
    * construction: str ~ bipartite-gap, bad-example, g-of-w or random.
    * out: str ~ Path of the graph JSON.
    * metadata_out: Optional[str] ~ Path of the sidecar, metadata_path_for(out) if None.
    * params: Dict[str, Any] ~ The construction parameters (m; d, w; w; n, p_edge, p_low, p_high, seed, max_weight).
    * base_path: Optional[str] ~ Base graph of g-of-w.
    * lenient: bool ~ Re-sort unsorted edges of the base graph.
    * no_timestamp: bool ~ Leave the timestamp out of the report.
    """
    if construction == BIPARTITE_GAP:
        result = gen_bipartite_gap(params["m"])
    elif construction == BAD_EXAMPLE:
        result = gen_bad_example(params["d"], params["w"])
    elif construction == G_OF_W:
        result = gen_g_of_w(read_graph(base_path, lenient), params["w"])
    else:
        graph = gen_random(params["n"], params["p_edge"], params["p_low"], params["p_high"], params["seed"],
                           max_weight=params["max_weight"])
        result = Construction(graph, None, ConstructionMetadata(RANDOM, dict(params)))

    metadata_out = metadata_out or metadata_path_for(out)
    write_atomically(out, save_graph(result.graph))
    json_write(metadata_out, result.metadata.to_dict())
    print_status("INFO", f"Wrote {construction} graph with {result.graph.n} nodes and "
                         f"{result.graph.num_edges} edges to {out}")

    report = new_report("gen", {"construction": construction, "params": params, "out": out,
                                "metadata_out": metadata_out}, no_timestamp)
    report.graph_digest = graph_digest(result.graph)
    report.results = {
        "n": result.graph.n,
        "edges": result.graph.num_edges,
        "budget": result.metadata.budget,
        "budget_real": result.metadata.budget_real,
    }
    return report


def spread_command(graph_path: str, seeds_text: str, t: int, cfg: EstimatorConfig, lenient: bool,
                   no_timestamp: bool) -> ExperimentReport:
    """sigma^t(S) of the given seed list ('0,3,5'; empty for S = {})."""
    graph = read_graph(graph_path, lenient)
    seeds = _parse_seeds(seeds_text)
    estimate = aggregate_spread_set(graph, seeds, t, cfg)
    report = new_report("spread", {"graph": graph_path, "seeds": seeds, "t": t, "estimator": cfg.to_dict()},
                        no_timestamp)
    report.graph_digest = graph_digest(graph)
    report.results = {"spread": estimate.to_dict()}
    return report


def greedy_command(graph_path: str, k: int, adaptive: bool, cfg: EstimatorConfig, hidden_replicates: int,
                   traces: bool, lenient: bool, no_timestamp: bool) -> ExperimentReport:
    """Runs non-adaptive greedy (seed trace and spread) or adaptive greedy (policy spread and run traces).

    Arguments
    ----------
    * graph_path: str ~ The graph JSON.
    * k: int ~ The budget.
    * adaptive: bool ~ Run the adaptive greedy algorithm.
    * cfg: EstimatorConfig ~ Estimation settings of the marginal gains.
    * hidden_replicates: int ~ Hidden realizations of the adaptive Monte Carlo evaluation.
    * traces: bool ~ Keep the per-run traces of the adaptive Monte Carlo evaluation.
    * lenient: bool ~ Re-sort unsorted edges.
    * no_timestamp: bool ~ Leave the timestamp out of the report.
    """
    graph = read_graph(graph_path, lenient)
    budget = Budget.for_graph(k, graph)
    report = new_report("greedy", {"graph": graph_path, "k": k, "adaptive": adaptive, "estimator": cfg.to_dict(),
                                   "hidden_replicates": hidden_replicates}, no_timestamp)
    report.graph_digest = graph_digest(graph)

    evaluator = ExactEvaluator(graph, cfg.exact_edge_limit)
    if not adaptive:
        result = greedy_nonadaptive(graph, budget.k, cfg, evaluator)
        value = aggregate_spread_set(graph, result.seeds, 1, cfg.with_stream(f"{cfg.stream_tag}:value"), evaluator)
        report.results = {"algorithm": "greedy-nonadaptive", "greedy": result.to_dict(), "spread": value.to_dict()}
        return report

    policy = AdaptiveGreedyPolicy(budget, cfg, evaluator)
    results: Dict[str, Any] = {"algorithm": "greedy-adaptive"}
    if cfg.mode != MONTE_CARLO:
        try:
            tree = materialize_tree(graph, policy)
            value = exact_policy_value(graph, TreePolicy.from_tree(tree), 1, cfg, evaluator)
            results["spread"] = SpreadEstimate.of_exact(value).to_dict()
            results["tree_size"] = tree.size
            results["selected_nodes"] = sorted({node.action for node in tree.internal_nodes()})
            report.results = results
            return report
        except TooLargeForExact:
            if cfg.mode == EXACT:
                raise
            print_status("WARNING", "The adaptive greedy tree exceeds the exactness guard, simulating instead")
    simulation_cfg = cfg.with_stream(f"{cfg.stream_tag}:adaptive-runs")
    simulation_cfg = replace(simulation_cfg, replicates=hidden_replicates)
    estimate, run_traces = simulate_policy(graph, policy, 1, simulation_cfg, keep_traces=True)
    results["spread"] = estimate.to_dict()
    results["selected_nodes"] = sorted({node for trace in run_traces for node in trace["seeds"]})
    if traces:
        results["traces"] = run_traces
    report.results = results
    return report


def opt_command(graph_path: str, k: int, adaptive: bool, exact_edge_limit: int, with_tree: bool, lenient: bool,
                no_timestamp: bool) -> ExperimentReport:
    """The exact OPT_N or OPT_A with its witness."""
    graph = read_graph(graph_path, lenient)
    cfg = EstimatorConfig(mode=EXACT, exact_edge_limit=exact_edge_limit)
    if adaptive:
        result = opt_adaptive(graph, k, cfg, with_tree=with_tree)
    else:
        result = opt_nonadaptive(graph, k, cfg)
    report = new_report("opt", {"graph": graph_path, "k": k, "adaptive": adaptive,
                                "exact_edge_limit": exact_edge_limit}, no_timestamp)
    report.graph_digest = graph_digest(graph)
    report.results = {"objective": "OPT_A" if adaptive else "OPT_N", "opt": result.to_dict()}
    return report


def gap_command(graph_path: str, k: Optional[int], policy_names: Sequence[str], metadata_path: Optional[str],
                cfg: EstimatorConfig, lenient: bool, no_timestamp: bool) -> ExperimentReport:
    """The adaptivity gap of one instance: exact OPT_A / OPT_N, or the ratio of two policies' spreads.

    Arguments
    ----------
    * graph_path: str ~ The graph JSON.
    * k: Optional[int] ~ The budget; taken from the metadata if None.
    * policy_names: Sequence[str] ~ Empty for the exact optima, else (adaptive policy, non-adaptive policy).
    * metadata_path: Optional[str] ~ Construction sidecar (needed by construction policies).
    * cfg: EstimatorConfig ~ Estimation settings of the policy spreads.
    * lenient: bool ~ Re-sort unsorted edges.
    * no_timestamp: bool ~ Leave the timestamp out of the report.
    """
    graph = read_graph(graph_path, lenient)
    metadata = read_metadata(metadata_path) if metadata_path else None
    if k is None:
        if metadata is None or metadata.budget is None:
            raise ParseError("The budget needs --k or a construction metadata file with a budget")
        k = metadata.budget
    budget = Budget.for_graph(k, graph)
    report = new_report("gap", {"graph": graph_path, "k": budget.k, "policies": list(policy_names),
                                "metadata": metadata_path, "estimator": cfg.to_dict()}, no_timestamp)
    report.graph_digest = graph_digest(graph)

    if not policy_names:
        opt_n, opt_a = opt_pair(graph, budget.k, cfg)
        ratio = safe_ratio(opt_a.value, opt_n.value)
        report.results = {"opt_nonadaptive": opt_n.to_dict(), "opt_adaptive": opt_a.to_dict(), "ratio": ratio,
                          "ratio_at_most_4": ratio is None or ratio <= 4.0}
        if ratio is None:
            report.results["note"] = ZERO_SPREAD_NOTE
            report.verdicts = [verdict_entry("ratio_within_1_and_4", opt_a.value <= 0.0, None,
                                             "OPT_N = 0, so the ratio is undefined")]
        else:
            report.verdicts = [verdict_entry("ratio_within_1_and_4", 1.0 - 1e-9 <= ratio <= 4.0 + 1e-9,
                                             min(ratio - 1.0, 4.0 - ratio))]
    else:
        estimates: List[Tuple[str, SpreadEstimate]] = []
        for name in policy_names:
            policy = build_policy(name, graph, budget.k, cfg, metadata)
            estimate = policy_spread(graph, policy, 1, cfg.with_stream(f"{cfg.stream_tag}:gap"))
            print_status("INFO", f"Policy {name}: spread {estimate.value:.6g} (stderr {estimate.stderr:.3g})")
            estimates.append((name, estimate))
        (first_name, first), (second_name, second) = estimates
        ratio = safe_ratio(first.value, second.value)
        combined = math.sqrt(first.stderr ** 2 + second.stderr ** 2)
        report.results = {"policies": {name: estimate.to_dict() for name, estimate in estimates}, "ratio": ratio,
                          "combined_stderr": combined, "ratio_at_most_4": ratio is None or ratio <= 4.0}
        if ratio is None:
            report.results["note"] = ZERO_SPREAD_NOTE
        margin = first.value - second.value - STDERR_FACTOR * combined
        if first.value <= 0.0 and second.value <= 0.0:
            report.verdicts = [verdict_entry(f"{first_name}_exceeds_{second_name}", True, None,
                                             "both spreads are 0, nothing to compare")]
        else:
            report.verdicts = [verdict_entry(f"{first_name}_exceeds_{second_name}", margin > 0.0, margin,
                                             f"difference must exceed {STDERR_FACTOR:g} combined standard errors")]
    if metadata is not None and metadata.construction == BIPARTITE_GAP:
        report.results["note"] = BIPARTITE_NOTE
    return report


def verify_command(suite: str, instances: int, seed: int, max_n: int, workers: int, exact_edge_limit: int,
                   xlsx: Optional[str], no_timestamp: bool) -> ExperimentReport:
    """Runs the exact verification suite(s) over the seeded corpus."""
    result = run_verification(suite, instances, seed, max_n, workers, exact_edge_limit)
    report = new_report("verify", {"suite": suite, "instances": instances, "seed": seed, "max_n": max_n,
                                   "exact_edge_limit": exact_edge_limit}, no_timestamp)
    report.results = {
        "corpus": [instance.to_dict() for instance in result.corpus],
        "summary": result.summary(),
        "passed": result.passed,
    }
    report.verdicts = [verdict.to_dict() for verdict in result.verdicts]
    if xlsx:
        export_verdicts_xlsx(xlsx, result.verdicts)
    return report


def bad_example_command(d: int, w: float, cfg: EstimatorConfig, epsilon: float,
                        no_timestamp: bool) -> ExperimentReport:
    """Reproduces the bad example: greedy's trace and spread, the adaptive reference policy, and their ratio,
    each compared against the closed forms.

    The construction is a multitree, so greedy's marginal gains are computed exactly by
    MultitreeEvaluator; the spreads of greedy's seeds and of the reference policy are
    estimated as configured (both fall back to Monte Carlo beyond the exactness guard).

    Arguments
    ----------
    * d: int ~ Layer size parameter.
    * w: float ~ Weight of the V3 nodes.
    * cfg: EstimatorConfig ~ Estimation settings of greedy's spread; its replicates also drive the reference simulation.
    * epsilon: float ~ Slack of the adaptive lower bound (1 - epsilon) 2dw.
    * no_timestamp: bool ~ Leave the timestamp out of the report.
    """
    construction = gen_bad_example(d, w)
    graph = construction.graph
    metadata = construction.metadata
    closed = bad_example_closed_forms(d, w)
    report = new_report("bad-example", {"d": d, "w": w, "epsilon": epsilon, "estimator": cfg.to_dict()},
                        no_timestamp)
    report.graph_digest = graph_digest(graph)

    greedy = greedy_nonadaptive_multitree(graph, metadata.budget)
    v1 = metadata.node_range("v1")
    v2 = metadata.node_range("v2")
    seeds = greedy.seeds
    v1_first = all(node in v1 for node in seeds[:len(v1)])
    v2_after = all(node in v2 for node in seeds[len(v1):])
    v2_count = sum(1 for node in seeds if node in v2)
    expected_v2_count = math.floor(2 * d / (math.e + 1.0)) + 1

    evaluator = ExactEvaluator(graph, cfg.exact_edge_limit)
    greedy_value = aggregate_spread_set(graph, seeds, 1, cfg.with_stream(f"{cfg.stream_tag}:greedy-value"), evaluator)
    greedy_closed_form = closed.greedy_closed_form
    greedy_for_trace = closed.greedy_value_for_count(v2_count)

    reference_policy = bad_example_reference_policy(graph, metadata)
    reference_value = simulate_policy_batch(graph, reference_policy, cfg.with_stream(f"{cfg.stream_tag}:reference"))
    ratio = safe_ratio(greedy_value.value, reference_value.value)
    ratio_stderr = None
    if ratio is not None and greedy_value.value > 0.0:
        ratio_stderr = ratio * math.sqrt((greedy_value.stderr / greedy_value.value) ** 2
                                         + (reference_value.stderr / reference_value.value) ** 2)

    report.results = {
        "budget": metadata.budget,
        "budget_real": metadata.budget_real,
        "greedy": greedy.to_dict(),
        "greedy_marginals": "exact (multitree propagation)",
        "greedy_v1_picks_first": v1_first,
        "greedy_v2_picks": v2_count,
        "expected_v2_picks": expected_v2_count,
        "greedy_spread": greedy_value.to_dict(),
        "greedy_closed_form": greedy_closed_form,
        "greedy_closed_form_for_trace": greedy_for_trace,
        "integrality_gap": greedy_for_trace - greedy_closed_form,
        "integrality_note": INTEGRALITY_NOTE,
        "reference_spread": reference_value.to_dict(),
        "ratio": ratio,
        "ratio_stderr": ratio_stderr,
        "closed_forms": closed.to_dict(),
    }
    greedy_slack = max(STDERR_FACTOR * greedy_value.stderr, 1e-9 * greedy_closed_form)
    reference_slack = max(STDERR_FACTOR * reference_value.stderr, 1e-9 * closed.adaptive_reference_value)
    lower = closed.opt_adaptive_lower(epsilon)
    ratio_distance = abs(ratio - closed.limit_ratio) if ratio is not None else math.inf
    report.verdicts = [
        verdict_entry("greedy_selects_v1_first_then_v2", v1_first and v2_after, None,
                      f"{len(v1)} V1 nodes, then {v2_count} V2 nodes"),
        verdict_entry("greedy_v2_count_within_1", abs(v2_count - expected_v2_count) <= 1,
                      1.0 - abs(v2_count - expected_v2_count)),
        verdict_entry("greedy_spread_matches_closed_form",
                      abs(greedy_value.value - greedy_closed_form) <= greedy_slack,
                      greedy_slack - abs(greedy_value.value - greedy_closed_form),
                      f"compared against the closed form with {2 * d / (math.e + 1.0) + 1.0:.4g} V2 picks"),
        verdict_entry("reference_spread_matches_closed_form",
                      abs(reference_value.value - closed.adaptive_reference_value) <= reference_slack,
                      reference_slack - abs(reference_value.value - closed.adaptive_reference_value)),
        verdict_entry("reference_spread_at_least_adaptive_lower_bound", reference_value.value >= lower,
                      reference_value.value - lower),
        verdict_entry("ratio_near_limit", ratio_distance <= BAD_EXAMPLE_RATIO_TOLERANCE,
                      BAD_EXAMPLE_RATIO_TOLERANCE - ratio_distance if ratio is not None else None),
    ]
    return report


# INTERNAL FUNCTIONS SECTION
def _parse_seeds(text: str) -> List[int]:
    try:
        return parse_node_list(text)
    except ValueError as error:
        raise ParseError(f"Seeds must be a comma-separated list of node ids, got '{text}'") from error
