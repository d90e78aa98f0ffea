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
"""analysis_greedy.py

CLI for the non-adaptive and the adaptive greedy algorithm.
"""

# IMPORTS
# External modules
import click
from typing import Optional
# Internal modules
from .submodules.experiments import estimator_config, greedy_command
from .submodules.helper_general import set_quiet
from .submodules.reports import run_report_command


# Set-up command-line parameters using click decorators
@click.command("greedy")
@click.option("--graph",
              required=True,
              type=click.Path(exists=True, dir_okay=False, readable=True),
              help="Influence graph JSON")
@click.option("--k", required=True, type=click.IntRange(min=1), help="Seed budget")
@click.option("--adaptive", is_flag=True,
              help="Run adaptive greedy, which observes the feedback of every seed")
@click.option("--mode", type=click.Choice(["exact", "mc", "auto"]), default="auto", show_default=True,
              help="Estimation of the marginal gains")
@click.option("--replicates", type=click.IntRange(min=1), default=10000, show_default=True,
              help="Monte Carlo replicates per marginal gain")
@click.option("--hidden-replicates", type=click.IntRange(min=1), default=1000, show_default=True,
              help="Adaptive greedy: hidden realizations of the Monte Carlo policy evaluation")
@click.option("--no-traces", is_flag=True, help="Adaptive greedy: leave the per-run traces out of the report")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True,
              help="64-bit base seed of the Monte Carlo streams")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker processes for Monte Carlo chunks")
@click.option("--exact-edge-limit", type=click.IntRange(min=0), default=22, show_default=True,
              help="Exactness guard: at most this many undecided edges reachable from the seeds")
@click.option("--out", type=click.Path(dir_okay=False, writable=True),
              help="Path of the JSON report (default: standard output)")
@click.option("--lenient", is_flag=True, help="Re-sort unsorted edges instead of failing")
@click.option("--no-timestamp", is_flag=True, help="Leave the timestamp out of the report")
@click.option("--quiet", is_flag=True, help="Suppress INFO status lines")
def greedy_cli(graph: str, k: int, adaptive: bool, mode: str, replicates: int, hidden_replicates: int,
               no_traces: bool, seed: int, workers: int, exact_edge_limit: int, out: Optional[str], lenient: bool,
               no_timestamp: bool, quiet: bool) -> None:
    """Runs greedy with budget k and reports its seed trace (with every step's marginal gain)
    and its expected spread.

    Adaptive greedy is evaluated exactly over its decision tree when the tree fits the
    guards, otherwise by simulating it on hidden realizations.

    Example
    ----------
    Adaptive greedy with k = 2 on 'star.json', exact marginal gains
    <pre>
    python analysis_greedy.py --graph star.json --k 2 --adaptive --mode exact
    </pre>
    """
    set_quiet(quiet)
    run_report_command(lambda: greedy_command(graph, k, adaptive,
                                              estimator_config(mode, replicates, seed, workers, exact_edge_limit,
                                                               stream_tag="greedy"),
                                              hidden_replicates, not no_traces, lenient, no_timestamp),
                       out)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    greedy_cli()
    pass
