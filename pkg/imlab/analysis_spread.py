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
"""analysis_spread.py

CLI for the expected (aggregate) spread of a fixed seed set.
"""

# IMPORTS
# External modules
import click
from typing import Optional
# Internal modules
from .submodules.experiments import estimator_config, spread_command
from .submodules.helper_general import set_quiet
from .submodules.reports import run_report_command


# Set-up command-line parameters using click decorators
@click.command("spread")
@click.option("--graph",
              required=True,
              type=click.Path(exists=True, dir_okay=False, readable=True),
              help="Influence graph JSON")
@click.option("--seeds",
              default="",
              help="Comma-separated seed node ids, e.g. '0,3,5' (empty: no seeds)")
@click.option("--t", type=click.IntRange(min=1), default=1, show_default=True,
              help="Number of independent copies whose live edges are unioned")
@click.option("--mode", type=click.Choice(["exact", "mc", "auto"]), default="auto", show_default=True,
              help="Exact enumeration, Monte Carlo, or exact when within the guard")
@click.option("--replicates", type=click.IntRange(min=1), default=10000, show_default=True,
              help="Monte Carlo replicates")
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
def spread_cli(graph: str, seeds: str, t: int, mode: str, replicates: int, seed: int, workers: int,
               exact_edge_limit: int, out: Optional[str], lenient: bool, no_timestamp: bool, quiet: bool) -> None:
    """Estimates sigma^t(S), the expected weight reached from S when the live edges
    of t independent copies are unioned (t = 1 is the ordinary spread).

    Example
    ----------
    Exact spread of the seed set {0} in 'path.json' with two aggregated copies
    <pre>
    python analysis_spread.py --graph path.json --seeds 0 --t 2 --mode exact --no-timestamp
    </pre>
    """
    set_quiet(quiet)
    run_report_command(lambda: spread_command(graph, seeds, t,
                                              estimator_config(mode, replicates, seed, workers, exact_edge_limit),
                                              lenient, no_timestamp),
                       out)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    spread_cli()
    pass
