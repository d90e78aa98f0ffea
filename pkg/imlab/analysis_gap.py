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
"""analysis_gap.py

CLI for the adaptivity gap of one graph, either from the exact optima
or from the spreads of two policies.
"""

# IMPORTS
# External modules
import click
import os
from typing import Optional, Tuple
# Internal modules
from .submodules.experiments import estimator_config, gap_command, metadata_path_for
from .submodules.helper_general import set_quiet
from .submodules.policies import POLICY_NAMES
from .submodules.reports import run_report_command


# Set-up command-line parameters using click decorators
@click.command("gap")
@click.option("--graph",
              required=True,
              type=click.Path(exists=True, dir_okay=False, readable=True),
              help="Influence graph JSON")
@click.option("--k", type=click.IntRange(min=1),
              help="Seed budget (default: the budget stored in the construction metadata)")
@click.option("--policy", "policies",
              multiple=True,
              type=click.Choice(POLICY_NAMES),
              help="Give twice: adaptive policy, then non-adaptive policy. Without it, both optima are exact")
@click.option("--metadata",
              type=click.Path(exists=True, dir_okay=False, readable=True),
              help="Construction metadata JSON (default: <graph stem>.meta.json if it exists)")
@click.option("--mode", type=click.Choice(["exact", "mc", "auto"]), default="auto", show_default=True,
              help="Estimation of the policy spreads")
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
def gap_cli(graph: str, k: Optional[int], policies: Tuple[str, ...], metadata: Optional[str], mode: str,
            replicates: int, seed: int, workers: int, exact_edge_limit: int, out: Optional[str], lenient: bool,
            no_timestamp: bool, quiet: bool) -> None:
    """Reports OPT_A / OPT_N and whether the ratio stays within [1, 4].

    With two --policy flags, the spreads of the two policies are compared on common
    random numbers instead; the verdict requires the first to exceed the second by
    more than four combined standard errors.

    Example
    ----------
    The bipartite policy against non-adaptive greedy on the m = 2 bipartite construction
    <pre>
    python analysis_gap.py --graph bip.json --policy bipartite --policy greedy-nonadaptive --mode mc
    </pre>
    """
    set_quiet(quiet)
    if len(policies) not in (0, 2):
        raise click.UsageError("--policy must be given exactly twice or not at all")
    if metadata is None:
        candidate = metadata_path_for(graph)
        metadata = candidate if os.path.exists(candidate) else None
    run_report_command(lambda: gap_command(graph, k, policies, metadata,
                                           estimator_config(mode, replicates, seed, workers, exact_edge_limit,
                                                            stream_tag="gap"),
                                           lenient, no_timestamp),
                       out)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    gap_cli()
    pass
