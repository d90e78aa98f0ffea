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
"""analysis_opt.py

CLI for the exact non-adaptive and adaptive optima of small graphs.
"""

# IMPORTS
# External modules
import click
from typing import Optional
# Internal modules
from .submodules.experiments import opt_command
from .submodules.helper_general import set_quiet
from .submodules.reports import run_report_command


# Set-up command-line parameters using click decorators
@click.command("opt")
@click.option("--graph",
              required=True,
              type=click.Path(exists=True, dir_okay=False, readable=True),
              help="Influence graph JSON")
@click.option("--k", required=True, type=click.IntRange(min=1), help="Seed budget")
@click.option("--adaptive", is_flag=True, help="Compute OPT_A instead of OPT_N")
@click.option("--no-tree", is_flag=True, help="OPT_A: leave the optimal decision tree out of the report")
@click.option("--exact-edge-limit", type=click.IntRange(min=0), default=22, show_default=True,
              help="Exactness guard: at most this many undecided edges reachable from the seeds")
@click.option("--out", type=click.Path(dir_okay=False, writable=True),
              help="Path of the JSON report (default: standard output)")
@click.option("--lenient", is_flag=True, help="Re-sort unsorted edges instead of failing")
@click.option("--no-timestamp", is_flag=True, help="Leave the timestamp out of the report")
@click.option("--quiet", is_flag=True, help="Suppress INFO status lines")
def opt_cli(graph: str, k: int, adaptive: bool, no_tree: bool, exact_edge_limit: int, out: Optional[str],
            lenient: bool, no_timestamp: bool, quiet: bool) -> None:
    """Computes OPT_N (best seed set of size k) or OPT_A (best adaptive policy with k seeds)
    exactly, together with a witness set or decision tree.

    Graphs beyond the exactness guards are refused with exit code 3.

    Example
    ----------
    <pre>
    python analysis_opt.py --graph small.json --k 2 --adaptive
    </pre>
    """
    set_quiet(quiet)
    run_report_command(lambda: opt_command(graph, k, adaptive, exact_edge_limit, not no_tree, lenient,
                                           no_timestamp),
                       out)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    opt_cli()
    pass
