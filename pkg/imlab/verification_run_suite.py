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
"""verification_run_suite.py

CLI running the exact verification suites over a seeded corpus of small graphs.
"""

# IMPORTS
# External modules
import click
from typing import Optional
# Internal modules
from .submodules.experiments import verify_command
from .submodules.helper_general import set_quiet
from .submodules.reports import run_report_command
from .submodules.verification import ALL, MAX_CORPUS_INSTANCES, MAX_CORPUS_N, SUITES


# Set-up command-line parameters using click decorators
@click.command("verify")
@click.option("--suite", type=click.Choice(SUITES + (ALL,)), default=ALL, show_default=True,
              help="Which property suite to check")
@click.option("--instances", type=click.IntRange(min=1), default=200, show_default=True,
              help=f"Corpus size (refused above {MAX_CORPUS_INSTANCES})")
@click.option("--max-n", type=click.IntRange(min=2), default=5, show_default=True,
              help=f"Largest corpus graph (refused above {MAX_CORPUS_N} nodes)")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True,
              help="64-bit seed of the corpus generator")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker processes, one corpus instance per task")
@click.option("--exact-edge-limit", type=click.IntRange(min=0), default=22, show_default=True,
              help="Exactness guard: at most this many undecided edges reachable from the seeds")
@click.option("--xlsx", type=click.Path(dir_okay=False, writable=True),
              help="Also write the verdicts as a spreadsheet")
@click.option("--out", type=click.Path(dir_okay=False, writable=True),
              help="Path of the JSON report (default: standard output)")
@click.option("--no-timestamp", is_flag=True, help="Leave the timestamp out of the report")
@click.option("--quiet", is_flag=True, help="Suppress INFO status lines")
def verify_cli(suite: str, instances: int, max_n: int, seed: int, workers: int, exact_edge_limit: int,
               xlsx: Optional[str], out: Optional[str], no_timestamp: bool, quiet: bool) -> None:
    """Checks the aggregation, hybrid, telescoping, gap, greedy-ratio, G(w), live-edge and
    chain properties on every corpus instance. Any failed verdict gives exit code 1.

    Example
    ----------
    All suites on 200 instances with at most 5 nodes, verdicts also as spreadsheet
    <pre>
    python verification_run_suite.py --suite all --instances 200 --seed 0 --xlsx verdicts.xlsx
    </pre>
    """
    set_quiet(quiet)
    run_report_command(lambda: verify_command(suite, instances, seed, max_n, workers, exact_edge_limit, xlsx,
                                              no_timestamp),
                       out)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    verify_cli()
    pass
