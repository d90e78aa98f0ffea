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
"""analysis_bad_example.py

CLI reproducing the construction on which non-adaptive greedy reaches only
about (e^2 + 1) / (e + 1)^2 of the adaptive optimum.
"""

# IMPORTS
# External modules
import click
from typing import Optional
# Internal modules
from .submodules.experiments import bad_example_command, estimator_config
from .submodules.helper_general import set_quiet
from .submodules.reports import run_report_command


# Set-up command-line parameters using click decorators
@click.command("bad-example")
@click.option("--d", required=True, type=click.IntRange(min=2), help="Layer size parameter")
@click.option("--w", required=True, type=click.FloatRange(min=1.0),
              help="Weight of the V3 nodes")
@click.option("--epsilon", type=click.FloatRange(0.0, 1.0), default=0.05, show_default=True,
              help="Slack of the adaptive lower bound (1 - epsilon) 2dw")
@click.option("--mode", type=click.Choice(["exact", "mc", "auto"]), default="auto", show_default=True,
              help="Estimation of the spread of greedy's seeds (its marginal gains are always exact)")
@click.option("--replicates", type=click.IntRange(min=1), default=10000, show_default=True,
              help="Monte Carlo replicates, also used for the reference policy simulation")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True,
              help="64-bit base seed of the Monte Carlo streams")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker processes for Monte Carlo chunks")
@click.option("--exact-edge-limit", type=click.IntRange(min=0), default=22, show_default=True,
              help="Exactness guard: at most this many undecided edges reachable from the seeds")
@click.option("--out", type=click.Path(dir_okay=False, writable=True),
              help="Path of the JSON report (default: standard output)")
@click.option("--no-timestamp", is_flag=True, help="Leave the timestamp out of the report")
@click.option("--quiet", is_flag=True, help="Suppress INFO status lines")
def bad_example_cli(d: int, w: float, epsilon: float, mode: str, replicates: int, seed: int, workers: int,
                    exact_edge_limit: int, out: Optional[str], no_timestamp: bool, quiet: bool) -> None:
    """Builds the bad example for (d, w), runs non-adaptive greedy and the adaptive reference
    policy, and checks both against their closed forms.

    Example
    ----------
    <pre>
    python analysis_bad_example.py --d 100 --w 200 --replicates 100000 --seed 1 --out bad_example.json
    </pre>
    """
    set_quiet(quiet)
    run_report_command(lambda: bad_example_command(d, w,
                                                   estimator_config(mode, replicates, seed, workers,
                                                                    exact_edge_limit, stream_tag="bad-example"),
                                                   epsilon, no_timestamp),
                       out)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    bad_example_cli()
    pass
