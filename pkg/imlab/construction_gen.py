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
"""construction_gen.py

CLI for the generation of influence graphs: the bipartite adaptivity gap
construction, the greedy bad example, the G(w) wrapper of a unit-weight graph
and seeded random graphs.
"""

# IMPORTS
# External modules
import click
from typing import Any, Dict, Optional
# Internal modules
from .submodules.constructions import BAD_EXAMPLE, BIPARTITE_GAP, CONSTRUCTIONS, G_OF_W, RANDOM
from .submodules.experiments import gen_command
from .submodules.helper_general import set_quiet
from .submodules.reports import run_report_command


# Set-up command-line parameters using click decorators
@click.command("gen")
@click.option("--construction",
              required=True,
              type=click.Choice(CONSTRUCTIONS),
              help="Which graph to generate")
@click.option("--m", type=click.IntRange(min=2), help="Bipartite gap: size parameter (m^3 right nodes, m^2 per left node)")
@click.option("--d", type=click.IntRange(min=2), help="Bad example: layer size parameter")
@click.option("--w", type=click.FloatRange(min=1.0), help="Bad example and g-of-w: weight of the heavy nodes")
@click.option("--base",
              type=click.Path(exists=True, dir_okay=False, readable=True),
              help="g-of-w: the unit-weight base graph JSON")
@click.option("--n", type=click.IntRange(min=1), help="Random: number of nodes")
@click.option("--p-edge", type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True,
              help="Random: probability that an ordered node pair is an edge")
@click.option("--p-low", type=click.FloatRange(0.0, 1.0), default=0.1, show_default=True,
              help="Random: lower bound of the edge probabilities")
@click.option("--p-high", type=click.FloatRange(0.0, 1.0), default=0.9, show_default=True,
              help="Random: upper bound of the edge probabilities")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True,
              help="Random: 64-bit generator seed")
@click.option("--max-weight", type=click.IntRange(min=1), default=1, show_default=True,
              help="Random: node weights are drawn uniformly from 1..max-weight")
@click.option("--out",
              required=True,
              type=click.Path(dir_okay=False, writable=True),
              help="Path of the generated graph JSON")
@click.option("--metadata-out",
              type=click.Path(dir_okay=False, writable=True),
              help="Path of the construction metadata JSON (default: <out stem>.meta.json)")
@click.option("--report", "report_out",
              type=click.Path(dir_okay=False, writable=True),
              help="Path of the JSON report (default: standard output)")
@click.option("--lenient", is_flag=True, help="Re-sort unsorted edges of the base graph instead of failing")
@click.option("--no-timestamp", is_flag=True, help="Leave the timestamp out of the report")
@click.option("--quiet", is_flag=True, help="Suppress INFO status lines")
def gen_cli(construction: str, m: Optional[int], d: Optional[int], w: Optional[float], base: Optional[str],
            n: Optional[int], p_edge: float, p_low: float, p_high: float, seed: int, max_weight: int, out: str,
            metadata_out: Optional[str], report_out: Optional[str], lenient: bool, no_timestamp: bool,
            quiet: bool) -> None:
    """Generates a construction and writes the graph JSON and its metadata sidecar.

    The metadata stores the construction's parameters, its budget k (if it has one)
    and the node id layout which the construction policies of 'gap' rely on.

    Example
    ----------
    Generate the bad example with d = 20 and w = 100 as 'bad.json' (metadata in 'bad.meta.json')
    <pre>
    python construction_gen.py --construction bad-example --d 20 --w 100 --out bad.json
    </pre>
    """
    set_quiet(quiet)
    params = _construction_params(construction, m, d, w, base, n, p_edge, p_low, p_high, seed, max_weight)
    run_report_command(lambda: gen_command(construction, out, metadata_out, params, base, lenient, no_timestamp),
                       report_out)


# INTERNAL FUNCTIONS SECTION
def _construction_params(construction: str, m: Optional[int], d: Optional[int], w: Optional[float],
                         base: Optional[str], n: Optional[int], p_edge: float, p_low: float, p_high: float,
                         seed: int, max_weight: int) -> Dict[str, Any]:
    """Collects the parameters of the chosen construction; missing ones are usage errors."""
    if construction == BIPARTITE_GAP:
        _require(construction, m=m)
        return {"m": m}
    if construction == BAD_EXAMPLE:
        _require(construction, d=d, w=w)
        return {"d": d, "w": w}
    if construction == G_OF_W:
        _require(construction, w=w, base=base)
        return {"w": w}
    if construction == RANDOM:
        _require(construction, n=n)
        if p_low > p_high:
            raise click.UsageError("--p-low must not exceed --p-high")
        return {"n": n, "p_edge": p_edge, "p_low": p_low, "p_high": p_high, "seed": seed,
                "max_weight": max_weight}
    raise click.UsageError(f"Unknown construction {construction}")


def _require(construction: str, **values: Any) -> None:
    missing = [f"--{name.replace('_', '-')}" for name, value in values.items() if value is None]
    if missing:
        raise click.UsageError(f"The {construction} construction needs {', '.join(missing)}")


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    gen_cli()
    pass
