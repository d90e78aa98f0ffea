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
"""im_lab.py

The im-lab command group, bundling every command-line interface of the package.
"""

# IMPORTS
# External modules
import click
# Internal modules
from . import __version__
from .analysis_bad_example import bad_example_cli
from .analysis_gap import gap_cli
from .analysis_greedy import greedy_cli
from .analysis_opt import opt_cli
from .analysis_spread import spread_cli
from .construction_gen import gen_cli
from .verification_run_suite import verify_cli


@click.group()
@click.version_option(__version__, prog_name="im-lab")
def im_lab_cli() -> None:
    """Exact and Monte Carlo experiments on adaptive influence maximization.

    Example
    ----------
    <pre>
    im-lab gen --construction bipartite-gap --m 2 --out bip.json
    im-lab gap --graph bip.json --policy bipartite --policy greedy-nonadaptive --mode mc
    </pre>
    """


im_lab_cli.add_command(gen_cli)
im_lab_cli.add_command(spread_cli)
im_lab_cli.add_command(greedy_cli)
im_lab_cli.add_command(opt_cli)
im_lab_cli.add_command(gap_cli)
im_lab_cli.add_command(verify_cli)
im_lab_cli.add_command(bad_example_cli)


# Start-up routine if script is called
if __name__ == '__main__':
    # Thanks to the click decorators, the command-line interface
    # function does not need to be called directly. The given
    # console arguments are added automatically.
    im_lab_cli()
    pass
