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
"""errors.py

This module contains the exceptions raised by im-lab's library functions.

Every exception carries the exit code which the command-line interfaces
use when they stop because of it:
* 2 ~ usage or input error (bad graph file, bad flags, broken policy)
* 3 ~ resource-guard refusal (an exact computation or construction would be too large)
"""

# IMPORTS
# External modules
from dataclasses import dataclass
from typing import List


# CONSTANT SECTION
EXIT_OK = 0
EXIT_VERIFICATION_FAILURE = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


# CLASSES SECTION
class ImLabError(Exception):
    """Base class of all im-lab errors."""
    exit_code: int = EXIT_USAGE


@dataclass(frozen=True)
class GraphViolation:
    """One broken invariant of an influence graph.

    Arguments
    ----------
    * code: str ~ One of DuplicateEdge, SelfLoop, ProbOutOfRange, NegativeWeight,
      UnsortedEdges, NodeOutOfRange, WeightCountMismatch.
    * message: str ~ Human-readable description naming the offending edge or node.
    """
    code: str
    message: str


class GraphValidationError(ImLabError):
    """Raised when a graph breaks one or more invariants; holds every violation found."""

    def __init__(self, violations: List[GraphViolation]) -> None:
        self.violations = list(violations)
        summary = "; ".join(f"{v.code}: {v.message}" for v in self.violations)
        super().__init__(f"Invalid influence graph ({len(self.violations)} violation(s)): {summary}")

    @property
    def codes(self) -> List[str]:
        return [violation.code for violation in self.violations]


class ParseError(ImLabError):
    pass


class NonIntegerWeight(ImLabError):
    pass


class SelectorArityMismatch(ImLabError):
    pass


class WrongConstruction(ImLabError):
    pass


class InvalidSeedSet(ImLabError):
    pass


class InvalidBudget(ImLabError):
    pass


class PolicyViolatesBudget(ImLabError):
    pass


class PolicyRepeatsSeed(ImLabError):
    pass


class TooLargeForExact(ImLabError):
    exit_code = EXIT_GUARD


class TreeTooLarge(ImLabError):
    exit_code = EXIT_GUARD


class ConstructionTooLarge(ImLabError):
    exit_code = EXIT_GUARD


class CorpusTooLarge(ImLabError):
    exit_code = EXIT_GUARD
