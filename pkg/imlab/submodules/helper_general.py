#!/usr/bin/env python3
#
# Copyright 2018-2020 PSB
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
"""helper_general.py

This module contains functions which are useful for a multitude of programs,
and which are hard to be categorized.
"""

# IMPORTS
# External modules
import click
import json
import os
import tempfile
from pebble import ProcessPool
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar


# TYPES SECTION
T = TypeVar("T")
R = TypeVar("R")


# CONSTANT SECTION
# Timeout in seconds for one task sent to a worker process; None means no timeout.
WORKER_TASK_TIMEOUT = None
# Set by the command-line interfaces with --quiet; suppresses INFO lines.
QUIET = False


# PUBLIC FUNCTIONS SECTION
def set_quiet(quiet: bool) -> None:
    """Switches INFO status lines off (True) or on (False)."""
    global QUIET
    QUIET = quiet


def print_status(level: str, message: str) -> None:
    """Prints a status line such as 'INFO: ...' on standard error.

    Standard output is reserved for the JSON reports of the command-line interfaces.

    Arguments
    ----------
    * level: str ~ One of INFO, WARNING, ERROR.
    * message: str ~ The message text.
    """
    if level == "INFO" and QUIET:
        return
    click.echo(f"{level}: {message}", err=True)


def parallel_map(function: Callable[[T], R], arguments: Sequence[T], workers: int = 1) -> List[R]:
    """Applies the function to every argument and returns the results in argument order.

    With more than one worker, the arguments are distributed over a pebble process pool.
    The results do not depend on the number of workers as long as the function is pure.

    Arguments
    ----------
    * function: Callable ~ A module-level (picklable) function.
    * arguments: Sequence ~ One picklable argument per call.
    * workers: int = 1 ~ Number of worker processes; 1 runs everything in this process.
    """
    if workers <= 1 or len(arguments) <= 1:
        return [function(argument) for argument in arguments]
    with ProcessPool(max_workers=min(workers, len(arguments))) as pool:
        future = pool.map(function, arguments, timeout=WORKER_TASK_TIMEOUT)
        return list(future.result())


def ensure_folder_existence(folder: str) -> None:
    """Checks if the given folder exists. If not, the folder is created.

    Argument
    ----------
    * folder: str ~ The folder whose existence shall be enforced.
    """
    if folder == "" or os.path.isdir(folder):
        return
    os.makedirs(folder)


def json_load(path: str) -> Dict[Any, Any]:
    """Loads the given JSON file and returns it as dictionary.

    Arguments
    ----------
    * path: str ~ The path of the JSON file
    """
    with open(path, encoding="utf-8") as f:
        dictionary = json.load(f)
    return dictionary


def json_dumps(dictionary: Dict[Any, Any]) -> str:
    """Returns the canonical text of a JSON document as written by json_write()."""
    return json.dumps(dictionary, indent=4) + "\n"


def json_write(path: str, dictionary: Dict[Any, Any]) -> None:
    """Writes a JSON file at the given path with the given dictionary as content.

    Arguments
    ----------
    * path: str ~  The path of the JSON file that shall be written
    * dictionary: Dict[Any, Any] ~ The dictionary which shall be the content of
      the created JSON file
    """
    write_atomically(path, json_dumps(dictionary).encode("utf-8"))


def write_atomically(path: str, content: bytes) -> None:
    """Writes the content to a temporary file next to path and renames it to path.

    A failing run therefore never leaves a partially written file behind.

    Arguments
    ----------
    * path: str ~ The target file path.
    * content: bytes ~ The complete file content.
    """
    folder = os.path.dirname(os.path.abspath(path))
    ensure_folder_existence(folder)
    handle, temporary_path = tempfile.mkstemp(dir=folder, prefix=".imlab-", suffix=".tmp")
    try:
        with os.fdopen(handle, "wb") as f:
            f.write(content)
        os.replace(temporary_path, path)
    except BaseException:
        if os.path.exists(temporary_path):
            os.remove(temporary_path)
        raise


def parse_node_list(text: str) -> List[int]:
    """Parses a comma-separated node id list such as '0,3,5'; the empty string gives [].

    Arguments
    ----------
    * text: str ~ The list as given on the command line.
    """
    stripped = text.strip()
    if stripped == "":
        return []
    return [int(part) for part in stripped.split(",")]


def chunked(items: Iterable[T], size: int) -> List[List[T]]:
    """Splits the items into consecutive lists of at most size elements."""
    chunks: List[List[T]] = []
    current: List[T] = []
    for item in items:
        current.append(item)
        if len(current) == size:
            chunks.append(current)
            current = []
    if current:
        chunks.append(current)
    return chunks


def safe_ratio(numerator: float, denominator: float) -> Optional[float]:
    """numerator / denominator, or None for a zero denominator (all-zero node weights)."""
    if denominator == 0.0:
        return None
    return numerator / denominator
