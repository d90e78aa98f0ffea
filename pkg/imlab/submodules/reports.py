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
"""reports.py

This module contains the JSON experiment report written by every im-lab
command and the optional XLSX export of verification verdicts.
"""

# IMPORTS
# External modules
import click
import datetime
import os
import sys
import tempfile
import xlsxwriter
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence
# Internal modules
from .errors import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILURE, ImLabError
from .helper_general import ensure_folder_existence, json_dumps, print_status, write_atomically
from .verification import FAIL, Verdict


# CONSTANT SECTION
TOOL_NAME = "im-lab"
TOOL_VERSION = "1.0.0"


# CLASSES SECTION
@dataclass
class ExperimentReport:
    """The single JSON document of one command run.

    Without timestamp, identical configurations give byte-identical reports.
    """
    command: str
    config: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    graph_digest: Optional[str] = None
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    timestamp: Optional[str] = None

    @property
    def failed(self) -> bool:
        return any(verdict.get("status") == FAIL for verdict in self.verdicts)

    @property
    def exit_code(self) -> int:
        return EXIT_VERIFICATION_FAILURE if self.failed else EXIT_OK

    def to_dict(self) -> Dict[str, Any]:
        document: Dict[str, Any] = {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": self.command,
            "config": self.config,
            "graph_digest": self.graph_digest,
            "results": self.results,
            "verdicts": self.verdicts,
        }
        if self.timestamp is not None:
            document["timestamp"] = self.timestamp
        return document


# PUBLIC FUNCTIONS SECTION
def new_report(command: str, config: Dict[str, Any], no_timestamp: bool) -> ExperimentReport:
    """Creates an empty report; the timestamp is the current UTC time unless no_timestamp is set."""
    timestamp = None
    if not no_timestamp:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return ExperimentReport(command=command, config=config, timestamp=timestamp)


def verdict_entry(check: str, passed: bool, margin: Optional[float], detail: str = "") -> Dict[str, Any]:
    """A report verdict of a construction experiment."""
    return {"check": check, "status": "pass" if passed else FAIL, "margin": margin, "detail": detail}


def emit_report(report: ExperimentReport, out: Optional[str]) -> None:
    """Writes the report atomically to out, or prints it on standard output if out is None."""
    text = json_dumps(report.to_dict())
    if out is None:
        click.echo(text, nl=False)
        return
    write_atomically(out, text.encode("utf-8"))
    print_status("INFO", f"Report written to {out}")


def export_verdicts_xlsx(path: str, verdicts: Sequence[Verdict]) -> None:
    """Writes one spreadsheet row per verdict; failed rows are highlighted.

    Arguments
    ----------
    * path: str ~ The XLSX file path; written via a temporary file and renamed.
    * verdicts: Sequence[Verdict] ~ The verdicts of a verification run.
    """
    folder = os.path.dirname(os.path.abspath(path))
    ensure_folder_existence(folder)
    handle, temporary_path = tempfile.mkstemp(dir=folder, prefix=".imlab-", suffix=".xlsx")
    os.close(handle)
    try:
        workbook = xlsxwriter.Workbook(temporary_path)
        worksheet = workbook.add_worksheet("Verdicts")
        bold = workbook.add_format()
        bold.set_bold()
        red = workbook.add_format()
        red.set_bg_color("#FF9999")

        header = ["Suite", "Check", "Instance", "Status", "Margin", "Cases", "Observed", "Detail"]
        for column, title in enumerate(header):
            worksheet.write(0, column, title, bold)
        row = 1
        for verdict in verdicts:
            row_format = red if verdict.status == FAIL else None
            values = [verdict.suite, verdict.check, verdict.instance, verdict.status, verdict.margin,
                      verdict.cases, verdict.observed, verdict.detail]
            for column, value in enumerate(values):
                if value is None:
                    worksheet.write_blank(row, column, None, row_format)
                else:
                    worksheet.write(row, column, value, row_format)
            row += 1
        workbook.close()
        os.replace(temporary_path, path)
    except BaseException:
        if os.path.exists(temporary_path):
            os.remove(temporary_path)
        raise
    print_status("INFO", f"Verdict spreadsheet written to {path}")


def run_report_command(build: Callable[[], ExperimentReport], out: Optional[str]) -> None:
    """Runs a command body and exits with its code.

    ImLabError subclasses end the run with an ERROR line and their exit code; ValueError
    and OSError count as usage errors. The report is only written if build() returned.

    Arguments
    ----------
    * build: Callable[[], ExperimentReport] ~ The computation of the command.
    * out: Optional[str] ~ Report path, or None for standard output.
    """
    try:
        report = build()
    except ImLabError as error:
        print_status("ERROR", str(error))
        sys.exit(error.exit_code)
    except (ValueError, OSError) as error:
        print_status("ERROR", str(error))
        sys.exit(EXIT_USAGE)
    emit_report(report, out)
    sys.exit(report.exit_code)
