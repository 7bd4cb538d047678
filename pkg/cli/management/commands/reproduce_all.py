from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Run the acceptance suites; exit 2 if any check fails."
    command = Cmd.REPRODUCE_ALL
    value_options = {"quick": "quick", "suite": "suites"}

    def add_inputs(self, parser):
        parser.add_argument("--quick", action="store_true", help="Reduced instance counts.")
        parser.add_argument("--suite", action="append", help="Run only the named suite. Repeatable.")
