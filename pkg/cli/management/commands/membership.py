from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Decide whether C belongs to C(R) for a finite family R."
    command = Cmd.MEMBERSHIP
    path_options = {"C": "c", "A": "family"}
    value_options = {"copies": "copies", "trials": "trials", "points": "points"}

    def add_inputs(self, parser):
        parser.add_argument("--C", required=True, metavar="FILE")
        parser.add_argument("--A", nargs="+", required=True, metavar="FILE", help="Family members.")
        parser.add_argument("--copies", type=int, help="Largest copy number checked (default 3).")
        parser.add_argument("--trials", type=int, help="Random tests per oracle (default 1000).")
        parser.add_argument("--points", type=int, help="Weight grid of the two-member scan.")
