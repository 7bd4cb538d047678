from __future__ import annotations

from cli.models import Command as Cmd

from ._base import ReportCommand


class Command(ReportCommand):
    help = "Compare the channel-mean criterion with sampled parallel discrimination strategies."
    command = Cmd.CHANNELS
    path_options = {"E": "e", "N1": "n1", "N2": "n2"}
    value_options = {"copies": "copies", "trials": "trials"}

    def add_inputs(self, parser):
        parser.add_argument("--E", required=True, metavar="FILE", help="Channel JSON: dims plus kraus or choi.")
        parser.add_argument("--N1", required=True, metavar="FILE")
        parser.add_argument("--N2", required=True, metavar="FILE")
        parser.add_argument("--copies", nargs="+", type=int, help="Copy numbers (default 1).")
        parser.add_argument("--trials", type=int)
